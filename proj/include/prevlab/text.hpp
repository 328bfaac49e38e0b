#ifndef PREVLAB_TEXT_HPP
#define PREVLAB_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace prevlab {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

// Strict parsers; throw std::invalid_argument on malformed input.
double parse_double(std::string_view s);
long parse_long(std::string_view s);

std::vector<std::string> split_ws(std::string_view line);
std::vector<std::string> split_on(std::string_view line, char sep);
std::string trim(std::string_view s);

// Writes content to path via a temporary file in the same directory followed
// by a rename, so a crash never leaves a partial file behind.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace prevlab

#endif
