#ifndef PREVLAB_CLI_HPP
#define PREVLAB_CLI_HPP

#include <iosfwd>
#include <map>
#include <string>

namespace prevlab {

/// One experiment: a command, its key-value parameters, and the output
/// prefix. Required keys are validated per command before any computation
/// starts. Every stochastic module receives a sub-seed derived from the
/// single master seed, so one seed pins the whole run.
struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
};

// key = value lines; '#' starts a comment; the command itself comes from a
// "command = ..." line.
ExperimentConfig parse_config_file(const std::string& path);

// Runs one experiment, writing <out>.report.txt and <out>.csv atomically.
// Exit status: 0 success, 2 validation error, 3 numerical failure.
int run_experiment(const ExperimentConfig& config, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace prevlab

#endif
