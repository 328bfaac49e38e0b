#include "prevlab/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "prevlab/text.hpp"

namespace prevlab {

IntervalSet::IntervalSet(double ambient_lo, double ambient_hi,
                         std::vector<std::pair<double, double>> parts)
    : lo_(ambient_lo), hi_(ambient_hi) {
  if (!(lo_ < hi_)) throw std::invalid_argument("ambient interval must satisfy lo < hi");
  std::vector<std::pair<double, double>> clipped;
  clipped.reserve(parts.size());
  for (auto [a, b] : parts) {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    if (a < b) clipped.emplace_back(a, b);  // degenerate intervals carry no measure
  }
  if (!std::is_sorted(clipped.begin(), clipped.end())) std::sort(clipped.begin(), clipped.end());
  for (auto& [a, b] : clipped) {
    if (!parts_.empty() && a <= parts_.back().second) {
      parts_.back().second = std::max(parts_.back().second, b);
    } else {
      parts_.emplace_back(a, b);
    }
  }
}

IntervalSet IntervalSet::empty(double ambient_lo, double ambient_hi) {
  return IntervalSet(ambient_lo, ambient_hi, {});
}

double IntervalSet::measure() const {
  double total = 0.0;
  for (auto [a, b] : parts_) total += b - a;
  return total;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), std::make_pair(x, hi_ + 1.0));
  if (it == parts_.begin()) return false;
  --it;
  return it->first < x && x < it->second;
}

namespace {

void require_same_ambient(const IntervalSet& a, const IntervalSet& b) {
  if (a.ambient_lo() != b.ambient_lo() || a.ambient_hi() != b.ambient_hi())
    throw std::invalid_argument("interval sets live in different ambient intervals");
}

}  // namespace

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  require_same_ambient(a, b);
  std::vector<std::pair<double, double>> parts = a.parts();
  parts.insert(parts.end(), b.parts().begin(), b.parts().end());
  return IntervalSet(a.ambient_lo(), a.ambient_hi(), std::move(parts));
}

IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b) {
  require_same_ambient(a, b);
  std::vector<std::pair<double, double>> parts;
  size_t i = 0, j = 0;
  while (i < a.parts().size() && j < b.parts().size()) {
    const auto& [a1, a2] = a.parts()[i];
    const auto& [b1, b2] = b.parts()[j];
    double lo = std::max(a1, b1), hi = std::min(a2, b2);
    if (lo < hi) parts.emplace_back(lo, hi);
    if (a2 < b2)
      ++i;
    else
      ++j;
  }
  return IntervalSet(a.ambient_lo(), a.ambient_hi(), std::move(parts));
}

IntervalSet set_complement(const IntervalSet& a) {
  std::vector<std::pair<double, double>> parts;
  double cursor = a.ambient_lo();
  for (auto [x, y] : a.parts()) {
    if (cursor < x) parts.emplace_back(cursor, x);
    cursor = y;
  }
  if (cursor < a.ambient_hi()) parts.emplace_back(cursor, a.ambient_hi());
  return IntervalSet(a.ambient_lo(), a.ambient_hi(), std::move(parts));
}

IntervalSet binary_shift_set(int n) {
  if (n < 1 || n > 25) throw std::invalid_argument("binary_shift_set requires 1 <= n <= 25");
  // 0 < 2^n x (mod 1) < 2^-n unfolds to x in (k 2^-n, k 2^-n + 2^-2n). All
  // endpoints need at most 2n <= 50 mantissa bits, so they are exact doubles.
  const double period = std::ldexp(1.0, -n);
  const double len = std::ldexp(1.0, -2 * n);
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<std::pair<double, double>> parts;
  parts.reserve(static_cast<size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    double a = static_cast<double>(k) * period;
    parts.emplace_back(a, a + len);
  }
  return IntervalSet(0.0, 1.0, std::move(parts));
}

double DyadicMeasure::to_double() const {
  return std::ldexp(static_cast<double>(numerator), -log2_den);
}

bool DyadicMeasure::less_than_pow2(int m) const {
  if (log2_den - m < 0) throw std::invalid_argument("comparison threshold below resolution");
  if (log2_den - m >= 128) return true;
  return numerator < (static_cast<unsigned __int128>(1) << (log2_den - m));
}

namespace {

// Exact measures of T_n = U_n u ... u U_N restricted to left-edge windows,
// in integer units of 2^-2N. Every U_j with j >= n is 2^-n-periodic and each
// period cell starts with the U_n interval (0, 2^-2n), which gives the
// recursion below; memoization keeps it polynomial in N.
class BinaryShiftUnion {
 public:
  using u128 = unsigned __int128;

  explicit BinaryShiftUnion(int n_hi) : N_(n_hi) {
    cell_.resize(static_cast<size_t>(N_) + 2, 0);
    memo_.resize(static_cast<size_t>(N_) + 2);
    for (int n = N_; n >= 1; --n)
      cell_[static_cast<size_t>(n)] = len(n) + 2 * cell(n + 1) - window(n + 1, len(n));
  }

  u128 len(int n) const { return u128{1} << (2 * N_ - 2 * n); }
  u128 period(int n) const { return u128{1} << (2 * N_ - n); }
  u128 cell(int n) const { return n > N_ ? 0 : cell_[static_cast<size_t>(n)]; }

  // measure of T_n over (0, w), w <= period(n)
  u128 window(int n, u128 w) {
    if (n > N_ || w == 0) return 0;
    auto& memo = memo_[static_cast<size_t>(n)];
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    u128 a = std::min(w, len(n));
    u128 per = period(n + 1);
    u128 t1 = (n == N_) ? 0 : (w / per) * cell(n + 1) + window(n + 1, w % per);
    u128 t2 = (n == N_) ? 0 : window(n + 1, a);
    u128 result = a + t1 - t2;
    memo.emplace(w, result);
    return result;
  }

  // measure of U_{m+1} u ... u U_N over [0, 1], in units of 2^-2N
  u128 total(int m) const { return (u128{1} << (m + 1)) * cell_[static_cast<size_t>(m) + 1]; }

 private:
  int N_;
  std::vector<u128> cell_;
  std::vector<std::map<u128, u128>> memo_;
};

}  // namespace

DyadicMeasure binary_shift_union_measure(int m, int n_hi) {
  if (m < 0 || n_hi <= m || n_hi > 35)
    throw std::invalid_argument("binary_shift_union_measure requires 0 <= m < n_hi <= 35");
  BinaryShiftUnion rec(n_hi);
  return DyadicMeasure{rec.total(m), 2 * n_hi};
}

IntervalSet liouville_neighborhood(double c, int n, int qmax) {
  if (!(c > 0.0)) throw std::invalid_argument("liouville_neighborhood requires c > 0");
  if (n < 3) throw std::invalid_argument("liouville_neighborhood requires n >= 3");
  if (qmax < 1 || qmax > 10000)
    throw std::invalid_argument("liouville_neighborhood requires 1 <= qmax <= 10^4");
  std::vector<std::pair<double, double>> parts;
  for (int q = 1; q <= qmax; ++q) {
    double radius = c / std::pow(static_cast<double>(q), n);
    for (int p = 0; p <= q; ++p) {
      double center = static_cast<double>(p) / static_cast<double>(q);
      parts.emplace_back(center - radius, center + radius);
    }
  }
  return IntervalSet(0.0, 1.0, std::move(parts));
}

std::string write_intervals(const IntervalSet& s) {
  std::ostringstream os;
  os << "intervals " << s.size() << '\n';
  for (auto [a, b] : s.parts()) os << format_double(a) << ' ' << format_double(b) << '\n';
  return os.str();
}

IntervalSet read_intervals(std::istream& in, double ambient_lo, double ambient_hi) {
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  auto head = split_ws(line);
  if (head.size() != 2 || head[0] != "intervals")
    throw std::invalid_argument("expected header 'intervals k'");
  long k = parse_long(head[1]);
  std::vector<std::pair<double, double>> parts;
  parts.reserve(static_cast<size_t>(k));
  for (long i = 0; i < k; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("interval file truncated");
    auto tok = split_ws(line);
    if (tok.size() != 2) throw std::invalid_argument("malformed interval line: '" + line + "'");
    parts.emplace_back(parse_double(tok[0]), parse_double(tok[1]));
  }
  return IntervalSet(ambient_lo, ambient_hi, std::move(parts));
}

IntervalSet read_intervals_file(const std::string& path, double ambient_lo, double ambient_hi) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open interval file: " + path);
  return read_intervals(in, ambient_lo, ambient_hi);
}

}  // namespace prevlab
