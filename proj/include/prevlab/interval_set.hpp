#ifndef PREVLAB_INTERVAL_SET_HPP
#define PREVLAB_INTERVAL_SET_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace prevlab {

/// Disjoint finite union of open intervals inside a declared ambient
/// interval. Endpoints are open/closed-agnostic: single points carry no
/// measure and are never stored, and touching intervals are merged.
class IntervalSet {
 public:
  IntervalSet(double ambient_lo, double ambient_hi,
              std::vector<std::pair<double, double>> parts);
  static IntervalSet empty(double ambient_lo, double ambient_hi);

  double ambient_lo() const { return lo_; }
  double ambient_hi() const { return hi_; }
  const std::vector<std::pair<double, double>>& parts() const { return parts_; }
  size_t size() const { return parts_.size(); }

  double measure() const;
  bool contains(double x) const;  // strictly inside some part

 private:
  double lo_, hi_;
  std::vector<std::pair<double, double>> parts_;
};

// Sweep-line set algebra; ambients must agree exactly.
IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_complement(const IntervalSet& a);

// U_n = {x in [0,1] : 0 < 2^n x (mod 1) < 2^-n}: exactly 2^n intervals of
// length 2^-2n, so the measure is exactly 2^-n. Endpoints stay exact in
// binary floating point through n = 25.
IntervalSet binary_shift_set(int n);

// Exact dyadic rational p / 2^log2_den, used to report the binary-shift union
// measures without enumerating the (exponentially many) intervals.
struct DyadicMeasure {
  unsigned __int128 numerator = 0;
  int log2_den = 0;
  double to_double() const;
  // value < 2^-m ?
  bool less_than_pow2(int m) const;
};

// Measure of V over n in (m, n_hi], V = union of U_n, computed exactly with
// integer arithmetic via the 2^-n periodicity of U_n. Valid for n_hi <= 35.
DyadicMeasure binary_shift_union_measure(int m, int n_hi);

// Liouville-type neighborhood: union over 1 <= q <= qmax, 0 <= p <= q of
// (p/q - c/q^n, p/q + c/q^n), clipped to the ambient [0, 1].
IntervalSet liouville_neighborhood(double c, int n, int qmax);

// Text format: "intervals k" then one "a b" line per interval.
std::string write_intervals(const IntervalSet& s);
IntervalSet read_intervals(std::istream& in, double ambient_lo, double ambient_hi);
IntervalSet read_intervals_file(const std::string& path, double ambient_lo, double ambient_hi);

}  // namespace prevlab

#endif
