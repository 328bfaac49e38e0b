#ifndef PREVLAB_DISCRETE_MEASURE_HPP
#define PREVLAB_DISCRETE_MEASURE_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace prevlab {

struct Atom {
  std::vector<double> point;
  double weight = 0.0;
};

// Membership test for a Borel set, total on R^d.
using SetIndicator = std::function<bool(const std::vector<double>&)>;

/// Finitely many weighted point masses in R^d; compactly supported by
/// construction. Atoms are kept sorted lexicographically and merged when
/// points coincide within 1e-12, so results never depend on the order in
/// which atoms were produced.
class DiscreteMeasure {
 public:
  static constexpr double kMergeTol = 1e-12;

  DiscreteMeasure(int dim, std::vector<Atom> atoms);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return mass_; }

  // Largest pairwise distance between atoms (Euclidean).
  double support_diameter() const;
  bool support_contains_origin(double tol = kMergeTol) const;

  DiscreteMeasure normalized() const;
  DiscreteMeasure translated(std::span<const double> v) const;

  static DiscreteMeasure dirac(std::vector<double> point, double weight = 1.0);
  // k equally weighted atoms on a uniform grid over [lo, hi] (1-D), mass 1.
  static DiscreteMeasure uniform_grid_1d(double lo, double hi, int k);

 private:
  int dim_;
  std::vector<Atom> atoms_;
  double mass_ = 0.0;
};

// Pushforward of the product measure under (x, y) -> x + y: atoms at all
// pairwise sums with weights w_x * w_y. Total mass multiplies.
DiscreteMeasure convolve(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Sum of the weights of the atoms lying in S.
double measure_of(const DiscreteMeasure& mu, const SetIndicator& s);

// mu(S + v), i.e. the mass of atoms x with x - v in S.
double measure_of_translate(const DiscreteMeasure& mu, const SetIndicator& s,
                            std::span<const double> v);

// Convolution of the first N members of a normalized, shrinking family: the
// n-th measure (1-based) must have mass 1, support diameter <= 2^-n, and an
// atom at the origin. Dropping the tail beyond N displaces the support of the
// full infinite convolution by at most sum_{n>N} 2^-n = 2^-N.
DiscreteMeasure convolve_sequence(const std::vector<DiscreteMeasure>& measures, int N);

// Text format: header "measure d k", then k lines "x1 ... xd : w".
std::string write_measure(const DiscreteMeasure& mu);
DiscreteMeasure read_measure(std::istream& in);
DiscreteMeasure read_measure_file(const std::string& path);

}  // namespace prevlab

#endif
