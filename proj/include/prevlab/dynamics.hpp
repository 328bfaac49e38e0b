#ifndef PREVLAB_DYNAMICS_HPP
#define PREVLAB_DYNAMICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "prevlab/polyjet.hpp"

namespace prevlab {

/// Converged period-p orbit of a polynomial map R^n -> R^n. The points are
/// stored starting from the cyclic rotation with the lexicographically
/// smallest point; multiplier = Df(x_p) ... Df(x_1).
struct PeriodicOrbit {
  int period = 1;
  std::vector<Eigen::VectorXd> points;
  Eigen::MatrixXd multiplier;
  double residual = 0.0;  // max_i |f(x_i) - x_{i+1 mod p}|_inf
};

enum class Stability { hyperbolic, nonhyperbolic, undecided };

// A unit-modulus eigenvalue is a measure-zero coincidence, so the verdict
// carries an explicit band: margins below tol_lo are called nonhyperbolic,
// above tol_hi hyperbolic, and anything between stays undecided.
struct HyperbolicityVerdict {
  std::vector<double> eigenvalue_moduli;  // sorted descending
  double margin = 0.0;                    // min | modulus - 1 |
  Stability verdict = Stability::undecided;
  std::string diagnostic;
};

inline constexpr double kHyperbolicTolLo = 1e-8;
inline constexpr double kHyperbolicTolHi = 1e-6;

struct SeedSpec {
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  int grid_per_dim = 8;         // grid resolution per coordinate of the np-dim seed space
  bool trajectory_seeds = true; // also seed from iterated trajectories of grid starts
  int trajectory_transient = 200;
};

struct OrbitSearchReport {
  std::vector<PeriodicOrbit> orbits;
  long seeds_tried = 0;
  long seeds_converged = 0;
  long seeds_singular = 0;   // abandoned at a singular Jacobian
  long lower_period_hits = 0;
};

// Newton on G(x_1..x_p) = (f(x_1)-x_2, ..., f(x_p)-x_1) from seeded starts.
// Orbits whose period properly divides p are filtered out; duplicates are
// collapsed via the rotation-minimal point rounded to 1e-6.
OrbitSearchReport find_periodic_orbits(const PolyMap& f, int p, const SeedSpec& seeds);

HyperbolicityVerdict hyperbolicity(const PeriodicOrbit& orbit);

// All t > 0 for which prod_i (t M_i) has a unit-modulus eigenvalue:
// t = |lambda|^{-1/p} over the nonzero eigenvalues of prod M_i. The count is
// at most n, which is what makes the nonhyperbolicity set a zero set.
std::vector<double> ray_unit_circle_hits(const std::vector<Eigen::MatrixXd>& matrices);

}  // namespace prevlab

#endif
