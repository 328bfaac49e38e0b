#ifndef PREVLAB_HOPF_HPP
#define PREVLAB_HOPF_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "prevlab/polyjet.hpp"

namespace prevlab {

/// One-parameter planar vector field family f(mu, y, z) -> (g, h), stored as
/// a polynomial map R^3 -> R^2 with variable order (mu, y, z).
struct PlanarFamily {
  PolyMap f;

  explicit PlanarFamily(PolyMap map);
  PolyMap g() const { return f.component(0); }
  PolyMap h() const { return f.component(1); }

  Eigen::Vector2d value(double mu, const Eigen::Vector2d& x) const;
  Eigen::Matrix2d space_jacobian(double mu, const Eigen::Vector2d& x) const;  // D_x f
  Eigen::Vector2d mu_derivative(double mu, const Eigen::Vector2d& x) const;   // D_mu f
};

struct HopfCandidate {
  double mu0 = 0.0;
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
};

struct HopfSearchBox {
  double mu_lo = -1.0, mu_hi = 1.0;
  double x_lo = -1.0, x_hi = 1.0;
  int grid_per_dim = 7;
};

// Degeneracy thresholds for conditions (c) and (d); both conditions cut
// measure-zero sets, so exact zeros only occur for symmetric inputs.
inline constexpr double kHopfDegeneracyTol = 1e-8;

// Newton on (g = 0, h = 0, trace D_x f = 0) from grid seeds; only solutions
// with det D_x f > 1e-8 qualify (purely imaginary eigenvalue pair).
std::vector<HopfCandidate> find_hopf_candidates(const PlanarFamily& F, const HopfSearchBox& box);

struct CurveSample {
  double mu = 0.0;
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
};

struct FixedCurve {
  std::vector<CurveSample> samples;   // ascending in mu, includes mu0
  Eigen::Vector2d x_prime = Eigen::Vector2d::Zero();  // (y'(mu0), z'(mu0))
  bool truncated = false;
  std::string diagnostic;
};

// Predictor-corrector continuation of the fixed-point curve over
// [mu0 - dmu, mu0 + dmu]; x'(mu0) = -(D_x f)^{-1} D_mu f by implicit
// differentiation. Stops a branch when |det D_x f| falls below 1e-10.
FixedCurve track_fixed_curve(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0,
                             double dmu, int steps_per_side = 40);

// Condition (c) quantity: the mu-derivative of trace D_x f(mu, x(mu)) at mu0,
//   g_{mu y} + y' g_{yy} + z' g_{yz} + h_{mu z} + y' h_{yz} + z' h_{zz},
// evaluated exactly from the polynomial partials.
double trace_mu_derivative(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0,
                           double y_prime, double z_prime);

struct AntisymmetricFrame {
  Eigen::Matrix2d T = Eigen::Matrix2d::Identity();
  double omega = 0.0;
};

// Change of basis with T^{-1} A T = [[0, -omega], [omega, 0]], omega =
// sqrt(det A) > 0. T is pinned by sending e1 to itself: T = [e1 | A e1 /
// omega], which is the identity when A is already in normal form. Requires
// |trace A| < 1e-8 and det A > 1e-10.
AntisymmetricFrame antisymmetric_coords(const Eigen::Matrix2d& A);

// Condition (d) quantity in the rotated (u, v) frame:
//   omega (g_uuu + g_uvv + h_uuv + h_vvv) + g_uv (g_uu + g_vv)
//     - h_uv (h_uu + h_vv) - g_uu h_uu + g_vv h_vv,
// where (g, h) are the components of f after the exact polynomial change of
// coordinates by antisymmetric_coords. Negative values correspond to
// supercritical bifurcations (stable cycles), positive to subcritical.
double lyapunov_quantity(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0);

enum class HopfClass {
  nondegenerate_supercritical,
  nondegenerate_subcritical,
  degenerate_c,
  degenerate_d,
  not_hopf,
};

std::string to_string(HopfClass c);

struct HopfReport {
  double mu0 = 0.0;
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  double omega = 0.0;
  std::complex<double> eigenvalues[2];
  double trace_mu_deriv = 0.0;
  double lyapunov = 0.0;
  HopfClass classification = HopfClass::not_hopf;
  std::string diagnostic;
};

// Full pipeline at a known candidate point; reports not_hopf with a
// diagnostic when conditions (a)/(b) fail there.
HopfReport hopf_classify_at(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0);

// Candidate search followed by classification, canonically ordered by mu0.
std::vector<HopfReport> hopf_classify(const PlanarFamily& F, const HopfSearchBox& box);

}  // namespace prevlab

#endif
