#include "prevlab/hopf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace prevlab {

namespace {

constexpr double kCandidateResidualTol = 1e-10;
constexpr double kMinDet = 1e-8;
constexpr double kCurveDetFloor = 1e-10;
constexpr double kDedupTol = 1e-6;

std::vector<double> pack(double mu, const Eigen::Vector2d& x) { return {mu, x(0), x(1)}; }

// True partial of component `out` by multi-index (a_mu, a_y, a_z).
double partial_at(const PolyMap& f, int out, unsigned a_mu, unsigned a_y, unsigned a_z,
                  double mu, const Eigen::Vector2d& x) {
  MultiIndex alpha{std::vector<unsigned>{a_mu, a_y, a_z}};
  return partial(f, alpha)(pack(mu, x))[static_cast<size_t>(out)];
}

}  // namespace

PlanarFamily::PlanarFamily(PolyMap map) : f(std::move(map)) {
  if (f.domain_dim() != 3 || f.range_dim() != 2)
    throw std::invalid_argument("planar family must map R^3 = (mu, y, z) to R^2");
}

Eigen::Vector2d PlanarFamily::value(double mu, const Eigen::Vector2d& x) const {
  std::vector<double> v = f(pack(mu, x));
  return Eigen::Vector2d(v[0], v[1]);
}

Eigen::Matrix2d PlanarFamily::space_jacobian(double mu, const Eigen::Vector2d& x) const {
  Eigen::Matrix2d J;
  J(0, 0) = partial_at(f, 0, 0, 1, 0, mu, x);
  J(0, 1) = partial_at(f, 0, 0, 0, 1, mu, x);
  J(1, 0) = partial_at(f, 1, 0, 1, 0, mu, x);
  J(1, 1) = partial_at(f, 1, 0, 0, 1, mu, x);
  return J;
}

Eigen::Vector2d PlanarFamily::mu_derivative(double mu, const Eigen::Vector2d& x) const {
  return Eigen::Vector2d(partial_at(f, 0, 1, 0, 0, mu, x), partial_at(f, 1, 1, 0, 0, mu, x));
}

std::vector<HopfCandidate> find_hopf_candidates(const PlanarFamily& F, const HopfSearchBox& box) {
  // Trace of D_x f as a polynomial, so the 3-equation system is exact.
  PolyMap trace_poly = partial(F.g(), MultiIndex{{0u, 1u, 0u}});
  trace_poly += partial(F.h(), MultiIndex{{0u, 0u, 1u}});

  auto system_value = [&](const Eigen::Vector3d& p) {
    Eigen::Vector2d fx = F.value(p(0), p.tail<2>());
    double tr = trace_poly(pack(p(0), p.tail<2>()))[0];
    return Eigen::Vector3d(fx(0), fx(1), tr);
  };
  auto system_jacobian = [&](const Eigen::Vector3d& p) {
    Eigen::Matrix3d J;
    std::vector<double> at = pack(p(0), p.tail<2>());
    for (int col = 0; col < 3; ++col) {
      std::vector<unsigned> a(3, 0);
      a[static_cast<size_t>(col)] = 1;
      MultiIndex alpha{a};
      std::vector<double> dg = partial(F.f, alpha)(at);
      J(0, col) = dg[0];
      J(1, col) = dg[1];
      J(2, col) = partial(trace_poly, alpha)(at)[0];
    }
    return J;
  };

  std::map<std::array<long, 3>, HopfCandidate> found;
  const int k = std::max(2, box.grid_per_dim);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) {
        Eigen::Vector3d p(
            box.mu_lo + (box.mu_hi - box.mu_lo) * a / double(k - 1),
            box.x_lo + (box.x_hi - box.x_lo) * b / double(k - 1),
            box.x_lo + (box.x_hi - box.x_lo) * c / double(k - 1));
        Eigen::Vector3d G = system_value(p);
        double res = G.lpNorm<Eigen::Infinity>();
        bool ok = false;
        for (int iter = 0; iter < 50; ++iter) {
          Eigen::FullPivLU<Eigen::Matrix3d> lu(system_jacobian(p));
          if (!lu.isInvertible()) break;
          Eigen::Vector3d step = lu.solve(-G);
          double scale = 1.0;
          bool improved = false;
          for (int damp = 0; damp < 8; ++damp) {
            Eigen::Vector3d pn = p + scale * step;
            Eigen::Vector3d Gn = system_value(pn);
            double rn = Gn.lpNorm<Eigen::Infinity>();
            if (rn < res) {
              p = pn;
              G = Gn;
              res = rn;
              improved = true;
              break;
            }
            scale *= 0.5;
          }
          if (!improved) break;
          if (res == 0.0) break;
        }
        ok = res <= kCandidateResidualTol;
        if (!ok) continue;
        Eigen::Matrix2d A = F.space_jacobian(p(0), p.tail<2>());
        if (A.determinant() <= kMinDet) continue;
        std::array<long, 3> key{std::lround(p(0) / kDedupTol), std::lround(p(1) / kDedupTol),
                                std::lround(p(2) / kDedupTol)};
        HopfCandidate cand{p(0), p.tail<2>()};
        found.emplace(key, cand);
      }

  std::vector<HopfCandidate> out;
  out.reserve(found.size());
  for (auto& [key, cand] : found) out.push_back(cand);
  std::sort(out.begin(), out.end(), [](const HopfCandidate& a, const HopfCandidate& b) {
    if (a.mu0 != b.mu0) return a.mu0 < b.mu0;
    if (a.x0(0) != b.x0(0)) return a.x0(0) < b.x0(0);
    return a.x0(1) < b.x0(1);
  });
  return out;
}

namespace {

// Newton corrector for the fixed point at frozen mu; returns false when the
// spatial Jacobian degenerates.
bool correct_fixed_point(const PlanarFamily& F, double mu, Eigen::Vector2d& x) {
  for (int iter = 0; iter < 40; ++iter) {
    Eigen::Vector2d fx = F.value(mu, x);
    if (fx.lpNorm<Eigen::Infinity>() <= 1e-12) return true;
    Eigen::Matrix2d J = F.space_jacobian(mu, x);
    if (std::abs(J.determinant()) < kCurveDetFloor) return false;
    x += J.lu().solve(-fx);
  }
  return F.value(mu, x).lpNorm<Eigen::Infinity>() <= 1e-9;
}

}  // namespace

FixedCurve track_fixed_curve(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0,
                             double dmu, int steps_per_side) {
  if (!(dmu > 0.0)) throw std::invalid_argument("track_fixed_curve requires dmu > 0");
  if (steps_per_side < 1) throw std::invalid_argument("track_fixed_curve requires >= 1 step");
  Eigen::Matrix2d A0 = F.space_jacobian(mu0, x0);
  if (std::abs(A0.determinant()) < kCurveDetFloor)
    throw std::invalid_argument("track_fixed_curve requires det D_x f(mu0, x0) != 0");

  FixedCurve curve;
  curve.x_prime = -A0.lu().solve(F.mu_derivative(mu0, x0));

  const double h = dmu / steps_per_side;
  std::vector<CurveSample> backward;
  for (int dir : {-1, +1}) {
    Eigen::Vector2d x = x0;
    double mu = mu0;
    for (int s = 1; s <= steps_per_side; ++s) {
      Eigen::Matrix2d J = F.space_jacobian(mu, x);
      if (std::abs(J.determinant()) < kCurveDetFloor) {
        curve.truncated = true;
        curve.diagnostic = "det D_x f crossed 1e-10 near mu = " + std::to_string(mu);
        break;
      }
      Eigen::Vector2d slope = -J.lu().solve(F.mu_derivative(mu, x));
      double mu_next = mu0 + dir * s * h;
      Eigen::Vector2d predictor = x + slope * (mu_next - mu);
      if (!correct_fixed_point(F, mu_next, predictor)) {
        curve.truncated = true;
        curve.diagnostic = "corrector lost the curve near mu = " + std::to_string(mu_next);
        break;
      }
      mu = mu_next;
      x = predictor;
      if (dir < 0)
        backward.push_back({mu, x});
      else
        curve.samples.push_back({mu, x});
    }
  }
  std::reverse(backward.begin(), backward.end());
  backward.push_back({mu0, x0});
  backward.insert(backward.end(), curve.samples.begin(), curve.samples.end());
  curve.samples = std::move(backward);
  return curve;
}

double trace_mu_derivative(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0,
                           double y_prime, double z_prime) {
  const PolyMap& f = F.f;
  double g_mu_y = partial_at(f, 0, 1, 1, 0, mu0, x0);
  double g_yy = partial_at(f, 0, 0, 2, 0, mu0, x0);
  double g_yz = partial_at(f, 0, 0, 1, 1, mu0, x0);
  double h_mu_z = partial_at(f, 1, 1, 0, 1, mu0, x0);
  double h_yz = partial_at(f, 1, 0, 1, 1, mu0, x0);
  double h_zz = partial_at(f, 1, 0, 0, 2, mu0, x0);
  return g_mu_y + y_prime * g_yy + z_prime * g_yz + h_mu_z + y_prime * h_yz + z_prime * h_zz;
}

AntisymmetricFrame antisymmetric_coords(const Eigen::Matrix2d& A) {
  if (std::abs(A.trace()) >= 1e-8)
    throw std::invalid_argument("antisymmetric_coords requires |trace A| < 1e-8");
  double det = A.determinant();
  if (det <= 1e-10) throw std::invalid_argument("antisymmetric_coords requires det A > 1e-10");
  AntisymmetricFrame frame;
  frame.omega = std::sqrt(det);
  // T = [e1 | A e1 / omega] satisfies A T = T [[0,-w],[w,0]]: the second
  // column is forced, and A (A e1) = -det e1 closes the loop. Positive det
  // keeps A e1 independent of e1.
  frame.T.col(0) = Eigen::Vector2d(1.0, 0.0);
  frame.T.col(1) = A.col(0) / frame.omega;
  if (std::abs(frame.T(1, 1)) < 1e-14)
    throw std::invalid_argument("antisymmetric_coords: A e1 parallel to e1");
  return frame;
}

double lyapunov_quantity(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0) {
  Eigen::Matrix2d A = F.space_jacobian(mu0, x0);
  AntisymmetricFrame frame = antisymmetric_coords(A);

  // Exact change of coordinates on the polynomial: phi(u) = T^{-1} f(mu0,
  // x0 + T u), carried out on the coefficient table.
  Eigen::MatrixXd embed = Eigen::MatrixXd::Zero(3, 2);
  embed.block<2, 2>(1, 0) = frame.T;
  std::vector<double> offset = {mu0, x0(0), x0(1)};
  PolyMap in_uv = substitute_affine(F.f, offset, embed);
  PolyMap rotated = linear_output_transform(in_uv, frame.T.inverse());

  auto d = [&](int out, unsigned au, unsigned av) {
    MultiIndex alpha{std::vector<unsigned>{au, av}};
    return partial(rotated, alpha)(std::vector<double>{0.0, 0.0})[static_cast<size_t>(out)];
  };

  double g_uuu = d(0, 3, 0), g_uvv = d(0, 1, 2), h_uuv = d(1, 2, 1), h_vvv = d(1, 0, 3);
  double g_uv = d(0, 1, 1), g_uu = d(0, 2, 0), g_vv = d(0, 0, 2);
  double h_uv = d(1, 1, 1), h_uu = d(1, 2, 0), h_vv = d(1, 0, 2);

  return frame.omega * (g_uuu + g_uvv + h_uuv + h_vvv) + g_uv * (g_uu + g_vv) -
         h_uv * (h_uu + h_vv) - g_uu * h_uu + g_vv * h_vv;
}

std::string to_string(HopfClass c) {
  switch (c) {
    case HopfClass::nondegenerate_supercritical: return "nondegenerate-supercritical";
    case HopfClass::nondegenerate_subcritical: return "nondegenerate-subcritical";
    case HopfClass::degenerate_c: return "degenerate-c";
    case HopfClass::degenerate_d: return "degenerate-d";
    case HopfClass::not_hopf: return "not-hopf";
  }
  return "not-hopf";
}

HopfReport hopf_classify_at(const PlanarFamily& F, double mu0, const Eigen::Vector2d& x0) {
  HopfReport report;
  report.mu0 = mu0;
  report.x0 = x0;

  Eigen::Vector2d fx = F.value(mu0, x0);
  Eigen::Matrix2d A = F.space_jacobian(mu0, x0);
  if (fx.lpNorm<Eigen::Infinity>() > 1e-9 || std::abs(A.trace()) > 1e-8 ||
      A.determinant() <= kMinDet) {
    report.classification = HopfClass::not_hopf;
    report.diagnostic = "conditions (a)/(b) fail: |f| = " + std::to_string(fx.norm()) +
                        ", trace = " + std::to_string(A.trace()) +
                        ", det = " + std::to_string(A.determinant());
    return report;
  }

  report.omega = std::sqrt(A.determinant());
  report.eigenvalues[0] = std::complex<double>(0.0, report.omega);
  report.eigenvalues[1] = std::complex<double>(0.0, -report.omega);

  Eigen::Vector2d x_prime = -A.lu().solve(F.mu_derivative(mu0, x0));
  report.trace_mu_deriv = trace_mu_derivative(F, mu0, x0, x_prime(0), x_prime(1));
  report.lyapunov = lyapunov_quantity(F, mu0, x0);

  if (std::abs(report.trace_mu_deriv) < kHopfDegeneracyTol)
    report.classification = HopfClass::degenerate_c;
  else if (std::abs(report.lyapunov) < kHopfDegeneracyTol)
    report.classification = HopfClass::degenerate_d;
  else if (report.lyapunov < 0.0)
    report.classification = HopfClass::nondegenerate_supercritical;
  else
    report.classification = HopfClass::nondegenerate_subcritical;
  return report;
}

std::vector<HopfReport> hopf_classify(const PlanarFamily& F, const HopfSearchBox& box) {
  std::vector<HopfReport> reports;
  for (const HopfCandidate& cand : find_hopf_candidates(F, box))
    reports.push_back(hopf_classify_at(F, cand.mu0, cand.x0));
  return reports;
}

}  // namespace prevlab
