#include "prevlab/predicates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "prevlab/dynamics.hpp"

namespace prevlab {

namespace {

const PolyMap& as_poly(const FunctionElement& e) {
  const PolyMap* f = std::get_if<PolyMap>(&e);
  if (!f) throw std::invalid_argument("predicate expects a polynomial element");
  return *f;
}

// 8-panel composite 4-point Gauss-Legendre over [0, 1].
double integral_01(const PolyMap& f) {
  static const double nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
  static const double weights[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};
  const int panels = 8;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels;
    double b = static_cast<double>(p + 1) / panels;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 4; ++i) {
      std::vector<double> x = {mid + half * nodes[i]};
      total += weights[i] * half * f(x)[0];
    }
  }
  return total;
}

// All real roots of the scalar polynomial via its companion matrix.
std::vector<double> real_roots(const std::vector<double>& coeffs) {
  // trim numerically dead leading coefficients
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};  // identically zero: handled by the caller
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[static_cast<size_t>(deg)]) <= 1e-14 * scale) --deg;
  if (deg == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  double lead = coeffs[static_cast<size_t>(deg)];
  for (int i = 0; i < deg; ++i) {
    companion(i, deg - 1) = -coeffs[static_cast<size_t>(i)] / lead;
    if (i + 1 < deg) companion(i + 1, i) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<double> roots;
  if (solver.info() != Eigen::Success) return roots;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    std::complex<double> z = solver.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z.real()))) roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

PropertyPredicate integral_nonzero_predicate(double tol) {
  PropertyPredicate p;
  p.name = "integral-nonzero";
  p.evaluate = [tol](const FunctionElement& e, std::uint64_t) {
    const PolyMap& f = as_poly(e);
    if (f.domain_dim() != 1 || f.range_dim() != 1)
      throw std::invalid_argument("integral-nonzero expects a map R -> R");
    return std::abs(integral_01(f)) > tol ? Verdict::holds : Verdict::fails;
  };
  return p;
}

PropertyPredicate fixed_points_hyperbolic_predicate(double box_lo, double box_hi) {
  PropertyPredicate p;
  p.name = "fixed-points-hyperbolic";
  p.evaluate = [box_lo, box_hi](const FunctionElement& e, std::uint64_t) {
    const PolyMap& f = as_poly(e);
    if (f.domain_dim() != 1 || f.range_dim() != 1)
      throw std::invalid_argument("fixed-points-hyperbolic expects a map R -> R");
    // g = f - x; roots of g are the fixed points.
    PolyMap g = f;
    g.add_coeff(MultiIndex::unit(1, 0), 0, -1.0);
    if (g.is_zero()) return Verdict::fails;  // identity map: multiplier 1 everywhere
    std::vector<double> coeffs(g.degree() + 1, 0.0);
    for (const auto& [mi, c] : g.terms()) coeffs[mi.degree()] = c[0];
    PolyMap fprime = partial(f, MultiIndex::unit(1, 0));
    PolyMap gprime = partial(g, MultiIndex::unit(1, 0));

    Verdict verdict = Verdict::holds;
    for (double root : real_roots(coeffs)) {
      if (root < box_lo - 1e-9 || root > box_hi + 1e-9) continue;
      // Newton polish; companion roots are only sqrt(eps)-accurate at double
      // roots, which is exactly where the margin matters.
      double x = root;
      for (int it = 0; it < 6; ++it) {
        double gx = g(std::vector<double>{x})[0];
        double dx = gprime(std::vector<double>{x})[0];
        if (gx == 0.0 || std::abs(dx) < 1e-14) break;
        x -= gx / dx;
      }
      double margin = std::abs(std::abs(fprime(std::vector<double>{x})[0]) - 1.0);
      if (margin < kHyperbolicTolLo) return Verdict::fails;
      if (margin <= kHyperbolicTolHi) verdict = Verdict::undecided;
    }
    return verdict;
  };
  return p;
}

PropertyPredicate coefficient_halfspace_predicate(const MultiIndex& alpha, int out,
                                                  double base_value) {
  PropertyPredicate p;
  p.name = "coefficient-halfspace";
  p.evaluate = [alpha, out, base_value](const FunctionElement& e, std::uint64_t) {
    double lambda = as_poly(e).coeff(alpha, out) - base_value;
    return lambda > 0.0 ? Verdict::fails : Verdict::holds;
  };
  return p;
}

PropertyPredicate coefficient_set_predicate(const MultiIndex& alpha, int out, IntervalSet S,
                                            double base_value) {
  PropertyPredicate p;
  p.name = "coefficient-set";
  auto set = std::make_shared<IntervalSet>(std::move(S));
  p.evaluate = [alpha, out, base_value, set](const FunctionElement& e, std::uint64_t) {
    double lambda = as_poly(e).coeff(alpha, out) - base_value;
    return set->contains(lambda) ? Verdict::fails : Verdict::holds;
  };
  return p;
}

PropertyPredicate predicate_union(const PropertyPredicate& a, const PropertyPredicate& b) {
  PropertyPredicate p;
  p.name = a.name + "|" + b.name;
  auto ea = a.evaluate, eb = b.evaluate;
  p.evaluate = [ea, eb](const FunctionElement& e, std::uint64_t seed) {
    Verdict va = ea(e, seed);
    if (va == Verdict::fails) return Verdict::fails;
    Verdict vb = eb(e, seed);
    if (vb == Verdict::fails) return Verdict::fails;
    if (va == Verdict::undecided || vb == Verdict::undecided) return Verdict::undecided;
    return Verdict::holds;
  };
  return p;
}

PropertyPredicate always_holds_predicate() {
  return {"always-holds", [](const FunctionElement&, std::uint64_t) { return Verdict::holds; }};
}

PropertyPredicate always_fails_predicate() {
  return {"always-fails", [](const FunctionElement&, std::uint64_t) { return Verdict::fails; }};
}

}  // namespace prevlab
