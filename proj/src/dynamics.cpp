#include "prevlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace prevlab {

namespace {

constexpr double kOrbitResidualTol = 1e-9;
constexpr double kDedupTol = 1e-6;
constexpr int kNewtonMaxIter = 50;

Eigen::MatrixXd jacobian_at(const PolyMap& f, const Eigen::VectorXd& x) {
  const int n = f.domain_dim();
  Eigen::MatrixXd J(f.range_dim(), n);
  std::vector<double> xs(x.data(), x.data() + x.size());
  for (int j = 0; j < n; ++j) {
    std::vector<double> col = partial(f, MultiIndex::unit(n, j))(xs);
    for (int i = 0; i < f.range_dim(); ++i) J(i, j) = col[static_cast<size_t>(i)];
  }
  return J;
}

Eigen::VectorXd eval_vec(const PolyMap& f, const Eigen::VectorXd& x) {
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> y = f(xs);
  return Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

// G and its residual for the cyclic periodicity system.
Eigen::VectorXd orbit_residual_vec(const PolyMap& f, const Eigen::VectorXd& X, int n, int p) {
  Eigen::VectorXd G(n * p);
  for (int i = 0; i < p; ++i) {
    Eigen::VectorXd xi = X.segment(i * n, n);
    Eigen::VectorXd next = X.segment(((i + 1) % p) * n, n);
    G.segment(i * n, n) = eval_vec(f, xi) - next;
  }
  return G;
}

struct NewtonOutcome {
  bool converged = false;
  bool singular = false;
  Eigen::VectorXd X;
  double residual = 0.0;
};

NewtonOutcome newton_orbit(const PolyMap& f, Eigen::VectorXd X, int p) {
  const int n = f.domain_dim();
  NewtonOutcome out;
  Eigen::VectorXd G = orbit_residual_vec(f, X, n, p);
  double res = G.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < kNewtonMaxIter; ++iter) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * p, n * p);
    for (int i = 0; i < p; ++i) {
      Eigen::VectorXd xi = X.segment(i * n, n);
      J.block(i * n, i * n, n, n) = jacobian_at(f, xi);
      J.block(i * n, ((i + 1) % p) * n, n, n) -= Eigen::MatrixXd::Identity(n, n);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      out.singular = true;
      break;
    }
    Eigen::VectorXd step = lu.solve(-G);
    // Halve the step while the residual grows; stop polishing once no
    // damping level improves on the current iterate.
    double scale = 1.0;
    bool improved = false;
    for (int damp = 0; damp < 8; ++damp) {
      Eigen::VectorXd Xn = X + scale * step;
      Eigen::VectorXd Gn = orbit_residual_vec(f, Xn, n, p);
      double rn = Gn.lpNorm<Eigen::Infinity>();
      if (rn < res) {
        X = Xn;
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
  out.X = X;
  out.residual = res;
  out.converged = res <= kOrbitResidualTol;
  return out;
}

std::vector<double> rounded_key(const Eigen::VectorXd& X) {
  std::vector<double> key(static_cast<size_t>(X.size()));
  for (Eigen::Index i = 0; i < X.size(); ++i) key[static_cast<size_t>(i)] = std::round(X(i) / kDedupTol);
  return key;
}

}  // namespace

OrbitSearchReport find_periodic_orbits(const PolyMap& f, int p, const SeedSpec& seeds) {
  const int n = f.domain_dim();
  if (f.range_dim() != n) throw std::invalid_argument("periodic orbits need a self-map R^n -> R^n");
  if (n > 4 || p < 1 || p > 6) throw std::invalid_argument("find_periodic_orbits caps: n <= 4, p <= 6");
  if (static_cast<int>(seeds.box_lo.size()) != n || static_cast<int>(seeds.box_hi.size()) != n)
    throw std::invalid_argument("seed box dimension mismatch");

  OrbitSearchReport report;

  // Grid starts in R^n; a seed for the np-dimensional system is the start
  // iterated forward, plus (optionally) tuples sampled from a longer
  // trajectory after a transient.
  std::vector<Eigen::VectorXd> starts;
  long per_dim = std::max(2, seeds.grid_per_dim);
  long total = 1;
  for (int j = 0; j < n; ++j) total *= per_dim;
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd x(n);
    long rem = idx;
    for (int j = 0; j < n; ++j) {
      long cell = rem % per_dim;
      rem /= per_dim;
      double t = static_cast<double>(cell) / static_cast<double>(per_dim - 1);
      x(j) = seeds.box_lo[static_cast<size_t>(j)] +
             t * (seeds.box_hi[static_cast<size_t>(j)] - seeds.box_lo[static_cast<size_t>(j)]);
    }
    starts.push_back(std::move(x));
  }

  std::vector<Eigen::VectorXd> tuple_seeds;
  auto push_tuple_from = [&](Eigen::VectorXd x0) {
    Eigen::VectorXd X(n * p);
    Eigen::VectorXd x = std::move(x0);
    for (int i = 0; i < p; ++i) {
      X.segment(i * n, n) = x;
      if (i + 1 < p) x = eval_vec(f, x);
    }
    tuple_seeds.push_back(std::move(X));
  };
  double box_diag = 0.0;
  for (int j = 0; j < n; ++j)
    box_diag = std::max(box_diag, std::abs(seeds.box_hi[static_cast<size_t>(j)] -
                                           seeds.box_lo[static_cast<size_t>(j)]));
  for (const auto& x0 : starts) {
    push_tuple_from(x0);
    if (seeds.trajectory_seeds) {
      Eigen::VectorXd x = x0;
      bool escaped = false;
      for (int t = 0; t < seeds.trajectory_transient; ++t) {
        x = eval_vec(f, x);
        if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > 1e6 * (1.0 + box_diag)) {
          escaped = true;
          break;
        }
      }
      if (!escaped) push_tuple_from(x);
    }
  }

  std::map<std::vector<double>, PeriodicOrbit> found;
  for (const auto& seed : tuple_seeds) {
    ++report.seeds_tried;
    NewtonOutcome res = newton_orbit(f, seed, p);
    if (res.singular) {
      ++report.seeds_singular;
      continue;
    }
    if (!res.converged) continue;
    ++report.seeds_converged;

    // Filter orbits whose true period is a proper divisor of p.
    std::vector<Eigen::VectorXd> pts(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) pts[static_cast<size_t>(i)] = res.X.segment(i * n, n);
    bool lower = false;
    for (int d = 1; d < p; ++d) {
      if (p % d != 0) continue;
      bool repeats = true;
      for (int i = 0; i < p && repeats; ++i)
        if ((pts[static_cast<size_t>(i)] - pts[static_cast<size_t>((i + d) % p)]).lpNorm<Eigen::Infinity>() > kDedupTol)
          repeats = false;
      if (repeats) {
        lower = true;
        break;
      }
    }
    if (lower && p > 1) {
      ++report.lower_period_hits;
      continue;
    }

    // Canonical rotation: start at the lexicographically smallest point.
    int best = 0;
    for (int i = 1; i < p; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        double diff = pts[static_cast<size_t>(i)](k) - pts[static_cast<size_t>(best)](k);
        if (diff < 0) {
          best = i;
          break;
        }
        if (diff > 0) break;
      }
    }
    std::rotate(pts.begin(), pts.begin() + best, pts.end());

    PeriodicOrbit orbit;
    orbit.period = p;
    orbit.points = pts;
    orbit.multiplier = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < p; ++i)
      orbit.multiplier = jacobian_at(f, pts[static_cast<size_t>(i)]) * orbit.multiplier;
    orbit.residual = res.residual;

    Eigen::VectorXd flat(n * p);
    for (int i = 0; i < p; ++i) flat.segment(i * n, n) = pts[static_cast<size_t>(i)];
    auto key = rounded_key(flat);
    auto it = found.find(key);
    if (it == found.end() || orbit.residual < it->second.residual) found[key] = std::move(orbit);
  }

  for (auto& [key, orbit] : found) report.orbits.push_back(std::move(orbit));
  return report;
}

HyperbolicityVerdict hyperbolicity(const PeriodicOrbit& orbit) {
  HyperbolicityVerdict v;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(orbit.multiplier, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    v.verdict = Stability::undecided;
    v.diagnostic = "eigenvalue solver did not converge";
    return v;
  }
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    v.eigenvalue_moduli.push_back(std::abs(solver.eigenvalues()(i)));
  std::sort(v.eigenvalue_moduli.rbegin(), v.eigenvalue_moduli.rend());
  v.margin = std::numeric_limits<double>::infinity();
  for (double m : v.eigenvalue_moduli) v.margin = std::min(v.margin, std::abs(m - 1.0));
  if (v.margin < kHyperbolicTolLo)
    v.verdict = Stability::nonhyperbolic;
  else if (v.margin > kHyperbolicTolHi)
    v.verdict = Stability::hyperbolic;
  else
    v.verdict = Stability::undecided;
  return v;
}

std::vector<double> ray_unit_circle_hits(const std::vector<Eigen::MatrixXd>& matrices) {
  if (matrices.empty()) throw std::invalid_argument("ray_unit_circle_hits: empty matrix list");
  const int n = static_cast<int>(matrices[0].rows());
  const int p = static_cast<int>(matrices.size());
  if (p * n * n > 64) throw std::invalid_argument("ray_unit_circle_hits cap: p*n^2 <= 64");
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
  for (const auto& M : matrices) {
    if (M.rows() != n || M.cols() != n)
      throw std::invalid_argument("ray_unit_circle_hits: matrices must all be n x n");
    prod = M * prod;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(prod, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("ray_unit_circle_hits: eigenvalue solver failed");
  double max_mod = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    max_mod = std::max(max_mod, std::abs(solver.eigenvalues()(i)));
  // Nilpotent products only produce roundoff-size eigenvalues.
  double zero_tol = 1e-10 * std::max(1.0, prod.norm());
  std::vector<double> hits;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    double mod = std::abs(solver.eigenvalues()(i));
    if (mod <= zero_tol) continue;
    hits.push_back(std::pow(mod, -1.0 / static_cast<double>(p)));
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
             hits.end());
  return hits;
}

}  // namespace prevlab
