#include "prevlab/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "prevlab/parallel.hpp"
#include "prevlab/rng.hpp"

namespace prevlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStabilityGap = 1e-6;

struct Rational {
  long p;
  long q;
};

// Continued-fraction convergents p/q of rho with q <= q_max, plus the rounded
// fractions p = round(q rho) for small q; near a tongue edge the trajectory
// estimate can be slightly off and the rounded fractions recover the target.
std::vector<Rational> rational_candidates(double rho, long q_max) {
  std::vector<Rational> cands;
  auto push = [&](long p, long q) {
    if (q < 1 || q > q_max) return;
    long g = std::gcd(std::abs(p), q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    for (const Rational& r : cands)
      if (r.p == p && r.q == q) return;
    cands.push_back({p, q});
  };
  for (long q = 1; q <= std::min<long>(q_max, 8); ++q) push(std::lround(rho * static_cast<double>(q)), q);
  // Standard continued-fraction walk.
  double x = rho;
  long h0 = 1, h1 = static_cast<long>(std::floor(x));  // numerators
  long k0 = 0, k1 = 1;                                 // denominators
  push(h1, k1);
  for (int step = 0; step < 24; ++step) {
    double frac = x - std::floor(x);
    if (frac < 1e-14) break;
    x = 1.0 / frac;
    long a = static_cast<long>(std::floor(x));
    if (a <= 0 || a > (1L << 40)) break;
    long h2 = a * h1 + h0;
    long k2 = a * k1 + k0;
    if (k2 > q_max || k2 <= 0) break;
    push(h2, k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
  }
  std::sort(cands.begin(), cands.end(), [](const Rational& a, const Rational& b) {
    return a.q < b.q || (a.q == b.q && a.p < b.p);
  });
  return cands;
}

double lift_step(double x, double omega, double eps) { return x + omega + eps * std::sin(x); }

struct OrbitProbe {
  bool found = false;
  double multiplier = 0.0;
};

// Newton on F^q(x) - x - 2 pi p = 0 on the lift.
OrbitProbe probe_orbit(double omega, double eps, long p, long q, double x_seed) {
  double x = x_seed;
  for (int iter = 0; iter < 60; ++iter) {
    double y = x;
    double deriv = 1.0;
    for (long i = 0; i < q; ++i) {
      deriv *= 1.0 + eps * std::cos(y);
      y = lift_step(y, omega, eps);
    }
    double value = y - x - kTwoPi * static_cast<double>(p);
    double slope = deriv - 1.0;
    if (std::abs(value) <= 1e-11) {
      OrbitProbe out;
      out.found = true;
      out.multiplier = deriv;
      return out;
    }
    if (std::abs(slope) < 1e-13) break;
    double step = -value / slope;
    // Keep the iterate within one period of the seed.
    step = std::clamp(step, -kTwoPi, kTwoPi);
    x += step;
  }
  return {};
}

}  // namespace

double rotation_number(double omega, double eps, long iters, long burn_in) {
  if (iters < 1) throw std::invalid_argument("rotation_number requires iters >= 1");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("rotation_number requires 0 <= eps < 1");
  double x = 0.0;
  for (long i = 0; i < burn_in; ++i) x = lift_step(x, omega, eps);
  double x0 = x;
  for (long i = 0; i < iters; ++i) x = lift_step(x, omega, eps);
  return (x - x0) / static_cast<double>(iters);
}

TongueScan tongue_scan(double eps, int omega_grid, int q_max, std::uint64_t seed, int workers) {
  if (omega_grid < 1000) throw std::invalid_argument("tongue_scan requires a grid of >= 10^3 points");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("tongue_scan requires 0 <= eps < 1");
  if (q_max < 1) throw std::invalid_argument("tongue_scan requires q_max >= 1");

  TongueScan scan;
  scan.eps = eps;
  scan.rows.resize(static_cast<size_t>(omega_grid));

  const long burn = 1000;
  const long iters = 4000;

  parallel_for(omega_grid, workers, [&](std::int64_t g) {
    TongueRow& row = scan.rows[static_cast<size_t>(g)];
    double omega = kTwoPi * static_cast<double>(g) / static_cast<double>(omega_grid);
    row.omega = omega;

    Rng rng(sub_seed(seed, "tongues", static_cast<std::uint64_t>(g)));
    double x = rng.uniform(0.0, kTwoPi);
    for (long i = 0; i < burn; ++i) x = lift_step(x, omega, eps);
    double x0 = x;
    for (long i = 0; i < iters; ++i) x = lift_step(x, omega, eps);
    double rho = ((x - x0) / static_cast<double>(iters)) / kTwoPi;
    rho -= std::floor(rho);

    bool saw_undecided = false;
    for (const Rational& cand : rational_candidates(rho, q_max)) {
      OrbitProbe probe = probe_orbit(omega, eps, cand.p, cand.q, std::fmod(x, kTwoPi));
      if (!probe.found) continue;
      double mod = std::abs(probe.multiplier);
      if (mod < 1.0 - kStabilityGap) {
        row.locked = LockVerdict::locked;
        row.period = static_cast<int>(cand.q);
        row.multiplier = probe.multiplier;
        break;
      }
      if (mod <= 1.0 + kStabilityGap) {
        saw_undecided = true;
        if (row.period == 0) {
          row.period = static_cast<int>(cand.q);
          row.multiplier = probe.multiplier;
        }
      }
    }
    if (row.locked != LockVerdict::locked && saw_undecided) row.locked = LockVerdict::undecided;
  });

  for (const TongueRow& row : scan.rows) {
    if (row.locked == LockVerdict::locked) ++scan.locked_count;
    if (row.locked == LockVerdict::undecided) ++scan.undecided_count;
  }
  scan.locked_fraction = static_cast<double>(scan.locked_count) / static_cast<double>(omega_grid);
  return scan;
}

double tongue_measure(double eps, int omega_grid, int q_max, std::uint64_t seed, int workers) {
  return tongue_scan(eps, omega_grid, q_max, seed, workers).locked_fraction;
}

}  // namespace prevlab
