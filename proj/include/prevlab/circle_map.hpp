#ifndef PREVLAB_CIRCLE_MAP_HPP
#define PREVLAB_CIRCLE_MAP_HPP

#include <cstdint>
#include <vector>

namespace prevlab {

// Lift average (x_N - x_0)/N of x -> x + omega + eps sin x after a burn-in,
// computed on the unrolled lift (no mod). Result is in radians.
double rotation_number(double omega, double eps, long iters, long burn_in);

enum class LockVerdict { unlocked = 0, locked = 1, undecided = -1 };

struct TongueRow {
  double omega = 0.0;
  LockVerdict locked = LockVerdict::unlocked;
  int period = 0;          // 0 when no orbit was certified
  double multiplier = 0.0; // prod (1 + eps cos x_i) of the certified orbit, 0 when none
};

struct TongueScan {
  double eps = 0.0;
  std::vector<TongueRow> rows;
  long locked_count = 0;
  long undecided_count = 0;
  double locked_fraction = 0.0;  // the S_eps measure estimate, in [0, 1]
};

/// Scans omega over a uniform grid in [0, 2pi] and classifies each point as
/// locked when some period-q orbit (q <= q_max) of x + omega + eps sin x has
/// multiplier prod |1 + eps cos x_i| < 1 - 1e-6. Candidate rotation numbers
/// come from continued-fraction convergents of the measured rotation number;
/// orbits are located by Newton on the lifted periodicity equation seeded
/// from the trajectory. Orbits found with multiplier inside the tolerance
/// band are counted undecided, never locked.
TongueScan tongue_scan(double eps, int omega_grid, int q_max, std::uint64_t seed,
                       int workers = 1);

// Locked fraction only.
double tongue_measure(double eps, int omega_grid, int q_max, std::uint64_t seed,
                      int workers = 1);

}  // namespace prevlab

#endif
