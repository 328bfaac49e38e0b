#ifndef PREVLAB_ENGINE_HPP
#define PREVLAB_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prevlab/probe.hpp"

namespace prevlab {

enum class Verdict { holds = 0, fails = 1, undecided = 2 };

/// Total, deterministic property test on a function-space element. The seed
/// parameter feeds any internal sampling the predicate needs; identical
/// (element, seed) pairs must give identical verdicts.
struct PropertyPredicate {
  std::string name;
  std::function<Verdict(const FunctionElement&, std::uint64_t seed)> evaluate;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Two-sided 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(long k, long n, double z = 1.959963984540054);

/// Monte-Carlo estimate of the measure, within the probe box, of the set of
/// coefficients lambda where the property fails along f + sum lambda_i g_i.
/// A fraction statistically indistinguishable from zero is the strongest
/// statement a finite sample can make; the confidence interval quantifies
/// exactly that, and undecided verdicts are quarantined in their own count
/// rather than folded into the failures.
struct ShynessReport {
  std::string base_id;
  std::string probe_id;
  long samples = 0;
  long holds = 0;
  long fails = 0;
  long undecided = 0;
  double failure_fraction = 0.0;
  WilsonInterval ci;
  std::uint64_t seed = 0;
  double box_radius = 1.0;
};

ShynessReport estimate_failure_measure(const FunctionElement& base, const Probe& probe,
                                       const PropertyPredicate& phi, long samples,
                                       std::uint64_t seed, int workers = 1,
                                       const std::string& base_id = "base");

struct TranslateScan {
  std::vector<ShynessReport> rows;
  double max_fraction = 0.0;
};

// One estimate per base element; the failure measure should be small for
// every translate, not just one, and the summary records the worst case.
TranslateScan translate_scan(const PropertyPredicate& phi, const Probe& probe,
                             const std::vector<FunctionElement>& bases, long samples,
                             std::uint64_t seed, int workers = 1);

struct DensityProfileRow {
  int level = 0;
  long cells = 0;
  long samples = 0;       // total predicate evaluations at this level
  long fails = 0;
  double failure_fraction = 0.0;
  double cell_coverage = 0.0;  // fraction of cells containing >= 1 failure
};

// Failure fraction on nested grids of spacing 2^-level over the probe box
// (q <= 2), with stratified per-cell samples. A set that is dense but small
// shows a tiny fraction together with full cell coverage.
std::vector<DensityProfileRow> failure_density_profile(const PropertyPredicate& phi,
                                                       const Probe& probe,
                                                       const FunctionElement& base,
                                                       const std::vector<int>& levels,
                                                       int samples_per_cell, std::uint64_t seed,
                                                       int workers = 1);

}  // namespace prevlab

#endif
