#include "prevlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prevlab/parallel.hpp"
#include "prevlab/rng.hpp"

namespace prevlab {

WilsonInterval wilson_interval(long k, long n, double z) {
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n");
  double p = static_cast<double>(k) / static_cast<double>(n);
  double nn = static_cast<double>(n);
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = (p + z2 / (2.0 * nn)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ShynessReport estimate_failure_measure(const FunctionElement& base, const Probe& probe,
                                       const PropertyPredicate& phi, long samples,
                                       std::uint64_t seed, int workers,
                                       const std::string& base_id) {
  if (samples < 100) throw std::invalid_argument("estimate_failure_measure requires N >= 100");
  const int q = probe.dim();
  if (q < 1) throw std::invalid_argument("probe has an empty basis");
  // combine() validates ambient compatibility; run it once up front so a
  // mismatch surfaces before any sampling.
  {
    std::vector<double> zero(static_cast<size_t>(q), 0.0);
    (void)combine(base, probe, zero);
  }

  std::vector<std::uint8_t> verdicts(static_cast<size_t>(samples));
  const double radius = probe.box_radius;
  parallel_for(samples, workers, [&](std::int64_t i) {
    std::uint64_t s = sub_seed(seed, "shyness", static_cast<std::uint64_t>(i));
    Rng rng(s);
    std::vector<double> lambda(static_cast<size_t>(q));
    for (double& l : lambda) l = rng.uniform(-radius, radius);
    FunctionElement sample = combine(base, probe, lambda);
    verdicts[static_cast<size_t>(i)] = static_cast<std::uint8_t>(phi.evaluate(sample, s));
  });

  ShynessReport report;
  report.base_id = base_id;
  report.probe_id = probe.id;
  report.samples = samples;
  report.seed = seed;
  report.box_radius = radius;
  for (std::uint8_t v : verdicts) {
    switch (static_cast<Verdict>(v)) {
      case Verdict::holds: ++report.holds; break;
      case Verdict::fails: ++report.fails; break;
      case Verdict::undecided: ++report.undecided; break;
    }
  }
  report.failure_fraction = static_cast<double>(report.fails) / static_cast<double>(samples);
  report.ci = wilson_interval(report.fails, samples);
  return report;
}

TranslateScan translate_scan(const PropertyPredicate& phi, const Probe& probe,
                             const std::vector<FunctionElement>& bases, long samples,
                             std::uint64_t seed, int workers) {
  if (bases.empty()) throw std::invalid_argument("translate_scan: empty base grid");
  TranslateScan scan;
  for (size_t i = 0; i < bases.size(); ++i) {
    ShynessReport r = estimate_failure_measure(
        bases[i], probe, phi, samples, sub_seed(seed, "translate", i), workers,
        "translate-" + std::to_string(i));
    scan.max_fraction = std::max(scan.max_fraction, r.failure_fraction);
    scan.rows.push_back(std::move(r));
  }
  return scan;
}

std::vector<DensityProfileRow> failure_density_profile(const PropertyPredicate& phi,
                                                       const Probe& probe,
                                                       const FunctionElement& base,
                                                       const std::vector<int>& levels,
                                                       int samples_per_cell, std::uint64_t seed,
                                                       int workers) {
  const int q = probe.dim();
  if (q > 2) throw std::invalid_argument("failure_density_profile requires q <= 2");
  if (samples_per_cell < 1) throw std::invalid_argument("samples_per_cell must be >= 1");
  const double radius = probe.box_radius;

  std::vector<DensityProfileRow> rows;
  for (int level : levels) {
    if (level < 0 || level > 24) throw std::invalid_argument("profile level out of range [0, 24]");
    long cells_per_axis = 1L << level;
    long cells = 1;
    for (int a = 0; a < q; ++a) cells *= cells_per_axis;
    const double width = 2.0 * radius / static_cast<double>(cells_per_axis);

    std::vector<std::uint8_t> cell_failed(static_cast<size_t>(cells), 0);
    std::vector<std::int32_t> cell_fail_count(static_cast<size_t>(cells), 0);
    parallel_for(cells, workers, [&](std::int64_t c) {
      std::vector<double> lo(static_cast<size_t>(q));
      long rem = c;
      for (int a = 0; a < q; ++a) {
        long idx = rem % cells_per_axis;
        rem /= cells_per_axis;
        lo[static_cast<size_t>(a)] = -radius + static_cast<double>(idx) * width;
      }
      std::int32_t fails_here = 0;
      for (int s = 0; s < samples_per_cell; ++s) {
        std::uint64_t cell_seed =
            sub_seed(seed, "profile", (static_cast<std::uint64_t>(level) << 40) ^
                                          (static_cast<std::uint64_t>(c) << 10) ^
                                          static_cast<std::uint64_t>(s));
        Rng rng(cell_seed);
        std::vector<double> lambda(static_cast<size_t>(q));
        for (int a = 0; a < q; ++a) lambda[static_cast<size_t>(a)] = lo[static_cast<size_t>(a)] + width * rng.uniform01();
        FunctionElement sample = combine(base, probe, lambda);
        if (phi.evaluate(sample, cell_seed) == Verdict::fails) ++fails_here;
      }
      cell_fail_count[static_cast<size_t>(c)] = fails_here;
      cell_failed[static_cast<size_t>(c)] = fails_here > 0 ? 1 : 0;
    });

    DensityProfileRow row;
    row.level = level;
    row.cells = cells;
    row.samples = cells * samples_per_cell;
    long covered = 0;
    for (long c = 0; c < cells; ++c) {
      row.fails += cell_fail_count[static_cast<size_t>(c)];
      covered += cell_failed[static_cast<size_t>(c)];
    }
    row.failure_fraction = static_cast<double>(row.fails) / static_cast<double>(row.samples);
    row.cell_coverage = static_cast<double>(covered) / static_cast<double>(cells);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace prevlab
