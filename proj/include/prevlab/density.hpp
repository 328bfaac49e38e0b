#ifndef PREVLAB_DENSITY_HPP
#define PREVLAB_DENSITY_HPP

#include <string>
#include <vector>

#include "prevlab/discrete_measure.hpp"

namespace prevlab {

/// Heuristic brackets for the lower/upper densities
///   rho^-(S) = sup_mu inf_v mu(S + v),   rho^+(S) = inf_mu sup_v mu(S + v),
/// restricted to a finite family of probability measures and a finite grid of
/// translates. The true sup/inf range over all compactly supported
/// probability measures and all translates, so these numbers are certified
/// bounds only relative to the supplied family and grid; the report echoes
/// both so a reader can judge the coverage.
struct DensityEstimate {
  double lower = 0.0;        // max over family of min over grid
  double upper = 1.0;        // min over family of max over grid
  int lower_argmax = -1;     // family index attaining the lower estimate
  int upper_argmin = -1;     // family index attaining the upper estimate
  // row (i, j): mass of family[i] on S + grid[j]
  std::vector<std::vector<double>> table;
};

DensityEstimate density_bracket(const SetIndicator& s,
                                const std::vector<DiscreteMeasure>& family,
                                const std::vector<std::vector<double>>& translations);

double lower_density(const SetIndicator& s, const std::vector<DiscreteMeasure>& family,
                     const std::vector<std::vector<double>>& translations);
double upper_density(const SetIndicator& s, const std::vector<DiscreteMeasure>& family,
                     const std::vector<std::vector<double>>& translations);

}  // namespace prevlab

#endif
