#include "prevlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prevlab {

DensityEstimate density_bracket(const SetIndicator& s,
                                const std::vector<DiscreteMeasure>& family,
                                const std::vector<std::vector<double>>& translations) {
  if (family.empty()) throw std::invalid_argument("density_bracket: empty measure family");
  if (translations.empty()) throw std::invalid_argument("density_bracket: empty translation grid");
  const int d = family[0].dim();
  for (const auto& mu : family) {
    if (mu.dim() != d) throw std::invalid_argument("density_bracket: mixed family dimensions");
    if (std::abs(mu.total_mass() - 1.0) > 1e-12)
      throw std::invalid_argument("density_bracket: family member is not a probability measure");
  }
  for (const auto& v : translations)
    if (static_cast<int>(v.size()) != d)
      throw std::invalid_argument("density_bracket: translation dimension mismatch");

  DensityEstimate est;
  est.table.resize(family.size());
  est.lower = 0.0;
  est.upper = 1.0;
  for (size_t i = 0; i < family.size(); ++i) {
    auto& row = est.table[i];
    row.reserve(translations.size());
    double row_min = 1.0, row_max = 0.0;
    for (const auto& v : translations) {
      double mass = measure_of_translate(family[i], s, v);
      row.push_back(mass);
      row_min = std::min(row_min, mass);
      row_max = std::max(row_max, mass);
    }
    if (i == 0 || row_min > est.lower) {
      est.lower = row_min;
      est.lower_argmax = static_cast<int>(i);
    }
    if (i == 0 || row_max < est.upper) {
      est.upper = row_max;
      est.upper_argmin = static_cast<int>(i);
    }
  }
  return est;
}

double lower_density(const SetIndicator& s, const std::vector<DiscreteMeasure>& family,
                     const std::vector<std::vector<double>>& translations) {
  return density_bracket(s, family, translations).lower;
}

double upper_density(const SetIndicator& s, const std::vector<DiscreteMeasure>& family,
                     const std::vector<std::vector<double>>& translations) {
  return density_bracket(s, family, translations).upper;
}

}  // namespace prevlab
