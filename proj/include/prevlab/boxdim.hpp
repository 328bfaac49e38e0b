#ifndef PREVLAB_BOXDIM_HPP
#define PREVLAB_BOXDIM_HPP

#include <Eigen/Dense>
#include <vector>

namespace prevlab {

struct BoxCountRow {
  double scale = 0.0;
  long count = 0;
};

struct BoxCountReport {
  double dimension = 0.0;  // least-squares slope of log N vs log(1/delta)
  std::vector<BoxCountRow> rows;
};

// Covering counts on axis-aligned boxes anchored at the cloud minimum.
// Requires >= 10^3 points and >= 4 scales spanning at least a decade; a flat
// count profile (all counts equal) is rejected as a degenerate fit.
BoxCountReport box_counting_dimension(const std::vector<std::vector<double>>& points,
                                      const std::vector<double>& scales);

struct InjectivityReport {
  bool collision_found = false;
  long pairs_checked = 0;
  long collisions = 0;  // capped at kMaxRecorded
  std::vector<std::pair<size_t, size_t>> examples;
  static constexpr long kMaxRecorded = 16;
};

// Looks for pairs separated by more than delta in the domain that land
// within delta/100 of each other under L (Euclidean norms both sides), via
// spatial hashing on the image cloud.
InjectivityReport injectivity_check(const std::vector<std::vector<double>>& points,
                                    const Eigen::MatrixXd& L, double delta);

}  // namespace prevlab

#endif
