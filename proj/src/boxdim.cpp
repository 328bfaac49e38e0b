#include "prevlab/boxdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace prevlab {

namespace {

struct CellHash {
  size_t operator()(const std::vector<long>& cell) const {
    size_t h = 1469598103934665603ULL;
    for (long v : cell) {
      h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

BoxCountReport box_counting_dimension(const std::vector<std::vector<double>>& points,
                                      const std::vector<double>& scales) {
  if (points.size() < 1000)
    throw std::invalid_argument("box_counting_dimension requires >= 10^3 points");
  if (scales.size() < 4)
    throw std::invalid_argument("box_counting_dimension requires >= 4 scales");
  const size_t d = points[0].size();
  for (const auto& x : points)
    if (x.size() != d) throw std::invalid_argument("point cloud has mixed dimensions");
  double smin = *std::min_element(scales.begin(), scales.end());
  double smax = *std::max_element(scales.begin(), scales.end());
  if (!(smin > 0.0) || smax / smin < 10.0)
    throw std::invalid_argument("scales must be positive and span at least a decade");

  std::vector<double> mins(d, std::numeric_limits<double>::infinity());
  for (const auto& x : points)
    for (size_t k = 0; k < d; ++k) mins[k] = std::min(mins[k], x[k]);

  BoxCountReport report;
  for (double delta : scales) {
    std::unordered_set<std::vector<long>, CellHash> cells;
    std::vector<long> key(d);
    for (const auto& x : points) {
      for (size_t k = 0; k < d; ++k) key[k] = static_cast<long>(std::floor((x[k] - mins[k]) / delta));
      cells.insert(key);
    }
    report.rows.push_back({delta, static_cast<long>(cells.size())});
  }

  bool all_equal = std::all_of(report.rows.begin(), report.rows.end(),
                               [&](const BoxCountRow& r) { return r.count == report.rows[0].count; });
  if (all_equal) throw std::runtime_error("degenerate box-count fit: all scales give equal counts");

  // Least squares of log N against log(1/delta).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double nrows = static_cast<double>(report.rows.size());
  for (const BoxCountRow& r : report.rows) {
    double x = std::log(1.0 / r.scale);
    double y = std::log(static_cast<double>(r.count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.dimension = (nrows * sxy - sx * sy) / (nrows * sxx - sx * sx);
  return report;
}

InjectivityReport injectivity_check(const std::vector<std::vector<double>>& points,
                                    const Eigen::MatrixXd& L, double delta) {
  const int n = static_cast<int>(L.cols());
  const int m = static_cast<int>(L.rows());
  if (n > 10 || m > 10) throw std::invalid_argument("injectivity_check caps: m, n <= 10");
  if (points.size() > 100000)
    throw std::invalid_argument("injectivity_check cap: at most 10^5 points");
  if (!(delta > 0.0)) throw std::invalid_argument("injectivity_check requires delta > 0");
  for (const auto& x : points)
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("point dimension does not match L");

  const double image_tol = delta / 100.0;
  std::vector<Eigen::VectorXd> images(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    Eigen::Map<const Eigen::VectorXd> x(points[i].data(), n);
    images[i] = L * x;
  }

  // Bucket images on a grid of cell size image_tol; near-collisions can only
  // occur within a cell or its immediate neighbors.
  std::unordered_map<std::vector<long>, std::vector<size_t>, CellHash> buckets;
  std::vector<long> key(static_cast<size_t>(m));
  for (size_t i = 0; i < images.size(); ++i) {
    for (int k = 0; k < m; ++k) key[static_cast<size_t>(k)] = static_cast<long>(std::floor(images[i](k) / image_tol));
    buckets[key].push_back(i);
  }

  InjectivityReport report;
  std::vector<long> neighbor(static_cast<size_t>(m));
  for (size_t i = 0; i < images.size(); ++i) {
    for (int k = 0; k < m; ++k) key[static_cast<size_t>(k)] = static_cast<long>(std::floor(images[i](k) / image_tol));
    // enumerate the 3^m neighborhood
    long combos = 1;
    for (int k = 0; k < m; ++k) combos *= 3;
    for (long c = 0; c < combos; ++c) {
      long rem = c;
      for (int k = 0; k < m; ++k) {
        neighbor[static_cast<size_t>(k)] = key[static_cast<size_t>(k)] + (rem % 3) - 1;
        rem /= 3;
      }
      auto it = buckets.find(neighbor);
      if (it == buckets.end()) continue;
      for (size_t j : it->second) {
        if (j <= i) continue;
        ++report.pairs_checked;
        if ((images[i] - images[j]).norm() > image_tol) continue;
        Eigen::Map<const Eigen::VectorXd> xi(points[i].data(), n);
        Eigen::Map<const Eigen::VectorXd> xj(points[j].data(), n);
        if ((xi - xj).norm() > delta) {
          report.collision_found = true;
          ++report.collisions;
          if (static_cast<long>(report.examples.size()) < InjectivityReport::kMaxRecorded)
            report.examples.emplace_back(i, j);
        }
      }
    }
  }
  return report;
}

}  // namespace prevlab
