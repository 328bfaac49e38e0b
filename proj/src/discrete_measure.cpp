#include "prevlab/discrete_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prevlab/text.hpp"

namespace prevlab {

namespace {

bool points_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("measure dimension must be >= 1");
  if (atoms.empty()) throw std::invalid_argument("measure needs at least one atom");
  for (const Atom& a : atoms) {
    if (static_cast<int>(a.point.size()) != dim_)
      throw std::invalid_argument("atom dimension mismatch");
    if (!(a.weight >= 0.0)) throw std::invalid_argument("atom weights must be >= 0");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.point < b.point; });
  // Merge runs of coincident points; the merged position is the mass-weighted
  // centroid, which leaves exact duplicates untouched.
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && points_close(atoms_.back().point, a.point, kMergeTol)) {
      Atom& last = atoms_.back();
      double w = last.weight + a.weight;
      if (w > 0.0)
        for (size_t i = 0; i < last.point.size(); ++i)
          last.point[i] = (last.point[i] * last.weight + a.point[i] * a.weight) / w;
      last.weight = w;
    } else {
      atoms_.push_back(a);
    }
  }
  // Drop exact-zero weights unless that would empty the measure.
  std::vector<Atom> kept;
  for (const Atom& a : atoms_)
    if (a.weight > 0.0) kept.push_back(a);
  if (!kept.empty()) atoms_ = std::move(kept);
  mass_ = 0.0;
  for (const Atom& a : atoms_) mass_ += a.weight;
}

double DiscreteMeasure::support_diameter() const {
  double best = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i)
    for (size_t j = i + 1; j < atoms_.size(); ++j) {
      double d2 = 0.0;
      for (size_t k = 0; k < atoms_[i].point.size(); ++k) {
        double d = atoms_[i].point[k] - atoms_[j].point[k];
        d2 += d * d;
      }
      best = std::max(best, d2);
    }
  return std::sqrt(best);
}

bool DiscreteMeasure::support_contains_origin(double tol) const {
  for (const Atom& a : atoms_) {
    bool at_zero = true;
    for (double c : a.point)
      if (std::abs(c) > tol) {
        at_zero = false;
        break;
      }
    if (at_zero) return true;
  }
  return false;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  if (mass_ <= 0.0) throw std::invalid_argument("cannot normalize a zero-mass measure");
  std::vector<Atom> scaled = atoms_;
  for (Atom& a : scaled) a.weight /= mass_;
  return DiscreteMeasure(dim_, std::move(scaled));
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw std::invalid_argument("translation vector dimension mismatch");
  std::vector<Atom> moved = atoms_;
  for (Atom& a : moved)
    for (int k = 0; k < dim_; ++k) a.point[static_cast<size_t>(k)] += v[static_cast<size_t>(k)];
  return DiscreteMeasure(dim_, std::move(moved));
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point, double weight) {
  int d = static_cast<int>(point.size());
  return DiscreteMeasure(d, {Atom{std::move(point), weight}});
}

DiscreteMeasure DiscreteMeasure::uniform_grid_1d(double lo, double hi, int k) {
  if (k < 1) throw std::invalid_argument("uniform grid needs at least one atom");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<size_t>(k));
  double w = 1.0 / static_cast<double>(k);
  for (int i = 0; i < k; ++i) {
    double t = (k == 1) ? 0.5 : static_cast<double>(i) / static_cast<double>(k - 1);
    atoms.push_back(Atom{{lo + (hi - lo) * t}, w});
  }
  return DiscreteMeasure(1, std::move(atoms));
}

DiscreteMeasure convolve(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("convolution dimension mismatch");
  std::vector<Atom> sums;
  sums.reserve(a.atoms().size() * b.atoms().size());
  for (const Atom& x : a.atoms())
    for (const Atom& y : b.atoms()) {
      Atom s;
      s.point.resize(x.point.size());
      for (size_t k = 0; k < x.point.size(); ++k) s.point[k] = x.point[k] + y.point[k];
      s.weight = x.weight * y.weight;
      sums.push_back(std::move(s));
    }
  return DiscreteMeasure(a.dim(), std::move(sums));
}

double measure_of(const DiscreteMeasure& mu, const SetIndicator& s) {
  double total = 0.0;
  for (const Atom& a : mu.atoms())
    if (s(a.point)) total += a.weight;
  return total;
}

double measure_of_translate(const DiscreteMeasure& mu, const SetIndicator& s,
                            std::span<const double> v) {
  if (static_cast<int>(v.size()) != mu.dim())
    throw std::invalid_argument("translation vector dimension mismatch");
  double total = 0.0;
  std::vector<double> shifted(v.size());
  for (const Atom& a : mu.atoms()) {
    for (size_t k = 0; k < shifted.size(); ++k) shifted[k] = a.point[k] - v[k];
    if (s(shifted)) total += a.weight;
  }
  return total;
}

DiscreteMeasure convolve_sequence(const std::vector<DiscreteMeasure>& measures, int N) {
  if (N < 1 || N > static_cast<int>(measures.size()))
    throw std::invalid_argument("convolve_sequence: N out of range");
  for (int i = 0; i < N; ++i) {
    const DiscreteMeasure& mu = measures[static_cast<size_t>(i)];
    int n = i + 1;
    if (std::abs(mu.total_mass() - 1.0) > 1e-12)
      throw std::invalid_argument("convolve_sequence: input " + std::to_string(n) +
                                  " has mass " + format_double(mu.total_mass()) + ", expected 1");
    double diam = mu.support_diameter();
    double cap = std::ldexp(1.0, -n);
    if (diam > cap * (1.0 + 1e-12))
      throw std::invalid_argument("convolve_sequence: input " + std::to_string(n) +
                                  " has support diameter " + format_double(diam) +
                                  " exceeding 2^-" + std::to_string(n));
    if (!mu.support_contains_origin())
      throw std::invalid_argument("convolve_sequence: input " + std::to_string(n) +
                                  " has no atom at the origin");
  }
  DiscreteMeasure acc = measures[0];
  for (int i = 1; i < N; ++i) acc = convolve(acc, measures[static_cast<size_t>(i)]);
  return acc;
}

std::string write_measure(const DiscreteMeasure& mu) {
  std::ostringstream os;
  os << "measure " << mu.dim() << ' ' << mu.atoms().size() << '\n';
  for (const Atom& a : mu.atoms()) {
    for (int k = 0; k < mu.dim(); ++k) {
      if (k) os << ' ';
      os << format_double(a.point[static_cast<size_t>(k)]);
    }
    os << " : " << format_double(a.weight) << '\n';
  }
  return os.str();
}

DiscreteMeasure read_measure(std::istream& in) {
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  auto head = split_ws(line);
  if (head.size() != 3 || head[0] != "measure")
    throw std::invalid_argument("expected header 'measure d k'");
  int d = static_cast<int>(parse_long(head[1]));
  long k = parse_long(head[2]);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<size_t>(k));
  for (long i = 0; i < k; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("measure file truncated");
    auto tok = split_ws(line);
    if (tok.size() != static_cast<size_t>(d + 2) || tok[static_cast<size_t>(d)] != ":")
      throw std::invalid_argument("malformed atom line: '" + line + "'");
    Atom a;
    a.point.resize(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) a.point[static_cast<size_t>(j)] = parse_double(tok[static_cast<size_t>(j)]);
    a.weight = parse_double(tok[static_cast<size_t>(d + 1)]);
    atoms.push_back(std::move(a));
  }
  return DiscreteMeasure(d, std::move(atoms));
}

DiscreteMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open measure file: " + path);
  return read_measure(in);
}

}  // namespace prevlab
