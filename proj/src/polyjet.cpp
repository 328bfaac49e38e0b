#include "prevlab/polyjet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prevlab/text.hpp"

namespace prevlab {

namespace {

double ipow(double x, unsigned e) {
  double r = 1.0;
  while (e) {
    if (e & 1u) r *= x;
    x *= x;
    e >>= 1u;
  }
  return r;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; });
}

double falling_factorial(unsigned from, unsigned count) {
  double r = 1.0;
  for (unsigned i = 0; i < count; ++i) r *= static_cast<double>(from - i);
  return r;
}

}  // namespace

MultiIndex MultiIndex::unit(int n, int j) {
  std::vector<unsigned> e(static_cast<size_t>(n), 0);
  e.at(static_cast<size_t>(j)) = 1;
  return MultiIndex(std::move(e));
}

unsigned MultiIndex::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0u);
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
  if (o.vars() != vars()) throw std::invalid_argument("multi-index length mismatch");
  std::vector<unsigned> e(exps_);
  for (size_t i = 0; i < e.size(); ++i) e[i] += o.exps_[i];
  return MultiIndex(std::move(e));
}

PolyMap::PolyMap(int domain_dim, int range_dim) : n_(domain_dim), m_(range_dim) {
  if (n_ < 1 || n_ > kMaxDomainDim)
    throw std::invalid_argument("domain dimension must be in [1, " +
                                std::to_string(kMaxDomainDim) + "]");
  if (m_ < 1) throw std::invalid_argument("range dimension must be >= 1");
}

unsigned PolyMap::degree() const {
  unsigned d = 0;
  for (const auto& [mi, c] : terms_) d = std::max(d, mi.degree());
  return d;
}

std::vector<double> PolyMap::coeff(const MultiIndex& mi) const {
  auto it = terms_.find(mi);
  if (it == terms_.end()) return std::vector<double>(static_cast<size_t>(m_), 0.0);
  return it->second;
}

double PolyMap::coeff(const MultiIndex& mi, int out) const {
  auto it = terms_.find(mi);
  if (it == terms_.end()) return 0.0;
  return it->second[static_cast<size_t>(out)];
}

void PolyMap::set_coeff(const MultiIndex& mi, std::vector<double> c) {
  if (mi.vars() != n_) throw std::invalid_argument("multi-index length != domain dimension");
  if (static_cast<int>(c.size()) != m_)
    throw std::invalid_argument("coefficient vector length != range dimension");
  if (mi.degree() > kMaxDegree)
    throw std::invalid_argument("monomial degree exceeds cap " + std::to_string(kMaxDegree));
  if (all_zero(c))
    terms_.erase(mi);
  else
    terms_[mi] = std::move(c);
}

void PolyMap::add_coeff(const MultiIndex& mi, int out, double c) {
  if (c == 0.0) return;
  std::vector<double> v = coeff(mi);
  v[static_cast<size_t>(out)] += c;
  set_coeff(mi, std::move(v));
}

std::vector<double> PolyMap::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("evaluation point has wrong dimension");
  std::vector<double> out(static_cast<size_t>(m_), 0.0);
  for (const auto& [mi, c] : terms_) {
    double mono = 1.0;
    for (int j = 0; j < n_; ++j) mono *= ipow(x[static_cast<size_t>(j)], mi[j]);
    for (int k = 0; k < m_; ++k) out[static_cast<size_t>(k)] += c[static_cast<size_t>(k)] * mono;
  }
  return out;
}

PolyMap& PolyMap::operator+=(const PolyMap& o) {
  if (o.n_ != n_ || o.m_ != m_) throw std::invalid_argument("polynomial shape mismatch");
  for (const auto& [mi, c] : o.terms_) {
    std::vector<double> v = coeff(mi);
    for (int k = 0; k < m_; ++k) v[static_cast<size_t>(k)] += c[static_cast<size_t>(k)];
    set_coeff(mi, std::move(v));
  }
  return *this;
}

PolyMap& PolyMap::operator-=(const PolyMap& o) {
  if (o.n_ != n_ || o.m_ != m_) throw std::invalid_argument("polynomial shape mismatch");
  for (const auto& [mi, c] : o.terms_) {
    std::vector<double> v = coeff(mi);
    for (int k = 0; k < m_; ++k) v[static_cast<size_t>(k)] -= c[static_cast<size_t>(k)];
    set_coeff(mi, std::move(v));
  }
  return *this;
}

PolyMap& PolyMap::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [mi, c] : terms_)
    for (double& v : c) v *= s;
  return *this;
}

PolyMap PolyMap::component(int out) const {
  if (out < 0 || out >= m_) throw std::invalid_argument("component index out of range");
  PolyMap r(n_, 1);
  for (const auto& [mi, c] : terms_) r.set_coeff(mi, {c[static_cast<size_t>(out)]});
  return r;
}

PolyMap PolyMap::constant(int n, std::vector<double> value) {
  PolyMap r(n, static_cast<int>(value.size()));
  r.set_coeff(MultiIndex::zeros(n), std::move(value));
  return r;
}

PolyMap PolyMap::monomial(int n, int m, const MultiIndex& mi, int out, double c) {
  PolyMap r(n, m);
  r.add_coeff(mi, out, c);
  return r;
}

PolyMap PolyMap::coordinate(int n, int j) {
  return monomial(n, 1, MultiIndex::unit(n, j), 0, 1.0);
}

PolyMap partial(const PolyMap& f, const MultiIndex& alpha) {
  if (alpha.vars() != f.domain_dim())
    throw std::invalid_argument("derivative multi-index length != domain dimension");
  PolyMap r(f.domain_dim(), f.range_dim());
  for (const auto& [mi, c] : f.terms()) {
    bool ok = true;
    double factor = 1.0;
    std::vector<unsigned> e(static_cast<size_t>(f.domain_dim()), 0);
    for (int j = 0; j < f.domain_dim(); ++j) {
      if (mi[j] < alpha[j]) {
        ok = false;
        break;
      }
      factor *= falling_factorial(mi[j], alpha[j]);
      e[static_cast<size_t>(j)] = mi[j] - alpha[j];
    }
    if (!ok) continue;
    std::vector<double> v(c);
    for (double& x : v) x *= factor;
    MultiIndex key{std::move(e)};
    std::vector<double> acc = r.coeff(key);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    r.set_coeff(key, std::move(acc));
  }
  return r;
}

PolyMap multiply(const PolyMap& a, const PolyMap& b) {
  if (a.domain_dim() != b.domain_dim())
    throw std::invalid_argument("product factors live on different domains");
  if (a.range_dim() != 1 && b.range_dim() != 1)
    throw std::invalid_argument("at least one product factor must be scalar");
  const PolyMap& scalar = (a.range_dim() == 1) ? a : b;
  const PolyMap& other = (a.range_dim() == 1) ? b : a;
  PolyMap r(other.domain_dim(), other.range_dim());
  for (const auto& [mi_s, cs] : scalar.terms()) {
    for (const auto& [mi_o, co] : other.terms()) {
      MultiIndex key = mi_s.plus(mi_o);
      if (key.degree() > kMaxDegree)
        throw std::invalid_argument("product degree exceeds cap " + std::to_string(kMaxDegree));
      std::vector<double> acc = r.coeff(key);
      for (size_t k = 0; k < acc.size(); ++k) acc[k] += cs[0] * co[k];
      r.set_coeff(key, std::move(acc));
    }
  }
  return r;
}

PolyMap pow(const PolyMap& base, unsigned e) {
  if (base.range_dim() != 1) throw std::invalid_argument("pow requires a scalar polynomial");
  PolyMap r = PolyMap::constant(base.domain_dim(), {1.0});
  for (unsigned i = 0; i < e; ++i) r = multiply(r, base);
  return r;
}

PolyMap substitute_affine(const PolyMap& f, std::span<const double> offset,
                          const Eigen::MatrixXd& T) {
  if (static_cast<int>(offset.size()) != f.domain_dim() || T.rows() != f.domain_dim())
    throw std::invalid_argument("affine substitution shape mismatch");
  const int q = static_cast<int>(T.cols());
  // Linear coordinate polynomials L_j(u) = offset_j + sum_l T(j,l) u_l.
  std::vector<PolyMap> lin;
  lin.reserve(static_cast<size_t>(f.domain_dim()));
  for (int j = 0; j < f.domain_dim(); ++j) {
    PolyMap L(q, 1);
    L.add_coeff(MultiIndex::zeros(q), 0, offset[static_cast<size_t>(j)]);
    for (int l = 0; l < q; ++l) L.add_coeff(MultiIndex::unit(q, l), 0, T(j, l));
    lin.push_back(std::move(L));
  }
  PolyMap r(q, f.range_dim());
  for (const auto& [mi, c] : f.terms()) {
    PolyMap mono = PolyMap::constant(q, {1.0});
    for (int j = 0; j < f.domain_dim(); ++j)
      if (mi[j] > 0) mono = multiply(mono, pow(lin[static_cast<size_t>(j)], mi[j]));
    for (const auto& [beta, s] : mono.terms()) {
      std::vector<double> acc = r.coeff(beta);
      for (size_t k = 0; k < acc.size(); ++k) acc[k] += s[0] * c[k];
      r.set_coeff(beta, std::move(acc));
    }
  }
  return r;
}

PolyMap linear_output_transform(const PolyMap& f, const Eigen::MatrixXd& M) {
  if (M.cols() != f.range_dim())
    throw std::invalid_argument("output transform shape mismatch");
  PolyMap r(f.domain_dim(), static_cast<int>(M.rows()));
  for (const auto& [mi, c] : f.terms()) {
    std::vector<double> v(static_cast<size_t>(M.rows()), 0.0);
    for (int i = 0; i < M.rows(); ++i)
      for (int k = 0; k < M.cols(); ++k) v[static_cast<size_t>(i)] += M(i, k) * c[static_cast<size_t>(k)];
    r.set_coeff(mi, std::move(v));
  }
  return r;
}

PolyMap truncate_degree(const PolyMap& f, unsigned k) {
  PolyMap r(f.domain_dim(), f.range_dim());
  for (const auto& [mi, c] : f.terms())
    if (mi.degree() <= k) r.set_coeff(mi, c);
  return r;
}

Jet::Jet(int order, std::vector<double> base, PolyMap taylor)
    : order_(order), base_(std::move(base)), taylor_(std::move(taylor)) {
  if (order_ < 0) throw std::invalid_argument("jet order must be >= 0");
  if (static_cast<int>(base_.size()) != taylor_.domain_dim())
    throw std::invalid_argument("jet base point has wrong dimension");
  if (taylor_.degree() > static_cast<unsigned>(order_))
    throw std::invalid_argument("jet polynomial degree exceeds jet order");
}

std::vector<double> Jet::value() const {
  return taylor_.coeff(MultiIndex::zeros(taylor_.domain_dim()));
}

double Jet::taylor_coeff(const MultiIndex& mi, int out) const {
  return taylor_.coeff(mi, out);
}

double Jet::derivative(const MultiIndex& mi, int out) const {
  if (mi.degree() > static_cast<unsigned>(order_))
    throw std::invalid_argument("derivative order exceeds jet order");
  double fact = 1.0;
  for (int j = 0; j < mi.vars(); ++j)
    for (unsigned i = 2; i <= mi[j]; ++i) fact *= static_cast<double>(i);
  return fact * taylor_.coeff(mi, out);
}

PolyMap Jet::homogeneous_part(int i) const {
  PolyMap r(taylor_.domain_dim(), taylor_.range_dim());
  for (const auto& [mi, c] : taylor_.terms())
    if (mi.degree() == static_cast<unsigned>(i)) r.set_coeff(mi, c);
  return r;
}

std::vector<double> Jet::reconstruct(std::span<const double> x) const {
  if (x.size() != base_.size()) throw std::invalid_argument("reconstruction point has wrong dimension");
  std::vector<double> u(base_.size());
  for (size_t i = 0; i < u.size(); ++i) u[i] = x[i] - base_[i];
  return taylor_(u);
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ != order_ || o.base_ != base_)
    throw std::invalid_argument("jet sum requires equal order and base point");
  taylor_ += o.taylor_;
  return *this;
}

Jet jet(const PolyMap& f, std::span<const double> x, int k) {
  if (k < 0) throw std::invalid_argument("jet order must be >= 0");
  if (static_cast<int>(x.size()) != f.domain_dim())
    throw std::invalid_argument("jet base point has wrong dimension");
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(f.domain_dim(), f.domain_dim());
  PolyMap shifted = substitute_affine(f, x, eye);
  return Jet(k, std::vector<double>(x.begin(), x.end()),
             truncate_degree(shifted, static_cast<unsigned>(k)));
}

std::pair<Jet, PolyMap> jet_decompose(const Jet& j) {
  if (j.order() < 1) throw std::invalid_argument("cannot decompose a 0-jet");
  Jet lower(j.order() - 1, j.base_point(),
            truncate_degree(j.taylor(), static_cast<unsigned>(j.order() - 1)));
  return {std::move(lower), j.homogeneous_part(j.order())};
}

Jet jet_recompose(const Jet& lower, const PolyMap& top) {
  PolyMap taylor = lower.taylor();
  taylor += top;
  return Jet(lower.order() + 1, lower.base_point(), std::move(taylor));
}

void write_polymap(std::ostream& out, const PolyMap& f, const std::string& header_word) {
  out << header_word << ' ' << f.domain_dim() << ' ' << f.range_dim() << '\n';
  for (const auto& [mi, c] : f.terms()) {
    for (int j = 0; j < f.domain_dim(); ++j) {
      if (j) out << ' ';
      out << mi[j];
    }
    out << " :";
    for (int k = 0; k < f.range_dim(); ++k) out << ' ' << format_double(c[static_cast<size_t>(k)]);
    out << '\n';
  }
}

std::string write_polymap(const PolyMap& f) {
  std::ostringstream os;
  write_polymap(os, f);
  return os.str();
}

PolyMap read_polymap(std::istream& in, const std::string& header_word, bool stop_at_blank) {
  std::string line;
  // Skip leading blank lines.
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  auto head = split_ws(line);
  if (head.size() != 3 || head[0] != header_word)
    throw std::invalid_argument("expected header '" + header_word + " n m', got '" + line + "'");
  int n = static_cast<int>(parse_long(head[1]));
  int m = static_cast<int>(parse_long(head[2]));
  PolyMap f(n, m);
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) {
      if (stop_at_blank) break;
      continue;
    }
    if (t[0] == '#') continue;
    auto tokens = split_ws(t);
    if (tokens.size() != static_cast<size_t>(n + m + 1) || tokens[static_cast<size_t>(n)] != ":")
      throw std::invalid_argument("malformed monomial line: '" + line + "'");
    std::vector<unsigned> e(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      long v = parse_long(tokens[static_cast<size_t>(j)]);
      if (v < 0) throw std::invalid_argument("negative exponent in '" + line + "'");
      e[static_cast<size_t>(j)] = static_cast<unsigned>(v);
    }
    std::vector<double> c(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) c[static_cast<size_t>(k)] = parse_double(tokens[static_cast<size_t>(n + 1 + k)]);
    MultiIndex mi{std::move(e)};
    std::vector<double> acc = f.coeff(mi);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] += c[k];
    f.set_coeff(mi, std::move(acc));
  }
  return f;
}

PolyMap read_polymap_file(const std::string& path, const std::string& header_word) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open polynomial file: " + path);
  return read_polymap(in, header_word, false);
}

}  // namespace prevlab
