#include "prevlab/probe.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prevlab/rng.hpp"
#include "prevlab/text.hpp"

namespace prevlab {

namespace {

constexpr double kMinPointSeparation = 1e-9;
constexpr double kInterpolationResidualTol = 1e-8;

long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Enumerates all exponent tuples of total degree <= k in lexicographic order.
void enumerate_indices(int n, int k, std::vector<MultiIndex>& out) {
  std::vector<unsigned> cur(static_cast<size_t>(n), 0);
  // Odometer over the graded set; plain recursive walk.
  struct Walk {
    int n, k;
    std::vector<MultiIndex>& out;
    std::vector<unsigned>& cur;
    void go(int pos, int left) {
      if (pos == n) {
        out.emplace_back(cur);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur[static_cast<size_t>(pos)] = static_cast<unsigned>(e);
        go(pos + 1, left - e);
      }
      cur[static_cast<size_t>(pos)] = 0;
    }
  } walk{n, k, out, cur};
  walk.go(0, k);
}

}  // namespace

std::string ProbeAmbient::label() const {
  if (kind == AmbientKind::seq) return "seq";
  return "poly " + std::to_string(n) + " " + std::to_string(m);
}

FunctionElement combine(const FunctionElement& base, const Probe& p,
                        std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != p.dim())
    throw std::invalid_argument("lambda length != probe dimension");
  if (p.ambient.kind == AmbientKind::poly) {
    const PolyMap* f = std::get_if<PolyMap>(&base);
    if (!f) throw std::invalid_argument("probe ambient is poly but base element is a sequence");
    if (f->domain_dim() != p.ambient.n || f->range_dim() != p.ambient.m)
      throw std::invalid_argument("base element shape does not match probe ambient");
    PolyMap sum = *f;
    for (int i = 0; i < p.dim(); ++i) {
      const PolyMap& g = std::get<PolyMap>(p.basis[static_cast<size_t>(i)]);
      sum += lambda[static_cast<size_t>(i)] * g;
    }
    return sum;
  }
  const SeqElement* a = std::get_if<SeqElement>(&base);
  if (!a) throw std::invalid_argument("probe ambient is seq but base element is a polynomial");
  SeqElement sum = *a;
  for (int i = 0; i < p.dim(); ++i) {
    const SeqElement& g = std::get<SeqElement>(p.basis[static_cast<size_t>(i)]);
    if (g.size() > sum.size()) sum.resize(g.size(), 0.0);
    for (size_t j = 0; j < g.size(); ++j) sum[j] += lambda[static_cast<size_t>(i)] * g[j];
  }
  return sum;
}

Probe constant_probe(int m) {
  if (m < 1) throw std::invalid_argument("constant_probe requires m >= 1");
  Probe p;
  p.id = "constant(" + std::to_string(m) + ")";
  p.ambient = {AmbientKind::poly, 1, m};
  for (int i = 0; i < m; ++i) {
    std::vector<double> e(static_cast<size_t>(m), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    p.basis.emplace_back(PolyMap::constant(1, std::move(e)));
  }
  return p;
}

Probe harmonic_probe(int length) {
  if (length < 1) throw std::invalid_argument("harmonic_probe requires length >= 1");
  Probe p;
  p.id = "harmonic(" + std::to_string(length) + ")";
  p.ambient = {AmbientKind::seq, 0, 0};
  SeqElement g(static_cast<size_t>(length));
  for (int i = 0; i < length; ++i) g[static_cast<size_t>(i)] = 1.0 / static_cast<double>(i + 1);
  p.basis.emplace_back(std::move(g));
  return p;
}

Probe polynomial_probe(int n, int m, int k) {
  if (n < 1 || n > kMaxDomainDim || k < 0 || static_cast<unsigned>(k) > kMaxDegree || m < 1)
    throw std::invalid_argument("polynomial_probe outside degree caps");
  Probe p;
  p.id = "polynomial(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(k) + ")";
  p.ambient = {AmbientKind::poly, n, m};
  std::vector<MultiIndex> indices;
  enumerate_indices(n, k, indices);
  for (const MultiIndex& mi : indices)
    for (int i = 0; i < m; ++i)
      p.basis.emplace_back(PolyMap::monomial(n, m, mi, i, 1.0));
  // q = m * C(n+k, k) by construction.
  if (p.dim() != m * static_cast<int>(binom(n + k, k)))
    throw std::logic_error("monomial enumeration out of step");
  return p;
}

Probe linear_probe(int n, int m) {
  if (n < 1 || n > kMaxDomainDim || m < 1)
    throw std::invalid_argument("linear_probe outside dimension caps");
  Probe p;
  p.id = "linear(" + std::to_string(n) + "," + std::to_string(m) + ")";
  p.ambient = {AmbientKind::poly, n, m};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      p.basis.emplace_back(PolyMap::monomial(n, m, MultiIndex::unit(n, j), i, 1.0));
  return p;
}

bool probe_independent(const Probe& p, std::uint64_t seed) {
  const int q = p.dim();
  if (q < 1) return false;
  Eigen::MatrixXd eval;
  if (p.ambient.kind == AmbientKind::poly) {
    const int pts = 2 * q + 4;
    eval.resize(q, static_cast<Eigen::Index>(pts) * p.ambient.m);
    Rng rng(seed);
    std::vector<std::vector<double>> xs(static_cast<size_t>(pts));
    for (auto& x : xs) {
      x.resize(static_cast<size_t>(p.ambient.n));
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
    }
    for (int i = 0; i < q; ++i) {
      const PolyMap& g = std::get<PolyMap>(p.basis[static_cast<size_t>(i)]);
      for (int s = 0; s < pts; ++s) {
        std::vector<double> y = g(xs[static_cast<size_t>(s)]);
        for (int k = 0; k < p.ambient.m; ++k)
          eval(i, static_cast<Eigen::Index>(s) * p.ambient.m + k) = y[static_cast<size_t>(k)];
      }
    }
  } else {
    size_t len = 0;
    for (const auto& b : p.basis) len = std::max(len, std::get<SeqElement>(b).size());
    eval.resize(q, static_cast<Eigen::Index>(len));
    eval.setZero();
    for (int i = 0; i < q; ++i) {
      const SeqElement& g = std::get<SeqElement>(p.basis[static_cast<size_t>(i)]);
      for (size_t j = 0; j < g.size(); ++j) eval(i, static_cast<Eigen::Index>(j)) = g[j];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(eval);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return false;
  return sv(sv.size() - 1) > 1e-10 * sv(0);
}

HermiteBasis hermite_basis(const std::vector<std::vector<double>>& points) {
  const int p = static_cast<int>(points.size());
  if (p < 1) throw std::invalid_argument("hermite_basis requires at least one point");
  const int n = static_cast<int>(points[0].size());
  for (const auto& x : points)
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("hermite points have mixed dimensions");
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      double d2 = 0;
      for (int k = 0; k < n; ++k) {
        double d = points[static_cast<size_t>(i)][static_cast<size_t>(k)] -
                   points[static_cast<size_t>(j)][static_cast<size_t>(k)];
        d2 += d * d;
      }
      if (std::sqrt(d2) <= kMinPointSeparation)
        throw std::invalid_argument("hermite points " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide");
    }

  HermiteBasis basis;
  basis.point_funcs.reserve(static_cast<size_t>(p));
  basis.gradient_funcs.resize(static_cast<size_t>(p));
  for (int j = 0; j < p; ++j) {
    // P_j = prod_{i != j} |x - x_i|^2; empty product = 1.
    PolyMap pj = PolyMap::constant(n, {1.0});
    for (int i = 0; i < p; ++i) {
      if (i == j) continue;
      PolyMap dist2(n, 1);
      for (int k = 0; k < n; ++k) {
        PolyMap diff = PolyMap::coordinate(n, k);
        diff += PolyMap::constant(n, {-points[static_cast<size_t>(i)][static_cast<size_t>(k)]});
        dist2 += multiply(diff, diff);
      }
      pj = multiply(pj, dist2);
    }
    // P_jk = k-th coordinate of P_j(x) (x - x_j).
    auto& grads = basis.gradient_funcs[static_cast<size_t>(j)];
    grads.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      PolyMap diff = PolyMap::coordinate(n, k);
      diff += PolyMap::constant(n, {-points[static_cast<size_t>(j)][static_cast<size_t>(k)]});
      grads.push_back(multiply(pj, diff));
    }
    basis.point_funcs.push_back(std::move(pj));
  }
  return basis;
}

PolyMap hermite_interpolate(const std::vector<std::vector<double>>& points,
                            const std::vector<std::vector<double>>& values,
                            const std::vector<Eigen::MatrixXd>& gradients) {
  const int p = static_cast<int>(points.size());
  if (static_cast<int>(values.size()) != p || static_cast<int>(gradients.size()) != p)
    throw std::invalid_argument("values/gradients length must equal number of points");
  const int n = static_cast<int>(points[0].size());
  const int m = static_cast<int>(values[0].size());
  for (const auto& v : values)
    if (static_cast<int>(v.size()) != m) throw std::invalid_argument("values have mixed dimensions");
  for (const auto& g : gradients)
    if (g.rows() != m || g.cols() != n)
      throw std::invalid_argument("gradient matrices must be m x n");

  HermiteBasis basis = hermite_basis(points);

  // In the {P_j, P_jk} basis the system is triangular: P_j(x_i) = 0 for
  // i != j, P_jk(x_i) = 0 for all i, and the only surviving first partial of
  // P_jk at the nodes is the k-th one at x_j, with value P_j(x_j).
  PolyMap h(n, m);
  for (int j = 0; j < p; ++j) {
    const PolyMap& pj = basis.point_funcs[static_cast<size_t>(j)];
    const auto& xj = points[static_cast<size_t>(j)];
    double pjj = pj(xj)[0];
    if (pjj == 0.0) throw std::runtime_error("degenerate hermite configuration: P_j(x_j) = 0");
    std::vector<double> grad_pj(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
      grad_pj[static_cast<size_t>(k)] = partial(pj, MultiIndex::unit(n, k))(xj)[0];
    for (int c = 0; c < m; ++c) {
      double a = values[static_cast<size_t>(j)][static_cast<size_t>(c)] / pjj;
      if (a != 0.0) {
        PolyMap term(n, m);
        for (const auto& [mi, cv] : pj.terms()) term.add_coeff(mi, c, a * cv[0]);
        h += term;
      }
      for (int k = 0; k < n; ++k) {
        double target = gradients[static_cast<size_t>(j)](c, k);
        double b = (target - a * grad_pj[static_cast<size_t>(k)]) / pjj;
        if (b == 0.0) continue;
        const PolyMap& pjk = basis.gradient_funcs[static_cast<size_t>(j)][static_cast<size_t>(k)];
        PolyMap term(n, m);
        for (const auto& [mi, cv] : pjk.terms()) term.add_coeff(mi, c, b * cv[0]);
        h += term;
      }
    }
  }

  // Verify the interpolation conditions; near-coincident points surface here.
  double residual = 0.0;
  for (int j = 0; j < p; ++j) {
    const auto& xj = points[static_cast<size_t>(j)];
    std::vector<double> hx = h(xj);
    for (int c = 0; c < m; ++c)
      residual = std::max(residual,
                          std::abs(hx[static_cast<size_t>(c)] -
                                   values[static_cast<size_t>(j)][static_cast<size_t>(c)]));
    for (int k = 0; k < n; ++k) {
      std::vector<double> dk = partial(h, MultiIndex::unit(n, k))(xj);
      for (int c = 0; c < m; ++c)
        residual = std::max(residual, std::abs(dk[static_cast<size_t>(c)] -
                                               gradients[static_cast<size_t>(j)](c, k)));
    }
  }
  if (residual > kInterpolationResidualTol)
    throw std::runtime_error("hermite interpolation residual " + format_double(residual) +
                             " exceeds tolerance; point configuration is near-degenerate");
  return h;
}

std::string write_probe(const Probe& p) {
  std::ostringstream os;
  os << "probe " << p.dim() << ' ' << format_double(p.box_radius) << ' ' << p.ambient.label()
     << '\n';
  for (const auto& b : p.basis) {
    if (const PolyMap* f = std::get_if<PolyMap>(&b)) {
      write_polymap(os, *f);
      os << '\n';
    } else {
      const SeqElement& s = std::get<SeqElement>(b);
      os << "seq " << s.size();
      for (double v : s) os << ' ' << format_double(v);
      os << "\n\n";
    }
  }
  return os.str();
}

Probe read_probe(std::istream& in) {
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  auto head = split_ws(line);
  if (head.size() < 4 || head[0] != "probe")
    throw std::invalid_argument("expected header 'probe q R ambient'");
  int q = static_cast<int>(parse_long(head[1]));
  double radius = parse_double(head[2]);
  Probe p;
  p.box_radius = radius;
  if (head[3] == "seq") {
    p.ambient = {AmbientKind::seq, 0, 0};
  } else if (head[3] == "poly" && head.size() == 6) {
    p.ambient = {AmbientKind::poly, static_cast<int>(parse_long(head[4])),
                 static_cast<int>(parse_long(head[5]))};
  } else {
    throw std::invalid_argument("malformed probe ambient in header");
  }
  for (int i = 0; i < q; ++i) {
    if (p.ambient.kind == AmbientKind::seq) {
      while (std::getline(in, line))
        if (!trim(line).empty()) break;
      auto tok = split_ws(line);
      if (tok.size() < 2 || tok[0] != "seq")
        throw std::invalid_argument("expected 'seq N v1 ... vN' element");
      size_t len = static_cast<size_t>(parse_long(tok[1]));
      if (tok.size() != len + 2) throw std::invalid_argument("sequence element length mismatch");
      SeqElement s(len);
      for (size_t j = 0; j < len; ++j) s[j] = parse_double(tok[j + 2]);
      p.basis.emplace_back(std::move(s));
    } else {
      p.basis.emplace_back(read_polymap(in, "poly", /*stop_at_blank=*/true));
    }
  }
  p.id = "probe-file(q=" + std::to_string(q) + ")";
  return p;
}

Probe read_probe_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open probe file: " + path);
  return read_probe(in);
}

}  // namespace prevlab
