#ifndef PREVLAB_POLYJET_HPP
#define PREVLAB_POLYJET_HPP

#include <Eigen/Dense>
#include <compare>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace prevlab {

// Desk-scale guardrails for polynomial data.
inline constexpr int kMaxDomainDim = 8;
inline constexpr unsigned kMaxDegree = 16;

// Exponent tuple of a monomial x_1^{e_1} ... x_n^{e_n}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> exps) : exps_(std::move(exps)) {}
  static MultiIndex zeros(int n) { return MultiIndex(std::vector<unsigned>(static_cast<size_t>(n), 0)); }
  static MultiIndex unit(int n, int j);

  int vars() const { return static_cast<int>(exps_.size()); }
  unsigned operator[](int i) const { return exps_[static_cast<size_t>(i)]; }
  unsigned degree() const;
  const std::vector<unsigned>& exponents() const { return exps_; }

  MultiIndex plus(const MultiIndex& o) const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<unsigned> exps_;
};

/// Sparse polynomial map R^n -> R^m: a table from exponent tuples to
/// coefficient vectors in R^m. Zero coefficient vectors are never stored.
class PolyMap {
 public:
  PolyMap(int domain_dim, int range_dim);

  int domain_dim() const { return n_; }
  int range_dim() const { return m_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const;  // max stored degree, 0 for the zero map

  const std::map<MultiIndex, std::vector<double>>& terms() const { return terms_; }

  std::vector<double> coeff(const MultiIndex& mi) const;
  double coeff(const MultiIndex& mi, int out) const;
  void set_coeff(const MultiIndex& mi, std::vector<double> c);
  void add_coeff(const MultiIndex& mi, int out, double c);

  std::vector<double> operator()(std::span<const double> x) const;

  PolyMap& operator+=(const PolyMap& o);
  PolyMap& operator-=(const PolyMap& o);
  PolyMap& operator*=(double s);
  friend PolyMap operator+(PolyMap a, const PolyMap& b) { return a += b; }
  friend PolyMap operator-(PolyMap a, const PolyMap& b) { return a -= b; }
  friend PolyMap operator*(double s, PolyMap a) { return a *= s; }

  PolyMap component(int out) const;  // scalar map picking one range coordinate

  static PolyMap constant(int n, std::vector<double> value);
  static PolyMap monomial(int n, int m, const MultiIndex& mi, int out, double c);
  static PolyMap coordinate(int n, int j);  // scalar x_j

 private:
  int n_ = 1;
  int m_ = 1;
  std::map<MultiIndex, std::vector<double>> terms_;
};

// Coefficient-level partial derivative d^{|alpha|} f / dx^alpha.
PolyMap partial(const PolyMap& f, const MultiIndex& alpha);

// Product; at least one factor must be scalar (range_dim 1).
PolyMap multiply(const PolyMap& a, const PolyMap& b);

PolyMap pow(const PolyMap& base, unsigned e);

// f(offset + T u) as a polynomial in u; T is domain_dim x new_dim.
PolyMap substitute_affine(const PolyMap& f, std::span<const double> offset,
                          const Eigen::MatrixXd& T);

// Composes with a linear map on the range: u |-> M f(u).
PolyMap linear_output_transform(const PolyMap& f, const Eigen::MatrixXd& M);

PolyMap truncate_degree(const PolyMap& f, unsigned k);

/// k-jet of a map at a base point: the degree-k Taylor polynomial stored in
/// coordinates u = x - base. The homogeneous degree-i part holds the Taylor
/// coefficients D^i f(x)/i!; true derivatives are exposed via factorial
/// scaling in derivative(), and that convention is relied on by the Hopf
/// computations.
class Jet {
 public:
  Jet(int order, std::vector<double> base, PolyMap taylor);

  int order() const { return order_; }
  const std::vector<double>& base_point() const { return base_; }
  const PolyMap& taylor() const { return taylor_; }

  std::vector<double> value() const;  // D^0 f(x)
  double taylor_coeff(const MultiIndex& mi, int out) const;
  double derivative(const MultiIndex& mi, int out) const;  // alpha! * coeff
  PolyMap homogeneous_part(int i) const;

  std::vector<double> reconstruct(std::span<const double> x) const;

  Jet& operator+=(const Jet& o);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }

 private:
  int order_;
  std::vector<double> base_;
  PolyMap taylor_;
};

Jet jet(const PolyMap& f, std::span<const double> x, int k);

// Splits a k-jet (k >= 1) into its (k-1)-jet and the homogeneous top term.
std::pair<Jet, PolyMap> jet_decompose(const Jet& j);
Jet jet_recompose(const Jet& lower, const PolyMap& top);

// Line-oriented text format: header "poly n m", then one monomial per line
// "e1 ... en : c1 ... cm". Decimal shortest-representation printing makes the
// round-trip bit exact.
std::string write_polymap(const PolyMap& f);
void write_polymap(std::ostream& out, const PolyMap& f, const std::string& header_word = "poly");
PolyMap read_polymap(std::istream& in, const std::string& header_word = "poly",
                     bool stop_at_blank = false);
PolyMap read_polymap_file(const std::string& path, const std::string& header_word = "poly");

}  // namespace prevlab

#endif
