#ifndef PREVLAB_PROBE_HPP
#define PREVLAB_PROBE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "prevlab/polyjet.hpp"

namespace prevlab {

// An element of the ambient function space: either a polynomial map or a
// finite truncation of a real sequence.
using SeqElement = std::vector<double>;
using FunctionElement = std::variant<PolyMap, SeqElement>;

enum class AmbientKind { poly, seq };

struct ProbeAmbient {
  AmbientKind kind = AmbientKind::poly;
  int n = 1;  // poly only
  int m = 1;  // poly only
  std::string label() const;
};

/// Finite-dimensional probe subspace: an ordered basis g_1..g_q together with
/// the sampling box [-R, R]^q for the coefficients lambda. Lines f + sum
/// lambda_i g_i are what the shyness engine walks along.
struct Probe {
  std::string id;
  ProbeAmbient ambient;
  std::vector<FunctionElement> basis;
  double box_radius = 1.0;

  int dim() const { return static_cast<int>(basis.size()); }  // q
};

// f + sum lambda_i g_i; validates ambient compatibility.
FunctionElement combine(const FunctionElement& base, const Probe& p,
                        std::span<const double> lambda);

// The m constant maps e_1..e_m on R^1 (degree-0 polynomials).
Probe constant_probe(int m);

// One basis element: the truncated sequence (1, 1/2, ..., 1/N).
Probe harmonic_probe(int length);

// Monomial basis of polynomials of degree <= k from R^n to R^m; q = m*C(n+k, k).
Probe polynomial_probe(int n, int m, int k);

// The n*m maps x -> x_j e_i; q = n*m.
Probe linear_probe(int n, int m);

// Rank check of an evaluation matrix on seeded random points; never passes
// for a duplicated basis element. Relative singular-value tolerance 1e-10.
bool probe_independent(const Probe& p, std::uint64_t seed = 20240901ULL);

/// The two Hermite families from the period-p interpolation argument:
/// point_funcs[j] = P_j(x) = prod_{i != j} |x - x_i|^2      (degree 2p-2)
/// gradient_funcs[j][k] = k-th coordinate of P_j(x) (x - x_j) (degree 2p-1)
/// P_j vanishes at every x_i except x_j; each P_jk and all its first partials
/// vanish at every x_i except the k-th partial at x_j.
struct HermiteBasis {
  std::vector<PolyMap> point_funcs;
  std::vector<std::vector<PolyMap>> gradient_funcs;
};

HermiteBasis hermite_basis(const std::vector<std::vector<double>>& points);

// Degree <= 2p-1 map h with h(x_i) = values[i] and Dh(x_i) = gradients[i]
// (gradients[i] is m x n, row c = gradient of coordinate c). Each range
// coordinate is interpolated independently; the solve is triangular in the
// {P_j, P_jk} basis (values first, then gradient corrections).
PolyMap hermite_interpolate(const std::vector<std::vector<double>>& points,
                            const std::vector<std::vector<double>>& values,
                            const std::vector<Eigen::MatrixXd>& gradients);

// Header "probe q R ambient", then the basis elements: polynomial elements in
// the polyjet text format separated by blank lines, sequence elements as
// "seq N v1 ... vN".
std::string write_probe(const Probe& p);
Probe read_probe(std::istream& in);
Probe read_probe_file(const std::string& path);

}  // namespace prevlab

#endif
