#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ptflab/poly.hpp"
#include "ptflab/rng.hpp"

namespace ptflab {

// Dense row-major tensor.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> dims);

  static DenseTensor matrix(std::size_t rows, std::size_t cols);
  static DenseTensor from_vector(const std::vector<double>& v);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& at(const std::vector<std::size_t>& idx);
  double at(const std::vector<std::size_t>& idx) const;

  // rank-2 convenience accessors
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  double l2_norm() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
};

using Matrix = DenseTensor;  // rank-2

// Symmetric d-tensor stored by sorted index tuple (one representative per orbit).
struct SymmetricTensor {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::map<std::vector<std::uint32_t>, double> data;  // keys sorted ascending

  DenseTensor to_dense() const;
  // A(x, x, ..., x)
  double apply(const std::vector<double>& x) const;
};

// A_{i_1..i_d} = D_{i_1}...D_{i_d} p for homogeneous p of degree d;
// satisfies A(X,...,X) = d! p(X).
SymmetricTensor tensor_of(const Poly& p);

// Einstein contraction over the given (axisA, axisB) pairs; no pairs is the
// outer product, all axes paired the scalar dot product (rank-0 result).
DenseTensor contract(const DenseTensor& A, const DenseTensor& B,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Antisymmetrization over the listed axes (equal lengths, k <= 6).
DenseTensor wedge(const DenseTensor& A, const std::vector<std::size_t>& wedge_axes);

// |wedge over the row axes of B tensor ... tensor B (k copies)|_2, via Newton's
// identities on the power sums of B^T B; equals the generic wedge computation.
double wedge_power_norm(const Matrix& B, unsigned k);

// --- symmetric eigendecomposition (cyclic Jacobi, no external dependency) ----

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns; first nonzero component positive
};

SymmetricEigen jacobi_eigen(const Matrix& A);

// Singular values of a rank-2 tensor, descending, via the Gram matrix.
std::vector<double> singular_values(const Matrix& B);

// Frobenius-optimal rank-r residual sqrt(sum_{i>r} sigma_i^2) (Eckart-Young).
double best_rank_residual(const Matrix& B, unsigned r);

// --- constructive low-rank approximation -------------------------------------

struct LowRankResult {
  // k-1 rank-one factors (V row-space side, W column side): B ~= sum V^l (W^l)^T
  std::vector<std::pair<std::vector<double>, std::vector<double>>> factors;
  double residual_norm = 0.0;
  double wedge_norm = 0.0;  // measured |wedge_k B x...x B|_2
};

// Gaussian probes X^1..X^{k-1}, V^l = B X^l, rows projected onto the span
// complement; 8 probe redraws keeping the best residual.
LowRankResult low_rank_approx(const Matrix& B, unsigned k, double eps, Seed seed);

// --- exact quadratic decomposition -------------------------------------------

struct QuadraticDecomposition {
  std::vector<std::pair<Poly, Poly>> factors;  // deg(a_i) + deg(b_i) = 2
  Poly remainder;                              // degree <= 1
};

// p = sum a_i b_i + remainder via spectral decomposition of the degree-2 part.
QuadraticDecomposition decompose_quadratic(const Poly& p);

// --- ordinal weights ----------------------------------------------------------

// Polynomial in omega with nonnegative integer coefficients; coeffs[i] is the
// coefficient of omega^i.
struct OrdinalPoly {
  std::vector<std::uint64_t> coeffs;

  static OrdinalPoly from_coeffs(std::vector<std::uint64_t> c);
  std::uint64_t coefficient_sum() const;
};

enum class Ordering { Less, Equal, Greater };

Ordering ordinal_compare(const OrdinalPoly& a, const OrdinalPoly& b);

// w(x) = sum_i x^{deg q_i} (4 * 3^i (N+1)/c_inv^{-1}... see docs): weight of a
// partial decomposition state with entries (deg q_i, a_i), caps 4*3^i*(N+1)*c_inv.
OrdinalPoly decomposition_weight(const std::vector<std::pair<unsigned, unsigned>>& entries,
                                 unsigned N, unsigned c_inv);

}  // namespace ptflab
