#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ptflab/poly.hpp"

namespace ptflab {

// Orthonormal Hermite expansion of a polynomial under the standard Gaussian
// measure.  Multi-index keys are trimmed of trailing zeros so they are unique
// across differing variable counts.
struct HermiteExpansion {
  std::uint32_t n = 0;
  std::map<std::vector<std::uint32_t>, double> coeffs;

  double l2_squared() const;
};

// Normalized H_k in one variable: E[H_j H_k] = delta_{jk}, H_k' = sqrt(k) H_{k-1}.
Poly hermite_1d(unsigned k);  // k <= 30

HermiteExpansion expand(const Poly& p);  // deg(p) <= 30
Poly reconstruct(const HermiteExpansion& e);

// p^[k]: projection onto the span of degree-k Hermite basis elements.
Poly harmonic_part(const Poly& p, unsigned k);
// |p^[k]|_2^2 for k = 0..deg(p), from a single expansion.
std::vector<double> harmonic_l2_squared(const Poly& p);

// Both sides of |D_{i_1}...D_{i_k} p|_2^2 <= d(d-1)...(d-k+1) |p|_2^2,
// computed from the Hermite coefficients; equality iff p is harmonic of
// degree d.
std::pair<double, double> derivative_norm_check(const Poly& p, unsigned k);

// Gauss-Hermite rule for the standard normal weight: E[f(X)] ~= sum w_i f(x_i),
// exact for polynomials of degree < 2m.  Nodes via Golub-Welsch.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(unsigned m);

}  // namespace ptflab
