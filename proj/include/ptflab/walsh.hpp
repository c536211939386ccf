#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ptflab {

// In-place Walsh-Hadamard butterfly (unnormalized).  Applied to a multilinear
// coefficient vector indexed by subset mask, the result is the table of values
// on {-1,1}^n with vertex mask b encoding x_i = -1 iff bit i of b is set.
// Self-inverse up to a factor 2^n.
inline void walsh_hadamard(std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("walsh_hadamard: size must be a power of two");
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        double a = v[j], b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

}  // namespace ptflab
