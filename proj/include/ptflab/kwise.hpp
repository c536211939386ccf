#pragma once

#include <cstdint>
#include <vector>

#include "ptflab/rng.hpp"

namespace ptflab {

// --- GF(2)[x] / GF(2^m) helpers ----------------------------------------------

// Lexicographically smallest irreducible polynomial of degree m over GF(2),
// as a bitmask including the x^m term.  m <= 24.
std::uint64_t smallest_irreducible_gf2(unsigned m);

// Carryless multiply mod the degree-m modulus.
std::uint64_t gf2m_mul(std::uint64_t a, std::uint64_t b, std::uint64_t modulus, unsigned m);

enum class OutputKind { sign, uniform01, gaussian };

// k-wise independent family with an exactly enumerable seed space.
//
// uniform01/gaussian kinds: 1 + refinement_digits independent degree-(k-1)
// polynomials over F_p; the output folds the evaluations into the base-p
// fraction 0.r_0 r_1 ... (cell-centered), so the refined real values are still
// exactly k-wise independent.  gaussian applies the inverse normal CDF.
//
// sign kind: one degree-(k-1) polynomial over GF(2^m), m = ceil(log2 n) + 1,
// evaluated at the nonzero point i+1; the output is +-1 from the low bit.
// Exactly unbiased and exactly k-wise independent.
class KWiseFamily {
 public:
  static KWiseFamily signs(std::uint64_t n, unsigned k);
  static KWiseFamily uniform01(std::uint64_t n, unsigned k, std::uint64_t prime_p,
                               unsigned refinement_digits);
  static KWiseFamily gaussian(std::uint64_t n, unsigned k, std::uint64_t prime_p,
                              unsigned refinement_digits);
  // refinement sized for >= 48 extra bits
  static KWiseFamily gaussian(std::uint64_t n, unsigned k, std::uint64_t prime_p);

  OutputKind kind() const { return kind_; }
  std::uint64_t domain() const { return n_; }
  unsigned k() const { return k_; }
  std::uint64_t prime_p() const { return p_; }
  unsigned gf_m() const { return gf_m_; }
  unsigned refinement_digits() const { return refinement_; }
  // bits to address one seed (coarse polynomial only, refinement excluded)
  unsigned seed_bits() const;
  unsigned refinement_bits() const;

  bool enumerable() const;              // full seed space <= 2^24
  std::uint64_t seed_space_size() const;  // throws when not enumerable

  // one seed = coefficient blocks; layout documented per kind above
  std::vector<std::uint64_t> coeffs_from_seed(Seed seed) const;
  std::vector<std::uint64_t> coeffs_from_index(std::uint64_t index) const;

  // field-level value of the coarse polynomial at point i
  std::uint64_t field_value(const std::vector<std::uint64_t>& coeffs, std::uint64_t i) const;
  // mapped output (+-1 / [0,1) / gaussian surrogate)
  double output(const std::vector<std::uint64_t>& coeffs, std::uint64_t i) const;

  double sample(Seed seed, std::uint64_t i) const;

  // residue of the 2-wise value reduced mod a; collision probability
  // <= 1/a + 1/p over the family
  std::uint64_t bucket(const std::vector<std::uint64_t>& coeffs, std::uint64_t i,
                       std::uint64_t a) const;
  std::uint64_t bucket_hash(Seed seed, std::uint64_t i, std::uint64_t a) const;

 private:
  KWiseFamily() = default;

  OutputKind kind_ = OutputKind::sign;
  std::uint64_t n_ = 0;
  unsigned k_ = 1;
  std::uint64_t p_ = 0;         // prime kinds
  unsigned gf_m_ = 0;           // sign kind
  std::uint64_t gf_mod_ = 0;
  unsigned refinement_ = 0;     // extra digit blocks (prime kinds)
  std::vector<std::uint16_t> gf_table_;  // multiplication table when 2^{2m} small
};

// Enumerates the whole seed space and returns the largest absolute deviation of
// any mixed moment of total degree <= degree_cap over the listed points from
// the fully-independent reference moments.
double verify_kwise(const KWiseFamily& f, const std::vector<std::uint64_t>& points,
                    unsigned degree_cap);

// Smallest prime >= x.
std::uint64_t next_prime(std::uint64_t x);

}  // namespace ptflab
