#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptflab/rng.hpp"

namespace ptflab {

// Monomial prod x_i^{a_i}: sorted (variable, exponent) pairs, exponents > 0.
struct Monomial {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;

  Monomial() = default;
  explicit Monomial(std::vector<std::pair<std::uint32_t, std::uint32_t>> f);

  int degree() const;
  std::uint32_t exponent(std::uint32_t var) const;
  bool operator==(const Monomial&) const = default;
  auto operator<=>(const Monomial&) const = default;
};

// Real polynomial on R^n, canonical form (no zero coefficients, terms in
// ascending monomial order).  Immutable value type; all operations are pure.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::uint32_t n) : n_(n) {}
  Poly(std::uint32_t n, std::map<Monomial, double> terms);

  static Poly constant(std::uint32_t n, double c);
  static Poly variable(std::uint32_t n, std::uint32_t i);

  std::uint32_t n() const { return n_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Monomial& m, double c);  // canonicalizing accumulate

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double c) const;
  Poly operator-() const { return *this * -1.0; }

  Poly derivative(std::uint32_t var) const;
  // Part of total degree exactly k (monomial grading, not harmonic).
  Poly degree_part(int k) const;

  bool operator==(const Poly&) const = default;

 private:
  std::uint32_t n_ = 0;
  std::map<Monomial, double> terms_;
};

// Multilinear polynomial with subset-bitmask keys; n <= 63.
class MultilinearPoly {
 public:
  MultilinearPoly() = default;
  explicit MultilinearPoly(std::uint32_t n);
  MultilinearPoly(std::uint32_t n, std::map<std::uint64_t, double> terms);

  std::uint32_t n() const { return n_; }
  const std::map<std::uint64_t, double>& terms() const { return terms_; }
  int degree() const;  // max popcount over keys, -1 if zero

  void add_term(std::uint64_t mask, double c);

  MultilinearPoly operator+(const MultilinearPoly& o) const;
  MultilinearPoly operator-(const MultilinearPoly& o) const;
  MultilinearPoly operator*(double c) const;

  Poly to_poly() const;

  // sum of squared coefficients; equals both |p|_2^2 and |p|_{B,2}^2.
  double l2_squared() const;
  // sum over nonempty masks; Gaussian and Bernoulli variances coincide.
  double variance() const;

  bool operator==(const MultilinearPoly&) const = default;

 private:
  std::uint32_t n_ = 0;
  std::map<std::uint64_t, double> terms_;
};

// --- operations -------------------------------------------------------------

double evaluate(const Poly& p, const std::vector<double>& x);
double evaluate(const MultilinearPoly& p, const std::vector<double>& x);

// L(p): the unique multilinear polynomial agreeing with p on {-1,1}^n.
MultilinearPoly multilinearize(const Poly& p);
MultilinearPoly multilinearize(const MultilinearPoly& p);  // identity

enum class Mode { exact, monte_carlo };

struct MomentEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // 0 in exact mode
  std::uint64_t samples = 0;
};

// |p|_{B,t} for even t; exact mode enumerates all 2^n vertices (n <= 24).
MomentEstimate bernoulli_moment(const MultilinearPoly& p, unsigned t, Mode mode,
                                std::uint64_t samples = 0, Seed seed = {}, unsigned threads = 0);

// |p|_2 via the Hermite expansion (Parseval).
double gaussian_l2(const Poly& p);
inline double gaussian_l2(const MultilinearPoly& p) { return std::sqrt(p.l2_squared()); }

// E[p(X)] by the exact Gaussian moment formulas (double factorials).
double gaussian_expectation(const Poly& p);

// Inf_i(p) = |dp/dx_i|_2^2, via the Hermite-coefficient formula.
double influence(const Poly& p, std::uint32_t i);
std::vector<double> influences(const Poly& p);

double influence(const MultilinearPoly& p, std::uint32_t i);
std::vector<double> influences(const MultilinearPoly& p);

struct RegularityResult {
  bool regular = false;
  std::uint32_t witness = 0;  // maximizing index when not regular (ties -> lowest)
  double max_influence = 0.0;
  double variance = 0.0;
};

// max_i Inf_i(p) <= tau * var(p); throws on zero-variance input.
RegularityResult is_tau_regular(const MultilinearPoly& p, double tau);

struct Restriction {
  MultilinearPoly poly;                   // over the unassigned coordinates, reindexed
  std::vector<std::uint32_t> index_map;   // new index -> original index
};

// Plugs +-1 values into the assigned coordinates.
Restriction restricted(const MultilinearPoly& p, const std::map<std::uint32_t, int>& assignment);
// Same restriction but keeping original variable indices.
MultilinearPoly restrict_keep_indices(const MultilinearPoly& p,
                                      const std::map<std::uint32_t, int>& assignment);

// Dense table of p's values on {-1,1}^n via the Walsh-Hadamard butterfly;
// vertex mask b encodes x_i = -1 iff bit i is set.  n <= 26.
std::vector<double> hypercube_values(const MultilinearPoly& p);

// --- serialization ----------------------------------------------------------

std::string to_json(const Poly& p);
std::string to_json(const MultilinearPoly& p);
Poly poly_from_json(const std::string& text);
MultilinearPoly multilinear_from_json(const std::string& text);

// --- random instances -------------------------------------------------------

// All monomials of total degree <= d with N(0,1) coefficients.
Poly random_poly(std::uint32_t n, int d, CounterRng& rng);
// All masks of popcount <= d with N(0,1) coefficients.
MultilinearPoly random_multilinear(std::uint32_t n, int d, CounterRng& rng);

}  // namespace ptflab
