#pragma once

#include <cstdint>
#include <vector>

#include "ptflab/kwise.hpp"
#include "ptflab/poly.hpp"
#include "ptflab/rng.hpp"

namespace ptflab {

// X = (1/sqrt(N)) sum of N blocks drawn from a k-wise gaussian family.
struct GaussianPrgSpec {
  std::uint32_t n = 0;
  int d = 1;
  std::uint32_t N = 1;
  KWiseFamily family;        // gaussian kind; block i uses stream index i
  bool exact_blocks = false;  // test double: blocks are true Gaussians

  unsigned k() const { return family.k(); }
  // N * k * ceil(log2 p); refinement digits are accounted separately
  std::uint64_t seed_length_bits() const;
  std::uint64_t refinement_bits() const;
};

std::vector<double> gaussian_prg_sample(const GaussianPrgSpec& spec, Seed seed);

// A_i = A^{h(i)}_i: 2-independent bucket hash + a sign-kind families.
struct BernoulliPrgSpec {
  std::uint32_t n = 0;
  int d = 1;
  std::uint64_t a = 1;
  KWiseFamily h;             // prime-field, 2-independent
  KWiseFamily inner;         // sign kind, k_inner-wise; bucket j uses stream 1+j
  bool exact_inner = false;  // test double: fully independent signs

  unsigned k_inner() const { return inner.k(); }
  std::uint64_t seed_length_bits() const;
};

std::vector<double> bernoulli_prg_sample(const BernoulliPrgSpec& spec, Seed seed);

// --- estимators ---------------------------------------------------------------

struct SignMean {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t samples = 0;
};

// E[sgn(p(X))] for true Gaussian X, antithetic MC (sgn(0) := +1).
SignMean gaussian_sign_mean_mc(const Poly& p, std::uint64_t samples, Seed seed, unsigned threads = 0);
SignMean gaussian_prg_sign_mean(const GaussianPrgSpec& spec, const Poly& p, std::uint64_t samples,
                                Seed seed, unsigned threads = 0);

double hypercube_sign_mean(const MultilinearPoly& p);  // exact, n <= 24
SignMean bernoulli_prg_sign_mean(const BernoulliPrgSpec& spec, const MultilinearPoly& p,
                                 std::uint64_t samples, Seed seed, unsigned threads = 0);
// full joint seed-space enumeration; total space <= 2^24
double bernoulli_prg_sign_mean_enumerated(const BernoulliPrgSpec& spec, const MultilinearPoly& p);

struct GapReport {
  double gap = 0.0;
  double stderr_ = 0.0;
  double e_prg = 0.0, se_prg = 0.0;
  double e_ref = 0.0, se_ref = 0.0;
  std::uint64_t samples_prg = 0, samples_ref = 0;
};

GapReport fooling_gap_gaussian(const GaussianPrgSpec& spec, const Poly& p,
                               std::uint64_t samples_prg, std::uint64_t samples_ref, Seed seed,
                               unsigned threads = 0);
GapReport fooling_gap_bernoulli(const BernoulliPrgSpec& spec, const MultilinearPoly& p, Mode mode,
                                std::uint64_t samples, Seed seed, unsigned threads = 0);

// --- exact verification hooks ---------------------------------------------------

// Largest |E_prg[prod_{i in S} A_i]| over nonempty S with |S| <= degree_cap,
// by full (factorized) seed enumeration.  Exactly 0 when all moments match the
// uniform hypercube.
double bernoulli_prg_max_monomial_deviation(const BernoulliPrgSpec& spec, unsigned degree_cap);

// Largest deviation between E_prg[monomial] and its value under independent
// copies of the same discretized marginal, over monomials of total degree
// <= degree_cap.  Joint block enumeration; tiny parameters only.
double gaussian_prg_replacement_deviation(const GaussianPrgSpec& spec, unsigned degree_cap);

// --- theorem-parameter suggestion (never hard-coded into sampling paths) -------

struct GaussianPrgParams {
  std::uint64_t N;
  unsigned k;
};
GaussianPrgParams suggest_gaussian_params(int d, double c, double eps);

struct BernoulliPrgParams {
  std::uint64_t a;
  unsigned k_inner;
};
BernoulliPrgParams suggest_bernoulli_params(int d, double eps);

}  // namespace ptflab
