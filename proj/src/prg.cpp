#include "ptflab/prg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ptflab/parallel.hpp"

namespace ptflab {

namespace {

constexpr std::uint64_t kMersenne31 = 2147483647ULL;

inline std::uint64_t mersenne31_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a * b;  // both < 2^31, product < 2^62
  x = (x & kMersenne31) + (x >> 31);
  x = (x & kMersenne31) + (x >> 31);
  if (x >= kMersenne31) x -= kMersenne31;
  return x;
}

inline double sgn_pm1(double v) { return v < 0.0 ? -1.0 : 1.0; }  // sgn(0) := +1

// flat term list for fast repeated evaluation
struct CompiledPoly {
  struct Term {
    double coef;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
  };
  std::vector<Term> terms;

  explicit CompiledPoly(const Poly& p) {
    terms.reserve(p.terms().size());
    for (auto& [m, c] : p.terms()) terms.push_back({c, m.factors});
  }
  double eval(const double* x) const {
    double acc = 0.0;
    for (auto& t : terms) {
      double v = t.coef;
      for (auto& [var, e] : t.factors)
        for (std::uint32_t q = 0; q < e; ++q) v *= x[var];
      acc += v;
    }
    return acc;
  }
};

struct CompiledMultilinear {
  std::vector<std::pair<std::uint64_t, double>> terms;

  explicit CompiledMultilinear(const MultilinearPoly& p) {
    terms.assign(p.terms().begin(), p.terms().end());
  }
  // vertex given by bitmask of negative coordinates
  double eval_signs(std::uint64_t neg_mask) const {
    double acc = 0.0;
    for (auto& [mask, c] : terms)
      acc += (std::popcount(mask & neg_mask) & 1) ? -c : c;
    return acc;
  }
};

// one sample of all N blocks folded into x[0..n)
class GaussianSampler {
 public:
  explicit GaussianSampler(const GaussianPrgSpec& spec) : spec_(spec) {
    const auto& f = spec.family;
    coeff_count_ = spec.exact_blocks ? 0 : f.k() * (f.refinement_digits() + 1);
    coeffs_.resize(std::max<std::size_t>(coeff_count_, 1));
    mersenne_ = !spec.exact_blocks && f.prime_p() == kMersenne31;
  }

  void sample(Seed seed, double* x) {
    const std::uint32_t n = spec_.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec_.N));
    for (std::uint32_t j = 0; j < n; ++j) x[j] = 0.0;
    for (std::uint32_t blk = 0; blk < spec_.N; ++blk) {
      Seed bs = seed.sub(blk);
      if (spec_.exact_blocks) {
        CounterRng rng(bs);
        for (std::uint32_t j = 0; j < n; ++j) x[j] += rng.next_normal();
        continue;
      }
      const auto& f = spec_.family;
      CounterRng rng(bs);
      if (mersenne_) {
        for (unsigned t = 0; t < coeff_count_; ++t) coeffs_[t] = rng.next_below(kMersenne31);
        const unsigned k = f.k(), blocks = f.refinement_digits() + 1;
        const double inv_p = 1.0 / static_cast<double>(kMersenne31);
        for (std::uint32_t j = 0; j < n; ++j) {
          double u = 0.5;
          for (unsigned b = blocks; b-- > 0;) {
            std::uint64_t acc = 0;
            for (unsigned t = k; t-- > 0;) {
              acc = mersenne31_mul(acc, j) + coeffs_[b * k + t];
              if (acc >= kMersenne31) acc -= kMersenne31;
            }
            u = (static_cast<double>(acc) + u) * inv_p;
          }
          x[j] += normal_icdf(u);
        }
      } else {
        for (unsigned t = 0; t < coeff_count_; ++t) coeffs_[t] = rng.next_below(f.prime_p());
        for (std::uint32_t j = 0; j < n; ++j) x[j] += f.output(coeffs_, j);
      }
    }
    for (std::uint32_t j = 0; j < n; ++j) x[j] *= scale;
  }

 private:
  const GaussianPrgSpec& spec_;
  unsigned coeff_count_ = 0;
  std::vector<std::uint64_t> coeffs_;
  bool mersenne_ = false;
};

// h + inner family draws folded into a vertex bitmask (bit set = -1)
class BernoulliSampler {
 public:
  explicit BernoulliSampler(const BernoulliPrgSpec& spec) : spec_(spec) {
    h_coeffs_.resize(spec.h.k());
    inner_coeffs_.resize(spec.a, std::vector<std::uint64_t>(spec.inner.k()));
  }

  std::uint64_t sample_mask(Seed seed) {
    h_coeffs_ = spec_.h.coeffs_from_seed(seed.sub(0));
    if (!spec_.exact_inner)
      for (std::uint64_t j = 0; j < spec_.a; ++j)
        inner_coeffs_[j] = spec_.inner.coeffs_from_seed(seed.sub(1 + j));
    std::uint64_t neg = 0;
    for (std::uint32_t i = 0; i < spec_.n; ++i) {
      std::uint64_t b = spec_.h.bucket(h_coeffs_, i, spec_.a);
      double v;
      if (spec_.exact_inner) {
        CounterRng rng(seed.sub(1 + b));
        rng.jump_to(i);
        v = (rng.next_u64() & 1) ? -1.0 : 1.0;
      } else {
        v = spec_.inner.output(inner_coeffs_[b], i);
      }
      if (v < 0) neg |= 1ULL << i;
    }
    return neg;
  }

 private:
  const BernoulliPrgSpec& spec_;
  std::vector<std::uint64_t> h_coeffs_;
  std::vector<std::vector<std::uint64_t>> inner_coeffs_;
};

SignMean mean_from_counts(std::int64_t positives, std::uint64_t total) {
  double mean = (2.0 * positives - static_cast<double>(total)) / static_cast<double>(total);
  double se = std::sqrt(std::max(0.0, (1.0 - mean * mean) / static_cast<double>(total)));
  return {mean, se, total};
}

}  // namespace

std::uint64_t GaussianPrgSpec::seed_length_bits() const {
  unsigned bits = 0;
  while ((1ULL << bits) < family.prime_p()) ++bits;
  return static_cast<std::uint64_t>(N) * family.k() * bits;
}

std::uint64_t GaussianPrgSpec::refinement_bits() const {
  return static_cast<std::uint64_t>(N) * family.refinement_bits();
}

std::vector<double> gaussian_prg_sample(const GaussianPrgSpec& spec, Seed seed) {
  std::vector<double> x(spec.n);
  GaussianSampler s(spec);
  s.sample(seed, x.data());
  return x;
}

std::uint64_t BernoulliPrgSpec::seed_length_bits() const {
  return h.seed_bits() + a * inner.seed_bits();
}

std::vector<double> bernoulli_prg_sample(const BernoulliPrgSpec& spec, Seed seed) {
  BernoulliSampler s(spec);
  std::uint64_t neg = s.sample_mask(seed);
  std::vector<double> out(spec.n);
  for (std::uint32_t i = 0; i < spec.n; ++i) out[i] = (neg & (1ULL << i)) ? -1.0 : 1.0;
  return out;
}

SignMean gaussian_sign_mean_mc(const Poly& p, std::uint64_t samples, Seed seed, unsigned threads) {
  const std::uint32_t n = p.n();
  CompiledPoly cp(p);
  const std::uint64_t pairs = (samples + 1) / 2;
  const std::uint64_t bs = 1 << 12;
  const std::uint64_t n_blocks = (pairs + bs - 1) / bs;
  std::vector<double> s1(n_blocks, 0.0), s2(n_blocks, 0.0);
  for_blocks(pairs, bs, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    CounterRng rng(seed);
    std::vector<double> x(n), xn(n);
    double a1 = 0.0, a2 = 0.0;
    for (std::uint64_t sidx = lo; sidx < hi; ++sidx) {
      rng.jump_to(sidx * n);
      for (std::uint32_t j = 0; j < n; ++j) {
        x[j] = rng.next_normal();
        xn[j] = -x[j];
      }
      double g = 0.5 * (sgn_pm1(cp.eval(x.data())) + sgn_pm1(cp.eval(xn.data())));
      a1 += g;
      a2 += g * g;
    }
    s1[b] = a1;
    s2[b] = a2;
  });
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t b = 0; b < n_blocks; ++b) {
    sum += s1[b];
    sumsq += s2[b];
  }
  double mean = sum / pairs;
  double var = std::max(0.0, sumsq / pairs - mean * mean);
  return {mean, std::sqrt(var / pairs), pairs * 2};
}

SignMean gaussian_prg_sign_mean(const GaussianPrgSpec& spec, const Poly& p, std::uint64_t samples,
                                Seed seed, unsigned threads) {
  if (p.n() != spec.n) throw std::invalid_argument("gaussian_prg_sign_mean: dimension mismatch");
  CompiledPoly cp(p);
  const std::uint64_t bs = 1 << 10;
  const std::uint64_t n_blocks = (samples + bs - 1) / bs;
  std::vector<std::int64_t> partial(n_blocks, 0);
  for_blocks(samples, bs, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    GaussianSampler sampler(spec);
    std::vector<double> x(spec.n);
    std::int64_t acc = 0;
    for (std::uint64_t sidx = lo; sidx < hi; ++sidx) {
      sampler.sample(seed.sub(sidx), x.data());
      if (cp.eval(x.data()) >= 0.0) ++acc;
    }
    partial[b] = acc;
  });
  std::int64_t positives = 0;
  for (auto v : partial) positives += v;
  return mean_from_counts(positives, samples);
}

double hypercube_sign_mean(const MultilinearPoly& p) {
  if (p.n() > 24) throw std::invalid_argument("hypercube_sign_mean: n > 24");
  std::vector<double> vals = hypercube_values(p);
  std::int64_t pos = 0;
  for (double v : vals) pos += (v >= 0.0) ? 1 : 0;
  return (2.0 * pos - static_cast<double>(vals.size())) / static_cast<double>(vals.size());
}

SignMean bernoulli_prg_sign_mean(const BernoulliPrgSpec& spec, const MultilinearPoly& p,
                                 std::uint64_t samples, Seed seed, unsigned threads) {
  if (p.n() != spec.n) throw std::invalid_argument("bernoulli_prg_sign_mean: dimension mismatch");
  CompiledMultilinear cp(p);
  const std::uint64_t bs = 1 << 12;
  const std::uint64_t n_blocks = (samples + bs - 1) / bs;
  std::vector<std::int64_t> partial(n_blocks, 0);
  for_blocks(samples, bs, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    BernoulliSampler sampler(spec);
    std::int64_t acc = 0;
    for (std::uint64_t sidx = lo; sidx < hi; ++sidx) {
      std::uint64_t neg = sampler.sample_mask(seed.sub(sidx));
      if (cp.eval_signs(neg) >= 0.0) ++acc;
    }
    partial[b] = acc;
  });
  std::int64_t positives = 0;
  for (auto v : partial) positives += v;
  return mean_from_counts(positives, samples);
}

double bernoulli_prg_sign_mean_enumerated(const BernoulliPrgSpec& spec, const MultilinearPoly& p) {
  if (spec.exact_inner) throw std::invalid_argument("enumeration needs a concrete inner family");
  const std::uint64_t h_size = spec.h.seed_space_size();
  const std::uint64_t inner_size = spec.inner.seed_space_size();
  long double total_space = static_cast<long double>(h_size);
  for (std::uint64_t j = 0; j < spec.a; ++j) {
    total_space *= inner_size;
    if (total_space > static_cast<long double>(1ULL << 24))
      throw std::invalid_argument("bernoulli_prg_sign_mean_enumerated: seed space too large");
  }
  CompiledMultilinear cp(p);
  // precompute per-inner-seed sign masks
  std::vector<std::uint64_t> sign_mask(inner_size, 0);
  for (std::uint64_t s = 0; s < inner_size; ++s) {
    auto coeffs = spec.inner.coeffs_from_index(s);
    std::uint64_t neg = 0;
    for (std::uint32_t i = 0; i < spec.n; ++i)
      if (spec.inner.output(coeffs, i) < 0) neg |= 1ULL << i;
    sign_mask[s] = neg;
  }
  std::int64_t pos = 0;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> bucket_of(spec.n);
  std::vector<std::uint64_t> odo(spec.a, 0);
  for (std::uint64_t hs = 0; hs < h_size; ++hs) {
    auto hc = spec.h.coeffs_from_index(hs);
    for (std::uint32_t i = 0; i < spec.n; ++i) bucket_of[i] = spec.h.bucket(hc, i, spec.a);
    std::fill(odo.begin(), odo.end(), 0);
    for (;;) {
      std::uint64_t neg = 0;
      for (std::uint32_t i = 0; i < spec.n; ++i)
        if (sign_mask[odo[bucket_of[i]]] & (1ULL << i)) neg |= 1ULL << i;
      pos += (cp.eval_signs(neg) >= 0.0) ? 1 : 0;
      ++count;
      std::size_t carry = 0;
      while (carry < spec.a && ++odo[carry] == inner_size) {
        odo[carry] = 0;
        ++carry;
      }
      if (carry == spec.a) break;
    }
  }
  return (2.0 * pos - static_cast<double>(count)) / static_cast<double>(count);
}

GapReport fooling_gap_gaussian(const GaussianPrgSpec& spec, const Poly& p,
                               std::uint64_t samples_prg, std::uint64_t samples_ref, Seed seed,
                               unsigned threads) {
  SignMean prg = gaussian_prg_sign_mean(spec, p, samples_prg, seed.sub(0xA), threads);
  SignMean ref = gaussian_sign_mean_mc(p, samples_ref, seed.sub(0xB), threads);
  GapReport r;
  r.e_prg = prg.mean;
  r.se_prg = prg.se;
  r.e_ref = ref.mean;
  r.se_ref = ref.se;
  r.gap = std::abs(prg.mean - ref.mean);
  r.stderr_ = std::sqrt(prg.se * prg.se + ref.se * ref.se);
  r.samples_prg = prg.samples;
  r.samples_ref = ref.samples;
  return r;
}

GapReport fooling_gap_bernoulli(const BernoulliPrgSpec& spec, const MultilinearPoly& p, Mode mode,
                                std::uint64_t samples, Seed seed, unsigned threads) {
  GapReport r;
  double ref = hypercube_sign_mean(p);
  r.e_ref = ref;
  r.se_ref = 0.0;
  if (mode == Mode::exact) {
    r.e_prg = bernoulli_prg_sign_mean_enumerated(spec, p);
    r.se_prg = 0.0;
    r.samples_prg = 0;
  } else {
    SignMean prg = bernoulli_prg_sign_mean(spec, p, samples, seed, threads);
    r.e_prg = prg.mean;
    r.se_prg = prg.se;
    r.samples_prg = prg.samples;
  }
  r.gap = std::abs(r.e_prg - ref);
  r.stderr_ = r.se_prg;
  return r;
}

double bernoulli_prg_max_monomial_deviation(const BernoulliPrgSpec& spec, unsigned degree_cap) {
  if (spec.exact_inner) throw std::invalid_argument("enumeration needs a concrete inner family");
  if (spec.n > 20) throw std::invalid_argument("monomial enumeration: n > 20");
  if (spec.a > 4) throw std::invalid_argument("monomial enumeration: a > 4");
  const std::uint64_t h_size = spec.h.seed_space_size();
  const std::uint64_t inner_size = spec.inner.seed_space_size();

  // T[mask] = sum over inner seeds of prod_{i in mask} sign_i  (exact integers)
  const std::size_t n_masks = std::size_t{1} << spec.n;
  std::vector<std::int64_t> T(n_masks, 0);
  for (std::uint64_t s = 0; s < inner_size; ++s) {
    auto coeffs = spec.inner.coeffs_from_index(s);
    std::uint64_t neg = 0;
    for (std::uint32_t i = 0; i < spec.n; ++i)
      if (spec.inner.output(coeffs, i) < 0) neg |= 1ULL << i;
    for (std::size_t mask = 0; mask < n_masks; ++mask)
      T[mask] += (std::popcount(mask & neg) & 1) ? -1 : 1;
  }

  std::vector<std::uint64_t> bucket_of(spec.n);
  // per-h bucket split of each monomial, product over buckets, exact integers
  double worst = 0.0;
  std::vector<std::size_t> masks;
  for (std::size_t mask = 1; mask < n_masks; ++mask)
    if (std::popcount(mask) <= static_cast<int>(degree_cap)) masks.push_back(mask);

  std::vector<__int128> mono_sum(masks.size(), 0);
  std::vector<std::uint64_t> split(spec.a);
  for (std::uint64_t hs = 0; hs < h_size; ++hs) {
    auto hc = spec.h.coeffs_from_index(hs);
    for (std::uint32_t i = 0; i < spec.n; ++i) bucket_of[i] = spec.h.bucket(hc, i, spec.a);
    for (std::size_t mi = 0; mi < masks.size(); ++mi) {
      std::fill(split.begin(), split.end(), 0);
      std::uint64_t mm = masks[mi];
      while (mm) {
        std::uint32_t i = std::countr_zero(mm);
        split[bucket_of[i]] |= 1ULL << i;
        mm &= mm - 1;
      }
      __int128 prod = 1;
      for (std::uint64_t j = 0; j < spec.a; ++j)
        prod *= (split[j] == 0) ? static_cast<__int128>(inner_size)
                                : static_cast<__int128>(T[split[j]]);
      mono_sum[mi] += prod;
    }
  }
  long double denom = static_cast<long double>(h_size);
  for (std::uint64_t j = 0; j < spec.a; ++j) denom *= static_cast<long double>(inner_size);
  for (std::size_t mi = 0; mi < masks.size(); ++mi) {
    if (mono_sum[mi] == 0) continue;  // matches the uniform hypercube exactly
    double e = static_cast<double>(static_cast<long double>(mono_sum[mi]) / denom);
    worst = std::max(worst, std::abs(e));
  }
  return worst;
}

double gaussian_prg_replacement_deviation(const GaussianPrgSpec& spec, unsigned degree_cap) {
  if (spec.exact_blocks) throw std::invalid_argument("enumeration needs a concrete family");
  const std::uint64_t B = spec.family.seed_space_size();
  long double joint = 1.0L;
  for (std::uint32_t i = 0; i < spec.N; ++i) {
    joint *= B;
    if (joint > static_cast<long double>(1ULL << 24))
      throw std::invalid_argument("gaussian_prg_replacement_deviation: joint seed space too large");
  }
  const std::uint32_t n = spec.n;
  // value table: v[s][j]
  std::vector<std::vector<double>> v(B, std::vector<double>(n));
  for (std::uint64_t s = 0; s < B; ++s) {
    auto coeffs = spec.family.coeffs_from_index(s);
    for (std::uint32_t j = 0; j < n; ++j) v[s][j] = spec.family.output(coeffs, j);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.N));

  // All monomials over n coordinates of total degree in [1, degree_cap].
  std::vector<std::vector<unsigned>> exps;
  std::vector<unsigned> cur(n, 0);
  auto rec = [&](auto&& self, std::uint32_t pos, unsigned rem) -> void {
    if (pos == n) {
      for (auto e : cur)
        if (e) {
          exps.push_back(cur);
          return;
        }
      return;
    }
    for (unsigned e = 0; e <= rem; ++e) {
      cur[pos] = e;
      self(self, pos + 1, rem - e);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, degree_cap);

  // joint enumeration over block seeds
  std::vector<long double> joint_sum(exps.size(), 0.0L);
  std::vector<std::uint64_t> odo(spec.N, 0);
  std::vector<double> x(n);
  std::uint64_t total = static_cast<std::uint64_t>(joint);
  for (std::uint64_t it = 0; it < total; ++it) {
    for (std::uint32_t j = 0; j < n; ++j) x[j] = 0.0;
    for (std::uint32_t b = 0; b < spec.N; ++b)
      for (std::uint32_t j = 0; j < n; ++j) x[j] += v[odo[b]][j];
    for (std::uint32_t j = 0; j < n; ++j) x[j] *= scale;
    for (std::size_t e = 0; e < exps.size(); ++e) {
      double prod = 1.0;
      for (std::uint32_t j = 0; j < n; ++j)
        for (unsigned t = 0; t < exps[e][j]; ++t) prod *= x[j];
      joint_sum[e] += prod;
    }
    std::size_t carry = 0;
    while (carry < spec.N && ++odo[carry] == B) {
      odo[carry] = 0;
      ++carry;
    }
    if (carry == spec.N) break;
  }

  // independent-copy reference: per-coordinate moments of (1/sqrt(N)) sum of
  // N iid copies of the marginal, by binomial convolution
  std::vector<double> mu(degree_cap + 1, 0.0);  // marginal moments (same for all j)
  for (unsigned r = 0; r <= degree_cap; ++r) {
    long double acc = 0.0L;
    for (std::uint64_t s = 0; s < B; ++s) {
      double t = 1.0;
      for (unsigned q = 0; q < r; ++q) t *= v[s][0] * scale;
      acc += t;
    }
    mu[r] = static_cast<double>(acc / B);
  }
  // binomials
  std::vector<std::vector<double>> C(degree_cap + 1, std::vector<double>(degree_cap + 1, 0.0));
  for (unsigned i = 0; i <= degree_cap; ++i) {
    C[i][0] = 1.0;
    for (unsigned j = 1; j <= i; ++j) C[i][j] = C[i - 1][j - 1] + ((j <= i - 1) ? C[i - 1][j] : 0.0);
  }
  std::vector<double> M(degree_cap + 1, 0.0);
  M[0] = 1.0;
  for (std::uint32_t b = 0; b < spec.N; ++b) {
    std::vector<double> next(degree_cap + 1, 0.0);
    for (unsigned e = 0; e <= degree_cap; ++e) {
      double s = 0.0;
      for (unsigned t = 0; t <= e; ++t) s += C[e][t] * M[t] * mu[e - t];
      next[e] = s;
    }
    M = std::move(next);
  }

  double worst = 0.0;
  for (std::size_t e = 0; e < exps.size(); ++e) {
    unsigned deg = 0;
    for (auto q : exps[e]) deg += q;
    if (deg > spec.family.k()) continue;  // guarantee holds up to degree k only
    double ref = 1.0;
    for (std::uint32_t j = 0; j < n; ++j) ref *= M[exps[e][j]];
    double got = static_cast<double>(joint_sum[e] / static_cast<long double>(total));
    worst = std::max(worst, std::abs(got - ref));
  }
  return worst;
}

GaussianPrgParams suggest_gaussian_params(int d, double c, double eps) {
  if (eps <= 0 || eps >= 1 || c <= 0) throw std::invalid_argument("suggest_gaussian_params");
  double N = std::pow(eps, -2.0 - c);
  unsigned k = static_cast<unsigned>(std::ceil(d / c));
  if (k < 2) k = 2;
  return {static_cast<std::uint64_t>(std::ceil(N)), k};
}

BernoulliPrgParams suggest_bernoulli_params(int d, double eps) {
  if (eps <= 0 || eps >= 1) throw std::invalid_argument("suggest_bernoulli_params");
  double a = std::pow(eps, -6.0);
  double k = std::pow(eps, -5.0) + 4.0 * d;
  return {static_cast<std::uint64_t>(std::ceil(a)), static_cast<unsigned>(std::ceil(k))};
}

}  // namespace ptflab
