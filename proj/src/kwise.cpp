#include "ptflab/kwise.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ptflab {

namespace {

constexpr std::uint64_t kEnumerationCap = 1ULL << 24;

// x^(2^count) mod f by repeated squaring of polynomials over GF(2)
std::uint64_t gf2_poly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t f, unsigned m) {
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1ULL << m)) a ^= f;
  }
  return r;
}

std::uint64_t gf2_poly_gcd(std::uint64_t a, std::uint64_t b) {
  auto deg = [](std::uint64_t x) { return x == 0 ? -1 : 63 - std::countl_zero(x); };
  while (b) {
    int da = deg(a), db = deg(b);
    if (da < db) {
      std::swap(a, b);
      continue;
    }
    a ^= b << (da - db);
  }
  return a;
}

bool is_irreducible_gf2(std::uint64_t f, unsigned m) {
  if (m == 1) return f == 0b10 || f == 0b11;  // x, x+1
  // Rabin: x^(2^m) == x mod f, and gcd(x^(2^(m/q)) - x, f) = 1 for prime q | m
  auto frobenius = [&](unsigned count) {
    std::uint64_t x = 0b10;  // the polynomial x
    for (unsigned t = 0; t < count; ++t) x = gf2_poly_mulmod(x, x, f, m);
    return x;
  };
  if (frobenius(m) != 0b10) return false;
  std::vector<unsigned> primes;
  unsigned rem = m;
  for (unsigned q = 2; q * q <= rem; ++q)
    if (rem % q == 0) {
      primes.push_back(q);
      while (rem % q == 0) rem /= q;
    }
  if (rem > 1) primes.push_back(rem);
  for (unsigned q : primes)
    if (gf2_poly_gcd(frobenius(m / q) ^ 0b10, f) != 1) return false;
  return true;
}

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

}  // namespace

std::uint64_t smallest_irreducible_gf2(unsigned m) {
  if (m == 0 || m > 24) throw std::invalid_argument("smallest_irreducible_gf2: m out of range");
  if (m == 1) return 0b10;  // x
  for (std::uint64_t f = (1ULL << m) | 1; f < (1ULL << (m + 1)); f += 2)
    if (is_irreducible_gf2(f, m)) return f;
  throw std::logic_error("smallest_irreducible_gf2: none found");
}

std::uint64_t gf2m_mul(std::uint64_t a, std::uint64_t b, std::uint64_t modulus, unsigned m) {
  return gf2_poly_mulmod(a, b, modulus, m);
}

std::uint64_t next_prime(std::uint64_t x) {
  if (x <= 2) return 2;
  if (x % 2 == 0) ++x;
  for (;; x += 2) {
    bool prime = true;
    for (std::uint64_t d = 3; d * d <= x; d += 2)
      if (x % d == 0) {
        prime = false;
        break;
      }
    if (prime) return x;
  }
}

KWiseFamily KWiseFamily::signs(std::uint64_t n, unsigned k) {
  if (n == 0 || k == 0) throw std::invalid_argument("KWiseFamily: n and k must be positive");
  KWiseFamily f;
  f.kind_ = OutputKind::sign;
  f.n_ = n;
  f.k_ = k;
  unsigned m = 1;
  while ((1ULL << (m - 1)) < n) ++m;  // m = ceil(log2 n) + 1, so points i+1 stay in range
  f.gf_m_ = m;
  f.gf_mod_ = smallest_irreducible_gf2(m);
  if (m <= 8) {
    f.gf_table_.assign(std::size_t{1} << (2 * m), 0);
    for (std::uint64_t a = 0; a < (1ULL << m); ++a)
      for (std::uint64_t b = 0; b < (1ULL << m); ++b)
        f.gf_table_[(a << m) | b] =
            static_cast<std::uint16_t>(gf2_poly_mulmod(a, b, f.gf_mod_, m));
  }
  return f;
}

KWiseFamily KWiseFamily::uniform01(std::uint64_t n, unsigned k, std::uint64_t prime_p,
                                   unsigned refinement_digits) {
  if (n == 0 || k == 0) throw std::invalid_argument("KWiseFamily: n and k must be positive");
  if (prime_p < n) throw std::invalid_argument("KWiseFamily: prime must be >= domain size");
  if (next_prime(prime_p) != prime_p) throw std::invalid_argument("KWiseFamily: p not prime");
  KWiseFamily f;
  f.kind_ = OutputKind::uniform01;
  f.n_ = n;
  f.k_ = k;
  f.p_ = prime_p;
  f.refinement_ = refinement_digits;
  return f;
}

KWiseFamily KWiseFamily::gaussian(std::uint64_t n, unsigned k, std::uint64_t prime_p,
                                  unsigned refinement_digits) {
  KWiseFamily f = uniform01(n, k, prime_p, refinement_digits);
  f.kind_ = OutputKind::gaussian;
  return f;
}

KWiseFamily KWiseFamily::gaussian(std::uint64_t n, unsigned k, std::uint64_t prime_p) {
  unsigned bits_per_digit = 0;
  while ((1ULL << bits_per_digit) < prime_p) ++bits_per_digit;
  unsigned digits = (48 + bits_per_digit - 1) / bits_per_digit;
  return gaussian(n, k, prime_p, digits);
}

unsigned KWiseFamily::seed_bits() const {
  if (kind_ == OutputKind::sign) return gf_m_ * k_;
  unsigned bits_per = 0;
  while ((1ULL << bits_per) < p_) ++bits_per;
  return bits_per * k_;
}

unsigned KWiseFamily::refinement_bits() const {
  if (kind_ == OutputKind::sign) return 0;
  unsigned bits_per = 0;
  while ((1ULL << bits_per) < p_) ++bits_per;
  return bits_per * k_ * refinement_;
}

bool KWiseFamily::enumerable() const {
  long double total = 1.0L;
  std::uint64_t base = (kind_ == OutputKind::sign) ? (1ULL << gf_m_) : p_;
  unsigned count = (kind_ == OutputKind::sign) ? k_ : k_ * (refinement_ + 1);
  for (unsigned t = 0; t < count; ++t) {
    total *= base;
    if (total > static_cast<long double>(kEnumerationCap)) return false;
  }
  return true;
}

std::uint64_t KWiseFamily::seed_space_size() const {
  if (!enumerable()) throw std::invalid_argument("KWiseFamily: seed space too large to enumerate");
  std::uint64_t base = (kind_ == OutputKind::sign) ? (1ULL << gf_m_) : p_;
  unsigned count = (kind_ == OutputKind::sign) ? k_ : k_ * (refinement_ + 1);
  std::uint64_t total = 1;
  for (unsigned t = 0; t < count; ++t) total *= base;
  return total;
}

std::vector<std::uint64_t> KWiseFamily::coeffs_from_seed(Seed seed) const {
  CounterRng rng(seed);
  unsigned count = (kind_ == OutputKind::sign) ? k_ : k_ * (refinement_ + 1);
  std::vector<std::uint64_t> c(count);
  if (kind_ == OutputKind::sign) {
    const std::uint64_t mask = (gf_m_ == 64) ? ~0ULL : ((1ULL << gf_m_) - 1);
    for (auto& v : c) v = rng.next_u64() & mask;  // exact m-bit uniformity
  } else {
    for (auto& v : c) v = rng.next_below(p_);
  }
  return c;
}

std::vector<std::uint64_t> KWiseFamily::coeffs_from_index(std::uint64_t index) const {
  std::uint64_t total = seed_space_size();
  if (index >= total) throw std::out_of_range("KWiseFamily: seed index out of range");
  unsigned count = (kind_ == OutputKind::sign) ? k_ : k_ * (refinement_ + 1);
  std::uint64_t base = (kind_ == OutputKind::sign) ? (1ULL << gf_m_) : p_;
  std::vector<std::uint64_t> c(count);
  for (unsigned t = 0; t < count; ++t) {
    c[t] = index % base;
    index /= base;
  }
  return c;
}

std::uint64_t KWiseFamily::field_value(const std::vector<std::uint64_t>& coeffs,
                                       std::uint64_t i) const {
  if (kind_ == OutputKind::sign) {
    const std::uint64_t x = i + 1;  // nonzero evaluation points
    if (i >= n_ || x >= (1ULL << gf_m_))
      throw std::out_of_range("KWiseFamily: index out of domain");
    std::uint64_t acc = 0;
    if (!gf_table_.empty()) {
      const unsigned m = gf_m_;
      for (unsigned t = k_; t-- > 0;) acc = gf_table_[(acc << m) | x] ^ coeffs[t];
    } else {
      for (unsigned t = k_; t-- > 0;) acc = gf2_poly_mulmod(acc, x, gf_mod_, gf_m_) ^ coeffs[t];
    }
    return acc;
  }
  if (i >= p_) throw std::out_of_range("KWiseFamily: index >= p");
  std::uint64_t acc = 0;
  for (unsigned t = k_; t-- > 0;) acc = (mulmod_u64(acc, i, p_) + coeffs[t]) % p_;
  return acc;
}

double KWiseFamily::output(const std::vector<std::uint64_t>& coeffs, std::uint64_t i) const {
  if (kind_ == OutputKind::sign) return (field_value(coeffs, i) & 1) ? -1.0 : 1.0;
  if (i >= p_) throw std::out_of_range("KWiseFamily: index >= p");
  // base-p fraction 0.r_0 r_1 ... r_D with a centered final cell
  const double inv_p = 1.0 / static_cast<double>(p_);
  double u = 0.5;
  for (unsigned blk = refinement_ + 1; blk-- > 0;) {
    std::uint64_t acc = 0;
    for (unsigned t = k_; t-- > 0;)
      acc = (mulmod_u64(acc, i, p_) + coeffs[blk * k_ + t]) % p_;
    u = (static_cast<double>(acc) + u) * inv_p;
  }
  if (kind_ == OutputKind::uniform01) return u;
  return normal_icdf(u);
}

double KWiseFamily::sample(Seed seed, std::uint64_t i) const {
  return output(coeffs_from_seed(seed), i);
}

std::uint64_t KWiseFamily::bucket(const std::vector<std::uint64_t>& coeffs, std::uint64_t i,
                                  std::uint64_t a) const {
  if (a == 0) throw std::invalid_argument("KWiseFamily::bucket: a must be >= 1");
  if (kind_ == OutputKind::sign)
    throw std::invalid_argument("KWiseFamily::bucket: prime-field family required");
  return field_value(coeffs, i) % a;
}

std::uint64_t KWiseFamily::bucket_hash(Seed seed, std::uint64_t i, std::uint64_t a) const {
  return bucket(coeffs_from_seed(seed), i, a);
}

double verify_kwise(const KWiseFamily& f, const std::vector<std::uint64_t>& points,
                    unsigned degree_cap) {
  const std::uint64_t total = f.seed_space_size();
  const std::size_t np = points.size();

  // exponent vectors of total degree in [1, degree_cap]
  std::vector<std::vector<unsigned>> exps;
  std::vector<unsigned> cur(np, 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
    if (pos == np) {
      for (auto e : cur)
        if (e) {
          exps.push_back(cur);
          return;
        }
      return;
    }
    for (unsigned e = 0; e <= remaining; ++e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, degree_cap);

  std::vector<double> sums(exps.size(), 0.0);
  std::vector<std::int64_t> isums(exps.size(), 0);
  const bool integral = f.kind() == OutputKind::sign;
  std::vector<double> outs(np);
  for (std::uint64_t s = 0; s < total; ++s) {
    auto coeffs = f.coeffs_from_index(s);
    for (std::size_t j = 0; j < np; ++j) outs[j] = f.output(coeffs, points[j]);
    for (std::size_t e = 0; e < exps.size(); ++e) {
      double prod = 1.0;
      for (std::size_t j = 0; j < np; ++j)
        for (unsigned t = 0; t < exps[e][j]; ++t) prod *= outs[j];
      if (integral)
        isums[e] += (prod > 0) ? 1 : -1;
      else
        sums[e] += prod;
    }
  }

  auto ref_moment = [&](unsigned e) -> double {
    if (e == 0) return 1.0;
    switch (f.kind()) {
      case OutputKind::sign:
        return (e % 2 == 0) ? 1.0 : 0.0;
      case OutputKind::uniform01:
        return 1.0 / (e + 1.0);
      case OutputKind::gaussian: {
        if (e % 2 == 1) return 0.0;
        double r = 1.0;
        for (unsigned j = e; j >= 2; j -= 2) r *= (j - 1);
        return r;
      }
    }
    return 0.0;
  };

  double worst = 0.0;
  for (std::size_t e = 0; e < exps.size(); ++e) {
    double ref = 1.0;
    for (std::size_t j = 0; j < np; ++j) ref *= ref_moment(exps[e][j]);
    double got = integral ? static_cast<double>(isums[e]) / static_cast<double>(total)
                          : sums[e] / static_cast<double>(total);
    worst = std::max(worst, std::abs(got - ref));
  }
  return worst;
}

}  // namespace ptflab
