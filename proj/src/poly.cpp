#include "ptflab/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ptflab/hermite.hpp"
#include "ptflab/parallel.hpp"
#include "ptflab/walsh.hpp"

namespace ptflab {

namespace {
double powi(double x, std::uint32_t e) {
  double r = 1.0;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

// (k-1)!! for odd k and E[X^k] = (k-1)!! for even k, 0 for odd.
double gaussian_power_moment(std::uint64_t k) {
  if (k % 2 == 1) return 0.0;
  double r = 1.0;
  for (std::uint64_t j = k; j >= 2; j -= 2) r *= static_cast<double>(j - 1);
  return r;
}
}  // namespace

Monomial::Monomial(std::vector<std::pair<std::uint32_t, std::uint32_t>> f) : factors(std::move(f)) {
  std::sort(factors.begin(), factors.end());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].second == 0) throw std::invalid_argument("Monomial: zero exponent");
    if (i > 0 && factors[i].first == factors[i - 1].first)
      throw std::invalid_argument("Monomial: repeated variable");
  }
}

int Monomial::degree() const {
  std::uint32_t d = 0;
  for (auto& [v, e] : factors) d += e;
  return static_cast<int>(d);
}

std::uint32_t Monomial::exponent(std::uint32_t var) const {
  for (auto& [v, e] : factors)
    if (v == var) return e;
  return 0;
}

Poly::Poly(std::uint32_t n, std::map<Monomial, double> terms) : n_(n) {
  for (auto& [m, c] : terms) add_term(m, c);
}

Poly Poly::constant(std::uint32_t n, double c) {
  Poly p(n);
  p.add_term(Monomial{}, c);
  return p;
}

Poly Poly::variable(std::uint32_t n, std::uint32_t i) {
  if (i >= n) throw std::out_of_range("Poly::variable: index out of range");
  Poly p(n);
  p.add_term(Monomial({{i, 1}}), 1.0);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void Poly::add_term(const Monomial& m, double c) {
  for (auto& [v, e] : m.factors)
    if (v >= n_) throw std::out_of_range("Poly::add_term: variable index out of range");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Poly::+: variable count mismatch");
  Poly r = *this;
  for (auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (o * -1.0); }

Poly Poly::operator*(const Poly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Poly::*: variable count mismatch");
  Poly r(n_);
  for (auto& [ma, ca] : terms_) {
    for (auto& [mb, cb] : o.terms_) {
      // merge sorted factor lists
      std::vector<std::pair<std::uint32_t, std::uint32_t>> f;
      f.reserve(ma.factors.size() + mb.factors.size());
      std::size_t i = 0, j = 0;
      while (i < ma.factors.size() || j < mb.factors.size()) {
        if (j == mb.factors.size() || (i < ma.factors.size() && ma.factors[i].first < mb.factors[j].first))
          f.push_back(ma.factors[i++]);
        else if (i == ma.factors.size() || mb.factors[j].first < ma.factors[i].first)
          f.push_back(mb.factors[j++]);
        else {
          f.emplace_back(ma.factors[i].first, ma.factors[i].second + mb.factors[j].second);
          ++i, ++j;
        }
      }
      Monomial m;
      m.factors = std::move(f);
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Poly Poly::operator*(double c) const {
  Poly r(n_);
  if (c == 0.0) return r;
  for (auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

Poly Poly::derivative(std::uint32_t var) const {
  if (var >= n_) throw std::out_of_range("Poly::derivative: index out of range");
  Poly r(n_);
  for (auto& [m, c] : terms_) {
    std::uint32_t e = m.exponent(var);
    if (e == 0) continue;
    Monomial dm;
    for (auto& [v, ex] : m.factors) {
      if (v == var) {
        if (ex > 1) dm.factors.emplace_back(v, ex - 1);
      } else {
        dm.factors.emplace_back(v, ex);
      }
    }
    r.add_term(dm, c * e);
  }
  return r;
}

Poly Poly::degree_part(int k) const {
  Poly r(n_);
  for (auto& [m, c] : terms_)
    if (m.degree() == k) r.add_term(m, c);
  return r;
}

MultilinearPoly::MultilinearPoly(std::uint32_t n) : n_(n) {
  if (n > 63) throw std::invalid_argument("MultilinearPoly: n > 63 exceeds bitmask representation");
}

MultilinearPoly::MultilinearPoly(std::uint32_t n, std::map<std::uint64_t, double> terms)
    : MultilinearPoly(n) {
  for (auto& [m, c] : terms) add_term(m, c);
}

int MultilinearPoly::degree() const {
  int d = -1;
  for (auto& [m, c] : terms_) d = std::max(d, std::popcount(m));
  return d;
}

void MultilinearPoly::add_term(std::uint64_t mask, double c) {
  if (n_ < 64 && (mask >> n_) != 0)
    throw std::out_of_range("MultilinearPoly::add_term: mask beyond n variables");
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(mask, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

MultilinearPoly MultilinearPoly::operator+(const MultilinearPoly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("MultilinearPoly::+: variable count mismatch");
  MultilinearPoly r = *this;
  for (auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

MultilinearPoly MultilinearPoly::operator-(const MultilinearPoly& o) const { return *this + (o * -1.0); }

MultilinearPoly MultilinearPoly::operator*(double c) const {
  MultilinearPoly r(n_);
  if (c == 0.0) return r;
  for (auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

Poly MultilinearPoly::to_poly() const {
  Poly p(n_);
  for (auto& [mask, c] : terms_) {
    Monomial m;
    for (std::uint32_t i = 0; i < n_; ++i)
      if (mask & (1ULL << i)) m.factors.emplace_back(i, 1);
    p.add_term(m, c);
  }
  return p;
}

double MultilinearPoly::l2_squared() const {
  double s = 0.0;
  for (auto& [m, c] : terms_) s += c * c;
  return s;
}

double MultilinearPoly::variance() const {
  double s = 0.0;
  for (auto& [m, c] : terms_)
    if (m != 0) s += c * c;
  return s;
}

double evaluate(const Poly& p, const std::vector<double>& x) {
  if (x.size() != p.n()) throw std::invalid_argument("evaluate: dimension mismatch");
  double acc = 0.0;
  for (auto& [m, c] : p.terms()) {
    double t = c;
    for (auto& [v, e] : m.factors) t *= powi(x[v], e);
    acc += t;
  }
  return acc;
}

double evaluate(const MultilinearPoly& p, const std::vector<double>& x) {
  if (x.size() != p.n()) throw std::invalid_argument("evaluate: dimension mismatch");
  double acc = 0.0;
  for (auto& [mask, c] : p.terms()) {
    double t = c;
    std::uint64_t m = mask;
    while (m) {
      t *= x[std::countr_zero(m)];
      m &= m - 1;
    }
    acc += t;
  }
  return acc;
}

MultilinearPoly multilinearize(const Poly& p) {
  if (p.n() > 63) throw std::invalid_argument("multilinearize: n > 63 exceeds bitmask representation");
  MultilinearPoly r(p.n());
  for (auto& [m, c] : p.terms()) {
    std::uint64_t mask = 0;
    for (auto& [v, e] : m.factors)
      if (e % 2 == 1) mask |= 1ULL << v;
    r.add_term(mask, c);
  }
  return r;
}

MultilinearPoly multilinearize(const MultilinearPoly& p) { return p; }

MomentEstimate bernoulli_moment(const MultilinearPoly& p, unsigned t, Mode mode,
                                std::uint64_t samples, Seed seed, unsigned threads) {
  if (t == 0 || t % 2 != 0) throw std::invalid_argument("bernoulli_moment: t must be a positive even integer");
  if (mode == Mode::exact) {
    if (p.n() > 24) throw std::invalid_argument("bernoulli_moment: exact mode requires n <= 24");
    std::vector<double> vals = hypercube_values(p);
    double acc = 0.0;
    for (double v : vals) acc += powi(v, t);
    double mean = acc / static_cast<double>(vals.size());
    return {std::pow(mean, 1.0 / t), 0.0, vals.size()};
  }
  if (samples == 0) samples = 100000;
  const std::uint32_t n = p.n();
  const std::uint64_t bs = 1 << 13;
  const std::uint64_t n_blocks = (samples + bs - 1) / bs;
  std::vector<double> ps(n_blocks, 0.0), ps2(n_blocks, 0.0);
  for_blocks(samples, bs, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    CounterRng rng(seed);
    std::vector<double> x(n);
    double a = 0.0, a2 = 0.0;
    for (std::uint64_t s = lo; s < hi; ++s) {
      rng.jump_to(s * n);
      for (std::uint32_t i = 0; i < n; ++i) x[i] = (rng.next_u64() & 1) ? -1.0 : 1.0;
      double v = powi(evaluate(p, x), t);
      a += v;
      a2 += v * v;
    }
    ps[b] = a;
    ps2[b] = a2;
  });
  double s1 = 0.0, s2 = 0.0;
  for (std::uint64_t b = 0; b < n_blocks; ++b) { s1 += ps[b]; s2 += ps2[b]; }
  double mean = s1 / samples;
  double var = std::max(0.0, s2 / samples - mean * mean);
  double se_mean = std::sqrt(var / samples);
  double root = std::pow(std::max(mean, 0.0), 1.0 / t);
  // delta method for the t-th root
  double se = (mean > 0) ? se_mean * root / (t * mean) : se_mean;
  return {root, se, samples};
}

double gaussian_l2(const Poly& p) {
  HermiteExpansion e = expand(p);
  double s = 0.0;
  for (auto& [a, c] : e.coeffs) s += c * c;
  return std::sqrt(s);
}

double gaussian_expectation(const Poly& p) {
  double acc = 0.0;
  for (auto& [m, c] : p.terms()) {
    double t = c;
    for (auto& [v, e] : m.factors) {
      t *= gaussian_power_moment(e);
      if (t == 0.0) break;
    }
    acc += t;
  }
  return acc;
}

double influence(const Poly& p, std::uint32_t i) {
  if (i >= p.n()) throw std::out_of_range("influence: index out of range");
  HermiteExpansion e = expand(p);
  double s = 0.0;
  for (auto& [a, c] : e.coeffs) {
    double ai = (i < a.size()) ? static_cast<double>(a[i]) : 0.0;
    s += ai * c * c;
  }
  return s;
}

std::vector<double> influences(const Poly& p) {
  HermiteExpansion e = expand(p);
  std::vector<double> inf(p.n(), 0.0);
  for (auto& [a, c] : e.coeffs)
    for (std::size_t i = 0; i < a.size(); ++i) inf[i] += static_cast<double>(a[i]) * c * c;
  return inf;
}

double influence(const MultilinearPoly& p, std::uint32_t i) {
  if (i >= p.n()) throw std::out_of_range("influence: index out of range");
  double s = 0.0;
  for (auto& [m, c] : p.terms())
    if (m & (1ULL << i)) s += c * c;
  return s;
}

std::vector<double> influences(const MultilinearPoly& p) {
  std::vector<double> inf(p.n(), 0.0);
  for (auto& [m, c] : p.terms()) {
    std::uint64_t mm = m;
    while (mm) {
      inf[std::countr_zero(mm)] += c * c;
      mm &= mm - 1;
    }
  }
  return inf;
}

RegularityResult is_tau_regular(const MultilinearPoly& p, double tau) {
  double var = p.variance();
  if (var <= 0.0) throw std::invalid_argument("is_tau_regular: zero-variance input");
  std::vector<double> inf = influences(p);
  RegularityResult r;
  r.variance = var;
  r.max_influence = 0.0;
  r.witness = 0;
  for (std::uint32_t i = 0; i < inf.size(); ++i) {
    if (inf[i] > r.max_influence) {  // strict: ties resolve to the lowest index
      r.max_influence = inf[i];
      r.witness = i;
    }
  }
  r.regular = r.max_influence <= tau * var;
  return r;
}

MultilinearPoly restrict_keep_indices(const MultilinearPoly& p,
                                      const std::map<std::uint32_t, int>& assignment) {
  std::uint64_t assigned_mask = 0, neg_mask = 0;
  for (auto& [idx, val] : assignment) {
    if (idx >= p.n()) throw std::out_of_range("restricted: assigned index out of range");
    if (val != 1 && val != -1) throw std::invalid_argument("restricted: assignment value must be +-1");
    assigned_mask |= 1ULL << idx;
    if (val == -1) neg_mask |= 1ULL << idx;
  }
  MultilinearPoly r(p.n());
  for (auto& [mask, c] : p.terms()) {
    std::uint64_t hit = mask & assigned_mask;
    double sign = (std::popcount(hit & neg_mask) % 2 == 0) ? 1.0 : -1.0;
    r.add_term(mask & ~assigned_mask, sign * c);
  }
  return r;
}

Restriction restricted(const MultilinearPoly& p, const std::map<std::uint32_t, int>& assignment) {
  MultilinearPoly kept = restrict_keep_indices(p, assignment);
  std::uint64_t assigned_mask = 0;
  for (auto& [idx, val] : assignment) assigned_mask |= 1ULL << idx;
  std::vector<std::uint32_t> index_map;
  std::vector<int> new_index(p.n(), -1);
  for (std::uint32_t i = 0; i < p.n(); ++i) {
    if (!(assigned_mask & (1ULL << i))) {
      new_index[i] = static_cast<int>(index_map.size());
      index_map.push_back(i);
    }
  }
  MultilinearPoly out(static_cast<std::uint32_t>(index_map.size()));
  for (auto& [mask, c] : kept.terms()) {
    std::uint64_t m2 = 0;
    std::uint64_t mm = mask;
    while (mm) {
      m2 |= 1ULL << new_index[std::countr_zero(mm)];
      mm &= mm - 1;
    }
    out.add_term(m2, c);
  }
  return {std::move(out), std::move(index_map)};
}

std::vector<double> hypercube_values(const MultilinearPoly& p) {
  if (p.n() > 26) throw std::invalid_argument("hypercube_values: n too large");
  std::vector<double> v(std::size_t{1} << p.n(), 0.0);
  for (auto& [mask, c] : p.terms()) v[mask] += c;
  walsh_hadamard(v);
  return v;
}

// --- serialization ----------------------------------------------------------

std::string to_json(const Poly& p) {
  nlohmann::json j;
  j["n"] = p.n();
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [m, c] : p.terms()) {
    nlohmann::json vars = nlohmann::json::array();
    for (auto& [v, e] : m.factors)
      for (std::uint32_t t = 0; t < e; ++t) vars.push_back(v);
    terms.push_back({{"vars", vars}, {"coef", c}});
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

std::string to_json(const MultilinearPoly& p) {
  nlohmann::json j;
  j["n"] = p.n();
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [m, c] : p.terms()) terms.push_back({{"mask", m}, {"coef", c}});
  j["terms"] = std::move(terms);
  return j.dump();
}

Poly poly_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Poly p(j.at("n").get<std::uint32_t>());
  for (auto& t : j.at("terms")) {
    std::map<std::uint32_t, std::uint32_t> exps;
    if (t.contains("vars")) {
      for (auto& v : t.at("vars")) exps[v.get<std::uint32_t>()] += 1;
    } else {
      std::uint64_t mask = t.at("mask").get<std::uint64_t>();
      while (mask) {
        exps[static_cast<std::uint32_t>(std::countr_zero(mask))] += 1;
        mask &= mask - 1;
      }
    }
    Monomial m;
    for (auto& [v, e] : exps) m.factors.emplace_back(v, e);
    p.add_term(m, t.at("coef").get<double>());
  }
  return p;
}

MultilinearPoly multilinear_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MultilinearPoly p(j.at("n").get<std::uint32_t>());
  for (auto& t : j.at("terms")) {
    std::uint64_t mask = 0;
    if (t.contains("mask")) {
      mask = t.at("mask").get<std::uint64_t>();
    } else {
      for (auto& v : t.at("vars")) {
        std::uint64_t bit = 1ULL << v.get<std::uint32_t>();
        if (mask & bit) throw std::invalid_argument("multilinear_from_json: repeated variable");
        mask |= bit;
      }
    }
    p.add_term(mask, t.at("coef").get<double>());
  }
  return p;
}

// --- random instances -------------------------------------------------------

namespace {
void enumerate_monomials(std::uint32_t n, int d, std::uint32_t first, Monomial& cur,
                         const std::function<void(const Monomial&)>& emit) {
  emit(cur);
  if (d == 0) return;
  for (std::uint32_t v = first; v < n; ++v) {
    for (int e = 1; e <= d; ++e) {
      cur.factors.emplace_back(v, static_cast<std::uint32_t>(e));
      enumerate_monomials(n, d - e, v + 1, cur, emit);
      cur.factors.pop_back();
    }
  }
}

void enumerate_subsets(std::uint32_t n, int d, std::uint32_t first, std::uint64_t mask,
                       const std::function<void(std::uint64_t)>& emit) {
  emit(mask);
  if (d == 0) return;
  for (std::uint32_t v = first; v < n; ++v)
    enumerate_subsets(n, d - 1, v + 1, mask | (1ULL << v), emit);
}
}  // namespace

Poly random_poly(std::uint32_t n, int d, CounterRng& rng) {
  Poly p(n);
  Monomial cur;
  enumerate_monomials(n, d, 0, cur, [&](const Monomial& m) { p.add_term(m, rng.next_normal()); });
  return p;
}

MultilinearPoly random_multilinear(std::uint32_t n, int d, CounterRng& rng) {
  MultilinearPoly p(n);
  enumerate_subsets(n, d, 0, 0, [&](std::uint64_t mask) { p.add_term(mask, rng.next_normal()); });
  return p;
}

}  // namespace ptflab
