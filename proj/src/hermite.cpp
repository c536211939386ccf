#include "ptflab/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "ptflab/tensor.hpp"

namespace ptflab {

namespace {

void trim(std::vector<std::uint32_t>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// 1-D ladder: coefficients of x^k in the normalized Hermite basis, built by
// repeated use of x H_j = sqrt(j+1) H_{j+1} + sqrt(j) H_{j-1}.
std::vector<double> power_in_hermite_basis(unsigned k) {
  std::vector<double> cur{1.0};  // x^0 = H_0
  for (unsigned t = 0; t < k; ++t) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (unsigned j = 0; j < cur.size(); ++j) {
      if (cur[j] == 0.0) continue;
      next[j + 1] += cur[j] * std::sqrt(static_cast<double>(j + 1));
      if (j > 0) next[j - 1] += cur[j] * std::sqrt(static_cast<double>(j));
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

double HermiteExpansion::l2_squared() const {
  double s = 0.0;
  for (auto& [a, c] : coeffs) s += c * c;
  return s;
}

Poly hermite_1d(unsigned k) {
  if (k > 30) throw std::invalid_argument("hermite_1d: k > 30 risks coefficient overflow");
  Poly hm1 = Poly::constant(1, 1.0);  // H_0
  if (k == 0) return hm1;
  Poly h = Poly::variable(1, 0);  // H_1
  for (unsigned j = 1; j < k; ++j) {
    // H_{j+1} = (x H_j - sqrt(j) H_{j-1}) / sqrt(j+1)
    Poly next = (Poly::variable(1, 0) * h - hm1 * std::sqrt(static_cast<double>(j))) *
                (1.0 / std::sqrt(static_cast<double>(j + 1)));
    hm1 = std::move(h);
    h = std::move(next);
  }
  return h;
}

HermiteExpansion expand(const Poly& p) {
  if (p.degree() > 30) throw std::invalid_argument("expand: degree > 30 unsupported");
  HermiteExpansion out;
  out.n = p.n();
  for (auto& [m, c] : p.terms()) {
    // tensor product of the 1-D expansions of each x_v^{e}
    std::vector<std::pair<std::vector<std::uint32_t>, double>> acc{{{}, c}};
    for (auto& [v, e] : m.factors) {
      std::vector<double> basis = power_in_hermite_basis(e);
      std::vector<std::pair<std::vector<std::uint32_t>, double>> next;
      next.reserve(acc.size() * (e / 2 + 1));
      for (auto& [idx, coef] : acc) {
        for (std::uint32_t j = 0; j < basis.size(); ++j) {
          if (basis[j] == 0.0) continue;
          auto idx2 = idx;
          if (j > 0) {
            if (idx2.size() <= v) idx2.resize(v + 1, 0);
            idx2[v] = j;
          }
          next.emplace_back(std::move(idx2), coef * basis[j]);
        }
      }
      acc = std::move(next);
    }
    for (auto& [idx, coef] : acc) {
      auto key = idx;
      trim(key);
      auto it = out.coeffs.find(key);
      if (it == out.coeffs.end()) {
        if (coef != 0.0) out.coeffs.emplace(std::move(key), coef);
      } else {
        it->second += coef;
        if (it->second == 0.0) out.coeffs.erase(it);
      }
    }
  }
  return out;
}

Poly reconstruct(const HermiteExpansion& e) {
  Poly out(e.n);
  for (auto& [a, c] : e.coeffs) {
    Poly term = Poly::constant(e.n, c);
    for (std::uint32_t v = 0; v < a.size(); ++v) {
      if (a[v] == 0) continue;
      // embed the 1-D Hermite polynomial into variable v
      Poly h1 = hermite_1d(a[v]);
      Poly emb(e.n);
      for (auto& [m, hc] : h1.terms()) {
        Monomial mm;
        if (!m.factors.empty()) mm.factors.emplace_back(v, m.factors[0].second);
        emb.add_term(mm, hc);
      }
      term = term * emb;
    }
    out = out + term;
  }
  return out;
}

Poly harmonic_part(const Poly& p, unsigned k) {
  HermiteExpansion e = expand(p);
  HermiteExpansion filtered;
  filtered.n = e.n;
  for (auto& [a, c] : e.coeffs) {
    std::uint32_t deg = 0;
    for (auto x : a) deg += x;
    if (deg == k) filtered.coeffs.emplace(a, c);
  }
  return reconstruct(filtered);
}

std::vector<double> harmonic_l2_squared(const Poly& p) {
  HermiteExpansion e = expand(p);
  int d = std::max(0, p.degree());
  std::vector<double> out(static_cast<std::size_t>(d) + 1, 0.0);
  for (auto& [a, c] : e.coeffs) {
    std::uint32_t deg = 0;
    for (auto x : a) deg += x;
    out[deg] += c * c;
  }
  return out;
}

std::pair<double, double> derivative_norm_check(const Poly& p, unsigned k) {
  HermiteExpansion e = expand(p);
  const int d = p.degree();
  double lhs = 0.0, norm2 = 0.0;
  for (auto& [a, c] : e.coeffs) {
    double deg = 0.0;
    for (auto x : a) deg += x;
    double fall = 1.0;
    for (unsigned t = 0; t < k; ++t) fall *= (deg - t);
    if (deg < k) fall = 0.0;
    lhs += fall * c * c;
    norm2 += c * c;
  }
  double rhs = norm2;
  for (unsigned t = 0; t < k; ++t) rhs *= (d - static_cast<int>(t));
  return {lhs, rhs};
}

GaussHermiteRule gauss_hermite(unsigned m) {
  if (m == 0) throw std::invalid_argument("gauss_hermite: m must be positive");
  // Golub-Welsch on the probabilists' Jacobi matrix (diag 0, offdiag sqrt(i)).
  Matrix J(m, m);
  for (unsigned i = 0; i + 1 < m; ++i) {
    double b = std::sqrt(static_cast<double>(i + 1));
    J.at(i, i + 1) = b;
    J.at(i + 1, i) = b;
  }
  SymmetricEigen eig = jacobi_eigen(J);
  GaussHermiteRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  // jacobi_eigen sorts descending; reorder ascending by node for readability
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eig.values[a] < eig.values[b]; });
  for (std::size_t i = 0; i < m; ++i) {
    rule.nodes[i] = eig.values[order[i]];
    double v0 = eig.vectors.at(0, order[i]);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

}  // namespace ptflab
