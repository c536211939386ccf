#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ptflab/poly.hpp"
#include "ptflab/rng.hpp"

namespace ptflab {

struct SensitivityReport {
  std::string kind;          // ns | gns | as | gas
  double parameter = 0.0;    // delta; unused for as/gas
  bool has_parameter = false;
  double estimate = 0.0;
  double stderr_ = 0.0;      // 0 for exact mode
  bool exact = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;

  static std::string csv_header();  // kind,parameter,estimate,stderr,samples,seed,wall_ms
  std::string csv_row() const;
  std::string to_json() const;
};

// --- sensitivity -------------------------------------------------------------

// f = sgn(p).  Exact mode enumerates all (vertex, flip-pattern) pairs with
// exact weights (n <= 13); MC mode uses paired sampling.
SensitivityReport noise_sensitivity(const MultilinearPoly& p, double delta, Mode mode,
                                    std::uint64_t samples = 0, Seed seed = {}, unsigned threads = 0);
// Same, for an explicit +-1 truth table.
double noise_sensitivity_exact_table(const std::vector<double>& pm1_table, double delta,
                                     unsigned threads = 0);
// Independent oracle: Walsh spectrum formula sum_S w_S^2 (1-(1-2 delta)^{|S|})/2.
double noise_sensitivity_fourier_oracle(const std::vector<double>& pm1_table, double delta);

SensitivityReport gaussian_noise_sensitivity(const Poly& p, double delta, std::uint64_t samples,
                                             Seed seed = {}, unsigned threads = 0);

SensitivityReport average_sensitivity(const MultilinearPoly& p, Mode mode,
                                      std::uint64_t samples = 0, Seed seed = {}, unsigned threads = 0);
// Exact integer disagreement count over ordered (vertex, i) pairs; as = count / 2^n.
std::int64_t average_sensitivity_count(const MultilinearPoly& p, unsigned threads = 0);

SensitivityReport gaussian_average_sensitivity(const Poly& p, std::uint64_t samples,
                                               Seed seed = {}, unsigned threads = 0);
// Cross-check estimator through the (X, Y, A, B) mixture coupling.
SensitivityReport gaussian_average_sensitivity_coupled(const Poly& p, std::uint64_t samples,
                                                       Seed seed = {}, unsigned threads = 0);

// Product polynomial prod_{i=1}^d (sum_j x_j - d + 2i - 1/2), multilinearized.
MultilinearPoly gl_extremal_poly(std::uint32_t n, unsigned d);
// 2^{-n+1} sum_{k=0}^{d-1} C(n, floor((n-k)/2)) (n - floor((n-k)/2))
double gl_bound(std::uint32_t n, unsigned d);
// The same bound as an integer count over ordered (vertex, i) pairs (i.e. * 2^n).
std::int64_t gl_bound_count(std::uint32_t n, unsigned d);

// --- anticoncentration ------------------------------------------------------

struct FrequencyRow {
  double eps = 0.0;
  double freq = 0.0;
  double stderr_ = 0.0;
};

// Pr(|p(X)| <= eps |p|_2) for each eps.
std::vector<FrequencyRow> anticoncentration_check(const Poly& p, const std::vector<double>& eps_list,
                                                  std::uint64_t samples, Seed seed = {},
                                                  unsigned threads = 0);

struct TailReport {
  std::vector<FrequencyRow> tail;  // eps field holds the threshold multiple N
  FrequencyRow weak_lower;         // Pr(|p(X)| >= |p|_2 / 2)
  std::uint64_t samples = 0;
};
TailReport tail_and_weak_anticoncentration(const Poly& p, std::uint64_t samples, Seed seed = {},
                                           unsigned threads = 0);

// k = 1: Pr(|p(X)| < eps |grad p(X)|_2); k = 2: Pr(|p1 p2| < eps |det D_{Y^i} p^j|).
std::vector<FrequencyRow> strong_anticoncentration_check(const std::vector<Poly>& polys,
                                                         const std::vector<double>& eps_list,
                                                         std::uint64_t samples, Seed seed = {},
                                                         unsigned threads = 0);

// --- diffuse sets -----------------------------------------------------------

struct DiffuseCertificate {
  double eps = 0.0;
  double N_bound = 0.0;
  unsigned m = 0;
  std::vector<double> worst_box;  // center coordinates
  std::string method;             // grid | sample
  std::uint64_t samples = 0;
};

DiffuseCertificate diffuse_certify(const std::vector<Poly>& q, double eps, const std::string& method,
                                   std::uint64_t samples, Seed seed = {}, unsigned threads = 0);

// Frequency with which |h| >= eps|D1 h| >= eps^2|D2 h| >= ... fails at (q_1(X),...,q_m(X)).
double derivative_chain_check(const Poly& h, const std::vector<Poly>& q, double eps,
                              std::uint64_t samples, Seed seed = {}, unsigned threads = 0);

// --- multilinearization correction operator ----------------------------------

// A(p_1,...,p_k) = sum_{S subset [k]} (-1)^{|S|} (prod_{i in S} p_i) L(prod_{i not in S} p_i)
Poly a_operator(const std::vector<MultilinearPoly>& ps);  // k <= 4

// --- invariance -------------------------------------------------------------

struct InvarianceResult {
  double sup_distance = 0.0;
  double stderr_ = 0.0;
  double worst_t = 0.0;
  std::uint64_t samples = 0;
};

// sup_t |Pr(p(A) <= t) - Pr(p(X) <= t)| over the grid; Bernoulli side exact (n <= 20).
InvarianceResult invariance_distance(const MultilinearPoly& p, const std::vector<double>& t_grid,
                                     std::uint64_t gaussian_samples, Seed seed = {},
                                     unsigned threads = 0);

// --- regularity decomposition -----------------------------------------------

enum class LeafClass { regular, low_variance, irregular };

struct DecisionTree {
  struct Node {
    bool is_leaf = true;
    std::uint32_t var = 0;  // internal: branch variable
    int child_neg = -1;     // x_var = -1 side
    int child_pos = -1;     // x_var = +1 side
    MultilinearPoly poly;   // leaf polynomial (original variable indexing)
    LeafClass cls = LeafClass::regular;
    std::map<std::uint32_t, int> path;  // root-to-leaf assignment
    unsigned depth = 0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  std::vector<std::size_t> leaves;
  double regular_mass = 0.0;
  double low_variance_mass = 0.0;
  double irregular_mass = 0.0;
};

// Expands any leaf that is neither tau-regular nor low-variance
// (var < tau^M |p|_2^2) by branching on its highest-influence variable.
DecisionTree regularity_tree(const MultilinearPoly& p, double tau, unsigned M_variance_exponent,
                             unsigned depth_cap);

struct RestrictionTailReport {
  std::vector<FrequencyRow> table;     // eps field holds the ratio threshold
  double prob_at_least_half = 0.0;     // Pr(|p_A|_2 >= |p|_2 / 2)
  std::uint64_t assignments = 0;
};

// Exact enumeration over assignments to S of |p_A|_2 / |p|_2.
RestrictionTailReport restriction_norm_tail(const MultilinearPoly& p,
                                            const std::vector<std::uint32_t>& S,
                                            const std::vector<double>& thresholds);

}  // namespace ptflab
