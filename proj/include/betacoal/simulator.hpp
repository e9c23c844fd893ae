#pragma once

#include "betacoal/laplace.hpp"
#include "betacoal/rates.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Monte Carlo simulation of the block-counting chain: holding times are
// exponential with the state's total rate, jumps follow the jump law of the
// state. Estimators for the absorption time, hitting times and probabilities,
// integral functionals, and a Rao-Blackwellized estimator for E[exp(-int psi)]
// form the independent stochastic cross-check of the exact engine.
//
// Determinism contract: every per-replicate quantity depends only on
// (seed, replicate_index), and aggregation is a fixed-order fold over the
// replicate index, so results are identical for any worker-thread count.

namespace betacoal {

struct SimConfig {
  BetaParams params{1.0, 1.0};
  int n0 = 2;                     // initial block count
  long long replicates = 1;
  uint64_t seed = 0;
  std::optional<Functional> functional; // theta*psi, evaluated along the path
  std::vector<int> hitting_levels;      // each must be < n0
  int threads = 0;                      // 0 = hardware concurrency
  // Jump cumulative vectors are built per state on demand; a state's vector is
  // retained only once the state has been visited twice and is at most this
  // large (coming-down paths hit each large state once, so retaining those
  // would cost O(n0^2) memory for no reuse).
  int jump_cache_max_state = 4096;
};

struct PathSummary {
  double absorption_time = 0.0;
  std::map<int, double> hitting_times; // level k -> first time the count drops below k
  double functional_integral = 0.0;    // integral of theta*psi(|chain|) dt
  std::vector<int> visited;            // strictly decreasing, starts n0, ends 1
  std::vector<double> holdings;        // holding times, aligned with visited[0..jumps-1]
  int jumps = 0;
};

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;
  long long replicates = 0;
  // normal-approximation 95% interval
  static constexpr double kZ95 = 1.959963984540054;
  double half_width() const { return kZ95 * std_error; }
  double lo() const { return mean - half_width(); }
  double hi() const { return mean + half_width(); }
};

struct AbsorptionEstimate {
  EstimateWithCI tau;
  EstimateWithCI tau_over_log_n;
};

struct PairedLaplaceEstimate {
  EstimateWithCI naive;        // mean of exp(integral theta*psi)
  EstimateWithCI rao_blackwell;
  double naive_variance = 0.0; // sample variances on the shared paths
  double rb_variance = 0.0;
  bool functional_admissible = true; // theta*psi(j) < lambda_j for j <= n0
  bool rb_valid = true;              // theta*psi <= 0 everywhere (psi >= 0)
};

struct LdpTailEstimate {
  double exponent = 0.0;        // -(1/ln n) ln P(tau >= x ln n)
  long long hits = 0;
  bool lower_bound_only = false; // zero hits: the estimate only bounds from below
};

// One chain trajectory, fully determined by (cfg.seed, replicate_index).
PathSummary simulate_path(const RateContext& ctx, const SimConfig& cfg,
                          long long replicate_index);

// Column of absorption times tau over all replicates.
std::vector<double> absorption_samples(const RateContext& ctx, const SimConfig& cfg);

AbsorptionEstimate estimate_absorption(const RateContext& ctx, const SimConfig& cfg);

// Naive and Rao-Blackwellized estimators of E[exp(integral theta*psi)] on the
// same paths. Conditional on the visited skeleton, each holding time is
// exponential, so the conditional expectation of exp(-sum psi(m) H_m) is the
// product of lambda_m / (lambda_m + psi(m)) over visited states m >= 2.
PairedLaplaceEstimate laplace_mc_paired(const RateContext& ctx, const SimConfig& cfg);
EstimateWithCI estimate_laplace_mc(const RateContext& ctx, const SimConfig& cfg);
EstimateWithCI rao_blackwell_negative_exponential(const RateContext& ctx,
                                                  const SimConfig& cfg);

// Fraction of replicates whose path occupies state k (2 <= k < n0).
EstimateWithCI hitting_probability_mc(const RateContext& ctx, const SimConfig& cfg,
                                      int k);

// Two-sample sup distance between the empirical laws of tau_{n1} and tau_{n2}.
// The second sample uses seed2 when given (same seed and n1 == n2 reproduces
// the identical sample, giving distance 0).
double empirical_kolmogorov(const RateContext& ctx, const SimConfig& cfg, int n1,
                            int n2, std::optional<uint64_t> seed2 = std::nullopt);

// Empirical large-deviation exponent -(1/ln n0) ln P(tau >= x ln n0).
LdpTailEstimate ldp_tail_mc(const RateContext& ctx, const SimConfig& cfg, double x);
LdpTailEstimate ldp_tail_from_samples(const std::vector<double>& taus, int n0,
                                      double x);

// One CSV row per replicate: replicate_index, tau, T_k columns, integral, jumps.
void write_paths_csv(const RateContext& ctx, const SimConfig& cfg,
                     const std::string& path);

} // namespace betacoal
