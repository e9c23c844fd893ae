#pragma once

#include "betacoal/specfun.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

// Rate quantities of the Beta(a,b)-coalescent block-counting chain:
// pairwise merger rates lambda_{p,k}, total rates lambda_n in every parameter
// regime, jump distributions of the chain, the record-rate sequence phi, and
// the log-holding-time mean mu.
//
// Conventions: the measure is beta_{a,b}(dr) = r^(a-1) (1-r)^(b-1) dr,
// unnormalized. The chain regime is a pure function of a: it comes down from
// infinity for a in (0,1), is critical at a = 1, and has divergent absorption
// time for a > 1 (with distinguished closed forms at a = 2 and limits for a > 2).

namespace betacoal {

enum class Regime { coming_down, critical, divergent };

struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  BetaParams(double a_, double b_);

  Regime regime() const {
    if (a < 1.0) return Regime::coming_down;
    if (a == 1.0) return Regime::critical;
    return Regime::divergent;
  }
};

// Jump law of the chain out of a state n: the chain moves from n to
// j in {1, ..., n-1} with probability binom(n, j-1) lambda_{n,n-j+1} / lambda_n.
// Entry i of each vector corresponds to the landing state j = i + 1.
struct JumpDistribution {
  int state = 0;
  std::vector<double> log_weight; // ln(binom(n,j-1) lambda_{n,n-j+1})
  std::vector<double> prob;       // normalized; sums to 1 within 1e-12
  std::vector<double> cum;        // running sum of prob
  double log_total = 0.0;         // logsumexp(log_weight); equals ln lambda_n
};

class RateContext {
public:
  explicit RateContext(BetaParams p);

  RateContext(const RateContext&) = delete;
  RateContext& operator=(const RateContext&) = delete;

  const BetaParams& params() const { return p_; }

  // ln lambda_{p,k} = ln Gamma(a+k-2) + ln Gamma(b+p-k) - ln Gamma(a+b+p-2),
  // for 2 <= k <= p. Strictly decreasing in p for fixed k.
  double merge_rate_log(int p, int k) const;

  // Total transition rate lambda_n out of state n >= 2, via the closed form of
  // the regime (three-term Gamma expression for a outside {1,2}, Digamma forms
  // at a = 1 and a = 2). The neighborhoods |a-1| < 1e-6 and |a-2| < 1e-6 are
  // routed through the series form to avoid the 1/(1-a), 1/(2-a) blow-up.
  double total_rate(int n) const;
  double total_rate_log(int n) const;

  // Same quantity by direct summation of
  //   lambda_n = Gamma(a) sum_{j=1}^{n-1} j Gamma(b-1+j)/Gamma(a+b-1+j).
  // Independent of the closed forms; serves as the cross-check oracle.
  double total_rate_series_oracle(int n) const;

  // Oracle values for every n <= n_max in one sweep (entry [n] = lambda_n).
  std::vector<double> total_rate_series_prefix(int n_max) const;

  // Leading-order approximation with the available correction terms:
  // a in (0,2)\{1}: (Gamma(a)/(2-a)) n^(2-a) (1 + first-order + constant/n^(2-a));
  // a = 1: n - (b-1) ln n;  a = 2: ln n - 1 - psi(b);  a > 2: the finite limit.
  double total_rate_asymptotic(int n) const;

  // For a > 2 the total rates increase to a finite limit; +infinity otherwise.
  double total_rate_limit() const;

  // lambda_n for n = 2..n_max as a flat table (entry [n] = lambda_n).
  std::vector<double> total_rate_table(int n_max) const;

  // Jump law out of state n, cached per state. Thread-safe; concurrent
  // builders may duplicate work, the insert is idempotent.
  std::shared_ptr<const JumpDistribution> jump_distribution(int n) const;

  // Unnormalized weight of the smallest merger (k = 2) out of state m:
  // binom(m,2) lambda_{m,2}. Seed of the jump-weight recursion below.
  double jump_weight_seed(int m) const;

  // Ratio w(k+1)/w(k) of consecutive unnormalized jump weights, k = merger size.
  static double jump_weight_ratio(double a, double b, int m, int k) {
    return (double(m - k) * (a + k - 2.0)) / (double(k + 1) * (b + m - k - 1.0));
  }

  // phi(k) = integral of (1-(1-r)^k) r^-1 beta_{a,b}(dr), closed Gamma form;
  // only the a in (0,1) regime is supported (the only one that consumes it).
  double phi(int k) const;

  // mu = integral of |log(1-r)| r^-2 beta_{a,b}(dr), finite for a > 1.
  double mu() const;

  // Context for the tilted measure (1-r) beta_{a,b}(dr) = beta_{a,b+1}(dr).
  std::shared_ptr<RateContext> prime() const;

private:
  double total_rate_closed_general(int n) const; // a outside {1,2}
  double lgamma_ladder(int which, int j) const;

  BetaParams p_;
  double lg_a_;  // ln Gamma(a)
  double lg_b_;  // ln Gamma(b)

  // ln Gamma(offset + j) tables for the fixed offsets used by the closed
  // forms; grown on demand. Entries with non-positive argument stay NaN.
  struct Ladder {
    double offset = 0.0;
    std::vector<double> v;
  };
  static constexpr int kNumLadders = 6;
  mutable Ladder ladders_[kNumLadders];
  mutable std::mutex ladder_mutex_;

  mutable std::map<int, std::shared_ptr<const JumpDistribution>> jump_cache_;
  mutable std::shared_mutex jump_mutex_;
};

} // namespace betacoal
