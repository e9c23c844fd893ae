#pragma once

#include "betacoal/rates.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

// Exact engine for the Laplace transforms
//   E_n = E[exp(integral of theta*psi(|chain|) dt up to absorption)]
// and their hitting-restricted variants E_{n,k} (the same expectation on the
// event that state k is visited), via the first-jump recursion
//   E_n = (1 - theta psi(n)/lambda_n)^(-1)
//         * sum_{j} binom(n, j-1) (lambda_{n,n-j+1}/lambda_n) E_j,
// run entirely in the log domain. On top of it: the explicit tilted
// functionals whose transforms have closed Gamma-ratio forms, record
// probabilities, and the Kolmogorov-distance bound series.

namespace betacoal {

// A functional on chain states n >= 2. The stored value is the product
// theta*psi(n) (signed); admissibility means theta*psi(j) < lambda_j for all
// states swept, checked during the recursion.
struct Functional {
  std::function<double(int)> theta_psi;
  std::string tag;
};

// psi == 1 scaled by theta: the transform of the absorption time itself.
Functional constant_functional(double theta);

struct LaplaceSeries {
  enum class Variant { plain, hitting };
  Variant variant = Variant::plain;
  int hitting_level = 0;
  BetaParams params{1.0, 1.0};
  std::string functional_tag;
  // log_values[n] = ln E_n for n = 1..max_n(); entry 0 unused.
  // -infinity encodes an exact zero (hitting variant below the level).
  std::vector<double> log_values;

  int max_n() const { return static_cast<int>(log_values.size()) - 1; }
  double log_at(int n) const { return log_values.at(n); }
  double value_at(int n) const { return std::exp(log_values.at(n)); }
};

// Running infimum of lambda_j / psi(j) over 2 <= j <= horizon (psi >= 0,
// ratios taken where psi(j) > 0): the admissibility threshold for theta.
// attained_early reports that the infimum was reached before the horizon and
// the ratio sequence is nondecreasing from the argmin on, i.e. extending the
// horizon cannot lower the value.
struct ThresholdEstimate {
  double value = std::numeric_limits<double>::infinity();
  int argmin = -1;
  bool attained_early = false;
};
ThresholdEstimate threshold_M(const RateContext& ctx,
                              const std::function<double(int)>& psi, int horizon);

// E_n for n = 1..n_max. Throws admissibility_error naming the offending state
// if theta*psi(j) >= lambda_j for some swept j (the transform is infinite
// from that state on).
LaplaceSeries laplace_series(const RateContext& ctx, const Functional& f, int n_max);

// E_{n,k} for n = 1..n_max: zero below k, (1 - theta psi(k)/lambda_k)^(-1)
// at n = k, recursion with the sum restricted to j >= k above.
LaplaceSeries laplace_series_hitting(const RateContext& ctx, const Functional& f,
                                     int k, int n_max);

// The tilted functional value sgn(ell) psi_{a,b,ell}(n) whose transform is the
// closed Gamma-ratio form below. Evaluated through the cancellation-free
// quotient identity
//   1 - theta psi(n)/lambda_n = [G(b+n-1)/G(b+ell+n-1)]
//       * [G(a+b+ell+n-2)/G(a+b+n-2)] * [lambda_n(a,b+ell)/lambda_n(a,b)],
// never through its defining alternating sum. Admissible by construction;
// zero when ell == 0; sign = sgn(ell). Requires ell > -b.
double special_psi(const RateContext& ctx, double ell, int n);
Functional special_psi_functional(const RateContext& ctx, double ell);

// Hitting analog: zero for n <= k, with the finite correction sum over
// j < k subtracted inside the quotient. Converges to L(ell) for a > 1.
double special_psi_hitting(const RateContext& ctx, double ell, int k, int n);
Functional special_psi_hitting_functional(const RateContext& ctx, double ell, int k);

// Closed forms the tilted functionals are engineered to produce:
//   E_n     = G(b+ell+n-1) G(b)    / (G(b+n-1) G(b+ell)),
//   E_{n,k} = G(b+ell+n-1) G(b+k-1)/ (G(b+n-1) G(b+ell+k-1)).
double closed_form_E_log(const BetaParams& p, double ell, int n);
double closed_form_E(const BetaParams& p, double ell, int n);
double closed_form_E_hitting_log(const BetaParams& p, double ell, int k, int n);
double closed_form_E_hitting(const BetaParams& p, double ell, int k, int n);

// Record probability P(tau_n != tau_{n+1}) = E_n under the tilted measure
// (a, b+1) with functional -phi. Requires a in (0,1).
double record_probability(const RateContext& base, int n);
std::vector<double> record_probability_series(const RateContext& base, int n_max);

// Upper bound on the Kolmogorov distance between the law of tau_n and its
// limit: partial sum of the record series over [n, trunc] plus a fitted tail.
// The tail constant is fitted on the last decade before trunc with the decay
// exponent pinned to -(2-a); remainder = C_fit trunc^-(1-a) / (1-a).
// Requires a in (0,1) and b > 1-a.
struct KolmogorovBound {
  int n = 0;
  int trunc = 0;
  double partial_sum = 0.0;
  double tail_estimate = 0.0;
  double bound() const { return partial_sum + tail_estimate; }
};
KolmogorovBound kolmogorov_bound(const RateContext& base, int n, int trunc);

// Dyadic estimator (ln E_{2n} - ln E_n)/ln 2 of the polynomial growth
// exponent of E_n.
double scaling_exponent(const LaplaceSeries& series, int n);

// --- series export ---------------------------------------------------------
// CSV columns: n, log_E, E; the E field is left empty when |log_E| > 700.
void write_series_csv(const LaplaceSeries& series, const std::string& path);
// Manifest: params, functional tag, N, checksum of log_values, output paths.
std::string series_manifest_json(const LaplaceSeries& series,
                                 const std::vector<std::string>& outputs);
uint64_t fnv1a64(const void* data, size_t bytes);

} // namespace betacoal
