#include "betacoal/rates.hpp"

#include "betacoal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace betacoal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ladder slots
enum { kLadA = 0, kLadB = 1, kLadAB2 = 2, kLadBm1 = 3, kLadABm1 = 4, kLadOne = 5 };

int sgn(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

void check_state(int n) {
  if (n < 2) throw std::domain_error("state index must be >= 2");
}

} // namespace

BetaParams::BetaParams(double a_, double b_) : a(a_), b(b_) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("BetaParams: a and b must be finite and > 0");
}

RateContext::RateContext(BetaParams p)
    : p_(p), lg_a_(log_gamma(p.a)), lg_b_(log_gamma(p.b)) {
  const double offs[kNumLadders] = {p_.a,       p_.b,           p_.a + p_.b - 2.0,
                                    p_.b - 1.0, p_.a + p_.b - 1.0, 1.0};
  for (int i = 0; i < kNumLadders; ++i) ladders_[i].offset = offs[i];
}

double RateContext::lgamma_ladder(int which, int j) const {
  std::lock_guard<std::mutex> lock(ladder_mutex_);
  Ladder& lad = ladders_[which];
  if (j >= static_cast<int>(lad.v.size())) {
    const size_t want = std::max<size_t>(j + 1, lad.v.size() * 2 + 16);
    const size_t old = lad.v.size();
    lad.v.resize(want, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = old; i < want; ++i) {
      const double x = lad.offset + double(i);
      if (x > 0.0) lad.v[i] = log_gamma(x);
    }
  }
  return lad.v[j];
}

double RateContext::merge_rate_log(int p, int k) const {
  if (k < 2 || k > p) throw std::domain_error("merge_rate_log: need 2 <= k <= p");
  return lgamma_ladder(kLadA, k - 2) + lgamma_ladder(kLadB, p - k) -
         lgamma_ladder(kLadAB2, p);
}

double RateContext::total_rate_closed_general(int n) const {
  const double a = p_.a, b = p_.b;
  // lambda_n = Gamma(a)/(2-a) * Gamma(n+b)/Gamma(n-2+a+b)
  //          - (b-1)Gamma(a)/(1-a) * Gamma(n-1+b)/Gamma(n-2+a+b)
  //          + Gamma(a)Gamma(b)/Gamma(a+b-2) * 1/((1-a)(2-a))
  // with 1/Gamma at the poles a+b in {1,2} set to zero by continuity.
  SignedLogValue t1 = SignedLogValue::from_log(
      sgn(2.0 - a), lg_a_ - std::log(std::abs(2.0 - a)) +
                        log_gamma_ratio(n, b, a + b - 2.0));
  SignedLogValue t2 = SignedLogValue::zero();
  if (b != 1.0) {
    t2 = SignedLogValue::from_log(
        -sgn(b - 1.0) * sgn(1.0 - a),
        std::log(std::abs(b - 1.0)) + lg_a_ - std::log(std::abs(1.0 - a)) +
            log_gamma_ratio(n, b - 1.0, a + b - 2.0));
  }
  const double pref = (1.0 - a) * (2.0 - a);
  SignedLogValue t3 =
      SignedLogValue::from_log(sgn(pref), lg_a_ + lg_b_ - std::log(std::abs(pref))) *
      gamma_signed(a + b - 2.0).reciprocal();
  return (t1 + t2 + t3).value();
}

double RateContext::total_rate(int n) const {
  check_state(n);
  const double a = p_.a, b = p_.b;
  if (a == 1.0) // n-1 - (b-1) sum_{j<n} 1/(b-1+j); the sum telescopes to Digamma
    return (n - 1.0) - (b == 1.0 ? 0.0 : (b - 1.0) * (digamma(b + n - 1.0) - digamma(b)));
  if (a == 2.0)
    return digamma(b + n) - digamma(b + 1.0) - 1.0 + 1.0 / b + (b - 1.0) / (b + n - 1.0);
  if (std::abs(a - 1.0) < 1e-6 || std::abs(a - 2.0) < 1e-6)
    return total_rate_series_oracle(n);
  return total_rate_closed_general(n);
}

double RateContext::total_rate_log(int n) const { return std::log(total_rate(n)); }

double RateContext::total_rate_series_oracle(int n) const {
  check_state(n);
  const double a = p_.a, b = p_.b;
  // lambda_n = Gamma(a) sum_{j=1}^{n-1} j Gamma(b-1+j)/Gamma(a+b-1+j),
  // summed with term-to-term ratios so no per-term Gamma evaluation is needed.
  double term = std::exp(lg_a_ + lg_b_ - log_gamma(a + b)); // j = 1
  double sum = term, comp = 0.0;
  for (int j = 1; j < n - 1; ++j) {
    term *= ((j + 1.0) / j) * ((b - 1.0 + j) / (a + b - 1.0 + j));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::vector<double> RateContext::total_rate_series_prefix(int n_max) const {
  check_state(n_max);
  const double a = p_.a, b = p_.b;
  std::vector<double> lam(n_max + 1, std::numeric_limits<double>::quiet_NaN());
  double term = std::exp(lg_a_ + lg_b_ - log_gamma(a + b));
  double sum = term, comp = 0.0;
  lam[2] = sum;
  for (int j = 2; j <= n_max - 1; ++j) {
    term *= (j / (j - 1.0)) * ((b - 2.0 + j) / (a + b - 2.0 + j));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    lam[j + 1] = sum;
  }
  return lam;
}

double RateContext::total_rate_asymptotic(int n) const {
  check_state(n);
  const double a = p_.a, b = p_.b;
  if (a == 1.0) return n - (b - 1.0) * std::log(double(n));
  if (a == 2.0) return std::log(double(n)) - 1.0 - digamma(b);
  if (a > 2.0) return total_rate_limit();
  // a in (0,2) \ {1}
  const double first = (2.0 - a) / (2.0 * n) *
                       (a + 2.0 * b - 3.0 - 2.0 * (b - 1.0) / (1.0 - a));
  const double j_const =
      std::exp(lg_b_) * gamma_signed(a + b - 2.0).reciprocal().value() / (1.0 - a);
  const double lead = std::exp(lg_a_) / (2.0 - a) * std::pow(double(n), 2.0 - a);
  return lead * (1.0 + first + j_const / std::pow(double(n), 2.0 - a));
}

double RateContext::total_rate_limit() const {
  const double a = p_.a, b = p_.b;
  if (!(a > 2.0)) return kInf;
  return std::exp(lg_a_ + lg_b_) * gamma_signed(a + b - 2.0).reciprocal().value() /
         ((a - 1.0) * (a - 2.0));
}

std::vector<double> RateContext::total_rate_table(int n_max) const {
  check_state(n_max);
  std::vector<double> lam(n_max + 1, std::numeric_limits<double>::quiet_NaN());
  for (int n = 2; n <= n_max; ++n) lam[n] = total_rate(n);
  return lam;
}

double RateContext::jump_weight_seed(int m) const {
  check_state(m);
  return 0.5 * m * (m - 1.0) *
         std::exp(lg_a_ + log_gamma_ratio(m, p_.b - 2.0, p_.a + p_.b - 2.0));
}

std::shared_ptr<const JumpDistribution> RateContext::jump_distribution(int n) const {
  check_state(n);
  {
    std::shared_lock lock(jump_mutex_);
    auto it = jump_cache_.find(n);
    if (it != jump_cache_.end()) return it->second;
  }
  auto jd = std::make_shared<JumpDistribution>();
  jd->state = n;
  jd->log_weight.resize(n - 1);
  jd->prob.resize(n - 1);
  jd->cum.resize(n - 1);
  // sweep merger sizes k = 2..n; landing state j = n-k+1
  double w = jump_weight_seed(n);
  double total = 0.0;
  for (int k = 2; k <= n; ++k) {
    jd->log_weight[n - k] = std::log(w);
    jd->prob[n - k] = w;
    total += w;
    if (k < n) w *= jump_weight_ratio(p_.a, p_.b, n, k);
  }
  jd->log_total = std::log(total);
  double run = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    jd->prob[i] /= total;
    run += jd->prob[i];
    jd->cum[i] = run;
  }
  std::unique_lock lock(jump_mutex_);
  auto [it, inserted] = jump_cache_.emplace(n, jd);
  return it->second; // idempotent: first inserted copy wins
}

double RateContext::phi(int k) const {
  if (k < 1) throw std::domain_error("phi: k must be >= 1");
  const double a = p_.a, b = p_.b;
  if (!(a < 1.0))
    throw regime_error("phi closed form requires a in (0,1)");
  const double quotient = std::exp(log_gamma_ratio(k, b, a + b - 1.0));
  const SignedLogValue c =
      SignedLogValue::from_log(1, lg_b_) * gamma_signed(a + b - 1.0).reciprocal();
  return std::exp(lg_a_) / (1.0 - a) * (quotient - c.value());
}

double RateContext::mu() const {
  const double a = p_.a, b = p_.b;
  if (!(a > 1.0)) throw regime_error("mu is finite only for a > 1");
  if (std::abs(a - 2.0) <= 1e-8) return trigamma(b);
  // Gamma(b)/Gamma(a+b-2) * (psi(b) - psi(a+b-2)) rewritten through a+b-1 > 0,
  // which removes the pole at a+b = 2 and keeps all Digamma arguments positive:
  //   = (a+b-2) G (psi(b) - psi(a+b-1)) + G,  G = Gamma(b)/Gamma(a+b-1)
  const double g = std::exp(lg_b_ - log_gamma(a + b - 1.0));
  const double core =
      (a + b - 2.0) * g * (digamma(b) - digamma(a + b - 1.0)) + g;
  return std::exp(lg_a_) / ((2.0 - a) * (a - 1.0)) * core;
}

std::shared_ptr<RateContext> RateContext::prime() const {
  return std::make_shared<RateContext>(BetaParams(p_.a, p_.b + 1.0));
}

} // namespace betacoal
