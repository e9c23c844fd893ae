#include "betacoal/ratefn.hpp"

#include "betacoal/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace betacoal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Safeguarded Newton on a monotone function with a maintained bracket
// [lo, hi], f(lo) < 0 < f(hi). Returns y with |f(y)| <= tol, falling back to
// bisection whenever the Newton step leaves the bracket or stalls.
template <class F, class DF>
double newton_bisect(const F& f, const DF& df, double lo, double hi, double tol) {
  double y = 0.5 * (lo + hi);
  double fy = f(y);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fy) <= tol) return y;
    if (fy < 0.0) lo = y; else hi = y;
    const double d = df(y);
    double next = (d > 0.0 && std::isfinite(d)) ? y - fy / d : y;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == y) next = 0.5 * (lo + hi);
    y = next;
    fy = f(y);
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi) + 1e-300))
      return y;
  }
  if (std::abs(fy) <= 100.0 * tol) return y;
  throw std::runtime_error("ratefn: root refinement did not converge");
}

} // namespace

RateFunctionContext::RateFunctionContext(BetaParams p,
                                         std::shared_ptr<const RateContext> rates)
    : p_(p), rates_(std::move(rates)) {
  if (!(p_.a > 1.0))
    throw regime_error("RateFunctionContext requires a > 1");
  if (!rates_) rates_ = std::make_shared<RateContext>(p_);
  limit_ = rates_->total_rate_limit(); // +inf for a in (1,2]
  if (p_.a != 2.0) {
    pref_ = std::exp(log_gamma(p_.a)) / ((2.0 - p_.a) * (p_.a - 1.0));
    const_q_ = std::exp(log_gamma(p_.b)) *
               gamma_signed(p_.a + p_.b - 2.0).reciprocal().value();
  } else {
    pref_ = 0.0;
    const_q_ = 0.0;
  }
}

double RateFunctionContext::quotient_and_const(double y) const {
  // Gamma(b+y)/Gamma(a+b+y-2) with the value 0 at the denominator pole
  const double arg = p_.a + p_.b + y - 2.0;
  if (arg > 0.0) return std::exp(log_gamma_ratio(y, p_.b, p_.a + p_.b - 2.0));
  return std::exp(log_gamma(p_.b + y)) * gamma_signed(arg).reciprocal().value();
}

double RateFunctionContext::L(double y) const {
  if (!(y > -p_.b)) throw std::domain_error("L: need y > -b");
  if (p_.a == 2.0) return digamma(p_.b + y) - digamma(p_.b);
  return pref_ * (quotient_and_const(y) - const_q_);
}

double RateFunctionContext::L_prime(double y) const {
  if (!(y > -p_.b)) throw std::domain_error("L_prime: need y > -b");
  const double a = p_.a, b = p_.b;
  if (a == 2.0) return trigamma(b + y);
  const double eps = a + b + y - 2.0; // denominator argument; > a-2 > -1
  if (eps > 1.0)
    return pref_ * std::exp(log_gamma_ratio(y, b, a + b - 2.0)) *
           (digamma(b + y) - digamma(eps));
  // Exact rewrite through positive arguments, valid across the pole eps = 0:
  //   f (psi(b+y) - psi(eps)) = Gamma(eps+2-a)/Gamma(1+eps)
  //                             * (1 + eps (psi(eps+2-a) - psi(1+eps)))
  // using b+y = eps + (2-a), 1/Gamma(eps) = eps/Gamma(1+eps),
  // psi(eps) = psi(1+eps) - 1/eps.
  const double ratio = std::exp(log_gamma_ratio(eps, 2.0 - a, 1.0));
  const double bracket =
      1.0 + eps * (digamma(eps + 2.0 - a) - digamma(1.0 + eps));
  return pref_ * ratio * bracket;
}

double RateFunctionContext::zeta(double x) const {
  if (x == 0.0) return 0.0;
  // the computed limit carries a couple of ulp of error; anything within that
  // band of D is indistinguishable from the divergent side
  if (x >= limit_ * (1.0 - 8e-16)) return kInf;
  const double b = p_.b;
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  // bracket: expand left toward -b until L < x, right by doubling until L > x
  double off = 1e-8;
  double lo = -b + off;
  while (!(L(lo) < x)) {
    off *= 0.0625;
    lo = -b + off;
    if (!(lo > -b)) throw std::runtime_error("zeta: left bracket underflow");
  }
  double hi = std::max(lo + 1.0, 1.0);
  while (L(hi) < x) {
    hi = 2.0 * hi + 1.0;
    if (hi > 1e120) return kInf; // x indistinguishable from the limit
  }
  auto f = [&](double y) { return L(y) - x; };
  auto df = [&](double y) { return L_prime(y); };
  return newton_bisect(f, df, lo, hi, tol);
}

double RateFunctionContext::zeta_prime(double theta) const {
  if (!(theta < limit_))
    throw std::domain_error("zeta_prime: need theta < D");
  if (theta == 0.0) return 1.0 / L_prime(0.0);
  return 1.0 / L_prime(zeta(theta));
}

double RateFunctionContext::rate_I(double x) const {
  if (x < 0.0) return kInf;
  if (x < 1e-12) return p_.b; // continuity with I(0) = b
  const double b = p_.b;
  const double target = 1.0 / x;
  const double tol = 1e-10 * std::max(1.0, target);
  // L' is strictly decreasing from +inf (at -b) to 0, so the stationarity
  // equation L'(y*) = 1/x has a unique root for every x > 0.
  double off = 1e-8;
  double lo = -b + off;
  while (!(L_prime(lo) > target)) {
    off *= 0.0625;
    lo = -b + off;
    if (!(lo > -b)) throw std::runtime_error("rate_I: left bracket underflow");
  }
  double hi = std::max(lo + 1.0, 1.0);
  while (!(L_prime(hi) < target)) {
    hi = 2.0 * hi + 1.0;
    if (hi > 1e120) throw std::runtime_error("rate_I: x outside tractable range");
  }
  auto f = [&](double y) { return target - L_prime(y); }; // increasing in y
  auto df = [&](double y) {
    const double h = 1e-6 * (std::abs(y) + 1.0);
    const double yl = std::max(y - h, lo), yr = std::min(y + h, hi);
    return -(L_prime(yr) - L_prime(yl)) / (yr - yl);
  };
  const double ystar = newton_bisect(f, df, lo, hi, tol);
  return L(ystar) * x - ystar;
}

double RateFunctionContext::x_knee(int k) const {
  if (k < 2) throw std::domain_error("x_knee: need k >= 2");
  return zeta_prime(rates_->total_rate(k)); // lambda_k < D for every k
}

double RateFunctionContext::rate_I_capped(int k, double x) const {
  const double xk = x_knee(k);
  if (x <= xk) return rate_I(x);
  return rate_I(xk) + rates_->total_rate(k) * (x - xk);
}

} // namespace betacoal
