#pragma once

#include "betacoal/rates.hpp"

#include <memory>

// Large-deviation apparatus for the absorption and hitting times when a > 1:
// the scaled Gamma-quotient transform L and its derivative, the inverse zeta,
// the Legendre transform I (= the LDP rate function of tau_n / ln n), the
// slope-capped variants I^k, and the knee locations x_k = zeta'(lambda_k).

namespace betacoal {

class RateFunctionContext {
public:
  // Requires a > 1. The rate context supplies lambda_k for the capped variants;
  // one is built internally when not provided.
  explicit RateFunctionContext(BetaParams p,
                               std::shared_ptr<const RateContext> rates = nullptr);

  const BetaParams& params() const { return p_; }
  const RateContext& rates() const { return *rates_; }

  // Upper edge D of the range of L: +infinity for a in (1,2], the finite
  // limit of the total rates for a > 2.
  double rate_limit() const { return limit_; }

  // L(y) on (-b, infinity): strictly increasing, concave, L(0) = 0.
  //   a != 2: Gamma(a)/((2-a)(a-1)) (Gamma(b+y)/Gamma(a+b+y-2) - Gamma(b)/Gamma(a+b-2))
  //   a == 2: psi(b+y) - psi(b)
  // The Gamma quotients take the value 0 at their poles (continuity convention).
  double L(double y) const;

  // dL/dy > 0, with the continuous extension across the quotient pole
  // at y = 2-a-b (reachable only when a is in (1,2)).
  double L_prime(double y) const;

  // Inverse of L. zeta(0) = 0 exactly; +infinity when a > 2 and x >= D.
  // Convex and increasing where finite.
  double zeta(double x) const;

  // zeta'(theta) = 1 / L'(zeta(theta)) for theta < D. zeta'(0) = 1/L'(0)
  // directly (no inversion), and equals the law-of-large-numbers limit
  // of tau_n / ln n (= 1/mu).
  double zeta_prime(double theta) const;

  // Legendre transform I(x) = sup_theta (theta x - zeta(theta)):
  // +infinity for x < 0, exactly b at x = 0, and for x > 0 computed from the
  // stationarity condition L'(y*) = 1/x as L(y*) x - y*. Convex, with its
  // unique zero at x = zeta'(0).
  double rate_I(double x) const;

  // Knee abscissa x_k = zeta'(lambda_k), k >= 2.
  double x_knee(int k) const;

  // I with its slope capped at lambda_k: equal to I below the knee, affine
  // with slope lambda_k above it; C^1 at the knee.
  double rate_I_capped(int k, double x) const;

private:
  double quotient_and_const(double y) const;

  BetaParams p_;
  std::shared_ptr<const RateContext> rates_;
  double limit_;
  double pref_;     // Gamma(a)/((2-a)(a-1)), a != 2
  double const_q_;  // Gamma(b)/Gamma(a+b-2) with the pole mapped to 0
};

} // namespace betacoal
