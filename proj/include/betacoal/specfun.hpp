#pragma once

#include <cmath>
#include <limits>

// Self-contained real special functions used across the library:
// log-Gamma, Digamma, Trigamma, sign-aware Gamma at negative arguments,
// and high-accuracy log-Gamma ratios. Everything downstream works in the
// log domain, so Gamma itself is never exponentiated at large scale.

namespace betacoal {

// ln Gamma(x) for x > 0. Relative error a few ulp over [1e-6, 1e7].
double log_gamma(double x);

// psi(x) = Gamma'(x)/Gamma(x) for x > 0. Satisfies psi(x+1) = psi(x) + 1/x.
double digamma(double x);

// psi'(x) for x > 0. Satisfies psi'(x+1) = psi'(x) - 1/x^2.
double trigamma(double x);

// ln Gamma(z+alpha) - ln Gamma(z+beta), both arguments > 0.
// Computed so the absolute error stays ~1e-15 even when the two
// log-Gamma values are huge and nearly cancel (z large, alpha ~ beta).
double log_gamma_ratio(double z, double alpha, double beta);

// Three-term large-z expansion of Gamma(z+alpha)/Gamma(z+beta):
//   z^(alpha-beta) * (1 + (alpha-beta)(alpha+beta-1)/(2z) + C/z^2),
//   C = (1/12) * binom(alpha-beta, 2) * (3(alpha-beta-1)^2 - alpha + beta - 1).
// Test oracle for convergence-rate checks; not used by production paths.
double gamma_quotient_asymptotic(double alpha, double beta, double z);

// Sign-and-log carrier for quantities that may be negative or exactly zero.
// sign == 0 encodes exact zero (log_abs is then ignored). The pole flag marks
// Gamma at 0, -1, -2, ...; reciprocal() maps a pole to exact zero, which is
// the continuity convention used for 1/Gamma throughout.
struct SignedLogValue {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();
  bool pole = false;

  static SignedLogValue zero() { return {}; }
  static SignedLogValue pole_marker() {
    SignedLogValue v;
    v.pole = true;
    return v;
  }
  static SignedLogValue from_log(int sign, double log_abs) {
    if (sign == 0) return zero();
    return {sign, log_abs, false};
  }
  static SignedLogValue from_real(double v);

  bool is_zero() const { return !pole && sign == 0; }
  double value() const; // sign * exp(log_abs); must not be a pole
  SignedLogValue reciprocal() const;

  friend SignedLogValue operator*(const SignedLogValue& a, const SignedLogValue& b);
  friend SignedLogValue operator+(const SignedLogValue& a, const SignedLogValue& b);
  friend SignedLogValue operator-(const SignedLogValue& a);
};

// Gamma(x) as a SignedLogValue. x > 0: positive with log_abs = log_gamma(x).
// Negative non-integer x: sign and magnitude via the reflection identity
// Gamma(x) Gamma(1-x) = pi / sin(pi x). Non-positive integers: pole marker.
SignedLogValue gamma_signed(double x);

} // namespace betacoal
