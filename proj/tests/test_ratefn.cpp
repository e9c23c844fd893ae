#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "betacoal/errors.hpp"
#include "betacoal/ratefn.hpp"
#include "betacoal/specfun.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace betacoal;

namespace {

const double kA[] = {1.3, 1.7, 2.0, 2.4, 3.0};
const double kB[] = {0.5, 1.0, 2.0};

// brute-force Legendre supremum over a theta grid, refined around the argmax;
// uses only zeta evaluations
double brute_force_sup(const RateFunctionContext& rf, double x) {
  double lo = -200.0;
  double hi = std::isfinite(rf.rate_limit()) ? rf.rate_limit() * (1.0 - 1e-9) : 200.0;
  double best = -1e300, best_theta = 0.0;
  for (int round = 0; round < 4; ++round) {
    const int pts = 800;
    for (int i = 0; i <= pts; ++i) {
      const double th = lo + (hi - lo) * i / pts;
      const double z = rf.zeta(th);
      if (!std::isfinite(z)) continue;
      const double v = th * x - z;
      if (v > best) {
        best = v;
        best_theta = th;
      }
    }
    const double w = (hi - lo) / pts;
    lo = best_theta - 2.0 * w;
    hi = best_theta + 2.0 * w;
    if (std::isfinite(rf.rate_limit())) hi = std::min(hi, rf.rate_limit() * (1.0 - 1e-9));
  }
  return best;
}

std::vector<double> y_grid(double b) {
  std::vector<double> g;
  for (double y : {-b + 0.01, -b / 2, -0.1, 0.3, 1.0, 3.0, 10.0, 50.0})
    if (y > -b) g.push_back(y);
  return g;
}

} // namespace

TEST_CASE("construction requires a > 1") {
  CHECK_THROWS_AS(RateFunctionContext(BetaParams{1.0, 1.0}), regime_error);
  CHECK_THROWS_AS(RateFunctionContext(BetaParams{0.5, 1.0}), regime_error);
}

TEST_CASE("L pinned values") {
  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      CHECK(std::abs(rf.L(0.0)) <= 1e-13);
      CHECK_THROWS_AS(rf.L(-b), std::domain_error);
    }
  }
  // a in (1,2), y = 2-a-b: the quotient term vanishes by continuity
  {
    const double a = 1.5, b = 1.0;
    RateFunctionContext rf(BetaParams{a, b});
    const double pref = std::exp(log_gamma(a)) / ((2.0 - a) * (a - 1.0));
    const double cq = std::exp(log_gamma(b) - log_gamma(a + b - 2.0));
    CHECK(rf.L(2.0 - a - b) == doctest::Approx(-pref * cq).epsilon(1e-13));
  }
  // a = 2, b = 1: L(1) = psi(2) - psi(1) = 1
  RateFunctionContext r2(BetaParams{2.0, 1.0});
  CHECK(r2.L(1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("L is strictly increasing and concave") {
  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      const double lo = -b + 1e-4;
      std::vector<double> vals;
      for (int i = 0; i <= 60; ++i) vals.push_back(rf.L(lo + i * 0.25));
      for (size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] > vals[i - 1]);
      for (size_t i = 2; i < vals.size(); ++i)
        CHECK(vals[i] - 2 * vals[i - 1] + vals[i - 2] <
              1e-10 * (1.0 + std::abs(vals[i])));
    }
  }
}

TEST_CASE("L_prime pinned values and finite differences") {
  RateFunctionContext r2(BetaParams{2.0, 1.0});
  CHECK(r2.L_prime(0.0) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-12));

  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      for (double y : y_grid(b)) {
        CHECK(rf.L_prime(y) > 0.0);
        double best = 1e300;
        for (double hs : {1e-5, 1e-6}) {
          const double h = hs * (1.0 + std::abs(y));
          if (y - h <= -b) continue;
          const double fd = (rf.L(y + h) - rf.L(y - h)) / (2.0 * h);
          best = std::min(best,
                          std::abs(fd - rf.L_prime(y)) /
                              std::max(1.0, std::abs(rf.L_prime(y))));
        }
        CHECK(best <= 1e-6);
      }
      // continuity across the quotient pole for a in (1,2)
      if (a < 2.0) {
        const double yp = 2.0 - a - b;
        if (yp > -b) {
          const double mid = rf.L_prime(yp);
          CHECK(std::abs(rf.L_prime(yp + 1e-9) / mid - 1.0) <= 1e-6);
          CHECK(std::abs(rf.L_prime(yp - 1e-9) / mid - 1.0) <= 1e-6);
        }
      }
    }
  }

  // L' blows up monotonically approaching -b
  RateFunctionContext rf(BetaParams{1.5, 1.0});
  double prev = 0.0;
  for (int j = 1; j <= 12; ++j) {
    const double cur = rf.L_prime(-1.0 + std::pow(10.0, -j));
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev > 1e10);
}

TEST_CASE("zeta: exact zero, roundtrips, divergence for a > 2") {
  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      CHECK(rf.zeta(0.0) == 0.0);
      for (double y : y_grid(b)) {
        const double x = rf.L(y);
        CHECK(std::abs(rf.zeta(x) - y) <= 1e-9 * std::max(1.0, std::abs(y)));
      }
      for (double x : {-40.0, -3.0, -0.4, 0.2, 1.5}) {
        if (x >= rf.rate_limit()) continue;
        CHECK(std::abs(rf.L(rf.zeta(x)) - x) <= 1e-9 * std::max(1.0, std::abs(x)));
      }
    }
  }
  // a=3, b=1: D = Gamma(3)Gamma(1)/(Gamma(2) * 1 * 2) = 1
  RateFunctionContext r3(BetaParams{3.0, 1.0});
  CHECK(r3.rate_limit() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::isinf(r3.zeta(1.5)));
  CHECK(std::isinf(r3.zeta(1.0)));
  CHECK(std::isfinite(r3.zeta(0.999)));
}

TEST_CASE("zeta is convex and increasing") {
  for (double a : {1.4, 2.0, 2.8}) {
    RateFunctionContext rf(BetaParams{a, 1.0});
    const double hi = std::min(rf.rate_limit() * 0.98, 3.0);
    std::vector<double> vals;
    const int pts = 50;
    for (int i = 0; i <= pts; ++i) vals.push_back(rf.zeta(-3.0 + (hi + 3.0) * i / pts));
    for (int i = 1; i <= pts; ++i) CHECK(vals[i] > vals[i - 1]);
    for (int i = 2; i <= pts; ++i)
      CHECK(vals[i] - 2 * vals[i - 1] + vals[i - 2] >= -1e-8);
  }
}

TEST_CASE("zeta_prime: LLN identity and finite differences") {
  // theta = 0 gives 1/L'(0) = 1/mu; a=2,b=1 pins 6/pi^2
  RateFunctionContext r2(BetaParams{2.0, 1.0});
  CHECK(r2.zeta_prime(0.0) ==
        doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      RateContext rc(BetaParams{a, b});
      CHECK(std::abs(rf.zeta_prime(0.0) * rc.mu() - 1.0) <= 1e-6);
      for (double th : {-2.0, -0.3, 0.15}) {
        if (th >= rf.rate_limit()) continue;
        const double h = 1e-6;
        const double fd = (rf.zeta(th + h) - rf.zeta(th - h)) / (2.0 * h);
        CHECK(std::abs(fd - rf.zeta_prime(th)) <=
              1e-6 * std::max(1.0, std::abs(rf.zeta_prime(th))));
        CHECK(rf.zeta_prime(th) > 0.0);
      }
      // increasing in theta
      CHECK(rf.zeta_prime(0.1) > rf.zeta_prime(-0.5));
    }
  }
  RateFunctionContext r3(BetaParams{3.0, 1.0});
  CHECK_THROWS_AS(r3.zeta_prime(2.0), std::domain_error);
}

TEST_CASE("rate function I: boundary values, zero, convexity") {
  for (double a : kA) {
    for (double b : kB) {
      RateFunctionContext rf(BetaParams{a, b});
      CHECK(std::isinf(rf.rate_I(-0.5)));
      CHECK(rf.rate_I(0.0) == b);
      const double x0 = rf.zeta_prime(0.0);
      CHECK(std::abs(rf.rate_I(x0)) <= 1e-9);
      // convexity on a grid
      std::vector<double> vals;
      for (int i = 1; i <= 40; ++i) vals.push_back(rf.rate_I(x0 * 0.1 * i));
      for (size_t i = 2; i < vals.size(); ++i)
        CHECK(vals[i] - 2 * vals[i - 1] + vals[i - 2] >= -1e-8);
    }
  }
}

TEST_CASE("I equals the brute-force Legendre supremum") {
  for (double a : {1.5, 2.0, 2.6}) {
    RateFunctionContext rf(BetaParams{a, 1.0});
    const double x0 = rf.zeta_prime(0.0);
    for (double x : {x0 * 0.3, x0, x0 * 2.0, x0 * 5.0}) {
      CHECK(std::abs(rf.rate_I(x) - brute_force_sup(rf, x)) <= 1e-6);
    }
  }
}

TEST_CASE("Fenchel-Young inequality on sampled pairs") {
  RateFunctionContext rf(BetaParams{1.7, 1.0});
  const double x0 = rf.zeta_prime(0.0);
  for (double th : {-5.0, -1.0, 0.0, 0.5, 2.0}) {
    for (double x : {x0 * 0.2, x0, x0 * 3.0}) {
      CHECK(th * x <= rf.zeta(th) + rf.rate_I(x) + 1e-8);
    }
    // near-equality at x = zeta'(theta)
    const double xs = rf.zeta_prime(th);
    CHECK(std::abs(th * xs - rf.zeta(th) - rf.rate_I(xs)) <= 1e-7);
  }
}

TEST_CASE("knees: ordering and the capped rate function") {
  for (double a : {1.5, 2.0, 3.0}) {
    RateFunctionContext rf(BetaParams{a, 1.0});
    RateContext rc(BetaParams{a, 1.0});
    const double x0 = rf.zeta_prime(0.0);
    double prev = x0;
    for (int k = 2; k <= 10; ++k) {
      const double xk = rf.x_knee(k);
      CHECK(xk > prev);
      prev = xk;
    }
    const double x2 = rf.x_knee(2);
    const double lam2 = rc.total_rate(2);
    // slope of I at the knee is lambda_k
    const double h = 1e-5 * std::max(1.0, x2);
    const double slope = (rf.rate_I(x2 + h) - rf.rate_I(x2 - h)) / (2.0 * h);
    CHECK(std::abs(slope - lam2) <= 1e-5 * std::max(1.0, lam2));
    // capped variant: continuity at the knee and the affine branch
    CHECK(rf.rate_I_capped(2, 0.0) == 1.0);
    CHECK(std::abs(rf.rate_I_capped(2, x2 - 1e-10) - rf.rate_I_capped(2, x2 + 1e-10)) <=
          1e-8);
    CHECK(rf.rate_I_capped(2, x2 + 1.0) ==
          doctest::Approx(rf.rate_I(x2) + lam2).epsilon(1e-10));
    CHECK(rf.rate_I_capped(2, x2 * 0.5) == rf.rate_I(x2 * 0.5));
    CHECK(std::isinf(rf.rate_I_capped(2, -1.0)));
  }
}
