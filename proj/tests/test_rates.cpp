#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "betacoal/errors.hpp"
#include "betacoal/quadrature.hpp"
#include "betacoal/rates.hpp"
#include "betacoal/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace betacoal;

namespace {

const double kAGrid[] = {0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.5};
const double kBGrid[] = {0.5, 1.0, 1.5, 2.5};

double log_beta(double x, double y) {
  return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// adaptive-quadrature oracle for the pairwise merger rate:
// lambda_{p,k} = integral of r^(k-2) (1-r)^(p-k) beta_{a,b}(dr)
double merge_rate_quadrature(double a, double b, int p, int k) {
  return beta_weighted_integral(a + k - 2.0, b + p - k,
                                [](double, double) { return 1.0; });
}

// quadrature oracle for phi(k) = integral of (1-(1-r)^k) r^-1 beta_{a,b}(dr)
double phi_quadrature(double a, double b, int k) {
  return beta_weighted_integral(a, b, [k](double r, double omr) {
    if (r < 1e-12) return double(k);
    const double log_omr = r <= 0.5 ? std::log1p(-r) : std::log(omr);
    return -std::expm1(k * log_omr) / r;
  });
}

// quadrature oracle for mu = -integral of log(1-r) r^(a-3) (1-r)^(b-1) dr
double mu_quadrature(double a, double b) {
  return beta_weighted_integral(a - 1.0, b, [](double r, double omr) {
    if (r < 1e-12) return 1.0 + r / 2.0;
    const double log_omr = r <= 0.5 ? std::log1p(-r) : std::log(omr);
    return -log_omr / r;
  });
}

} // namespace

TEST_CASE("quadrature sanity: B(1/2,1/2) = pi") {
  const double v =
      beta_weighted_integral(0.5, 0.5, [](double, double) { return 1.0; });
  CHECK(rel_err(v, std::numbers::pi) <= 1e-10);
}

TEST_CASE("BetaParams validation and regimes") {
  CHECK_THROWS_AS(BetaParams(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(BetaParams(1.0, -2.0), std::domain_error);
  CHECK(BetaParams(0.5, 1.0).regime() == Regime::coming_down);
  CHECK(BetaParams(1.0, 3.0).regime() == Regime::critical);
  CHECK(BetaParams(1.5, 0.5).regime() == Regime::divergent);
  CHECK(BetaParams(3.5, 0.5).regime() == Regime::divergent);
}

TEST_CASE("merge_rate_log pinned values and quadrature oracle") {
  for (double a : {0.5, 1.3, 2.0}) {
    for (double b : {0.5, 1.0, 2.5}) {
      RateContext ctx(BetaParams{a, b});
      CHECK(std::abs(ctx.merge_rate_log(2, 2) - log_beta(a, b)) <= 1e-13);
    }
  }
  // Gamma(1)Gamma(2)/Gamma(3) = 1/2; also the integral of (1-r) dr
  RateContext bs(BetaParams{1.0, 1.0});
  CHECK(std::abs(bs.merge_rate_log(3, 2) - std::log(0.5)) <= 1e-13);
  CHECK(rel_err(std::exp(bs.merge_rate_log(3, 2)),
                merge_rate_quadrature(1.0, 1.0, 3, 2)) <= 1e-10);

  RateContext ctx(BetaParams{0.7, 1.2});
  CHECK(rel_err(std::exp(ctx.merge_rate_log(5, 3)),
                merge_rate_quadrature(0.7, 1.2, 5, 3)) <= 1e-8);

  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> ua(0.2, 3.0), ub(0.3, 2.5);
  std::uniform_int_distribution<int> up(2, 40);
  for (int i = 0; i < 20; ++i) {
    const double a = ua(gen), b = ub(gen);
    const int p = up(gen);
    std::uniform_int_distribution<int> uk(2, p);
    const int k = uk(gen);
    RateContext c(BetaParams{a, b});
    CHECK(rel_err(std::exp(c.merge_rate_log(p, k)),
                  merge_rate_quadrature(a, b, p, k)) <= 1e-8);
  }

  // strictly decreasing in p for fixed k
  RateContext c(BetaParams{1.5, 1.0});
  for (int p = 3; p < 30; ++p)
    CHECK(c.merge_rate_log(p, 2) < c.merge_rate_log(p - 1, 2));
  CHECK_THROWS_AS(c.merge_rate_log(3, 1), std::domain_error);
  CHECK_THROWS_AS(c.merge_rate_log(3, 4), std::domain_error);
}

TEST_CASE("total_rate pinned values") {
  for (double a : {0.5, 1.0, 1.7, 2.0, 3.5}) {
    for (double b : {0.5, 1.0, 2.5}) {
      RateContext ctx(BetaParams{a, b});
      CHECK(rel_err(ctx.total_rate(2), std::exp(log_beta(a, b))) <= 1e-12);
    }
  }
  RateContext bs(BetaParams{1.0, 1.0});
  for (int n : {2, 3, 10, 100, 999})
    CHECK(std::abs(bs.total_rate(n) - (n - 1.0)) <= 1e-12 * (n - 1.0));

  RateContext k21(BetaParams{2.0, 1.0});
  double harmonic = 0.0;
  for (int n = 1; n <= 2000; ++n) {
    harmonic += 1.0 / n;
    if (n >= 2) CHECK(rel_err(k21.total_rate(n), harmonic - 1.0) <= 1e-12);
  }
}

TEST_CASE("total_rate equals the series oracle on the full grid") {
  for (double a : kAGrid) {
    for (double b : kBGrid) {
      RateContext ctx(BetaParams{a, b});
      const auto prefix = ctx.total_rate_series_prefix(5000);
      for (int n : {2, 3, 5, 17, 128, 1000, 5000}) {
        CHECK(rel_err(ctx.total_rate(n), prefix[n]) <= 1e-10);
        if (n <= 128)
          CHECK(rel_err(ctx.total_rate_series_oracle(n), prefix[n]) <= 1e-12);
      }
    }
  }
  // degenerate-neighborhood routing stays accurate
  for (double a : {1.0 + 3e-7, 2.0 - 3e-7}) {
    RateContext ctx(BetaParams{a, 1.5});
    CHECK(rel_err(ctx.total_rate(700), ctx.total_rate_series_oracle(700)) <= 1e-14);
  }
}

TEST_CASE("total_rate is strictly increasing in n") {
  for (double a : kAGrid) {
    RateContext ctx(BetaParams{a, 1.0});
    double prev = ctx.total_rate(2);
    for (int n = 3; n <= 400; ++n) {
      const double cur = ctx.total_rate(n);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("a > 2: total_rate stays below its limit") {
  for (double b : {0.5, 1.0, 2.5}) {
    RateContext ctx(BetaParams{3.5, b});
    const double limit = ctx.total_rate_limit();
    CHECK(limit > 0.0);
    for (int n : {2, 3, 10, 100, 1000, 5000})
      CHECK(ctx.total_rate(n) < limit);
  }
  CHECK(RateContext(BetaParams{1.5, 1.0}).total_rate_limit() ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("total_rate_asymptotic examples and convergence") {
  // a=3, b=1: limit Gamma(3)Gamma(1)/(Gamma(2) * 2 * 1) = 1
  RateContext a3(BetaParams{3.0, 1.0});
  CHECK(rel_err(a3.total_rate_asymptotic(1000000), 1.0) <= 1e-12);

  // a=2, b=1: ln n + digamma-shift constant = ln n - 1 + gamma
  RateContext a2(BetaParams{2.0, 1.0});
  const double gamma_e = -digamma(1.0);
  CHECK(rel_err(a2.total_rate_asymptotic(10000), std::log(10000.0) - 1.0 + gamma_e) <=
        1e-12);

  // a=1.5, b=1: leading term Gamma(1.5) * 2 * 10^3 at n = 10^6
  RateContext a15(BetaParams{1.5, 1.0});
  const double lead = std::exp(log_gamma(1.5)) * 2.0 * 1000.0;
  CHECK(std::abs(a15.total_rate_asymptotic(1000000) / lead - 1.0) <= 2e-3);
  CHECK(rel_err(a15.total_rate(1000000), a15.total_rate_asymptotic(1000000)) <= 1e-6);

  // |lambda_n / asym - 1| -> 0 along n = 2^j, monotone for j >= 10
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    RateContext ctx(BetaParams{a, 1.0});
    double prev = 1e300;
    for (int j = 6; j <= 16; ++j) {
      const int n = 1 << j;
      const double dev = std::abs(ctx.total_rate(n) / ctx.total_rate_asymptotic(n) - 1.0);
      if (j >= 10) CHECK(dev < prev);
      prev = dev;
    }
    CHECK(prev <= 1e-2);
  }
}

TEST_CASE("jump distributions") {
  RateContext c2(BetaParams{0.8, 1.7});
  const auto jd2 = c2.jump_distribution(2);
  REQUIRE(jd2->prob.size() == 1);
  CHECK(jd2->prob[0] == doctest::Approx(1.0).epsilon(1e-15));

  RateContext bs(BetaParams{1.0, 1.0});
  const auto jd3 = bs.jump_distribution(3);
  REQUIRE(jd3->prob.size() == 2);
  CHECK(jd3->prob[0] == doctest::Approx(0.25).epsilon(1e-13)); // j=1: lambda_{3,3}/lambda_3
  CHECK(jd3->prob[1] == doctest::Approx(0.75).epsilon(1e-13)); // j=2: 3 lambda_{3,2}/lambda_3

  std::mt19937_64 gen(808);
  std::uniform_real_distribution<double> ua(0.2, 3.4), ub(0.3, 2.5);
  std::uniform_int_distribution<int> un(2, 800);
  for (int i = 0; i < 25; ++i) {
    RateContext ctx(BetaParams{ua(gen), ub(gen)});
    const int n = un(gen);
    const auto jd = ctx.jump_distribution(n);
    double sum = 0.0;
    for (double p : jd->prob) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(std::abs(jd->cum.back() - 1.0) <= 1e-12);
    // normalization identity: logsumexp of weights equals ln lambda_n
    CHECK(std::abs(jd->log_total - ctx.total_rate_log(n)) <= 1e-12);
    // cached pointer is reused
    CHECK(ctx.jump_distribution(n).get() == jd.get());
  }
}

TEST_CASE("phi closed form") {
  for (double a : {0.3, 0.5, 0.9}) {
    for (double b : {0.5, 1.5, 2.5}) {
      RateContext ctx(BetaParams{a, b});
      CHECK(rel_err(ctx.phi(1), std::exp(log_beta(a, b))) <= 1e-12);
      for (int k : {2, 5, 17})
        CHECK(rel_err(ctx.phi(k), phi_quadrature(a, b, k)) <= 1e-8);
      double prev = ctx.phi(1);
      for (int k = 2; k <= 40; ++k) {
        CHECK(ctx.phi(k) > prev);
        prev = ctx.phi(k);
      }
    }
  }
  // a+b = 1: the constant term vanishes
  RateContext border(BetaParams{0.5, 0.5});
  CHECK(rel_err(border.phi(3), phi_quadrature(0.5, 0.5, 3)) <= 1e-8);

  // large-k growth phi(k) ~ (Gamma(a)/(1-a)) k^(1-a)
  RateContext half(BetaParams{0.5, 1.5});
  const double coef = std::exp(log_gamma(0.5)) / 0.5;
  CHECK(std::abs(half.phi(1000000) / (coef * std::pow(1e6, 0.5)) - 1.0) <= 2e-2);

  CHECK_THROWS_AS(RateContext(BetaParams{1.0, 1.0}).phi(3), regime_error);
  CHECK_THROWS_AS(RateContext(BetaParams{1.5, 1.0}).phi(3), regime_error);
}

TEST_CASE("mu closed forms against the quadrature oracle") {
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(rel_err(RateContext(BetaParams{2.0, 1.0}).mu(), pi2_6) <= 1e-12);
  CHECK(rel_err(RateContext(BetaParams{2.0, 2.0}).mu(), pi2_6 - 1.0) <= 1e-12);
  for (double a : {1.3, 1.5, 1.7, 2.0, 2.4, 3.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      RateContext ctx(BetaParams{a, b});
      CHECK(rel_err(ctx.mu(), mu_quadrature(a, b)) <= 1e-6);
      CHECK(ctx.mu() > 0.0);
    }
  }
  // a+b = 2 inside the formula's pole line
  CHECK(rel_err(RateContext(BetaParams{1.5, 0.5}).mu(), mu_quadrature(1.5, 0.5)) <= 1e-6);
  CHECK_THROWS_AS(RateContext(BetaParams{1.0, 1.0}).mu(), regime_error);
  CHECK_THROWS_AS(RateContext(BetaParams{0.5, 1.0}).mu(), regime_error);
}

TEST_CASE("prime context") {
  RateContext base(BetaParams{0.5, 1.5});
  const auto primed = base.prime();
  CHECK(primed->params().a == 0.5);
  CHECK(primed->params().b == 2.5);
  CHECK(primed->prime()->params().b == 3.5);

  // prime of (1,1) is (1,2): lambda_n = n-1 - sum_{j<n} 1/(1+j)
  const auto p11 = RateContext(BetaParams{1.0, 1.0}).prime();
  for (int n : {2, 5, 50}) {
    double s = 0.0;
    for (int j = 1; j < n; ++j) s += 1.0 / (1.0 + j);
    CHECK(rel_err(p11->total_rate(n), n - 1.0 - s) <= 1e-12);
  }
}
