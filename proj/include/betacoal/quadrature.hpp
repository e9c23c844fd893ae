#pragma once

#include <functional>

// Adaptive Gauss7/Kronrod15 quadrature with endpoint-singularity handling for
// Beta-type kernels. Used as the independent integral oracle in the
// verification suites; nothing on the production rate/transform paths
// depends on it.

namespace betacoal {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Integrates f over [lo, hi] to the requested absolute tolerance.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                              double hi, double abs_tol = 1e-10, int max_depth = 55);

// Integral of r^(alpha-1) (1-r)^(beta-1) g(r, 1-r) over (0,1) with
// alpha, beta > 0. The integrand receives both r and 1-r so factors like
// log(1-r) stay accurate at the right endpoint. Power singularities at both
// endpoints are removed by the substitutions r = u^(1/alpha) near 0 and
// 1-r = v^(1/beta) near 1, so the adaptive rule sees bounded functions.
double beta_weighted_integral(double alpha, double beta,
                              const std::function<double(double, double)>& g,
                              double abs_tol = 1e-10);

} // namespace betacoal
