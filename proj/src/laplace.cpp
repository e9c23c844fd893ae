#include "betacoal/laplace.hpp"

#include "betacoal/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace betacoal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ell(const BetaParams& p, double ell) {
  if (!(ell > -p.b)) throw std::domain_error("special psi: need ell > -b");
}

// ln binom(n, i) for small i, by direct product.
double log_binom_small(int n, int i) {
  double s = 0.0;
  for (int t = 0; t < i; ++t) s += std::log((n - t) / double(t + 1));
  return s;
}

// Core recursion. j_lo = 1 for the plain variant; j_lo = k for the hitting
// variant, whose base value at n = k is seeded by the caller.
void run_recursion(const RateContext& ctx, const Functional& f, int n_start,
                   int j_lo, std::vector<double>& log_values) {
  const double a = ctx.params().a, b = ctx.params().b;
  const double lg_a = log_gamma(a);
  const int n_max = static_cast<int>(log_values.size()) - 1;
  std::vector<double> scratch(std::max(1, n_max));
  for (int n = n_start; n <= n_max; ++n) {
    const double lam = ctx.total_rate(n);
    const double v = f.theta_psi(n);
    if (!(v < lam)) throw admissibility_error(n, v, lam);
    // anchor at the binary-merger weight:
    // ln w_{n,n-1} = ln binom(n,n-2) + ln lambda_{n,2} - ln lambda_n
    double lw = std::log(0.5 * n * (n - 1.0)) + lg_a +
                log_gamma_ratio(n, b - 2.0, a + b - 2.0) - std::log(lam);
    double comp = 0.0; // compensation of the lw running sum
    double peak = kNegInf;
    int cnt = 0;
    for (int j = n - 1; j >= j_lo; --j) {
      if (j < n - 1) {
        // w_{n,j}/w_{n,j+1} = j (a+n-j-2) / ((n-j+1)(b+j-1))
        const double inc =
            std::log((double(j) * (a + n - j - 2.0)) /
                     (double(n - j + 1) * (b + j - 1.0)));
        const double y = inc - comp;
        const double t = lw + y;
        comp = (t - lw) - y;
        lw = t;
      }
      const double term = lw + log_values[j];
      scratch[cnt++] = term;
      if (term > peak) peak = term;
    }
    double sum = 0.0;
    for (int i = 0; i < cnt; ++i) sum += std::exp(scratch[i] - peak);
    log_values[n] = -std::log1p(-v / lam) + peak + std::log(sum);
  }
}

} // namespace

Functional constant_functional(double theta) {
  char tag[64];
  std::snprintf(tag, sizeof(tag), "theta*1[theta=%.17g]", theta);
  return {[theta](int) { return theta; }, tag};
}

ThresholdEstimate threshold_M(const RateContext& ctx,
                              const std::function<double(int)>& psi, int horizon) {
  if (horizon < 2) throw std::domain_error("threshold_M: horizon must be >= 2");
  ThresholdEstimate out;
  std::vector<double> ratios;
  ratios.reserve(horizon - 1);
  std::vector<int> states;
  states.reserve(horizon - 1);
  for (int j = 2; j <= horizon; ++j) {
    const double p = psi(j);
    if (p < 0.0) throw std::domain_error("threshold_M: psi must be non-negative");
    if (p == 0.0) continue;
    const double r = ctx.total_rate(j) / p;
    if (r < out.value) {
      out.value = r;
      out.argmin = j;
    }
    ratios.push_back(r);
    states.push_back(j);
  }
  if (out.argmin < 0) return out; // psi vanished everywhere: M = +inf
  bool nondecreasing = true;
  for (size_t i = 1; i < ratios.size(); ++i)
    if (states[i - 1] >= out.argmin && ratios[i] < ratios[i - 1]) {
      nondecreasing = false;
      break;
    }
  out.attained_early = (out.argmin < horizon) && nondecreasing;
  return out;
}

LaplaceSeries laplace_series(const RateContext& ctx, const Functional& f, int n_max) {
  if (n_max < 1) throw std::domain_error("laplace_series: n_max must be >= 1");
  LaplaceSeries s;
  s.variant = LaplaceSeries::Variant::plain;
  s.params = ctx.params();
  s.functional_tag = f.tag;
  s.log_values.assign(n_max + 1, kNegInf);
  s.log_values[1] = 0.0; // E_1 = 1
  if (n_max >= 2) run_recursion(ctx, f, 2, 1, s.log_values);
  return s;
}

LaplaceSeries laplace_series_hitting(const RateContext& ctx, const Functional& f,
                                     int k, int n_max) {
  if (k < 2) throw std::domain_error("laplace_series_hitting: need k >= 2");
  if (n_max < k) throw std::domain_error("laplace_series_hitting: need n_max >= k");
  LaplaceSeries s;
  s.variant = LaplaceSeries::Variant::hitting;
  s.hitting_level = k;
  s.params = ctx.params();
  s.functional_tag = f.tag;
  s.log_values.assign(n_max + 1, kNegInf); // E_{n,k} = 0 for n < k
  const double lam_k = ctx.total_rate(k);
  const double vk = f.theta_psi(k);
  if (!(vk < lam_k)) throw admissibility_error(k, vk, lam_k);
  s.log_values[k] = -std::log1p(-vk / lam_k);
  if (n_max > k) run_recursion(ctx, f, k + 1, k, s.log_values);
  return s;
}

double special_psi(const RateContext& ctx, double ell, int n) {
  const BetaParams& p = ctx.params();
  check_ell(p, ell);
  if (n < 2) throw std::domain_error("special_psi: need n >= 2");
  if (ell == 0.0) return 0.0;
  RateContext tilted(BetaParams(p.a, p.b + ell));
  const double lam = ctx.total_rate(n);
  const double s = log_gamma_ratio(n, p.b - 1.0, p.b + ell - 1.0) +
                   log_gamma_ratio(n, p.a + p.b + ell - 2.0, p.a + p.b - 2.0) +
                   std::log(tilted.total_rate(n)) - std::log(lam);
  return lam * (-std::expm1(s));
}

Functional special_psi_functional(const RateContext& ctx, double ell) {
  const BetaParams p = ctx.params();
  check_ell(p, ell);
  auto tilted = std::make_shared<RateContext>(BetaParams(p.a, p.b + ell));
  const RateContext* base = &ctx;
  char tag[96];
  std::snprintf(tag, sizeof(tag), "special_psi[ell=%.17g]", ell);
  return {[base, tilted, p, ell](int n) -> double {
            if (ell == 0.0) return 0.0;
            const double lam = base->total_rate(n);
            const double s =
                log_gamma_ratio(n, p.b - 1.0, p.b + ell - 1.0) +
                log_gamma_ratio(n, p.a + p.b + ell - 2.0, p.a + p.b - 2.0) +
                std::log(tilted->total_rate(n)) - std::log(lam);
            return lam * (-std::expm1(s));
          },
          tag};
}

namespace {

// lambda_n(a, b+ell) minus the j < k part of its jump-weight identity:
// equal to sum_{j=k}^{n-1} binom(n,j-1) lambda_{n,n-j+1}(a, b+ell) > 0.
double tilted_rate_tail(const RateContext& tilted, int k, int n) {
  const double a = tilted.params().a, bt = tilted.params().b;
  const double lg_abt = log_gamma(a + bt + n - 2.0);
  auto head_term = [&](int j) {
    // binom(n, j-1) lambda_{n, n-j+1} with merger size n-j+1
    return std::exp(log_binom_small(n, j - 1) + log_gamma(a + n - j - 1.0) +
                    log_gamma(bt + j - 1.0) - lg_abt);
  };
  if (n - k <= 64) {
    double sum = 0.0;
    for (int j = n - 1; j >= k; --j) sum += head_term(j);
    return sum;
  }
  double head = 0.0;
  for (int j = 1; j < k; ++j) head += head_term(j);
  return tilted.total_rate(n) - head;
}

} // namespace

double special_psi_hitting(const RateContext& ctx, double ell, int k, int n) {
  const BetaParams& p = ctx.params();
  check_ell(p, ell);
  if (k < 2) throw std::domain_error("special_psi_hitting: need k >= 2");
  if (n < 2) throw std::domain_error("special_psi_hitting: need n >= 2");
  if (n <= k || ell == 0.0) return 0.0;
  RateContext tilted(BetaParams(p.a, p.b + ell));
  const double lam = ctx.total_rate(n);
  const double s = log_gamma_ratio(n, p.b - 1.0, p.b + ell - 1.0) +
                   log_gamma_ratio(n, p.a + p.b + ell - 2.0, p.a + p.b - 2.0) +
                   std::log(tilted_rate_tail(tilted, k, n)) - std::log(lam);
  return lam * (-std::expm1(s));
}

Functional special_psi_hitting_functional(const RateContext& ctx, double ell, int k) {
  const BetaParams p = ctx.params();
  check_ell(p, ell);
  auto tilted = std::make_shared<RateContext>(BetaParams(p.a, p.b + ell));
  const RateContext* base = &ctx;
  char tag[96];
  std::snprintf(tag, sizeof(tag), "special_psi_hitting[ell=%.17g,k=%d]", ell, k);
  return {[base, tilted, p, ell, k](int n) -> double {
            if (n <= k || ell == 0.0) return 0.0;
            const double lam = base->total_rate(n);
            const double s =
                log_gamma_ratio(n, p.b - 1.0, p.b + ell - 1.0) +
                log_gamma_ratio(n, p.a + p.b + ell - 2.0, p.a + p.b - 2.0) +
                std::log(tilted_rate_tail(*tilted, k, n)) - std::log(lam);
            return lam * (-std::expm1(s));
          },
          tag};
}

double closed_form_E_log(const BetaParams& p, double ell, int n) {
  if (n < 1) throw std::domain_error("closed_form_E: need n >= 1");
  check_ell(p, ell);
  return log_gamma_ratio(n, p.b + ell - 1.0, p.b - 1.0) + log_gamma(p.b) -
         log_gamma(p.b + ell);
}

double closed_form_E(const BetaParams& p, double ell, int n) {
  return std::exp(closed_form_E_log(p, ell, n));
}

double closed_form_E_hitting_log(const BetaParams& p, double ell, int k, int n) {
  if (n < k) throw std::domain_error("closed_form_E_hitting: need n >= k");
  check_ell(p, ell);
  return log_gamma_ratio(n, p.b + ell - 1.0, p.b - 1.0) +
         log_gamma(p.b + k - 1.0) - log_gamma(p.b + ell + k - 1.0);
}

double closed_form_E_hitting(const BetaParams& p, double ell, int k, int n) {
  return std::exp(closed_form_E_hitting_log(p, ell, k, n));
}

std::vector<double> record_probability_series(const RateContext& base, int n_max) {
  if (!(base.params().a < 1.0))
    throw regime_error("record probabilities require a in (0,1)");
  if (n_max < 1) throw std::domain_error("record_probability_series: n_max >= 1");
  auto primed = base.prime();
  Functional f{[&base](int j) { return -base.phi(j); }, "-phi"};
  LaplaceSeries s = laplace_series(*primed, f, n_max);
  std::vector<double> out(n_max + 1, std::numeric_limits<double>::quiet_NaN());
  for (int n = 1; n <= n_max; ++n) out[n] = std::exp(s.log_values[n]);
  return out;
}

double record_probability(const RateContext& base, int n) {
  return record_probability_series(base, n)[n];
}

KolmogorovBound kolmogorov_bound(const RateContext& base, int n, int trunc) {
  const double a = base.params().a, b = base.params().b;
  if (!(a < 1.0 && a > 0.0 && b > 1.0 - a))
    throw regime_error("kolmogorov bound requires a in (0,1) and b > 1 - a");
  if (n < 1 || trunc <= n)
    throw std::domain_error("kolmogorov_bound: need 1 <= n < trunc");
  const std::vector<double> rec = record_probability_series(base, trunc);
  KolmogorovBound out;
  out.n = n;
  out.trunc = trunc;
  for (int k = trunc; k >= n; --k) out.partial_sum += rec[k];
  // fit ln p_k = ln C - (2-a) ln k on the last decade before trunc
  const int fit_lo = std::max(n, trunc / 10);
  double acc = 0.0;
  int cnt = 0;
  for (int k = fit_lo; k <= trunc; ++k) {
    acc += std::log(rec[k]) + (2.0 - a) * std::log(double(k));
    ++cnt;
  }
  const double c_fit = std::exp(acc / cnt);
  out.tail_estimate = c_fit * std::pow(double(trunc), -(1.0 - a)) / (1.0 - a);
  return out;
}

double scaling_exponent(const LaplaceSeries& series, int n) {
  if (n < 1 || 2 * n > series.max_n())
    throw std::out_of_range("scaling_exponent: need 1 <= n and 2n <= series length");
  return (series.log_at(2 * n) - series.log_at(n)) / std::log(2.0);
}

void write_series_csv(const LaplaceSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "n,log_E,E\r\n";
  char buf[96];
  for (int n = 1; n <= series.max_n(); ++n) {
    const double lv = series.log_values[n];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,", n, lv);
    out << buf;
    if (std::abs(lv) <= 700.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", std::exp(lv));
      out << buf;
    }
    out << "\r\n";
  }
}

uint64_t fnv1a64(const void* data, size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 1469598103934665603ULL;
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string series_manifest_json(const LaplaceSeries& series,
                                 const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["a"] = series.params.a;
  j["b"] = series.params.b;
  j["variant"] =
      series.variant == LaplaceSeries::Variant::plain ? "plain" : "hitting";
  if (series.variant == LaplaceSeries::Variant::hitting)
    j["hitting_level"] = series.hitting_level;
  j["functional"] = series.functional_tag;
  j["n_max"] = series.max_n();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(
                    series.log_values.data(),
                    series.log_values.size() * sizeof(double))));
  j["checksum_fnv1a64"] = hex;
  j["outputs"] = outputs;
  return j.dump(2);
}

} // namespace betacoal
