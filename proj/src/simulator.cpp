#include "betacoal/simulator.hpp"

#include "betacoal/errors.hpp"
#include "betacoal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <shared_mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace betacoal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const SimConfig& cfg) {
  if (cfg.n0 < 2) throw std::domain_error("SimConfig: n0 must be >= 2");
  if (cfg.replicates < 1) throw std::domain_error("SimConfig: replicates must be >= 1");
  for (int k : cfg.hitting_levels)
    if (k < 2 || k >= cfg.n0)
      throw std::domain_error("SimConfig: hitting levels must satisfy 2 <= k < n0");
}

int pick_threads(const SimConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

template <class Body>
void parallel_for(long long n, int threads, const Body& body) {
  threads = int(std::max<long long>(1, std::min<long long>(threads, n)));
  if (threads == 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const long long chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long long lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (long long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

EstimateWithCI estimate_from(const std::vector<double>& xs) {
  EstimateWithCI e;
  e.replicates = static_cast<long long>(xs.size());
  double s = 0.0;
  for (double x : xs) s += x;
  e.mean = s / e.replicates;
  double v = 0.0;
  for (double x : xs) v += (x - e.mean) * (x - e.mean);
  const double var = e.replicates > 1 ? v / (e.replicates - 1) : 0.0;
  e.std_error = std::sqrt(var / e.replicates);
  return e;
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  const double m = s / xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return v / (xs.size() - 1);
}

// Precomputed tables plus the shared jump-vector cache for one run.
class Engine {
public:
  Engine(const RateContext& ctx, const SimConfig& cfg)
      : ctx_(ctx), cfg_(cfg), a_(ctx.params().a), b_(ctx.params().b) {
    validate_config(cfg);
    lambda_ = ctx.total_rate_table(cfg.n0);
    w2_.resize(cfg.n0 + 1, kNaN);
    for (int m = 2; m <= cfg.n0; ++m) w2_[m] = ctx.jump_weight_seed(m);
  }

  const SimConfig& cfg() const { return cfg_; }
  double lambda(int m) const { return lambda_[m]; }

  // Landing state j out of state m for uniform u. The scan and the cached
  // binary search run the identical arithmetic sequence, so the result does
  // not depend on the cache contents.
  int sample_jump(int m, double u) const {
    const double target = u * lambda_[m];
    if (auto cum = cum_for(m)) {
      auto it = std::lower_bound(cum->begin(), cum->end(), target);
      int idx = int(it - cum->begin());
      if (idx > m - 2) idx = m - 2;
      return m - (idx + 2) + 1;
    }
    double w = w2_[m];
    double c = w;
    int k = 2;
    while (c < target && k < m) {
      w *= RateContext::jump_weight_ratio(a_, b_, m, k);
      ++k;
      c += w;
    }
    return m - k + 1;
  }

  struct PathAccum {
    double tau = 0.0;
    double integral = 0.0;
    double rb_log = 0.0;
    int jumps = 0;
    bool hit_state = false;            // visited the watched state
    std::vector<double> level_times;   // aligned with cfg.hitting_levels
  };

  void run_path(long long replicate_index, PathAccum& acc, int watch_state,
                std::vector<int>* visited, std::vector<double>* holdings) const {
    SplitMix64 rng = SplitMix64::replicate_stream(cfg_.seed, replicate_index);
    const auto& levels = cfg_.hitting_levels;
    acc.tau = acc.integral = acc.rb_log = 0.0;
    acc.jumps = 0;
    acc.hit_state = false;
    acc.level_times.assign(levels.size(), kNaN);
    const bool has_f = cfg_.functional.has_value();
    int m = cfg_.n0;
    double t = 0.0;
    while (m > 1) {
      if (visited) visited->push_back(m);
      if (m == watch_state) acc.hit_state = true;
      const double lam = lambda_[m];
      const double h = -std::log(rng.uniform_open01()) / lam;
      if (holdings) holdings->push_back(h);
      if (has_f) {
        const double v = cfg_.functional->theta_psi(m);
        acc.integral += v * h;
        acc.rb_log += -std::log1p(-v / lam); // ln(lam/(lam+psi)), psi = -v
      }
      const int j = sample_jump(m, rng.uniform_open01());
      t += h;
      for (size_t li = 0; li < levels.size(); ++li)
        if (std::isnan(acc.level_times[li]) && j < levels[li])
          acc.level_times[li] = t;
      ++acc.jumps;
      m = j;
    }
    acc.tau = t;
    if (visited) visited->push_back(1);
  }

private:
  std::shared_ptr<const std::vector<double>> cum_for(int m) const {
    if (m > cfg_.jump_cache_max_state) return nullptr;
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(m);
      if (it != cache_.end() && it->second.cum) return it->second.cum;
    }
    bool build;
    {
      std::unique_lock lock(mutex_);
      Entry& e = cache_[m];
      if (e.cum) return e.cum;
      ++e.visits;
      build = e.visits >= 2; // retained only once the state repeats
    }
    if (!build) return nullptr;
    auto cum = std::make_shared<std::vector<double>>();
    cum->reserve(m - 1);
    double w = w2_[m];
    double c = w;
    for (int k = 2; k <= m; ++k) {
      cum->push_back(c);
      if (k < m) {
        w *= RateContext::jump_weight_ratio(a_, b_, m, k);
        c += w;
      }
    }
    std::unique_lock lock(mutex_);
    Entry& e = cache_[m];
    if (!e.cum) e.cum = cum; // idempotent insert; duplicate work is fine
    return e.cum;
  }

  struct Entry {
    int visits = 0;
    std::shared_ptr<const std::vector<double>> cum;
  };

  const RateContext& ctx_;
  SimConfig cfg_;
  double a_, b_;
  std::vector<double> lambda_;
  std::vector<double> w2_;
  mutable std::unordered_map<int, Entry> cache_;
  mutable std::shared_mutex mutex_;
};

struct EnsembleNeeds {
  bool exp_integral = false;
  bool rao_blackwell = false;
  int watch_state = 0;
};

struct EnsembleData {
  std::vector<double> tau;
  std::vector<double> exp_integral;
  std::vector<double> rb;
  std::vector<uint8_t> hit;
};

EnsembleData run_ensemble(const Engine& eng, const EnsembleNeeds& needs) {
  const long long r = eng.cfg().replicates;
  EnsembleData data;
  data.tau.resize(r);
  if (needs.exp_integral) data.exp_integral.resize(r);
  if (needs.rao_blackwell) data.rb.resize(r);
  if (needs.watch_state > 0) data.hit.resize(r);
  parallel_for(r, pick_threads(eng.cfg()), [&](long long i) {
    thread_local Engine::PathAccum acc;
    eng.run_path(i, acc, needs.watch_state, nullptr, nullptr);
    data.tau[i] = acc.tau;
    if (needs.exp_integral) data.exp_integral[i] = std::exp(acc.integral);
    if (needs.rao_blackwell) data.rb[i] = std::exp(acc.rb_log);
    if (needs.watch_state > 0) data.hit[i] = acc.hit_state ? 1 : 0;
  });
  return data;
}

} // namespace

PathSummary simulate_path(const RateContext& ctx, const SimConfig& cfg,
                          long long replicate_index) {
  Engine eng(ctx, cfg);
  Engine::PathAccum acc;
  PathSummary out;
  eng.run_path(replicate_index, acc, 0, &out.visited, &out.holdings);
  out.absorption_time = acc.tau;
  out.functional_integral = acc.integral;
  out.jumps = acc.jumps;
  for (size_t li = 0; li < cfg.hitting_levels.size(); ++li)
    out.hitting_times[cfg.hitting_levels[li]] = acc.level_times[li];
  return out;
}

std::vector<double> absorption_samples(const RateContext& ctx, const SimConfig& cfg) {
  Engine eng(ctx, cfg);
  return run_ensemble(eng, {}).tau;
}

AbsorptionEstimate estimate_absorption(const RateContext& ctx, const SimConfig& cfg) {
  const std::vector<double> taus = absorption_samples(ctx, cfg);
  AbsorptionEstimate out;
  out.tau = estimate_from(taus);
  const double ln_n = std::log(double(cfg.n0));
  out.tau_over_log_n = out.tau;
  out.tau_over_log_n.mean /= ln_n;
  out.tau_over_log_n.std_error /= ln_n;
  return out;
}

PairedLaplaceEstimate laplace_mc_paired(const RateContext& ctx, const SimConfig& cfg) {
  if (!cfg.functional)
    throw std::domain_error("laplace_mc_paired: config carries no functional");
  Engine eng(ctx, cfg);
  PairedLaplaceEstimate out;
  for (int j = 2; j <= cfg.n0; ++j) {
    const double v = cfg.functional->theta_psi(j);
    if (!(v < eng.lambda(j))) out.functional_admissible = false;
    if (v > 0.0) out.rb_valid = false;
  }
  EnsembleNeeds needs;
  needs.exp_integral = true;
  needs.rao_blackwell = out.rb_valid;
  const EnsembleData data = run_ensemble(eng, needs);
  out.naive = estimate_from(data.exp_integral);
  out.naive_variance = sample_variance(data.exp_integral);
  if (out.rb_valid) {
    out.rao_blackwell = estimate_from(data.rb);
    out.rb_variance = sample_variance(data.rb);
  }
  return out;
}

EstimateWithCI estimate_laplace_mc(const RateContext& ctx, const SimConfig& cfg) {
  return laplace_mc_paired(ctx, cfg).naive;
}

EstimateWithCI rao_blackwell_negative_exponential(const RateContext& ctx,
                                                  const SimConfig& cfg) {
  const PairedLaplaceEstimate paired = laplace_mc_paired(ctx, cfg);
  if (!paired.rb_valid)
    throw std::domain_error(
        "rao_blackwell_negative_exponential: functional must have theta*psi <= 0");
  return paired.rao_blackwell;
}

EstimateWithCI hitting_probability_mc(const RateContext& ctx, const SimConfig& cfg,
                                      int k) {
  if (k < 2 || k >= cfg.n0)
    throw std::domain_error("hitting_probability_mc: need 2 <= k < n0");
  Engine eng(ctx, cfg);
  EnsembleNeeds needs;
  needs.watch_state = k;
  const EnsembleData data = run_ensemble(eng, needs);
  long long hits = 0;
  for (uint8_t h : data.hit) hits += h;
  EstimateWithCI e;
  e.replicates = cfg.replicates;
  e.mean = double(hits) / cfg.replicates;
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / cfg.replicates);
  return e;
}

double empirical_kolmogorov(const RateContext& ctx, const SimConfig& cfg, int n1,
                            int n2, std::optional<uint64_t> seed2) {
  if (n1 < 2 || n2 < 2) throw std::domain_error("empirical_kolmogorov: need n >= 2");
  SimConfig c1 = cfg;
  c1.n0 = n1;
  SimConfig c2 = cfg;
  c2.n0 = n2;
  if (seed2) c2.seed = *seed2;
  std::vector<double> s1 = absorption_samples(ctx, c1);
  std::vector<double> s2 = absorption_samples(ctx, c2);
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  // sup over thresholds of |F1 - F2| by a merge sweep; ties advance both sides
  const double inv1 = 1.0 / s1.size(), inv2 = 1.0 / s2.size();
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < s1.size() && j < s2.size()) {
    const double v = std::min(s1[i], s2[j]);
    while (i < s1.size() && s1[i] == v) ++i;
    while (j < s2.size() && s2[j] == v) ++j;
    d = std::max(d, std::abs(i * inv1 - j * inv2));
  }
  return d;
}

LdpTailEstimate ldp_tail_from_samples(const std::vector<double>& taus, int n0,
                                      double x) {
  const double ln_n = std::log(double(n0));
  const double threshold = x * ln_n;
  LdpTailEstimate out;
  for (double t : taus)
    if (t >= threshold) ++out.hits;
  if (out.hits == 0) {
    out.lower_bound_only = true;
    out.exponent = std::log(double(taus.size())) / ln_n;
    return out;
  }
  out.exponent = -std::log(double(out.hits) / taus.size()) / ln_n;
  return out;
}

LdpTailEstimate ldp_tail_mc(const RateContext& ctx, const SimConfig& cfg, double x) {
  return ldp_tail_from_samples(absorption_samples(ctx, cfg), cfg.n0, x);
}

void write_paths_csv(const RateContext& ctx, const SimConfig& cfg,
                     const std::string& path) {
  Engine eng(ctx, cfg);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "replicate_index,tau";
  for (int k : cfg.hitting_levels) out << ",T_" << k;
  out << ",integral,jumps\r\n";
  char buf[64];
  Engine::PathAccum acc;
  for (long long i = 0; i < cfg.replicates; ++i) {
    eng.run_path(i, acc, 0, nullptr, nullptr);
    out << i;
    std::snprintf(buf, sizeof(buf), ",%.17g", acc.tau);
    out << buf;
    for (double t : acc.level_times) {
      std::snprintf(buf, sizeof(buf), ",%.17g", t);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%d", acc.integral, acc.jumps);
    out << buf << "\r\n";
  }
}

} // namespace betacoal
