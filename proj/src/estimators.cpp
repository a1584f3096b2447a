#include "gff/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "gff/errors.hpp"
#include "gff/rng.hpp"

namespace gff {

double centering_formula(double n) {
  const double g = 2.0 / std::numbers::pi;
  const double ln = std::log(n);
  return 2.0 * std::sqrt(g) * (ln - 0.375 * std::log(ln));
}

void parallel_replicas(long long n, int threads,
                       const std::function<void(long long)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<long long>(1, std::min<long long>(threads, n)));
  if (threads == 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const long long chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long long lo = t * chunk;
    const long long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

TailTable build_tail_table(const DomainPair& pair, const Capacitor& cap,
                           const DgffSampler& sampler, long long replicas,
                           std::uint64_t seed, std::uint64_t stream,
                           int threads) {
  if (sampler.domain_ptr().get() != pair.outer.get())
    throw Error("build_tail_table: sampler is not on W_N");
  TailTable t;
  t.capacity = cap.capacity;
  t.sigma2 = cap.sigma2;
  t.sigma = cap.sigma();
  t.seed = seed;
  t.stream = stream;
  t.replicas = replicas;
  t.min_inner.resize(replicas);
  t.z.resize(replicas);

  std::vector<int> inner_idx;
  inner_idx.reserve(static_cast<std::size_t>(pair.inner->size()));
  for (Site s : pair.inner->sites())
    inner_idx.push_back(pair.outer->index_of(s));

  const int dim = sampler.dim();
  parallel_replicas(replicas, threads, [&](long long rep) {
    thread_local Eigen::VectorXd normals;
    normals.resize(dim);
    GaussianStream gs(seed, stream, static_cast<std::uint64_t>(rep));
    gs.fill(normals);
    const Eigen::VectorXd h = sampler.transform(normals);
    double mn = std::numeric_limits<double>::infinity();
    for (const int i : inner_idx) mn = std::min(mn, h[i]);
    t.min_inner[rep] = mn;
    t.z[rep] = t.sigma * cap.dirichlet_pairing(h);
  });
  return t;
}

namespace {

struct WeightedTally {
  double wsum = 0;    // sum of weights on the event
  double w2sum = 0;   // sum of squared weights on the event
  long long count = 0;
  double wmax_all = 0;
};

}  // namespace

EstimateReport hard_wall_from_table(const TailTable& table, double m_n,
                                    double u, double tilt_s,
                                    double ess_guard) {
  const double threshold = -m_n + u;
  const long long n = table.replicas;
  WeightedTally tally;
  for (long long i = 0; i < n; ++i) {
    const double logw = -tilt_s * table.z[i] / table.sigma -
                        tilt_s * tilt_s * table.capacity;
    const double w = std::exp(logw);
    tally.wmax_all = std::max(tally.wmax_all, w);
    if (table.min_inner[i] + tilt_s >= threshold) {
      tally.wsum += w;
      tally.w2sum += w * w;
      ++tally.count;
    }
  }
  EstimateReport rep;
  rep.quantity = "hard_wall_probability";
  rep.replicas = n;
  rep.seed = table.seed;
  rep.stream = table.stream;
  rep.tilt = tilt_s;
  rep.route = tilt_s == 0.0 ? "plain-mc" : "importance";
  const double nd = static_cast<double>(n);
  rep.estimate = tally.wsum / nd;
  const double second_moment = tally.w2sum / nd;
  rep.stderr_value = std::sqrt(
      std::max(second_moment - rep.estimate * rep.estimate, 0.0) / nd);
  rep.ess = tally.w2sum > 0 ? tally.wsum * tally.wsum / tally.w2sum : 0.0;
  if (tally.count == 0) {
    rep.bound_only = true;
    rep.bound_kind = "upper";
    rep.estimate = 3.0 * std::max(tally.wmax_all, 1.0) / nd;  // rule of three
    rep.stderr_value = 0;
  } else if (rep.ess < ess_guard * nd) {
    rep.bound_only = true;
    rep.bound_kind = "upper";
    rep.estimate += 3.0 * rep.stderr_value;
  }
  if (rep.estimate > 0 && !rep.bound_only)
    rep.extra.emplace_back("neg_log_estimate", -std::log(rep.estimate));
  rep.extra.emplace_back("reference_cap_u2", table.capacity * u * u);
  rep.extra.emplace_back("event_count", static_cast<double>(tally.count));
  rep.extra.emplace_back("u", u);
  return rep;
}

EstimateReport conditional_tail_from_table(const TailTable& table, double m_n,
                                           double u) {
  const double threshold = -m_n + u;
  const long long n = table.replicas;
  long long hits = 0;
  for (long long i = 0; i < n; ++i)
    if (table.min_inner[i] - table.sigma * table.z[i] >= threshold) ++hits;
  EstimateReport rep;
  rep.quantity = "conditional_tail_probability";
  rep.replicas = n;
  rep.seed = table.seed;
  rep.stream = table.stream;
  rep.route = "plain-mc";
  const double nd = static_cast<double>(n);
  rep.estimate = static_cast<double>(hits) / nd;
  rep.stderr_value = std::sqrt(rep.estimate * (1.0 - rep.estimate) / nd);
  rep.ess = nd;
  if (hits == 0) {
    rep.bound_only = true;  // probability underflow at this replica count
    rep.bound_kind = "upper";
    rep.estimate = 3.0 / nd;
    rep.stderr_value = 0;
  }
  rep.extra.emplace_back("u", u);
  rep.extra.emplace_back("survivors", static_cast<double>(hits));
  return rep;
}

SlopeFit conditional_tail_signature(const TailTable& table, double m_n,
                                    const std::vector<double>& u_grid,
                                    long long min_survivors) {
  std::vector<double> xs, ys, vars;
  for (const double u : u_grid) {
    const auto rep = conditional_tail_from_table(table, m_n, u);
    const double p = rep.estimate;
    const double survivors = static_cast<double>(table.replicas) * p;
    if (rep.bound_only || survivors < static_cast<double>(min_survivors) ||
        p > 0.95)
      continue;
    const double y = std::log(-std::log(p));
    // Delta method: Var(y) = Var(p) / (p log p)^2.
    const double vy = rep.stderr_value * rep.stderr_value /
                      (p * std::log(p) * p * std::log(p));
    xs.push_back(u);
    ys.push_back(y);
    vars.push_back(std::max(vy, 1e-12));
  }
  SlopeFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.u_used = xs;
  if (fit.points < 3) return fit;
  // Weighted least squares.
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = 1.0 / vars[i];
    sw += w;
    swx += w * xs[i];
    swy += w * ys[i];
    swxx += w * xs[i] * xs[i];
    swxy += w * xs[i] * ys[i];
  }
  const double denom = sw * swxx - swx * swx;
  fit.slope = (sw * swxy - swx * swy) / denom;
  fit.intercept = (swy - fit.slope * swx) / sw;
  fit.slope_stderr = std::sqrt(sw / denom);
  fit.ci_excludes_zero = fit.slope - 1.96 * fit.slope_stderr > 0.0;
  return fit;
}

EstimateReport convolution_reconstruction(const TailTable& table, double m_n,
                                          double u, double step_fraction,
                                          double range_sigmas) {
  const double sigma = table.sigma;
  const long long n = table.replicas;
  // Sorted conditional margins give the whole survival curve at once.
  std::vector<double> cond(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i)
    cond[static_cast<std::size_t>(i)] =
        table.min_inner[i] - sigma * table.z[i];
  std::sort(cond.begin(), cond.end());
  const double nd = static_cast<double>(n);
  const auto survival = [&](double threshold) {
    const auto it = std::lower_bound(cond.begin(), cond.end(), threshold);
    return static_cast<double>(cond.end() - it) / nd;
  };

  const double dv = sigma * step_fraction;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  double acc = 0, acc_se = 0;
  for (double v = u - range_sigmas * sigma; v <= u + range_sigmas * sigma;
       v += dv) {
    const double kern = norm * std::exp(-(u - v) * (u - v) / (2 * sigma * sigma));
    const double p = survival(-m_n + v);
    acc += kern * p * dv;
    acc_se += kern * std::sqrt(p * (1 - p) / nd) * dv;  // correlated: add, not square
  }
  EstimateReport rep;
  rep.quantity = "hard_wall_probability_reconstructed";
  rep.replicas = n;
  rep.seed = table.seed;
  rep.stream = table.stream;
  rep.route = "plain-mc";
  rep.estimate = acc;
  rep.stderr_value = acc_se;
  rep.ess = nd;
  rep.extra.emplace_back("u", u);
  rep.extra.emplace_back("grid_step", dv);
  return rep;
}

EstimateReport repulsion_profile(const TailTable& table, double m_n, double u,
                                 double tilt_s, double ess_guard) {
  const double threshold = -m_n + u;
  const long long n = table.replicas;
  const bool unconditional = !std::isfinite(u) && u < 0;
  std::vector<std::pair<double, double>> zw;  // (Z of tilted field, weight)
  zw.reserve(static_cast<std::size_t>(n));
  double wsum = 0, w2sum = 0, lift_sum = 0;
  for (long long i = 0; i < n; ++i) {
    const double logw = -tilt_s * table.z[i] / table.sigma -
                        tilt_s * tilt_s * table.capacity;
    const double w = std::exp(logw);
    if (!unconditional && table.min_inner[i] + tilt_s < threshold) continue;
    const double z_tilted = table.z[i] + tilt_s / table.sigma;
    zw.emplace_back(z_tilted, w);
    wsum += w;
    w2sum += w * w;
    lift_sum += w * table.sigma * z_tilted;
  }
  EstimateReport rep;
  rep.quantity = "repulsion_profile_mean_lift";
  rep.replicas = n;
  rep.seed = table.seed;
  rep.stream = table.stream;
  rep.tilt = tilt_s;
  rep.route = tilt_s == 0.0 ? "plain-mc" : "importance";
  rep.ess = w2sum > 0 ? wsum * wsum / w2sum : 0;
  if (zw.empty() || rep.ess < ess_guard * static_cast<double>(n)) {
    rep.bound_only = true;
    rep.bound_kind = "upper";
    return rep;
  }
  rep.estimate = lift_sum / wsum;
  // Weighted quantiles of Z under the conditional law.
  std::sort(zw.begin(), zw.end());
  double acc = 0;
  std::size_t qi = 0;
  const double targets[3] = {0.25, 0.5, 0.75};
  const char* names[3] = {"z_q25", "z_q50", "z_q75"};
  for (const auto& [zv, wv] : zw) {
    acc += wv;
    while (qi < 3 && acc >= targets[qi] * wsum) {
      rep.extra.emplace_back(names[qi], zv);
      ++qi;
    }
  }
  while (qi < 3) {
    rep.extra.emplace_back(names[qi], zw.back().first);
    ++qi;
  }
  // Weighted standard error of the mean lift (ratio estimator).
  double var_acc = 0;
  for (const auto& [zv, wv] : zw) {
    const double d = table.sigma * zv - rep.estimate;
    var_acc += wv * wv * d * d;
  }
  rep.stderr_value = std::sqrt(var_acc) / wsum;
  rep.extra.emplace_back("u", u);
  rep.extra.emplace_back("event_count", static_cast<double>(zw.size()));
  return rep;
}

std::vector<EstimateReport> estimate_extreme_centering(
    const ContinuumShape& w_shape, const std::vector<int>& n_grid,
    long long replicas, std::uint64_t seed, int threads) {
  std::vector<EstimateReport> out;
  std::uint64_t stream = 1000;
  for (const int n_scale : n_grid) {
    const DomainPtr dom = discretize(w_shape, n_scale);
    const DgffSampler sampler(dom);
    Eigen::VectorXd maxima(replicas);
    const int dim = sampler.dim();
    parallel_replicas(replicas, threads, [&](long long rep_i) {
      thread_local Eigen::VectorXd normals;
      normals.resize(dim);
      GaussianStream gs(seed, stream, static_cast<std::uint64_t>(rep_i));
      gs.fill(normals);
      maxima[rep_i] = sampler.transform(normals).maxCoeff();
    });
    EstimateReport rep;
    rep.quantity = "extreme_centering/N=" + std::to_string(n_scale);
    rep.replicas = replicas;
    rep.seed = seed;
    rep.stream = stream;
    rep.route = "plain-mc";
    rep.estimate = maxima.mean();
    const double var =
        (maxima.array() - rep.estimate).square().sum() / replicas;
    rep.stderr_value = std::sqrt(var / replicas);
    rep.ess = static_cast<double>(replicas);
    if (n_scale >= 3) {
      const double formula = centering_formula(n_scale);
      rep.extra.emplace_back("formula", formula);
      rep.extra.emplace_back("difference", rep.estimate - formula);
    }
    rep.extra.emplace_back("sites", static_cast<double>(dom->size()));
    ++stream;
    out.push_back(std::move(rep));
  }
  return out;
}

Eigen::VectorXd isotonic_non_increasing(const Eigen::VectorXd& y) {
  // PAV on the reversed sequence (non-decreasing there).
  const Eigen::Index n = y.size();
  std::vector<double> level, weight;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double lv = y[i], wt = 1;
    while (!level.empty() && level.back() > lv) {
      lv = (lv * wt + level.back() * weight.back()) / (wt + weight.back());
      wt += weight.back();
      level.pop_back();
      weight.pop_back();
    }
    level.push_back(lv);
    weight.push_back(wt);
  }
  Eigen::VectorXd out(n);
  Eigen::Index pos = n - 1;
  for (std::size_t b = 0; b < level.size(); ++b)
    for (long long k = 0; k < std::llround(weight[b]); ++k)
      out[pos--] = level[b];
  return out;
}

}  // namespace gff
