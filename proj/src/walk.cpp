#include "gff/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gff/errors.hpp"

namespace gff {

BoundaryMeasure::BoundaryMeasure(SiteList support, Eigen::VectorXd weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (static_cast<Eigen::Index>(support_.size()) != weights_.size())
    throw Error("BoundaryMeasure: support/weight size mismatch");
  if (!std::is_sorted(support_.begin(), support_.end()))
    throw Error("BoundaryMeasure: support must be lexicographically sorted");
  double total = 0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_[i] < -1e-15)
      throw Error("BoundaryMeasure: negative weight");
    weights_[i] = std::max(weights_[i], 0.0);
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error("BoundaryMeasure: weights sum to " + std::to_string(total));
  cdf_.resize(support_.size());
  double acc = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    acc += weights_[static_cast<Eigen::Index>(i)];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

Site BoundaryMeasure::sample(double u) const {
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t i =
      std::min(static_cast<std::size_t>(it - cdf_.begin()), support_.size() - 1);
  return support_[i];
}

double BoundaryMeasure::integrate(const ScalarField& f) const {
  double acc = 0;
  for (std::size_t i = 0; i < support_.size(); ++i)
    acc += weights_[static_cast<Eigen::Index>(i)] * f.at(support_[i]);
  return acc;
}

ScalarField hit_field(const DomainPtr& domain, const SiteList& target,
                      const SiteList& avoid, const SolveOptions& opts) {
  SiteList region_sites = domain->sites();
  region_sites.insert(region_sites.end(), target.begin(), target.end());
  region_sites.insert(region_sites.end(), avoid.begin(), avoid.end());
  DomainPtr region = make_domain(std::move(region_sites));

  SiteList fixed = target;
  fixed.insert(fixed.end(), avoid.begin(), avoid.end());
  std::vector<double> values(target.size(), 1.0);
  values.resize(fixed.size(), 0.0);
  return solve_dirichlet(region, fixed, values, nullptr, opts);
}

double hit_probability_exact(const DomainPtr& domain, const SiteList& target,
                             const SiteList& avoid, Site start,
                             const SolveOptions& opts) {
  for (Site s : target)
    if (std::binary_search(avoid.begin(), avoid.end(), s))
      throw Error("hit_probability_exact: target and avoid overlap");
  return hit_field(domain, target, avoid, opts).at(start);
}

Eigen::VectorXd escape_probabilities(const DomainPair& pair,
                                     const SolveOptions& opts) {
  // psi(y) = P^y(tau_{V_N} < tau_{W_N^c}); escaping from z in ∂in V_N means
  // stepping to y outside V_N and then avoiding V_N until leaving W_N.
  const ScalarField psi = hit_field(pair.outer, pair.inner->sites(), {}, opts);
  const SiteList& boundary = pair.inner->inner_boundary();
  Eigen::VectorXd esc(static_cast<Eigen::Index>(boundary.size()));
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    double p = 0;
    for (int j = 0; j < 4; ++j) {
      const Site y = neighbor(boundary[k], j);
      if (pair.inner->contains(y)) continue;
      p += 0.25 * (1.0 - psi.at(y));
    }
    esc[static_cast<Eigen::Index>(k)] = p;
  }
  return esc;
}

double escape_probability(const DomainPair& pair, Site z,
                          const SolveOptions& opts) {
  const SiteList& boundary = pair.inner->inner_boundary();
  const auto it = std::lower_bound(boundary.begin(), boundary.end(), z);
  if (it == boundary.end() || *it != z)
    throw Error("escape_probability: z not on ∂in V_N");
  return escape_probabilities(pair, opts)[it - boundary.begin()];
}

BoundaryMeasure gamma_star(const DomainPair& pair, const SolveOptions& opts) {
  Eigen::VectorXd esc = escape_probabilities(pair, opts);
  esc /= esc.sum();
  return {pair.inner->inner_boundary(), std::move(esc)};
}

WalkOutcome simulate_until(const LatticeDomain& free_region, Site start,
                           const WalkConfig& cfg, std::uint64_t replica,
                           bool require_step) {
  if (!require_step && !free_region.contains(start)) return {start, 0};
  Philox rng(cfg.seed, cfg.stream, replica);
  Site s = start;
  std::uint64_t steps = 0;
  do {
    const Site step = kNeighborStep[rng.next_below(4)];
    s = {s.x + step.x, s.y + step.y};
    ++steps;
    if (steps > cfg.max_steps)
      throw StepBudgetExceeded("simulate_until: step budget exhausted", steps);
  } while (free_region.contains(s));
  return {s, steps};
}

TimeReversalEstimate time_reversal_capacity(const DomainPair& pair,
                                            std::int64_t replicas,
                                            const WalkConfig& cfg) {
  // Walks start uniformly on ∂out W_N, move through W_N \ V_N and stop when
  // they enter V_N (a hit, through ∂in V_N) or leave W_N again.
  SiteList annulus_sites;
  for (Site s : pair.outer->sites())
    if (!pair.inner->contains(s)) annulus_sites.push_back(s);
  const LatticeDomain annulus(std::move(annulus_sites));
  const SiteList& launch = pair.outer->outer_boundary();
  const SiteList& entry = pair.inner->inner_boundary();

  TimeReversalEstimate est;
  est.replicas = replicas;
  est.entry_sites = entry;
  est.entry_counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(entry.size()));
  for (std::int64_t rep = 0; rep < replicas; ++rep) {
    Philox rng(cfg.seed, cfg.stream, static_cast<std::uint64_t>(rep));
    const Site start =
        launch[rng.next_u64() % static_cast<std::uint64_t>(launch.size())];
    Site s = start;
    std::uint64_t steps = 0;
    bool aborted = false;
    do {
      const Site step = kNeighborStep[rng.next_below(4)];
      s = {s.x + step.x, s.y + step.y};
      ++steps;
      if (steps > cfg.max_steps) {
        aborted = true;
        break;
      }
    } while (annulus.contains(s));
    if (aborted) {
      ++est.aborted;
      continue;
    }
    if (pair.inner->contains(s)) {
      ++est.hits;
      const auto it = std::lower_bound(entry.begin(), entry.end(), s);
      est.entry_counts[it - entry.begin()] += 1.0;
    }
  }
  const double n = static_cast<double>(replicas - est.aborted);
  const double p = static_cast<double>(est.hits) / n;
  const double scale = 0.5 * static_cast<double>(launch.size());
  est.capacity = scale * p;
  est.stderr_ = scale * std::sqrt(p * (1.0 - p) / n);
  return est;
}

BoundaryMeasure harmonic_measure_row(const DomainPtr& free_region,
                                     const SiteList& absorb, Site x,
                                     const SolveOptions& opts) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(absorb.size()));
  const auto self = std::lower_bound(absorb.begin(), absorb.end(), x);
  if (self != absorb.end() && *self == x) {
    w[self - absorb.begin()] = 1.0;
    return {absorb, std::move(w)};
  }
  const ScalarField g = green_column(free_region, x, opts);
  for (std::size_t k = 0; k < absorb.size(); ++k) {
    double acc = 0;
    for (int j = 0; j < 4; ++j) acc += 0.25 * g.at(neighbor(absorb[k], j));
    w[static_cast<Eigen::Index>(k)] = acc;
  }
  return {absorb, std::move(w)};
}

BoundaryMeasure pushforward_measure(const BoundaryMeasure& mu,
                                    const DomainPtr& free_region,
                                    const SiteList& absorb,
                                    const SolveOptions& opts) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(absorb.size()));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(free_region->size());
  bool any_free = false;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Site s = mu.support()[i];
    const auto it = std::lower_bound(absorb.begin(), absorb.end(), s);
    if (it != absorb.end() && *it == s) {
      out[it - absorb.begin()] += mu.weight(i);  // tau = 0, mass stays put
      continue;
    }
    const int f = free_region->index_of(s);
    if (f < 0)
      throw Error("pushforward_measure: support site neither free nor absorbing");
    b[f] += mu.weight(i);
    any_free = true;
  }
  if (any_free) {
    DirichletSolver solver(free_region, {}, opts);
    const Eigen::VectorXd u = solver.solve_free(b);
    const ScalarField uf(free_region, u);
    for (std::size_t k = 0; k < absorb.size(); ++k) {
      double acc = 0;
      for (int j = 0; j < 4; ++j) acc += 0.25 * uf.at(neighbor(absorb[k], j));
      out[static_cast<Eigen::Index>(k)] += acc;
    }
  }
  return {absorb, std::move(out)};
}

// ---------------------------------------------------------------------------
// Potential kernel. Closed-form reduction of the Fourier representation:
//   a(x1,x2) = (1/pi) ∫_0^pi (1 - cos(x1 t) r(t)^{|x2|}) / s(t) dt,
// with alpha = 1 - cos(t)/2, s = sqrt(alpha^2 - 1/4), r = 2(alpha - s);
// the theta_2 integral of the 2-d representation is exact. Evaluated with
// Gauss-Legendre; the integrand is analytic on [0, pi].
// ---------------------------------------------------------------------------

namespace {

struct GaussLegendre {
  std::vector<double> x, w;
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  gl.x.resize(static_cast<std::size_t>(n));
  gl.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    gl.x[static_cast<std::size_t>(i)] = -z;
    gl.x[static_cast<std::size_t>(n - 1 - i)] = z;
    gl.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    gl.w[static_cast<std::size_t>(n - 1 - i)] = gl.w[static_cast<std::size_t>(i)];
  }
  return gl;
}

double kernel_quadrature(long long x1, long long x2, const GaussLegendre& gl) {
  const long long m = std::max(std::llabs(x1), std::llabs(x2));
  const long long n = std::min(std::llabs(x1), std::llabs(x2));
  if (m == 0) return 0.0;
  double acc = 0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double t = 0.5 * std::numbers::pi * (gl.x[i] + 1.0);
    const double alpha = 1.0 - 0.5 * std::cos(t);
    const double sh = std::sin(0.5 * t);
    const double s = sh * std::sqrt(alpha + 0.5);  // stable sqrt(alpha^2-1/4)
    const double r = 2.0 * (alpha - s);
    const double f =
        (1.0 - std::cos(static_cast<double>(m) * t) *
                   std::pow(r, static_cast<double>(n))) / s;
    acc += gl.w[i] * f;
  }
  return 0.5 * acc;  // (1/pi) * (pi/2) * sum w f
}

struct KernelTable {
  int radius = 32;
  std::vector<double> values;  // (radius+1)^2, index m*(radius+1)+n, m >= n
  double gamma2 = 0;
};

const KernelTable& kernel_table() {
  static const KernelTable table = [] {
    KernelTable t;
    const GaussLegendre gl = gauss_legendre(768);
    t.values.assign(static_cast<std::size_t>((t.radius + 1) * (t.radius + 1)),
                    0.0);
    for (int m = 0; m <= t.radius; ++m)
      for (int n = 0; n <= m; ++n)
        t.values[static_cast<std::size_t>(m * (t.radius + 1) + n)] =
            kernel_quadrature(m, n, gl);
    // gamma2 by Richardson extrapolation along the axis: the r^-2 term of the
    // expansion cancels between radii R and 2R.
    const GaussLegendre big = gauss_legendre(6144);
    const double g = 2.0 / std::numbers::pi;
    const double r1 = 256, r2 = 512;
    const double e1 = kernel_quadrature(static_cast<long long>(r1), 0, big) -
                      g * std::log(r1);
    const double e2 = kernel_quadrature(static_cast<long long>(r2), 0, big) -
                      g * std::log(r2);
    t.gamma2 = (4.0 * e2 - e1) / 3.0;
    return t;
  }();
  return table;
}

}  // namespace

double potential_kernel(Site u) {
  const KernelTable& t = kernel_table();
  const int ax = std::abs(u.x), ay = std::abs(u.y);
  const int m = std::max(ax, ay), n = std::min(ax, ay);
  if (m <= t.radius)
    return t.values[static_cast<std::size_t>(m * (t.radius + 1) + n)];
  const double g = 2.0 / std::numbers::pi;
  return g * std::log(std::hypot(static_cast<double>(u.x),
                                 static_cast<double>(u.y))) +
         t.gamma2;
}

double potential_kernel_gamma2() { return kernel_table().gamma2; }

int potential_kernel_table_radius() { return kernel_table().radius; }

EscapeBoundCheck check_escape_bound(const DomainPtr& u_region,
                                    const SiteList& trap_e,
                                    const SiteList& escape_d, Site x,
                                    const ContinuumShape& gamma_region,
                                    double m_param, double r_param,
                                    double fitted_c, const SolveOptions& opts) {
  EscapeBoundCheck out;

  // Hypothesis checks (reported, not asserted).
  {
    SiteList combined = trap_e;
    combined.insert(combined.end(), escape_d.begin(), escape_d.end());
    std::sort(combined.begin(), combined.end());
    const bool duplicates =
        std::adjacent_find(combined.begin(), combined.end()) != combined.end();
    if (duplicates || combined != u_region->outer_boundary()) {
      out.violation = "E and D do not partition the outer boundary of U";
    }
  }
  if (out.violation.empty()) {
    for (Site e : trap_e) {
      if (gamma_region.boundary_distance(Vec2(e.x, e.y)) > m_param) {
        out.violation = "sup_{x in E} dist(x, boundary Gamma) > M";
        break;
      }
    }
  }
  if (out.violation.empty()) {
    for (Site s : u_region->sites()) {
      const Vec2 p(s.x, s.y);
      const double dist_to_complement =
          gamma_region.contains(p) ? gamma_region.boundary_distance(p) : 0.0;
      if (dist_to_complement > m_param) {
        out.violation = "sup_{x in U} dist(x, Gamma^c) > M";
        break;
      }
    }
  }
  if (out.violation.empty()) {
    const double diam_u = set_diameter(u_region->sites());
    const double kappa_cap =
        1.0 / std::max(2.0 * m_param, diam_u / r_param);
    if (gamma_region.kappa_max() > kappa_cap)
      out.violation = "curvature of boundary Gamma exceeds the (M, R) cap";
  }
  out.hypothesis_ok = out.violation.empty();

  out.lhs = hit_probability_exact(u_region, escape_d, trap_e, x, opts);
  const double de = set_distance(x, trap_e);
  const double dd = set_distance(x, escape_d);
  out.dist_ratio = de / dd;
  out.rhs = fitted_c * out.dist_ratio;
  out.pass = out.lhs <= out.rhs + 1e-12;
  return out;
}

}  // namespace gff
