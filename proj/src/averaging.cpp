#include "gff/averaging.hpp"

#include <algorithm>
#include <cmath>

#include "gff/errors.hpp"

namespace gff {

AveragingScheme build_scheme(const DomainPair& pair, double r,
                             const SolveOptions& opts) {
  if (r < 0) throw Error("build_scheme: r must be >= 0");
  AveragingScheme s;
  s.pair = pair;
  s.r = r;
  if (r == 0) {
    s.shrunken = pair.inner;
  } else {
    const ContinuumShape shrunk =
        shrink_interior(pair.v_shape, r / static_cast<double>(pair.scale));
    s.shrunken = discretize(shrunk, pair.scale);
  }
  for (Site z : s.shrunken->sites())
    if (!pair.inner->contains(z))
      throw DegenerateInterior("build_scheme: V_{N,r} not inside V_N");

  DomainPair shrunk_pair;
  shrunk_pair.outer = pair.outer;
  shrunk_pair.inner = s.shrunken;
  shrunk_pair.scale = pair.scale;
  shrunk_pair.v_shape = pair.v_shape;
  shrunk_pair.w_shape = pair.w_shape;
  Eigen::VectorXd esc = escape_probabilities(shrunk_pair, opts);
  s.cap_shrunken = 0.5 * esc.sum();
  esc /= esc.sum();
  s.gamma = BoundaryMeasure(s.shrunken->inner_boundary(), std::move(esc));

  // Pushforward onto ∂in V_N: the walk from V_N^- cannot leave V_N without
  // first visiting ∂in V_N, so no mass is lost. If V_N has no interior the
  // measure is already supported on ∂in V_N.
  const SiteList& absorb = pair.inner->inner_boundary();
  if (pair.inner->interior().empty()) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(absorb.size()));
    for (std::size_t i = 0; i < s.gamma.size(); ++i) {
      const Site z = s.gamma.support()[i];
      const auto it = std::lower_bound(absorb.begin(), absorb.end(), z);
      if (it == absorb.end() || *it != z)
        throw Error("build_scheme: gamma support escapes ∂in V_N");
      w[it - absorb.begin()] += s.gamma.weight(i);
    }
    s.gamma_pi = BoundaryMeasure(absorb, std::move(w));
  } else {
    const DomainPtr v_minus = make_domain(pair.inner->interior());
    s.gamma_pi = pushforward_measure(s.gamma, v_minus, absorb, opts);
  }
  return s;
}

double averaged_phi_variance(const AveragingScheme& scheme,
                             const SolveOptions& opts) {
  const DomainPtr& w_dom = scheme.pair.outer;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(w_dom->size());
  for (std::size_t i = 0; i < scheme.gamma_pi.size(); ++i) {
    const int idx = w_dom->index_of(scheme.gamma_pi.support()[i]);
    if (idx < 0) throw Error("averaged_phi_variance: support outside W_N");
    w[idx] += scheme.gamma_pi.weight(i);
  }
  DirichletSolver solver(w_dom, {}, opts);
  return w.dot(solver.solve_free(w));
}

double averaged_delta_variance_direct(const AveragingScheme& scheme,
                                      const Capacitor& cap,
                                      const SolveOptions& opts) {
  return averaged_phi_variance(scheme, opts) - cap.sigma2;
}

double averaged_delta_variance_formula(const AveragingScheme& scheme,
                                       const Capacitor& cap,
                                       const SolveOptions& opts) {
  // q(y) = P^y(tau_{V_{N,r}} < tau_{W_N^c}); both start measures live on
  // ∂in V_N, and the escape probability is 1 - q there.
  const ScalarField q =
      hit_field(scheme.pair.outer, scheme.shrunken->sites(), {}, opts);
  const BoundaryMeasure gs = gamma_star(scheme.pair, opts);
  double p_star = 0, p_pi = 0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    p_star += gs.weight(i) * (1.0 - q.at(gs.support()[i]));
  for (std::size_t i = 0; i < scheme.gamma_pi.size(); ++i)
    p_pi += scheme.gamma_pi.weight(i) * (1.0 - q.at(scheme.gamma_pi.support()[i]));
  (void)cap;
  return (p_star - p_pi) / (2.0 * scheme.cap_shrunken);
}

double gamma_box_constant(const BoundaryMeasure& gamma, int n_scale, double l) {
  if (l <= 0) throw Error("gamma_box_constant: l must be positive");
  const int half = static_cast<int>(std::floor(l / 2.0));
  // Dense weight grid over the support bounding box, then prefix sums.
  Site lo = gamma.support().front(), hi = lo;
  for (Site s : gamma.support()) {
    lo.x = std::min(lo.x, s.x);
    lo.y = std::min(lo.y, s.y);
    hi.x = std::max(hi.x, s.x);
    hi.y = std::max(hi.y, s.y);
  }
  const int w = hi.x - lo.x + 1, h = hi.y - lo.y + 1;
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(w + 1, h + 1);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const Site s = gamma.support()[i];
    grid(s.x - lo.x + 1, s.y - lo.y + 1) += gamma.weight(i);
  }
  for (int x = 1; x <= w; ++x)
    for (int y = 1; y <= h; ++y)
      grid(x, y) += grid(x - 1, y) + grid(x, y - 1) - grid(x - 1, y - 1);
  auto cum = [&](int x, int y) {  // sum over sites with index <= (x,y)
    x = std::clamp(x, 0, w);
    y = std::clamp(y, 0, h);
    return grid(x, y);
  };
  double best = 0;
  // Box centers within one window of the support suffice for the max.
  for (int cx = -half; cx < w + half; ++cx)
    for (int cy = -half; cy < h + half; ++cy) {
      const double mass = cum(cx + half + 1, cy + half + 1) -
                          cum(cx - half, cy + half + 1) -
                          cum(cx + half + 1, cy - half) +
                          cum(cx - half, cy - half);
      best = std::max(best, mass);
    }
  return best * static_cast<double>(n_scale) / l;
}

}  // namespace gff
