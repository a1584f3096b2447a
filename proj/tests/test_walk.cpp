#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gff/errors.hpp"
#include "gff/walk.hpp"

using namespace gff;

namespace {

SiteList ball_sites(double radius) {
  return ball_domain({0, 0}, radius)->sites();
}

}  // namespace

TEST_CASE("hit_probability: start inside the target") {
  const auto dom = ball_domain({0, 0}, 6.0);
  CHECK(hit_probability_exact(dom, ball_sites(2.0), {}, {0, 0}) ==
        doctest::Approx(1.0));
}

TEST_CASE("hit_probability: symmetric two-exit corridor") {
  // Box [1,9]x[-1,1]; the outer boundary is split into mirror-symmetric
  // halves, with the two fixed x=5 sites assigned one to each side. The
  // composition of the two lattice reflections swaps target and avoid, so the
  // probability from the center is exactly 1/2.
  const auto dom = box_domain({1, -1}, {9, 1});
  SiteList target, avoid;
  for (Site s : dom->outer_boundary()) {
    if (s.x > 5)
      target.push_back(s);
    else if (s.x < 5)
      avoid.push_back(s);
    else
      (s.y > 0 ? target : avoid).push_back(s);
  }
  std::sort(target.begin(), target.end());
  std::sort(avoid.begin(), avoid.end());
  CHECK(hit_probability_exact(dom, target, avoid, {5, 0}) ==
        doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("hit_probability: annulus matches the log formula") {
  const int k = 8, n = 32;
  const auto dom = ball_domain({0, 0}, static_cast<double>(n));
  const auto reach_inner = hit_field(dom, ball_sites(static_cast<double>(k)), {});
  for (Site x : {Site{16, 0}, Site{0, 12}, Site{14, 14}}) {
    const double p = 1.0 - reach_inner.at(x);
    const double formula =
        (std::log(std::hypot(static_cast<double>(x.x),
                             static_cast<double>(x.y))) -
         std::log(static_cast<double>(k))) /
        (std::log(static_cast<double>(n)) - std::log(static_cast<double>(k)));
    CHECK(std::abs(p - formula) < 1.5 / k);
  }
}

TEST_CASE("escape_probability: single-site world escapes surely") {
  const auto one = make_domain({{0, 0}});
  DomainPair pair{one, one, 1};
  CHECK(escape_probability(pair, {0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("escape probabilities sum to twice the capacity") {
  const auto pair = make_pair(ContinuumShape::disk({0, 0}, 0.3),
                              ContinuumShape::rectangle({-1, -1}, {1, 1}), 24);
  const Eigen::VectorXd esc = escape_probabilities(pair);
  CHECK(esc.minCoeff() >= 0.0);
  CHECK(esc.maxCoeff() <= 1.0);
  const auto cap = capacitor(pair);
  CHECK(esc.sum() == doctest::Approx(2.0 * cap.capacity).epsilon(1e-8));
}

TEST_CASE("escape probabilities scale like 1/N for smooth V") {
  double fitted_c = 0;
  for (int N : {32, 64, 128}) {
    const auto pair = make_pair(ContinuumShape::disk({0, 0}, 0.25),
                                ContinuumShape::disk({0, 0}, 1.0), N);
    const double max_esc = escape_probabilities(pair).maxCoeff();
    const double c = max_esc * N;
    if (fitted_c == 0) fitted_c = c;
    CHECK(c < 2.0 * fitted_c);
    CHECK(c > 0.5 * fitted_c);
  }
}

TEST_CASE("gamma_star: point mass in the single-site world") {
  const auto one = make_domain({{0, 0}});
  DomainPair pair{one, one, 1};
  const auto gs = gamma_star(pair);
  REQUIRE(gs.size() == 1);
  CHECK(gs.weight(0) == doctest::Approx(1.0));
}

TEST_CASE("gamma_star: dihedral symmetry for square in square") {
  const auto pair = make_pair(ContinuumShape::rectangle({-0.3, -0.3}, {0.3, 0.3}),
                              ContinuumShape::rectangle({- 1, -1}, {1, 1}), 16);
  const auto gs = gamma_star(pair);
  // Map each support site through the 8 symmetries of the square and check
  // equal weights.
  auto weight_at = [&](Site s) {
    const auto it =
        std::lower_bound(gs.support().begin(), gs.support().end(), s);
    REQUIRE(it != gs.support().end());
    REQUIRE(*it == s);
    return gs.weight(static_cast<std::size_t>(it - gs.support().begin()));
  };
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Site s = gs.support()[i];
    const double w = gs.weight(i);
    for (Site t : {Site{-s.x, s.y}, Site{s.x, -s.y}, Site{s.y, s.x},
                   Site{-s.y, -s.x}}) {
      CHECK(weight_at(t) == doctest::Approx(w).epsilon(1e-8));
    }
  }
}

TEST_CASE("simulate_until: trivial stop and one-step uniformity") {
  const auto annulus = box_domain({-3, -3}, {3, 3});
  WalkConfig cfg;
  cfg.seed = 99;
  const auto out = simulate_until(*annulus, {10, 10}, cfg);
  CHECK(out.exit == Site{10, 10});
  CHECK(out.steps == 0);

  const auto one = make_domain({{0, 0}});
  std::array<std::int64_t, 4> counts{};
  const int n = 100000;
  for (int rep = 0; rep < n; ++rep) {
    const auto o = simulate_until(*one, {0, 0}, cfg, static_cast<std::uint64_t>(rep));
    CHECK(o.steps == 1);
    for (int k = 0; k < 4; ++k)
      if (o.exit == neighbor({0, 0}, k)) ++counts[k];
  }
  double chi2 = 0;
  for (const auto c : counts) {
    const double e = n / 4.0;
    chi2 += (c - e) * (c - e) / e;
  }
  CHECK(chi2 < 16.27);  // chi^2_3 at p = 0.999
}

TEST_CASE("simulate_until: annulus frequencies match the exact solve") {
  const auto big = ball_domain({0, 0}, 12.0);
  SiteList annulus_sites;
  for (Site s : big->sites())
    if (s.x * s.x + s.y * s.y >= 16) annulus_sites.push_back(s);
  const auto annulus = make_domain(annulus_sites);
  const Site start{8, 0};

  const auto inner_first =
      hit_field(annulus, ball_sites(4.0), {});
  // Absorbing semantics of simulate_until: first site off the annulus.
  const double p_exact = [&] {
    // P(enter the inner ball before leaving the big ball).
    return inner_first.at(start);
  }();

  WalkConfig cfg;
  cfg.seed = 4242;
  const int n = 40000;
  int inner_hits = 0;
  for (int rep = 0; rep < n; ++rep) {
    const auto o =
        simulate_until(*annulus, start, cfg, static_cast<std::uint64_t>(rep));
    if (o.exit.x * o.exit.x + o.exit.y * o.exit.y < 16) ++inner_hits;
  }
  const double p_mc = static_cast<double>(inner_hits) / n;
  const double se = std::sqrt(p_exact * (1 - p_exact) / n);
  CHECK(std::abs(p_mc - p_exact) < 3 * se);
}

TEST_CASE("simulate_until: step budget is enforced") {
  const auto huge = box_domain({-400, -400}, {400, 400});
  WalkConfig cfg;
  cfg.seed = 5;
  cfg.max_steps = 10;
  CHECK_THROWS_AS(simulate_until(*huge, {0, 0}, cfg), StepBudgetExceeded);
}

TEST_CASE("time-reversal MC capacity matches the exact routes") {
  const auto pair = make_pair(ContinuumShape::disk({0, 0}, 0.25),
                              ContinuumShape::disk({0, 0}, 1.0), 32);
  const auto cap = capacitor(pair);
  WalkConfig cfg;
  cfg.seed = 31337;
  const auto est = time_reversal_capacity(pair, 400000, cfg);
  CHECK(est.aborted == 0);
  CHECK(std::abs(est.capacity - cap.capacity) < 3.0 * est.stderr_);

  // Entry histogram estimates gamma* (time reversal), bucket by bucket.
  const auto gs = gamma_star(pair);
  REQUIRE(gs.support() == est.entry_sites);
  const double hits = static_cast<double>(est.hits);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const double w = gs.weight(i);
    const double se = std::sqrt(w * (1 - w) / hits);
    CHECK(std::abs(est.entry_counts[static_cast<Eigen::Index>(i)] / hits - w) <
          3.0 * se + 0.003);
  }
}

TEST_CASE("harmonic measure rows: normalization and disk uniformity") {
  for (int n : {16, 32}) {
    const auto disk = ball_domain({0, 0}, static_cast<double>(n));
    const SiteList absorb = disk->outer_boundary();
    for (Site x : {Site{0, 0}, Site{n / 8, -n / 8}}) {
      const auto row = harmonic_measure_row(disk, absorb, x);
      CHECK(std::abs(row.weights().sum() - 1.0) < 1e-10);
      const double ratio = row.weights().maxCoeff() / row.weights().minCoeff();
      CHECK(ratio < 10.0);  // c/n <= P <= C/n uniformity on the disk
    }
  }
}

TEST_CASE("harmonic extension agrees with the harmonic-measure average") {
  const auto dom = ball_domain({0, 0}, 7.0);
  const auto subdom = box_domain({-2, -2}, {2, 2});
  GaussianStream g(3, 3, 3);
  Eigen::VectorXd v(dom->size());
  g.fill(v);
  const ScalarField f(dom, v);
  const auto ext = harmonic_extension(f, *subdom);

  const SiteList absorb = subdom->outer_boundary();
  for (Site x : {Site{0, 0}, Site{1, -2}}) {
    const auto row = harmonic_measure_row(subdom, absorb, x);
    CHECK(ext.at(x) == doctest::Approx(row.integrate(f)).epsilon(1e-9));
  }
}

TEST_CASE("pushforward of a point mass through one free site") {
  const auto free_site = make_domain({{0, 0}});
  SiteList absorb = free_site->outer_boundary();
  Eigen::VectorXd w(1);
  w << 1.0;
  const BoundaryMeasure mu({{0, 0}}, w);
  const auto out = pushforward_measure(mu, free_site, absorb);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out.weight(i) == doctest::Approx(0.25));

  // tau = 0 when the mass already sits on the absorbing set.
  Eigen::VectorXd w2(1);
  w2 << 1.0;
  const BoundaryMeasure nu({absorb[0]}, w2);
  const auto still = pushforward_measure(nu, free_site, absorb);
  CHECK(still.weight(0) == doctest::Approx(1.0));
}

TEST_CASE("potential kernel: pinned values and harmonicity") {
  CHECK(potential_kernel({0, 0}) == 0.0);
  CHECK(potential_kernel({1, 0}) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(potential_kernel({0, -1}) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(potential_kernel({1, 1}) ==
        doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-11));

  // Neighbor-mean identity away from the origin, through the whole table.
  for (int x = -16; x <= 16; ++x) {
    for (int y = -16; y <= 16; ++y) {
      if (x == 0 && y == 0) continue;
      const double mean = 0.25 * (potential_kernel({x + 1, y}) +
                                  potential_kernel({x - 1, y}) +
                                  potential_kernel({x, y + 1}) +
                                  potential_kernel({x, y - 1}));
      CHECK(std::abs(mean - potential_kernel({x, y})) < 1e-9);
    }
  }
  // At the origin the defect is exactly 1.
  CHECK(0.25 * (4.0 * potential_kernel({1, 0})) == doctest::Approx(1.0));
}

TEST_CASE("potential kernel: large-box Dirichlet-solve oracle") {
  const int radius = 100;
  const auto box = box_domain({-radius, -radius}, {radius, radius});
  SiteList ring;
  std::vector<double> data;
  const double g = 2.0 / std::numbers::pi;
  for (Site s : box->sites()) {
    if (std::max(std::abs(s.x), std::abs(s.y)) == radius) {
      ring.push_back(s);
      data.push_back(g * std::log(std::hypot(static_cast<double>(s.x),
                                             static_cast<double>(s.y))));
    }
  }
  Eigen::VectorXd rhs_v = Eigen::VectorXd::Zero(box->size());
  rhs_v[box->index_of({0, 0})] = -1.0;
  const ScalarField rhs(box, rhs_v);
  const auto v = solve_dirichlet(box, ring, data, &rhs);
  const double v0 = v.at({0, 0});
  for (int x = 0; x <= 16; ++x)
    for (int y = 0; y <= x; ++y) {
      const double oracle = v.at({x, y}) - v0;
      CHECK(std::abs(oracle - potential_kernel({x, y})) < 1e-4);
    }
}

TEST_CASE("potential kernel: gamma2 consistent with the table fit") {
  const double g = 2.0 / std::numbers::pi;
  const double g2 = potential_kernel_gamma2();
  // Fit the additive constant on the diagonal at the table edge; its r^-2
  // defect at radius 32*sqrt(2) is ~3e-5.
  const double fit =
      potential_kernel({31, 31}) - g * std::log(31.0 * std::sqrt(2.0));
  CHECK(std::abs(fit - g2) < 1e-3);
  CHECK(g2 > 0.5);
  CHECK(g2 < 1.5);
  // Asymptotic branch is continuous across the table edge.
  const int r = potential_kernel_table_radius();
  const double inside = potential_kernel({r, 3});
  const double formula = g * std::log(std::hypot(static_cast<double>(r), 3.0)) + g2;
  CHECK(inside == doctest::Approx(formula).epsilon(1e-4));
}

TEST_CASE("check_escape_bound: annulus family with a stable constant") {
  const auto v_shape = ContinuumShape::disk({0, 0}, 0.25);
  const auto w_shape = ContinuumShape::disk({0, 0}, 1.0);

  // Fit C on the small instance, freeze, and require it to cover the larger
  // ones (stability within a factor of 2 is asserted via fitted ratios).
  std::vector<double> fitted;
  for (int N : {32, 64}) {
    const auto pair = make_pair(v_shape, w_shape, N);
    SiteList u_sites;
    for (Site s : pair.outer->sites())
      if (!pair.inner->contains(s)) u_sites.push_back(s);
    const auto u_region = make_domain(u_sites);
    SiteList trap, escape;
    for (Site s : u_region->outer_boundary())
      (pair.inner->contains(s) ? trap : escape).push_back(s);

    const auto gamma_scaled = v_shape.scaled(static_cast<double>(N));
    double worst = 0;
    for (Site x : {Site{static_cast<int>(0.25 * N) + 2, 0},
                   Site{0, -static_cast<int>(0.25 * N) - 4},
                   Site{static_cast<int>(0.3 * N), static_cast<int>(0.3 * N)}}) {
      const auto chk = check_escape_bound(u_region, trap, escape, x,
                                          gamma_scaled, 1.5, 10.0, 1.0);
      REQUIRE(chk.hypothesis_ok);
      worst = std::max(worst, chk.lhs / chk.dist_ratio);
    }
    fitted.push_back(worst);
  }
  CHECK(fitted[1] / fitted[0] < 2.0);
  CHECK(fitted[0] / fitted[1] < 2.0);

  // Re-run with the frozen constant: every instance passes.
  const double frozen_c = 1.05 * std::max(fitted[0], fitted[1]);
  const auto pair = make_pair(v_shape, w_shape, 48);
  SiteList u_sites;
  for (Site s : pair.outer->sites())
    if (!pair.inner->contains(s)) u_sites.push_back(s);
  const auto u_region = make_domain(u_sites);
  SiteList trap, escape;
  for (Site s : u_region->outer_boundary())
    (pair.inner->contains(s) ? trap : escape).push_back(s);
  const auto chk = check_escape_bound(u_region, trap, escape, {14, 0},
                                      v_shape.scaled(48.0), 1.5, 10.0, frozen_c);
  CHECK(chk.hypothesis_ok);
  CHECK(chk.pass);
}

TEST_CASE("check_escape_bound: trivial regime and hypothesis violations") {
  const auto pair = make_pair(ContinuumShape::disk({0, 0}, 0.25),
                              ContinuumShape::disk({0, 0}, 1.0), 32);
  SiteList u_sites;
  for (Site s : pair.outer->sites())
    if (!pair.inner->contains(s)) u_sites.push_back(s);
  const auto u_region = make_domain(u_sites);
  SiteList trap, escape;
  for (Site s : u_region->outer_boundary())
    (pair.inner->contains(s) ? trap : escape).push_back(s);

  // x near the escape set: dist(x,E) > dist(x,D)/4, probability <= 1 <= rhs.
  const auto trivial = check_escape_bound(u_region, trap, escape, {30, 0},
                                          ContinuumShape::disk({0, 0}, 0.25)
                                              .scaled(32.0),
                                          1.5, 10.0, 4.0);
  CHECK(trivial.dist_ratio > 0.25);
  CHECK(trivial.pass);

  // Gamma = W: the trap set is nowhere near boundary Gamma.
  const auto bad = check_escape_bound(u_region, trap, escape, {12, 0},
                                      ContinuumShape::disk({0, 0}, 1.0)
                                          .scaled(32.0),
                                      1.5, 10.0, 4.0);
  CHECK(!bad.hypothesis_ok);
  CHECK(!bad.violation.empty());
}
