#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gff/estimators.hpp"

using namespace gff;

namespace {

struct Fixture {
  DomainPair pair;
  Capacitor cap;
  DgffSampler sampler;
  explicit Fixture(int n, double rv = 0.3)
      : pair(make_pair(ContinuumShape::disk({0, 0}, rv),
                       ContinuumShape::disk({0, 0}, 1.0), n)),
        cap(capacitor(pair)),
        sampler(pair.outer) {}
};

}  // namespace

TEST_CASE("centering formula: frozen value at N = 512") {
  // 2 sqrt(2/pi) (ln 512 - 0.375 ln ln 512) = 8.859...
  CHECK(centering_formula(512) == doctest::Approx(8.86).epsilon(0.002));
  CHECK(centering_formula(64) < centering_formula(512));
}

TEST_CASE("tail table: deterministic and thread-count independent") {
  Fixture f(16);
  const auto t1 = build_tail_table(f.pair, f.cap, f.sampler, 2000, 7, 3, 1);
  const auto t2 = build_tail_table(f.pair, f.cap, f.sampler, 2000, 7, 3, 2);
  CHECK((t1.min_inner - t2.min_inner).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((t1.z - t2.z).lpNorm<Eigen::Infinity>() == 0.0);
  const auto t3 = build_tail_table(f.pair, f.cap, f.sampler, 2000, 8, 3, 2);
  CHECK((t1.z - t3.z).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("tail table: Z column is standard normal") {
  Fixture f(16);
  const long long n = 50000;
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, n, 11, 0);
  CHECK(std::abs(t.z.mean()) < 3.0 / std::sqrt(static_cast<double>(n)));
  const double var = (t.z.array() - t.z.mean()).square().sum() / n;
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("hard wall: deep-tail-free regime gives probability ~ 1") {
  Fixture f(16);
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, 20000, 13, 0);
  const double m_n = centering_formula(16);
  const auto rep = hard_wall_from_table(t, m_n, -20.0, 0.0);
  CHECK(rep.estimate > 0.999);
  CHECK(!rep.bound_only);
}

TEST_CASE("hard wall: tilted agrees with plain MC (independent streams)") {
  Fixture f(16);
  const double m_n = centering_formula(16);
  const double u = 1.5;
  const auto t_plain = build_tail_table(f.pair, f.cap, f.sampler, 60000, 17, 1);
  const auto t_tilt = build_tail_table(f.pair, f.cap, f.sampler, 60000, 17, 2);
  const auto plain = hard_wall_from_table(t_plain, m_n, u, 0.0);
  const auto tilted = hard_wall_from_table(t_tilt, m_n, u, u);
  REQUIRE(!plain.bound_only);
  REQUIRE(!tilted.bound_only);
  const double combined = std::hypot(plain.stderr_value, tilted.stderr_value);
  CHECK(std::abs(plain.estimate - tilted.estimate) < 3.0 * combined);
  CHECK(tilted.route == "importance");
  CHECK(tilted.ess > 0.01 * 60000);
}

TEST_CASE("hard wall: zero-event runs degrade to an upper bound") {
  Fixture f(16);
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, 2000, 19, 0);
  const double m_n = centering_formula(16);
  const auto rep = hard_wall_from_table(t, m_n, 50.0, 0.0);
  CHECK(rep.bound_only);
  CHECK(rep.bound_kind == "upper");
  CHECK(rep.estimate > 0);
}

TEST_CASE("conditional tail: trivial regime and underflow bound") {
  Fixture f(16);
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, 20000, 23, 0);
  const double m_n = centering_formula(16);
  CHECK(conditional_tail_from_table(t, m_n, -20.0).estimate > 0.999);
  const auto under = conditional_tail_from_table(t, m_n, 50.0);
  CHECK(under.bound_only);
  CHECK(under.estimate == doctest::Approx(3.0 / 20000));
}

TEST_CASE("conditional tail: monotone after isotonic adjustment") {
  Fixture f(16);
  const double m_n = centering_formula(16);
  // Independent tables per u: raw violations are pure MC noise.
  std::vector<double> us = {0.0, 0.5, 1.0, 1.5, 2.0};
  Eigen::VectorXd raw(static_cast<Eigen::Index>(us.size()));
  Eigen::VectorXd ses(static_cast<Eigen::Index>(us.size()));
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto t = build_tail_table(f.pair, f.cap, f.sampler, 30000, 29,
                                    100 + static_cast<std::uint64_t>(i));
    const auto rep = conditional_tail_from_table(t, m_n, us[i]);
    raw[static_cast<Eigen::Index>(i)] = rep.estimate;
    ses[static_cast<Eigen::Index>(i)] = rep.stderr_value;
  }
  const Eigen::VectorXd fitted = isotonic_non_increasing(raw);
  for (Eigen::Index i = 0; i + 1 < fitted.size(); ++i)
    CHECK(fitted[i] >= fitted[i + 1] - 1e-14);
  for (Eigen::Index i = 0; i < fitted.size(); ++i)
    CHECK(std::abs(fitted[i] - raw[i]) <
          3.0 * ses[i] + 1e-12);  // adjustment stays inside the noise band
}

TEST_CASE("isotonic projection: hand-checked values") {
  Eigen::VectorXd y(4);
  y << 3.0, 1.0, 2.0, 0.5;
  const Eigen::VectorXd f = isotonic_non_increasing(y);
  CHECK(f[0] == doctest::Approx(3.0));
  CHECK(f[1] == doctest::Approx(1.5));
  CHECK(f[2] == doctest::Approx(1.5));
  CHECK(f[3] == doctest::Approx(0.5));
}

TEST_CASE("conditional tail signature: positive slope with CI excluding 0") {
  Fixture f(24);
  const double m_n = centering_formula(24);
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, 100000, 31, 0);
  const auto fit = conditional_tail_signature(t, m_n, {0.0, 0.4, 0.8, 1.2, 1.6, 2.0});
  REQUIRE(fit.points >= 3);
  CHECK(fit.slope > 0);
  CHECK(fit.ci_excludes_zero);
}

TEST_CASE("convolution reconstruction matches the direct estimate") {
  Fixture f(20);
  const double m_n = centering_formula(20);
  const double u = 1.0;
  const auto t_direct = build_tail_table(f.pair, f.cap, f.sampler, 60000, 37, 1);
  const auto t_cond = build_tail_table(f.pair, f.cap, f.sampler, 60000, 37, 2);
  const auto direct = hard_wall_from_table(t_direct, m_n, u, 0.0);
  const auto recon = convolution_reconstruction(t_cond, m_n, u);
  const double combined = std::hypot(direct.stderr_value, recon.stderr_value);
  CHECK(std::abs(direct.estimate - recon.estimate) < 3.0 * combined);
}

TEST_CASE("repulsion profile: unconditional law is N(0,1)") {
  Fixture f(16);
  const auto t = build_tail_table(f.pair, f.cap, f.sampler, 60000, 41, 0);
  const auto rep = repulsion_profile(
      t, centering_formula(16), -std::numeric_limits<double>::infinity(), 0.0);
  REQUIRE(!rep.bound_only);
  CHECK(std::abs(rep.estimate) < 3.0 * t.sigma / std::sqrt(60000.0));
  double q25 = 0, q50 = 0, q75 = 0;
  for (const auto& [k, v] : rep.extra) {
    if (k == "z_q25") q25 = v;
    if (k == "z_q50") q50 = v;
    if (k == "z_q75") q75 = v;
  }
  CHECK(q25 == doctest::Approx(-0.6745).epsilon(0.05));
  CHECK(std::abs(q50) < 0.02);
  CHECK(q75 == doctest::Approx(0.6745).epsilon(0.05));
}

TEST_CASE("repulsion profile: weighted and plain conditional means agree") {
  Fixture f(12);
  const double m_n = centering_formula(12);
  const double u = 1.0;
  const auto t_plain = build_tail_table(f.pair, f.cap, f.sampler, 50000, 43, 1);
  const auto t_tilt = build_tail_table(f.pair, f.cap, f.sampler, 50000, 43, 2);
  const auto plain = repulsion_profile(t_plain, m_n, u, 0.0);
  const auto tilted = repulsion_profile(t_tilt, m_n, u, u);
  REQUIRE(!plain.bound_only);
  REQUIRE(!tilted.bound_only);
  const double combined = std::hypot(plain.stderr_value, tilted.stderr_value);
  CHECK(std::abs(plain.estimate - tilted.estimate) < 3.0 * combined + 1e-3);
}

TEST_CASE("repulsion profile: conditional lift stays below u") {
  Fixture f(32);
  const double m_n = centering_formula(32);
  // Tilting to the expected repulsion level (u minus a log correction) keeps
  // the event-sample ESS healthy; tilting all the way to u does not.
  for (double u : {4.0, 5.0}) {
    const double s = u - std::log(1.0 + u);
    const double guard = u <= 4.0 ? 0.01 : 0.005;
    const auto t = build_tail_table(f.pair, f.cap, f.sampler, 100000, 47,
                                    static_cast<std::uint64_t>(u));
    const auto rep = repulsion_profile(t, m_n, u, s, guard);
    REQUIRE(!rep.bound_only);
    CHECK(rep.estimate < u - 3.0 * rep.stderr_value);
  }
}

TEST_CASE("extreme centering: formula tracks the empirical mean") {
  const auto shape = ContinuumShape::rectangle({0, 0}, {1, 1});
  const auto reports =
      estimate_extreme_centering(shape, {32, 64}, 3000, 53, 0);
  REQUIRE(reports.size() == 2);
  for (const auto& rep : reports) {
    double diff = 1e300;
    for (const auto& [k, v] : rep.extra)
      if (k == "difference") diff = v;
    CHECK(std::abs(diff) < 2.0);
    CHECK(rep.stderr_value < 0.05);
  }
}
