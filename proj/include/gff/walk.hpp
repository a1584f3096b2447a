#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "gff/field.hpp"
#include "gff/lattice.hpp"
#include "gff/rng.hpp"
#include "gff/shapes.hpp"
#include "gff/solver.hpp"

namespace gff {

struct WalkConfig {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::uint64_t max_steps = 100'000'000;  // per-trajectory guard
};

// A probability measure on an ordered site list (boundary measures gamma,
// gamma*, harmonic measures). Weights are nonnegative and sum to one.
class BoundaryMeasure {
 public:
  BoundaryMeasure() = default;
  BoundaryMeasure(SiteList support, Eigen::VectorXd weights);

  const SiteList& support() const { return support_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(std::size_t i) const {
    return weights_[static_cast<Eigen::Index>(i)];
  }
  std::size_t size() const { return support_.size(); }

  Site sample(double u) const;  // inverse CDF, u in (0,1)

  // sum_i w_i f(support_i) for a field with zero extension.
  double integrate(const ScalarField& f) const;

 private:
  SiteList support_;
  Eigen::VectorXd weights_;
  std::vector<double> cdf_;
};

// Exact hitting probability of `target` before `avoid` (and before leaving
// `domain`; the exterior of domain ∪ target ∪ avoid absorbs with value 0),
// as a field: 1 on target, 0 on avoid, harmonic elsewhere.
ScalarField hit_field(const DomainPtr& domain, const SiteList& target,
                      const SiteList& avoid, const SolveOptions& opts = {});

double hit_probability_exact(const DomainPtr& domain, const SiteList& target,
                             const SiteList& avoid, Site start,
                             const SolveOptions& opts = {});

// P^z(tau_{W_N^c} < tau^+_{V_N}) for every z in ∂in V_N (lexicographic), via
// the complementary Dirichlet solve.
Eigen::VectorXd escape_probabilities(const DomainPair& pair,
                                     const SolveOptions& opts = {});
double escape_probability(const DomainPair& pair, Site z,
                          const SolveOptions& opts = {});

// gamma*: normalized escape probabilities on ∂in V_N.
BoundaryMeasure gamma_star(const DomainPair& pair,
                           const SolveOptions& opts = {});

struct WalkOutcome {
  Site exit{0, 0};
  std::uint64_t steps = 0;
};

// One simple-random-walk trajectory from `start`, stopped on the first visit
// to the complement of `free_region` (with `require_step`, on the first visit
// at time >= 1, i.e. the tau^+ convention). Reproducible per (seed, stream,
// replica). Throws StepBudgetExceeded past the step guard.
WalkOutcome simulate_until(const LatticeDomain& free_region, Site start,
                           const WalkConfig& cfg, std::uint64_t replica = 0,
                           bool require_step = false);

// Monte Carlo time-reversal estimate of the capacity:
//   2 Cap^{W_N}(V_N) = |∂out W_N| P^{Unif(∂out W_N)}(tau_{V_N} < tau^+_{W_N^c}),
// with the conditional entry distribution over ∂in V_N collected as a
// by-product (it estimates gamma*).
struct TimeReversalEstimate {
  double capacity = 0;
  double stderr_ = 0;
  std::int64_t replicas = 0;
  std::int64_t hits = 0;
  std::int64_t aborted = 0;  // step-budget failures, reported not dropped
  SiteList entry_sites;      // ∂in V_N
  Eigen::VectorXd entry_counts;
};
TimeReversalEstimate time_reversal_capacity(const DomainPair& pair,
                                            std::int64_t replicas,
                                            const WalkConfig& cfg);

// Exit distribution of the walk from `x` through `absorb`: weights of
// P^x(S_{tau} = y) for y in absorb, where the walk moves on free_region and
// tau is the hitting time of absorb. Mass may be lost if the walk can leave
// free_region other than through absorb.
BoundaryMeasure harmonic_measure_row(const DomainPtr& free_region,
                                     const SiteList& absorb, Site x,
                                     const SolveOptions& opts = {});

// Pushforward of mu under the stopped walk (law of S_{tau_absorb} started
// from mu); exact, via one adjoint solve on free_region.
BoundaryMeasure pushforward_measure(const BoundaryMeasure& mu,
                                    const DomainPtr& free_region,
                                    const SiteList& absorb,
                                    const SolveOptions& opts = {});

// Potential kernel a(.) of the planar walk: a(0) = 0, a((1,0)) = 1, discrete
// harmonic away from the origin, a(u) = (2/pi) log|u| + gamma2 + O(|u|^-2).
// Exact (quadrature) table for small arguments, asymptotic beyond.
double potential_kernel(Site u);
double potential_kernel_gamma2();
int potential_kernel_table_radius();

// Lemma-style escape bound check: lhs = P^x(tau_D < tau_E) by exact solve,
// rhs = C dist(x,E)/dist(x,D). The geometric hypotheses relating (E, U) to
// the continuum region gamma_region (already in lattice units) are verified
// and reported, not asserted.
struct EscapeBoundCheck {
  double lhs = 0;
  double rhs = 0;
  double dist_ratio = 0;  // dist(x,E)/dist(x,D)
  bool hypothesis_ok = false;
  bool pass = false;
  std::string violation;  // empty when hypothesis_ok
};
EscapeBoundCheck check_escape_bound(const DomainPtr& u_region,
                                    const SiteList& trap_e,
                                    const SiteList& escape_d, Site x,
                                    const ContinuumShape& gamma_region,
                                    double m_param, double r_param,
                                    double fitted_c,
                                    const SolveOptions& opts = {});

}  // namespace gff
