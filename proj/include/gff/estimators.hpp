#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gff/sampler.hpp"
#include "gff/shapes.hpp"
#include "gff/solver.hpp"

namespace gff {

// A Monte Carlo estimate with full provenance. wall_seconds is diagnostic
// only and is excluded from the canonical serialization (reports must be
// byte-identical across reruns of the same config and seed).
struct EstimateReport {
  std::string quantity;
  double estimate = 0;
  double stderr_value = 0;
  long long replicas = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double tilt = 0;
  std::string route = "plain-mc";  // "exact" | "plain-mc" | "importance"
  bool bound_only = false;         // ESS guard / underflow: value is a bound
  std::string bound_kind;          // "upper" when bound_only
  double ess = 0;
  long long aborted = 0;
  std::vector<std::pair<std::string, double>> extra;
  double wall_seconds = 0;
};

// m_N = 2 sqrt(g) (log N - (3/8) log log N), g = 2/pi (natural logs).
double centering_formula(double n);

// Per-replica statistics of the *plain* field law on a pair: the minimum
// over V_N and the projection coefficient Z. Every tail estimator (tilted or
// not, conditional or not) is a deterministic functional of this table, since
// tilting by s maps (min, Z) to (min + s, Z + s/sigma) with an explicit
// weight and conditioning on Z_h = 0 maps min to min - sigma Z.
struct TailTable {
  Eigen::VectorXd min_inner;
  Eigen::VectorXd z;
  double capacity = 0;
  double sigma2 = 0;
  double sigma = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long long replicas = 0;
};

TailTable build_tail_table(const DomainPair& pair, const Capacitor& cap,
                           const DgffSampler& sampler, long long replicas,
                           std::uint64_t seed, std::uint64_t stream,
                           int threads = 0);

// Importance-sampled P(min_{V_N} h >= -m_n + u) with tilt h -> h + s psi.
// The effective-sample-size guard applies to the event-contributing weighted
// sample; below `ess_guard` * replicas the report degrades to an upper bound.
EstimateReport hard_wall_from_table(const TailTable& table, double m_n,
                                    double u, double tilt_s,
                                    double ess_guard = 0.01);

// Plain-MC P(min >= -m_n + u | Z_h = 0); zero survivors degrade to the
// rule-of-three upper bound.
EstimateReport conditional_tail_from_table(const TailTable& table, double m_n,
                                           double u);

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  int points = 0;
  std::vector<double> u_used;
  bool ci_excludes_zero = false;  // 95% CI on the slope
};

// Regression of log(-log P_cond(u)) on u over the feasible part of the grid.
SlopeFit conditional_tail_signature(const TailTable& table, double m_n,
                                    const std::vector<double>& u_grid,
                                    long long min_survivors = 50);

// Reconstructs P(Omega(u)) through the Gaussian convolution of the estimated
// conditional tail (grid of width sigma/50 over +-8 sigma by default).
EstimateReport convolution_reconstruction(const TailTable& table, double m_n,
                                          double u, double step_fraction = 0.02,
                                          double range_sigmas = 8.0);

// Weighted conditional summary of the capacitor coefficient under the
// right-tail event: estimate is the conditional mean of sigma Z (the lift),
// extras carry quantiles of Z. u = -inf gives the unconditional law.
EstimateReport repulsion_profile(const TailTable& table, double m_n, double u,
                                 double tilt_s, double ess_guard = 0.01);

// E[max over W_N] per scale, against the centering formula.
std::vector<EstimateReport> estimate_extreme_centering(
    const ContinuumShape& w_shape, const std::vector<int>& n_grid,
    long long replicas, std::uint64_t seed, int threads = 0);

// Pool-adjacent-violators projection onto non-increasing sequences.
Eigen::VectorXd isotonic_non_increasing(const Eigen::VectorXd& y);

// Deterministic replica-parallel loop: fn(replica) writes into slots indexed
// by replica, so the result is independent of the thread schedule.
void parallel_replicas(long long n, int threads,
                       const std::function<void(long long)>& fn);

}  // namespace gff
