#pragma once

#include "gff/shapes.hpp"
#include "gff/solver.hpp"
#include "gff/walk.hpp"

namespace gff {

// The boundary-averaging scheme of the shrunken pair: gamma lives on
// ∂in V_{N,r} (normalized escape probabilities), gammaPi is its exact
// pushforward onto ∂in V_N under the stopped walk.
struct AveragingScheme {
  DomainPair pair;
  double r = 0;
  DomainPtr shrunken;        // V_{N,r} = N V^{r/N} ∩ Z^2
  BoundaryMeasure gamma;     // on ∂in V_{N,r}
  BoundaryMeasure gamma_pi;  // on ∂in V_N
  double cap_shrunken = 0;   // Cap^{W_N}(V_{N,r}), escape route
};

AveragingScheme build_scheme(const DomainPair& pair, double r,
                             const SolveOptions& opts = {});

// Var(phi_bar) = (gammaPi)^t G_W (gammaPi), one exact solve.
double averaged_phi_variance(const AveragingScheme& scheme,
                             const SolveOptions& opts = {});

// Var(Delta_bar) two ways. Direct: Var(phi_bar) - sigma^2. Formula: the
// escape-probability difference
//   [P^{gamma*}(tau_{W^c} < tau_{V_{N,r}}) - P^{gammaPi}(tau_{W^c} < tau_{V_{N,r}})]
//     / (2 Cap^{W_N}(V_{N,r})).
double averaged_delta_variance_direct(const AveragingScheme& scheme,
                                      const Capacitor& cap,
                                      const SolveOptions& opts = {});
double averaged_delta_variance_formula(const AveragingScheme& scheme,
                                       const Capacitor& cap,
                                       const SolveOptions& opts = {});

// max_x gamma(Q_l(x)) * N / l over all box centers (exhaustive scan).
double gamma_box_constant(const BoundaryMeasure& gamma, int n_scale, double l);

}  // namespace gff
