#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cstdint>

#include "gff/field.hpp"
#include "gff/rng.hpp"
#include "gff/shapes.hpp"
#include "gff/solver.hpp"

namespace gff {

struct SamplerOptions {
  // Dense G-Cholesky for small domains, sparse Cholesky of L beyond.
  int dense_limit = 512;
  long max_sites = 8'000'000;
};

struct SampleProvenance {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t replica = 0;
};

struct FieldSample {
  ScalarField field;
  SampleProvenance provenance;
  bool tilted = false;
  double tilt_shift = 0;   // s in h + s psi
  double log_weight = 0;   // log dP/dP_s at the sample; 0 when untilted
};

// Exact sampler for the zero-boundary DGFF on a fixed domain: h = T z with
// z iid standard normal and T T^t = G. The factorization is computed once;
// sampling is const and thread-safe.
class DgffSampler {
 public:
  explicit DgffSampler(DomainPtr domain, SamplerOptions opts = {});

  int dim() const { return domain_->size(); }
  const DomainPtr& domain_ptr() const { return domain_; }

  // Applies T to an explicit normal vector (deterministic linear map).
  Eigen::VectorXd transform(const Eigen::VectorXd& z) const;

  ScalarField sample_field(GaussianStream& gs) const;
  FieldSample sample(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t replica) const;

  bool dense_path() const { return dense_; }

 private:
  DomainPtr domain_;
  bool dense_ = false;
  Eigen::MatrixXd dense_factor_;  // chol(G), lower
  Eigen::SimplicialLLT<SparseMat> sparse_llt_;  // of L
};

struct GibbsMarkovSplit {
  ScalarField binding;  // harmonic extension of the sample off `sub`
  ScalarField inner;    // whole - binding; zero-boundary DGFF on `sub`
  ScalarField whole;
};

GibbsMarkovSplit split_gibbs_markov(const FieldSample& sample,
                                    const SiteList& sub,
                                    const SolveOptions& opts = {});
GibbsMarkovSplit split_gibbs_markov(const FieldSample& sample,
                                    const LatticeDomain& sub,
                                    const SolveOptions& opts = {});

struct CapacitorProjection {
  double z = 0;          // Z_h = sigma <h, L psi> ~ N(0,1)
  ScalarField residual;  // h - sigma Z psi, independent of Z
};

CapacitorProjection project_capacitor(const FieldSample& sample,
                                      const Capacitor& cap);

// Exact draw from h | Z_h = 0 (projection of a fresh unconditional sample).
FieldSample sample_conditional_zero(const DgffSampler& sampler,
                                    const Capacitor& cap, std::uint64_t seed,
                                    std::uint64_t stream,
                                    std::uint64_t replica);

// Draw from the shifted law h + s psi, with the exact log likelihood ratio
// log dP/dP_s = -s <h, L psi> - s^2 <psi, L psi> / 2 recorded so weighted
// expectations are unbiased for the original law.
FieldSample sample_tilted(const DgffSampler& sampler, const Capacitor& cap,
                          double shift, std::uint64_t seed,
                          std::uint64_t stream, std::uint64_t replica);

}  // namespace gff
