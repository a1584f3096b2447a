#include "gff/sampler.hpp"

#include "gff/errors.hpp"

namespace gff {

DgffSampler::DgffSampler(DomainPtr domain, SamplerOptions opts)
    : domain_(std::move(domain)) {
  const int n = domain_->size();
  if (n > opts.max_sites)
    throw DomainTooLarge("DgffSampler: " + std::to_string(n) +
                         " sites exceeds max_sites");
  dense_ = n <= opts.dense_limit;
  if (dense_) {
    const Eigen::MatrixXd l = Eigen::MatrixXd(laplacian_matrix(*domain_));
    const Eigen::MatrixXd g = l.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (g + g.transpose()));
    if (llt.info() != Eigen::Success)
      throw NoConvergence("DgffSampler: dense Cholesky of G failed", 0);
    dense_factor_ = llt.matrixL();
  } else {
    sparse_llt_.compute(laplacian_matrix(*domain_));
    if (sparse_llt_.info() != Eigen::Success)
      throw NoConvergence("DgffSampler: sparse Cholesky of L failed", 0);
  }
}

Eigen::VectorXd DgffSampler::transform(const Eigen::VectorXd& z) const {
  if (z.size() != dim()) throw Error("DgffSampler::transform: bad size");
  if (dense_) return dense_factor_ * z;
  // P A P^t = L L^t, so x = P^t L^-t z has covariance A^{-1} = G.
  const Eigen::VectorXd y = sparse_llt_.matrixU().solve(z);
  return sparse_llt_.permutationPinv() * y;
}

ScalarField DgffSampler::sample_field(GaussianStream& gs) const {
  Eigen::VectorXd z(dim());
  gs.fill(z);
  return {domain_, transform(z)};
}

FieldSample DgffSampler::sample(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t replica) const {
  GaussianStream gs(seed, stream, replica);
  FieldSample s;
  s.field = sample_field(gs);
  s.provenance = {seed, stream, replica};
  return s;
}

GibbsMarkovSplit split_gibbs_markov(const FieldSample& sample,
                                    const SiteList& sub,
                                    const SolveOptions& opts) {
  GibbsMarkovSplit out;
  out.whole = sample.field;
  if (sub.empty()) {
    out.binding = sample.field;
    out.inner = ScalarField::zero(sample.field.domain_ptr());
    return out;
  }
  out.binding = harmonic_extension(sample.field, sub, opts);
  out.inner = ScalarField(sample.field.domain_ptr(),
                          sample.field.values() - out.binding.values());
  return out;
}

GibbsMarkovSplit split_gibbs_markov(const FieldSample& sample,
                                    const LatticeDomain& sub,
                                    const SolveOptions& opts) {
  return split_gibbs_markov(sample, sub.sites(), opts);
}

CapacitorProjection project_capacitor(const FieldSample& sample,
                                      const Capacitor& cap) {
  CapacitorProjection out;
  const double pairing = cap.dirichlet_pairing(sample.field);
  out.z = cap.sigma() * pairing;
  out.residual = ScalarField(
      sample.field.domain_ptr(),
      sample.field.values() - (cap.sigma() * out.z) * cap.psi.values());
  return out;
}

FieldSample sample_conditional_zero(const DgffSampler& sampler,
                                    const Capacitor& cap, std::uint64_t seed,
                                    std::uint64_t stream,
                                    std::uint64_t replica) {
  FieldSample s = sampler.sample(seed, stream, replica);
  s.field = project_capacitor(s, cap).residual;
  return s;
}

FieldSample sample_tilted(const DgffSampler& sampler, const Capacitor& cap,
                          double shift, std::uint64_t seed,
                          std::uint64_t stream, std::uint64_t replica) {
  FieldSample s = sampler.sample(seed, stream, replica);
  const double pairing = cap.dirichlet_pairing(s.field);
  const double energy = 2.0 * cap.capacity;  // <psi, L psi>
  s.field = ScalarField(s.field.domain_ptr(),
                        s.field.values() + shift * cap.psi.values());
  s.tilted = true;
  s.tilt_shift = shift;
  s.log_weight = -shift * pairing - 0.5 * shift * shift * energy;
  return s;
}

}  // namespace gff
