#include "gff/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>

#include "gff/errors.hpp"

namespace gff {

SparseMat laplacian_matrix(const LatticeDomain& dom) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dom.size()) * 5);
  for (int i = 0; i < dom.size(); ++i) {
    trip.emplace_back(i, i, 1.0);
    const Site s = dom.site(i);
    for (int k = 0; k < 4; ++k) {
      const int j = dom.index_of(neighbor(s, k));
      if (j >= 0) trip.emplace_back(i, j, -0.25);
    }
  }
  SparseMat m(dom.size(), dom.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

ScalarField SparseLaplacian::apply(const ScalarField& h) const {
  if (h.domain_ptr().get() != dom_.get())
    throw Error("SparseLaplacian::apply: field on a different domain");
  return {dom_, mat_ * h.values()};
}

double SparseLaplacian::quadratic_form(const ScalarField& h) const {
  return h.values().dot(mat_ * h.values());
}

DirichletSolver::DirichletSolver(DomainPtr region, const SiteList& fixed_sites,
                                 SolveOptions opts)
    : region_(std::move(region)), fixed_sites_(fixed_sites) {
  const int n = region_->size();
  std::vector<int> fixed_pos(static_cast<std::size_t>(n), -1);
  for (std::size_t f = 0; f < fixed_sites_.size(); ++f) {
    const int i = region_->index_of(fixed_sites_[f]);
    if (i < 0) throw Error("DirichletSolver: fixed site outside region");
    if (fixed_pos[static_cast<std::size_t>(i)] >= 0)
      throw Error("DirichletSolver: duplicate fixed site");
    fixed_pos[static_cast<std::size_t>(i)] = static_cast<int>(f);
  }
  free_pos_.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (fixed_pos[static_cast<std::size_t>(i)] < 0) {
      free_pos_[static_cast<std::size_t>(i)] =
          static_cast<int>(free_idx_.size());
      free_idx_.push_back(i);
    }
  }

  const int m = free_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 5);
  for (int p = 0; p < m; ++p) {
    trip.emplace_back(p, p, 1.0);
    const Site s = region_->site(free_idx_[static_cast<std::size_t>(p)]);
    for (int k = 0; k < 4; ++k) {
      const int j = region_->index_of(neighbor(s, k));
      if (j < 0) continue;
      const int q = free_pos_[static_cast<std::size_t>(j)];
      if (q >= 0) trip.emplace_back(p, q, -0.25);
    }
  }
  a_.resize(m, m);
  a_.setFromTriplets(trip.begin(), trip.end());

  use_cholesky_ = opts.method == SolveOptions::Method::kCholesky ||
                  (opts.method == SolveOptions::Method::kAuto &&
                   m <= opts.cholesky_limit);
  opts_ = opts;
  if (m > 0 && use_cholesky_) {
    ldlt_.compute(a_);
    if (ldlt_.info() != Eigen::Success)
      throw NoConvergence("DirichletSolver: Cholesky factorization failed", 0);
  }
}

Eigen::VectorXd DirichletSolver::solve_free(const Eigen::VectorXd& b) const {
  if (free_count() == 0) return Eigen::VectorXd();
  if (use_cholesky_) return ldlt_.solve(b);
  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(opts_.cg_tol);
  cg.setMaxIterations(static_cast<Eigen::Index>(opts_.cg_max_iter_factor) *
                      free_count());
  cg.compute(a_);
  Eigen::VectorXd u = cg.solve(b);
  if (cg.info() != Eigen::Success)
    throw NoConvergence("DirichletSolver: CG did not converge", cg.error());
  return u;
}

ScalarField DirichletSolver::solve(std::span<const double> fixed_values,
                                   const ScalarField* rhs) const {
  if (fixed_values.size() != fixed_sites_.size())
    throw Error("DirichletSolver::solve: fixed value count mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(region_->size());
  for (std::size_t f = 0; f < fixed_sites_.size(); ++f)
    out[region_->index_of(fixed_sites_[f])] = fixed_values[f];

  if (free_count() > 0) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(free_count());
    for (int p = 0; p < free_count(); ++p) {
      const int i = free_idx_[static_cast<std::size_t>(p)];
      const Site s = region_->site(i);
      double acc = rhs ? rhs->at(s) : 0.0;
      for (int k = 0; k < 4; ++k) {
        const int j = region_->index_of(neighbor(s, k));
        if (j >= 0 && free_pos_[static_cast<std::size_t>(j)] < 0)
          acc += 0.25 * out[j];
      }
      b[p] = acc;
    }
    const Eigen::VectorXd u = solve_free(b);
    for (int p = 0; p < free_count(); ++p)
      out[free_idx_[static_cast<std::size_t>(p)]] = u[p];
  }
  return {region_, std::move(out)};
}

ScalarField solve_dirichlet(DomainPtr region, const SiteList& fixed_sites,
                            std::span<const double> fixed_values,
                            const ScalarField* rhs, const SolveOptions& opts) {
  DirichletSolver solver(std::move(region), fixed_sites, opts);
  return solver.solve(fixed_values, rhs);
}

double Capacitor::dirichlet_pairing(const Eigen::VectorXd& values) const {
  double acc = 0;
  for (std::size_t k = 0; k < boundary_sites.size(); ++k)
    acc += boundary_weights[static_cast<Eigen::Index>(k)] *
           values[boundary_outer_index[k]];
  return acc;
}

double Capacitor::dirichlet_pairing(const ScalarField& h) const {
  if (h.domain_ptr().get() != pair.outer.get())
    throw Error("Capacitor::dirichlet_pairing: field not on W_N");
  return dirichlet_pairing(h.values());
}

Capacitor capacitor(const DomainPair& pair, const SolveOptions& opts) {
  Capacitor cap;
  cap.pair = pair;

  std::vector<double> ones(pair.inner->sites().size(), 1.0);
  cap.psi = solve_dirichlet(pair.outer, pair.inner->sites(), ones, nullptr,
                            opts);

  const SparseLaplacian lap(pair.outer);
  const double energy = lap.quadratic_form(cap.psi);
  cap.capacity = 0.5 * energy;
  cap.sigma2 = 1.0 / energy;

  // Escape probabilities L psi on ∂in V_N (the only sites of W_N where L psi
  // is genuinely nonzero).
  cap.boundary_sites = pair.inner->inner_boundary();
  cap.boundary_weights.resize(static_cast<Eigen::Index>(cap.boundary_sites.size()));
  cap.boundary_outer_index.reserve(cap.boundary_sites.size());
  for (std::size_t k = 0; k < cap.boundary_sites.size(); ++k) {
    const Site z = cap.boundary_sites[k];
    double esc = 0;
    for (int j = 0; j < 4; ++j) {
      const Site y = neighbor(z, j);
      if (pair.inner->contains(y)) continue;
      esc += 0.25 * (1.0 - cap.psi.at(y));
    }
    cap.boundary_weights[static_cast<Eigen::Index>(k)] = esc;
    cap.boundary_outer_index.push_back(pair.outer->index_of(z));
  }
  return cap;
}

double capacity_by_escape(const DomainPair& pair, const SolveOptions& opts) {
  // Independent solve of the complementary problem: 1 - psi solves the
  // Dirichlet problem with data 0 on V_N, 1 off W_N; psi below is recomputed
  // rather than taken from capacitor() so that the two capacity routes do not
  // share a linear solve.
  std::vector<double> ones(pair.inner->sites().size(), 1.0);
  const ScalarField psi =
      solve_dirichlet(pair.outer, pair.inner->sites(), ones, nullptr, opts);
  double total = 0;
  for (Site z : pair.inner->inner_boundary()) {
    for (int j = 0; j < 4; ++j) {
      const Site y = neighbor(z, j);
      if (pair.inner->contains(y)) continue;
      total += 0.25 * (1.0 - psi.at(y));
    }
  }
  return 0.5 * total;
}

GreenMatrix green_matrix(const DomainPtr& dom, const SolveOptions& opts,
                         int max_sites) {
  const int n = dom->size();
  if (n > max_sites)
    throw DomainTooLarge("green_matrix: " + std::to_string(n) +
                         " sites exceeds the dense guard of " +
                         std::to_string(max_sites));
  GreenMatrix g;
  g.domain = dom;
  if (n <= 1200) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(laplacian_matrix(*dom));
    g.values = dense.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    DirichletSolver solver(dom, {}, opts);
    g.values.resize(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      g.values.col(j) = solver.solve_free(e);
      e[j] = 0.0;
    }
  }
  // Symmetrize away factorization round-off; G is symmetric by definition.
  g.values = 0.5 * (g.values + g.values.transpose()).eval();
  return g;
}

ScalarField green_column(const DomainPtr& dom, Site x,
                         const SolveOptions& opts) {
  const int i = dom->index_of(x);
  if (i < 0) throw Error("green_column: site outside domain");
  DirichletSolver solver(dom, {}, opts);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dom->size());
  e[i] = 1.0;
  return {dom, solver.solve_free(e)};
}

ScalarField harmonic_extension(const ScalarField& field, const SiteList& sub,
                               const SolveOptions& opts) {
  const DomainPtr& dom = field.domain_ptr();
  std::vector<char> in_sub(static_cast<std::size_t>(dom->size()), 0);
  for (Site s : sub) {
    const int i = dom->index_of(s);
    if (i < 0) throw Error("harmonic_extension: sub not contained in domain");
    in_sub[static_cast<std::size_t>(i)] = 1;
  }
  SiteList fixed;
  std::vector<double> values;
  for (int i = 0; i < dom->size(); ++i) {
    if (!in_sub[static_cast<std::size_t>(i)]) {
      fixed.push_back(dom->site(i));
      values.push_back(field.values()[i]);
    }
  }
  return solve_dirichlet(dom, fixed, values, nullptr, opts);
}

ScalarField harmonic_extension(const ScalarField& field,
                               const LatticeDomain& sub,
                               const SolveOptions& opts) {
  return harmonic_extension(field, sub.sites(), opts);
}

}  // namespace gff
