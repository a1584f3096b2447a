#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <span>

#include "gff/field.hpp"
#include "gff/lattice.hpp"
#include "gff/shapes.hpp"

namespace gff {

using SparseMat = Eigen::SparseMatrix<double>;

// L restricted to a domain: diagonal 1, off-diagonal -1/4 per in-domain
// neighbor pair. With the implicit zero extension this is exactly
// Lh(x) = (1/4) sum_{y~x} (h(x) - h(y)) evaluated inside the domain.
SparseMat laplacian_matrix(const LatticeDomain& dom);

class SparseLaplacian {
 public:
  explicit SparseLaplacian(DomainPtr dom)
      : dom_(std::move(dom)), mat_(laplacian_matrix(*dom_)) {}

  const SparseMat& matrix() const { return mat_; }
  const DomainPtr& domain_ptr() const { return dom_; }

  // Lh restricted to the domain (exterior values of Lh are not represented;
  // they never enter <h, Lh> because h vanishes there).
  ScalarField apply(const ScalarField& h) const;

  double quadratic_form(const ScalarField& h) const;  // <h, Lh>

 private:
  DomainPtr dom_;
  SparseMat mat_;
};

struct SolveOptions {
  enum class Method { kAuto, kCholesky, kConjugateGradient };
  Method method = Method::kAuto;
  // CG parameters (the iterative path): Jacobi preconditioner, relative
  // tolerance, iteration cap 10 * |domain|.
  double cg_tol = 1e-10;
  int cg_max_iter_factor = 10;
  // kAuto uses Cholesky up to this many free sites, CG beyond.
  int cholesky_limit = 1'500'000;
};

// A Dirichlet problem with a fixed sparsity structure: free sites of `region`
// are solved for, `fixed` sites carry prescribed values, everything outside
// the region is exactly zero. The factorization is computed once; solve() is
// const and safe to call concurrently.
class DirichletSolver {
 public:
  DirichletSolver(DomainPtr region, const SiteList& fixed_sites,
                  SolveOptions opts = {});

  // fixed_values must align with the fixed_sites passed at construction.
  ScalarField solve(std::span<const double> fixed_values,
                    const ScalarField* rhs = nullptr) const;

  // Raw free-block solve: A_free u = b, with A the reduced Laplacian.
  Eigen::VectorXd solve_free(const Eigen::VectorXd& b) const;

  int free_count() const { return static_cast<int>(free_idx_.size()); }
  const std::vector<int>& free_indices() const { return free_idx_; }
  // Position of region-site i in the free block, or -1.
  int free_position(int region_index) const { return free_pos_[region_index]; }
  const DomainPtr& region() const { return region_; }

 private:
  DomainPtr region_;
  SiteList fixed_sites_;
  std::vector<int> free_idx_;
  std::vector<int> free_pos_;
  SparseMat a_;
  SolveOptions opts_;
  bool use_cholesky_ = true;
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

// One-shot Dirichlet solve: h = fixed_values on fixed_sites, Lh = rhs on the
// free sites of `region`, h = 0 outside.
ScalarField solve_dirichlet(DomainPtr region, const SiteList& fixed_sites,
                            std::span<const double> fixed_values,
                            const ScalarField* rhs = nullptr,
                            const SolveOptions& opts = {});

// The capacitor psi of a nested pair: 1 on V_N, 0 off W_N, harmonic between.
struct Capacitor {
  DomainPair pair;
  ScalarField psi;            // on W_N
  double capacity = 0;        // (1/2) <psi, L psi>
  double sigma2 = 0;          // 1 / (2 capacity)
  SiteList boundary_sites;    // ∂in V_N, lexicographic
  Eigen::VectorXd boundary_weights;  // escape probabilities L psi | ∂in V_N
  std::vector<int> boundary_outer_index;  // indices of boundary_sites in W_N

  double sigma() const { return std::sqrt(sigma2); }
  // <h, L psi> evaluated through the boundary functional (exact support).
  double dirichlet_pairing(const ScalarField& h_on_outer) const;
  double dirichlet_pairing(const Eigen::VectorXd& values_on_outer) const;
};

Capacitor capacitor(const DomainPair& pair, const SolveOptions& opts = {});

// Capacity through the escape-probability sum, from an independent solve of
// the complementary Dirichlet problem.
double capacity_by_escape(const DomainPair& pair, const SolveOptions& opts = {});

struct GreenMatrix {
  DomainPtr domain;
  Eigen::MatrixXd values;  // G(x,y) indexed by the domain's site ordering
};

// Dense Green function G = L^{-1} (expected visit counts of the killed walk);
// guarded by a site cap since G is only needed exactly at oracle scale.
GreenMatrix green_matrix(const DomainPtr& dom, const SolveOptions& opts = {},
                         int max_sites = 20'000);

// One column G(., x) via a single sparse solve; no size guard.
ScalarField green_column(const DomainPtr& dom, Site x,
                         const SolveOptions& opts = {});

// Harmonic extension: agrees with `field` outside `sub`, discrete-harmonic on
// `sub` (with the zero extension outside the field's domain).
ScalarField harmonic_extension(const ScalarField& field,
                               const LatticeDomain& sub,
                               const SolveOptions& opts = {});
ScalarField harmonic_extension(const ScalarField& field,
                               const SiteList& sub_sites,
                               const SolveOptions& opts = {});

}  // namespace gff
