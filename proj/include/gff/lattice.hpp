#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace gff {

struct Site {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Site a, Site b) { return !(a == b); }
  // Lexicographic (x, then y): the ordering used everywhere for reproducibility.
  friend bool operator<(Site a, Site b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

using SiteList = std::vector<Site>;

// Fixed neighbor order; every loop over neighbors uses this order.
inline constexpr std::array<Site, 4> kNeighborStep = {
    Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}};

inline Site neighbor(Site s, int k) {
  return {s.x + kNeighborStep[k].x, s.y + kNeighborStep[k].y};
}

// A finite subset of Z^2 with cached inner/outer boundaries and interior.
// Sites are stored sorted lexicographically; index_of is O(1) via a dense
// bounding-box grid. Immutable after construction.
class LatticeDomain {
 public:
  explicit LatticeDomain(SiteList sites);

  int size() const { return static_cast<int>(sites_.size()); }
  const SiteList& sites() const { return sites_; }
  Site site(int i) const { return sites_[static_cast<std::size_t>(i)]; }

  // Index into sites(), or -1 if the site is not in the domain.
  int index_of(Site s) const {
    if (s.x < lo_.x || s.x > hi_.x || s.y < lo_.y || s.y > hi_.y) return -1;
    return grid_[grid_offset(s)];
  }
  bool contains(Site s) const { return index_of(s) >= 0; }

  const SiteList& inner_boundary() const { return inner_; }   // ∂in
  const SiteList& outer_boundary() const { return outer_; }   // ∂out
  const SiteList& interior() const { return interior_; }      // Λ^-
  const std::vector<int>& inner_boundary_indices() const { return inner_idx_; }
  const std::vector<int>& interior_indices() const { return interior_idx_; }

  Site bbox_lo() const { return lo_; }
  Site bbox_hi() const { return hi_; }

  bool is_connected() const;  // 4-connectivity of the site set

 private:
  std::size_t grid_offset(Site s) const {
    return static_cast<std::size_t>(s.y - lo_.y) * grid_w_ +
           static_cast<std::size_t>(s.x - lo_.x);
  }

  SiteList sites_;
  Site lo_{0, 0}, hi_{-1, -1};
  std::size_t grid_w_ = 0;
  std::vector<std::int32_t> grid_;
  SiteList inner_, outer_, interior_;
  std::vector<int> inner_idx_, interior_idx_;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;

DomainPtr make_domain(SiteList sites);

// Convenience builders used all over the tests.
DomainPtr box_domain(Site lo, Site hi);
DomainPtr ball_domain(Site center, double radius);  // {‖y-c‖_2 < radius}

// d(A, B) and diameters in the Euclidean norm, exact over the finite sets.
struct SetMetrics {
  double dist = 0;    // min_{a,b} ‖a-b‖_2
  double diam_a = 0;  // max_{a,a'} ‖a-a'‖_2
  double diam_b = 0;
};
SetMetrics lattice_metrics(const SiteList& a, const SiteList& b);

double set_distance(const SiteList& a, const SiteList& b);
double set_distance(Site a, const SiteList& b);
double set_diameter(const SiteList& a);

// Erode: keep sites whose Euclidean distance to the complement exceeds rho.
SiteList erode(const LatticeDomain& dom, double rho);

}  // namespace gff
