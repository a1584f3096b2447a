#include "gff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gff/errors.hpp"

namespace gff {

LatticeDomain::LatticeDomain(SiteList sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw EmptyDiscretization("LatticeDomain: empty site set");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());

  lo_ = hi_ = sites_.front();
  for (Site s : sites_) {
    lo_.x = std::min(lo_.x, s.x);
    lo_.y = std::min(lo_.y, s.y);
    hi_.x = std::max(hi_.x, s.x);
    hi_.y = std::max(hi_.y, s.y);
  }
  grid_w_ = static_cast<std::size_t>(hi_.x - lo_.x + 1);
  const std::size_t grid_h = static_cast<std::size_t>(hi_.y - lo_.y + 1);
  grid_.assign(grid_w_ * grid_h, -1);
  for (int i = 0; i < size(); ++i) grid_[grid_offset(sites_[i])] = i;

  // ∂in: in-domain sites with an l^1-neighbor outside; Λ^- is the rest.
  for (int i = 0; i < size(); ++i) {
    const Site s = sites_[i];
    bool boundary = false;
    for (int k = 0; k < 4; ++k) boundary = boundary || !contains(neighbor(s, k));
    if (boundary) {
      inner_.push_back(s);
      inner_idx_.push_back(i);
    } else {
      interior_.push_back(s);
      interior_idx_.push_back(i);
    }
  }
  // ∂out: complement sites with an l^1-neighbor inside, deduplicated + sorted.
  for (Site s : inner_) {
    for (int k = 0; k < 4; ++k) {
      const Site t = neighbor(s, k);
      if (!contains(t)) outer_.push_back(t);
    }
  }
  std::sort(outer_.begin(), outer_.end());
  outer_.erase(std::unique(outer_.begin(), outer_.end()), outer_.end());
}

bool LatticeDomain::is_connected() const {
  std::vector<char> seen(sites_.size(), 0);
  SiteList stack{sites_.front()};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Site s = stack.back();
    stack.pop_back();
    for (int k = 0; k < 4; ++k) {
      const int j = index_of(neighbor(s, k));
      if (j >= 0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++reached;
        stack.push_back(sites_[static_cast<std::size_t>(j)]);
      }
    }
  }
  return reached == sites_.size();
}

DomainPtr make_domain(SiteList sites) {
  return std::make_shared<const LatticeDomain>(std::move(sites));
}

DomainPtr box_domain(Site lo, Site hi) {
  SiteList sites;
  for (std::int32_t x = lo.x; x <= hi.x; ++x)
    for (std::int32_t y = lo.y; y <= hi.y; ++y) sites.push_back({x, y});
  return make_domain(std::move(sites));
}

DomainPtr ball_domain(Site center, double radius) {
  SiteList sites;
  const int r = static_cast<int>(std::ceil(radius));
  for (std::int32_t x = center.x - r; x <= center.x + r; ++x)
    for (std::int32_t y = center.y - r; y <= center.y + r; ++y) {
      const double dx = x - center.x, dy = y - center.y;
      if (dx * dx + dy * dy < radius * radius) sites.push_back({x, y});
    }
  return make_domain(std::move(sites));
}

namespace {

double sqdist(Site a, Site b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Andrew monotone chain; returns hull vertices (for exact diameters).
SiteList convex_hull(SiteList pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  auto cross = [](Site o, Site a, Site b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
  };
  SiteList hull(static_cast<std::size_t>(2 * n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(static_cast<std::size_t>(k - 1));
  return hull;
}

}  // namespace

double set_distance(const SiteList& a, const SiteList& b) {
  double best = std::numeric_limits<double>::infinity();
  for (Site s : a)
    for (Site t : b) best = std::min(best, sqdist(s, t));
  return std::sqrt(best);
}

double set_distance(Site a, const SiteList& b) {
  return set_distance(SiteList{a}, b);
}

double set_diameter(const SiteList& a) {
  const SiteList hull = convex_hull(a);
  double best = 0;
  for (Site s : hull)
    for (Site t : hull) best = std::max(best, sqdist(s, t));
  return std::sqrt(best);
}

SetMetrics lattice_metrics(const SiteList& a, const SiteList& b) {
  if (a.empty() || b.empty()) throw Error("lattice_metrics: empty set");
  return {set_distance(a, b), set_diameter(a), set_diameter(b)};
}

SiteList erode(const LatticeDomain& dom, double rho) {
  SiteList kept;
  const SiteList& out = dom.outer_boundary();
  for (Site s : dom.sites()) {
    double best = std::numeric_limits<double>::infinity();
    for (Site t : out) best = std::min(best, sqdist(s, t));
    if (std::sqrt(best) > rho) kept.push_back(s);
  }
  return kept;
}

}  // namespace gff
