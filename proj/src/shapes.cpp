#include "gff/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "gff/errors.hpp"

namespace gff {

namespace {

double polygon_signed_area(const std::vector<Vec2>& p) {
  double a = 0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % n];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

// Circumscribed-circle curvature of three consecutive vertices.
double three_point_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - b, w = c - a;
  const double cross = u.x() * v.y() - u.y() * v.x();
  const double denom = u.norm() * v.norm() * w.norm();
  return denom > 0 ? 2.0 * std::abs(cross) / denom : 0.0;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Even-odd crossing test with the half-open edge rule.
bool polygon_contains(const std::vector<Vec2>& poly, Vec2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    if ((b.y() > p.y()) != (a.y() > p.y())) {
      const double xc = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (p.x() < xc) inside = !inside;
    }
  }
  return inside;
}

SmoothShape finish_smooth(std::vector<Vec2> points, std::vector<Vec2> tangents,
                          std::vector<double> curvature) {
  const std::size_t n = points.size();
  if (n < 8) throw Error("smooth shape: needs at least 8 vertices");
  // CCW orientation so that the inward normal is the +90 degree rotation of
  // the tangent.
  if (polygon_signed_area(points) < 0) {
    std::reverse(points.begin(), points.end());
    if (!tangents.empty()) {
      std::reverse(tangents.begin(), tangents.end());
      for (Vec2& t : tangents) t = -t;
    }
    if (!curvature.empty()) std::reverse(curvature.begin(), curvature.end());
  }
  if (tangents.empty()) {
    tangents.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 d = points[(i + 1) % n] - points[(i + n - 1) % n];
      tangents[i] = d.normalized();
    }
  } else {
    for (Vec2& t : tangents) t.normalize();
  }
  if (curvature.empty()) {
    curvature.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      curvature[i] = three_point_curvature(points[(i + n - 1) % n], points[i],
                                           points[(i + 1) % n]);
  }
  SmoothShape s;
  s.kappa_max = *std::max_element(curvature.begin(), curvature.end());
  s.points = std::move(points);
  s.tangents = std::move(tangents);
  s.curvature = std::move(curvature);
  return s;
}

// Closed cubic-Hermite resampling, used to densify coarse smooth polylines
// before rasterizing (segment budget >= 64*N at scale N).
SmoothShape resample_smooth(const SmoothShape& s, std::size_t target_segments) {
  const std::size_t n = s.points.size();
  const std::size_t per = (target_segments + n - 1) / n;
  std::vector<Vec2> pts;
  pts.reserve(n * per);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p0 = s.points[i];
    const Vec2& p1 = s.points[(i + 1) % n];
    const double h = (p1 - p0).norm();
    const Vec2 m0 = s.tangents[i] * h;
    const Vec2 m1 = s.tangents[(i + 1) % n] * h;
    for (std::size_t k = 0; k < per; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(per);
      const double t2 = t * t, t3 = t2 * t;
      pts.push_back((2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 +
                    (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1);
    }
  }
  return finish_smooth(std::move(pts), {}, {});
}

}  // namespace

ContinuumShape ContinuumShape::disk(Vec2 center, double radius) {
  if (radius <= 0) throw Error("disk: radius must be positive");
  ContinuumShape s;
  s.v_ = DiskShape{center, radius};
  return s;
}

ContinuumShape ContinuumShape::rectangle(Vec2 lo, Vec2 hi) {
  if (lo.x() >= hi.x() || lo.y() >= hi.y())
    throw Error("rectangle: empty interior");
  ContinuumShape s;
  s.v_ = RectShape{lo, hi};
  return s;
}

ContinuumShape ContinuumShape::smooth(std::vector<Vec2> points,
                                      std::vector<Vec2> tangents,
                                      std::vector<double> curvature) {
  ContinuumShape s;
  s.v_ = finish_smooth(std::move(points), std::move(tangents),
                       std::move(curvature));
  return s;
}

ContinuumShape ContinuumShape::ellipse(Vec2 center, double a, double b,
                                       int segments) {
  if (a <= 0 || b <= 0) throw Error("ellipse: axes must be positive");
  std::vector<Vec2> pts(static_cast<std::size_t>(segments));
  std::vector<Vec2> tan(pts.size());
  std::vector<double> kap(pts.size());
  for (int i = 0; i < segments; ++i) {
    const double th = 2.0 * std::numbers::pi * i / segments;
    const double c = std::cos(th), s = std::sin(th);
    pts[static_cast<std::size_t>(i)] = center + Vec2(a * c, b * s);
    tan[static_cast<std::size_t>(i)] = Vec2(-a * s, b * c).normalized();
    const double w = a * a * s * s + b * b * c * c;
    kap[static_cast<std::size_t>(i)] = a * b / (w * std::sqrt(w));
  }
  return smooth(std::move(pts), std::move(tan), std::move(kap));
}

bool ContinuumShape::contains(Vec2 p) const {
  if (is_disk()) {
    const auto& d = as_disk();
    return (p - d.center).norm() < d.radius;
  }
  if (is_rect()) {
    const auto& r = as_rect();
    return p.x() > r.lo.x() && p.x() < r.hi.x() && p.y() > r.lo.y() &&
           p.y() < r.hi.y();
  }
  return polygon_contains(as_smooth().points, p);
}

double ContinuumShape::boundary_distance(Vec2 p) const {
  if (is_disk()) {
    const auto& d = as_disk();
    return std::abs(d.radius - (p - d.center).norm());
  }
  if (is_rect()) {
    const auto& r = as_rect();
    if (contains(p)) {
      return std::min(std::min(p.x() - r.lo.x(), r.hi.x() - p.x()),
                      std::min(p.y() - r.lo.y(), r.hi.y() - p.y()));
    }
    const double dx = std::max({r.lo.x() - p.x(), 0.0, p.x() - r.hi.x()});
    const double dy = std::max({r.lo.y() - p.y(), 0.0, p.y() - r.hi.y()});
    if (dx > 0 && dy > 0) return std::hypot(dx, dy);
    return std::max(dx, dy);
  }
  const auto& s = as_smooth();
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = s.points.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best,
                    point_segment_distance(p, s.points[i], s.points[(i + 1) % n]));
  return best;
}

double ContinuumShape::kappa_max() const {
  if (is_disk()) return 1.0 / as_disk().radius;
  if (is_rect()) return 0.0;  // flat sides; corners handled by axis offsets
  return as_smooth().kappa_max;
}

double ContinuumShape::inradius_estimate() const {
  if (is_disk()) return as_disk().radius;
  if (is_rect()) {
    const auto& r = as_rect();
    return 0.5 * std::min(r.hi.x() - r.lo.x(), r.hi.y() - r.lo.y());
  }
  const auto& s = as_smooth();
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : s.points) centroid += p;
  centroid /= static_cast<double>(s.points.size());
  return boundary_distance(centroid);
}

Vec2 ContinuumShape::bbox_lo() const {
  if (is_disk()) return as_disk().center - Vec2::Constant(as_disk().radius);
  if (is_rect()) return as_rect().lo;
  Vec2 lo = as_smooth().points.front();
  for (const Vec2& p : as_smooth().points) lo = lo.cwiseMin(p);
  return lo;
}

Vec2 ContinuumShape::bbox_hi() const {
  if (is_disk()) return as_disk().center + Vec2::Constant(as_disk().radius);
  if (is_rect()) return as_rect().hi;
  Vec2 hi = as_smooth().points.front();
  for (const Vec2& p : as_smooth().points) hi = hi.cwiseMax(p);
  return hi;
}

ContinuumShape ContinuumShape::scaled(double f) const {
  if (f <= 0) throw Error("scaled: factor must be positive");
  if (is_disk()) return disk(as_disk().center * f, as_disk().radius * f);
  if (is_rect()) return rectangle(as_rect().lo * f, as_rect().hi * f);
  const auto& s = as_smooth();
  std::vector<Vec2> pts(s.points.size());
  std::vector<double> kap(s.curvature.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = s.points[i] * f;
  for (std::size_t i = 0; i < kap.size(); ++i) kap[i] = s.curvature[i] / f;
  return smooth(std::move(pts), s.tangents, std::move(kap));
}

std::string ContinuumShape::describe() const {
  if (is_disk()) {
    const auto& d = as_disk();
    return "disk(r=" + std::to_string(d.radius) + ")";
  }
  if (is_rect()) return "rect";
  return "smooth(" + std::to_string(as_smooth().points.size()) + " pts)";
}

ContinuumShape shrink_interior(const ContinuumShape& shape, double delta) {
  if (delta < 0) throw Error("shrink_interior: delta must be >= 0");
  if (delta == 0) return shape;
  if (delta >= shape.inradius_estimate())
    throw DegenerateInterior("shrink_interior: delta >= inradius");
  if (shape.is_disk()) {
    const auto& d = shape.as_disk();
    return ContinuumShape::disk(d.center, d.radius - delta);
  }
  if (shape.is_rect()) {
    const auto& r = shape.as_rect();
    return ContinuumShape::rectangle(r.lo + Vec2::Constant(delta),
                                     r.hi - Vec2::Constant(delta));
  }
  const auto& s = shape.as_smooth();
  if (delta * s.kappa_max >= 1.0)
    throw DegenerateInterior("shrink_interior: delta >= 1/kappa_max");
  std::vector<Vec2> pts(s.points.size());
  std::vector<double> kap(s.points.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 inward(-s.tangents[i].y(), s.tangents[i].x());
    pts[i] = s.points[i] + delta * inward;
    kap[i] = s.curvature[i] / (1.0 - delta * s.curvature[i]);
  }
  if (polygon_signed_area(pts) <= 0)
    throw DegenerateInterior("shrink_interior: offset polygon degenerated");
  return ContinuumShape::smooth(std::move(pts), s.tangents, std::move(kap));
}

namespace {

void check_discretization(const LatticeDomain& dom,
                          const ContinuumShape& shape, int N) {
  if (!dom.is_connected())
    throw DisconnectedDiscretization("discretize: disconnected at N=" +
                                     std::to_string(N) + " for " +
                                     shape.describe());
  // Hole check: flood the complement of the site set from outside the
  // bounding box; unreached complement cells would be holes.
  const Site lo{dom.bbox_lo().x - 1, dom.bbox_lo().y - 1};
  const Site hi{dom.bbox_hi().x + 1, dom.bbox_hi().y + 1};
  const int w = hi.x - lo.x + 1, h = hi.y - lo.y + 1;
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  auto off = [&](Site s) {
    return static_cast<std::size_t>(s.y - lo.y) * w + (s.x - lo.x);
  };
  SiteList stack{lo};
  seen[off(lo)] = 1;
  std::size_t complement_reached = 1;
  while (!stack.empty()) {
    const Site s = stack.back();
    stack.pop_back();
    for (int k = 0; k < 4; ++k) {
      const Site t = neighbor(s, k);
      if (t.x < lo.x || t.x > hi.x || t.y < lo.y || t.y > hi.y) continue;
      if (dom.contains(t) || seen[off(t)]) continue;
      seen[off(t)] = 1;
      ++complement_reached;
      stack.push_back(t);
    }
  }
  const std::size_t complement_total =
      static_cast<std::size_t>(w) * h - dom.sites().size();
  if (complement_reached != complement_total)
    throw DisconnectedDiscretization("discretize: holey site set at N=" +
                                     std::to_string(N));
}

}  // namespace

DomainPtr discretize(const ContinuumShape& shape, int N) {
  if (N < 1) throw Error("discretize: N must be >= 1");
  SiteList sites;

  if (shape.is_disk()) {
    const auto& d = shape.as_disk();
    const Vec2 c = d.center * N;
    const double r = d.radius * N;
    for (std::int32_t x = static_cast<std::int32_t>(std::floor(c.x() - r));
         x <= static_cast<std::int32_t>(std::ceil(c.x() + r)); ++x)
      for (std::int32_t y = static_cast<std::int32_t>(std::floor(c.y() - r));
           y <= static_cast<std::int32_t>(std::ceil(c.y() + r)); ++y)
        if ((Vec2(x, y) - c).norm() < r) sites.push_back({x, y});
  } else if (shape.is_rect()) {
    const auto& rc = shape.as_rect();
    const Vec2 lo = rc.lo * N, hi = rc.hi * N;
    for (std::int32_t x = static_cast<std::int32_t>(std::floor(lo.x())) + 1;
         x <= static_cast<std::int32_t>(std::ceil(hi.x())) - 1; ++x)
      for (std::int32_t y = static_cast<std::int32_t>(std::floor(lo.y())) + 1;
           y <= static_cast<std::int32_t>(std::ceil(hi.y())) - 1; ++y)
        if (x > lo.x() && x < hi.x() && y > lo.y() && y < hi.y())
          sites.push_back({x, y});
  } else {
    SmoothShape s = shape.as_smooth();
    const std::size_t min_segments = 64 * static_cast<std::size_t>(N);
    if (s.points.size() < min_segments) s = resample_smooth(s, min_segments);
    // Scanline rasterization of the N-scaled polygon, half-open edge rule,
    // strict interior.
    std::map<std::int32_t, std::vector<double>> rows;
    const std::size_t n = s.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = s.points[i] * N;
      Vec2 b = s.points[(i + 1) % n] * N;
      if (a.y() == b.y()) continue;
      if (a.y() > b.y()) std::swap(a, b);
      for (std::int32_t y = static_cast<std::int32_t>(std::ceil(a.y()));
           y < b.y(); ++y) {
        rows[y].push_back(a.x() +
                          (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    for (auto& [y, xs] : rows) {
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        const std::int32_t x0 = static_cast<std::int32_t>(std::floor(xs[k])) + 1;
        const std::int32_t x1 =
            static_cast<std::int32_t>(std::ceil(xs[k + 1])) - 1;
        for (std::int32_t x = x0; x <= x1; ++x) sites.push_back({x, y});
      }
    }
  }

  if (sites.empty())
    throw EmptyDiscretization("discretize: no lattice point strictly inside " +
                              shape.describe() + " at N=" + std::to_string(N));
  DomainPtr dom = make_domain(std::move(sites));
  check_discretization(*dom, shape, N);
  return dom;
}

DomainPair make_pair(const ContinuumShape& v, const ContinuumShape& w, int N) {
  DomainPair p;
  p.outer = discretize(w, N);
  p.inner = discretize(v, N);
  p.scale = N;
  p.v_shape = v;
  p.w_shape = w;
  for (Site s : p.inner->sites())
    if (!p.outer->contains(s))
      throw Error("make_pair: V_N not contained in W_N");
  for (Site s : p.inner->sites())
    if (p.outer->index_of(s) >= 0 &&
        std::binary_search(p.outer->inner_boundary().begin(),
                           p.outer->inner_boundary().end(), s))
      throw Error("make_pair: V_N touches the inner boundary of W_N");
  return p;
}

}  // namespace gff
