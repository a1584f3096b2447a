#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gff/lattice.hpp"

namespace gff {

using Vec2 = Eigen::Vector2d;

// Bounded, simply connected, open planar shapes. Smooth shapes are closed C^2
// polylines carrying per-vertex unit tangents and curvatures; that is all the
// downstream code ever needs from the C^2 hypothesis.
struct DiskShape {
  Vec2 center{0, 0};
  double radius = 1;
};

struct RectShape {
  Vec2 lo{0, 0};
  Vec2 hi{1, 1};
};

struct SmoothShape {
  std::vector<Vec2> points;    // closed CCW polyline, points.front() != points.back()
  std::vector<Vec2> tangents;  // unit tangents, one per vertex
  std::vector<double> curvature;
  double kappa_max = 0;
};

class ContinuumShape {
 public:
  static ContinuumShape disk(Vec2 center, double radius);
  static ContinuumShape rectangle(Vec2 lo, Vec2 hi);
  // Builds a SmoothShape; tangents/curvatures computed from the polyline when
  // not supplied.
  static ContinuumShape smooth(std::vector<Vec2> points,
                               std::vector<Vec2> tangents = {},
                               std::vector<double> curvature = {});
  static ContinuumShape ellipse(Vec2 center, double a, double b,
                                int segments = 4096);

  bool is_disk() const { return std::holds_alternative<DiskShape>(v_); }
  bool is_rect() const { return std::holds_alternative<RectShape>(v_); }
  bool is_smooth() const { return std::holds_alternative<SmoothShape>(v_); }
  const DiskShape& as_disk() const { return std::get<DiskShape>(v_); }
  const RectShape& as_rect() const { return std::get<RectShape>(v_); }
  const SmoothShape& as_smooth() const { return std::get<SmoothShape>(v_); }

  bool contains(Vec2 p) const;          // strict interior (open set)
  double boundary_distance(Vec2 p) const;  // dist(p, ∂U)
  double kappa_max() const;             // 0 for disk?/rect corners excluded
  double inradius_estimate() const;
  Vec2 bbox_lo() const;
  Vec2 bbox_hi() const;

  ContinuumShape scaled(double s) const;  // about the origin
  std::string describe() const;

 private:
  std::variant<DiskShape, RectShape, SmoothShape> v_;
};

// U^delta := {x in U : dist(x, ∂U) > delta}. Throws DegenerateInterior when
// the interior collapses or (smooth case) delta >= 1/kappa_max.
ContinuumShape shrink_interior(const ContinuumShape& shape, double delta);

// {x in Z^2 : x/N strictly inside shape}. Verifies the result is non-empty,
// 4-connected and hole-free (throws EmptyDiscretization / subclasses).
DomainPtr discretize(const ContinuumShape& shape, int N);

// Nested lattice pair W_N ⊃ V_N at scale N with the source shapes kept.
struct DomainPair {
  DomainPtr outer;  // W_N
  DomainPtr inner;  // V_N
  int scale = 1;
  ContinuumShape v_shape = ContinuumShape::disk({0, 0}, 1);
  ContinuumShape w_shape = ContinuumShape::disk({0, 0}, 1);
};

DomainPair make_pair(const ContinuumShape& v, const ContinuumShape& w, int N);

}  // namespace gff
