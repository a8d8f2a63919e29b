// Copyright 2026 The mipmot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Oriented 3D box geometry.
//
// Boxes live in a right-handed world frame with z pointing up. The heading
// `a` rotates the box about z; at a = 0 the length `l` runs along x and the
// width `w` along y. The bird's-eye view (BEV) is the x-y footprint.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "mipmot/error.hpp"

namespace mipmot {

inline constexpr double kGeometryEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

struct Box3D {
  double x = 0.0, y = 0.0, z = 0.0;  // center
  double l = 0.0, w = 0.0, h = 0.0;  // extents
  double a = 0.0;                    // heading about z

  double volume() const { return l * w * h; }
  bool operator==(const Box3D&) const = default;
};

// Throws InvalidInput unless all fields are finite and extents are >= 0.
inline void validate(const Box3D& b) {
  const std::array<double, 7> f{b.x, b.y, b.z, b.l, b.w, b.h, b.a};
  for (double v : f) {
    if (!std::isfinite(v)) throw InvalidInput("box has a non-finite field");
  }
  if (b.l < 0.0 || b.w < 0.0 || b.h < 0.0) {
    throw InvalidInput("box has a negative extent");
  }
}

// Returns `b` with its heading wrapped to (-pi, pi].
inline Box3D normalized(Box3D b) {
  b.a = wrap_angle(b.a);
  return b;
}

using BevPolygon = std::array<Vec2, 4>;

// Footprint rectangle, counter-clockwise.
inline BevPolygon bev_corners(const Box3D& b) {
  validate(b);
  const double c = std::cos(b.a);
  const double s = std::sin(b.a);
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  constexpr std::array<std::array<double, 2>, 4> kSigns{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  BevPolygon out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double dx = kSigns[i][0] * hl;
    const double dy = kSigns[i][1] * hw;
    out[i] = {b.x + c * dx - s * dy, b.y + s * dx + c * dy};
  }
  return out;
}

// Signed shoelace area; positive for counter-clockwise vertex order.
inline double signed_area(std::span<const Vec2> poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    acc += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * acc;
}

inline double polygon_area(std::span<const Vec2> poly) { return std::abs(signed_area(poly)); }

// Area of the intersection of two convex counter-clockwise polygons.
// Clips `p` successively by every edge half-plane of `q`.
inline double convex_polygon_intersection_area(std::span<const Vec2> p, std::span<const Vec2> q) {
  if (polygon_area(p) < kGeometryEps || polygon_area(q) < kGeometryEps) return 0.0;

  std::vector<Vec2> current(p.begin(), p.end());
  std::vector<Vec2> next;
  current.reserve(p.size() + q.size());
  next.reserve(p.size() + q.size());

  for (std::size_t e = 0, m = q.size(); e < m && !current.empty(); ++e) {
    const Vec2 a = q[e];
    const Vec2 edge = q[(e + 1) % m] - a;
    auto side = [&](Vec2 v) { return cross(edge, v - a); };  // >= 0 means inside

    next.clear();
    for (std::size_t i = 0, n = current.size(); i < n; ++i) {
      const Vec2 cur = current[i];
      const Vec2 nxt = current[(i + 1) % n];
      const double sc = side(cur);
      const double sn = side(nxt);
      if (sc >= 0.0) next.push_back(cur);
      if ((sc >= 0.0) != (sn >= 0.0)) {
        const double t = sc / (sc - sn);
        next.push_back(cur + t * (nxt - cur));
      }
    }
    current.swap(next);
  }
  if (current.size() < 3) return 0.0;
  return std::max(0.0, signed_area(current));
}

inline double bev_intersection_area(const Box3D& b1, const Box3D& b2) {
  const BevPolygon p = bev_corners(b1);
  const BevPolygon q = bev_corners(b2);
  return convex_polygon_intersection_area(p, q);
}

// Ground-plane IoU of the two footprints.
inline double bev_iou(const Box3D& b1, const Box3D& b2) {
  const double inter = bev_intersection_area(b1, b2);
  const double uni = b1.l * b1.w + b2.l * b2.w - inter;
  if (uni <= kGeometryEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double iou_3d(const Box3D& b1, const Box3D& b2) {
  const double zlo = std::max(b1.z - 0.5 * b1.h, b2.z - 0.5 * b2.h);
  const double zhi = std::min(b1.z + 0.5 * b1.h, b2.z + 0.5 * b2.h);
  const double z_overlap = std::max(0.0, zhi - zlo);
  const double inter = z_overlap > 0.0 ? bev_intersection_area(b1, b2) * z_overlap : 0.0;
  const double uni = b1.volume() + b2.volume() - inter;
  if (uni <= kGeometryEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

// Diagonal of the smallest axis-aligned box containing both boxes.
inline double enclosing_diagonal(const Box3D& b1, const Box3D& b2) {
  double xmin = INFINITY, ymin = INFINITY, xmax = -INFINITY, ymax = -INFINITY;
  for (const Box3D* b : {&b1, &b2}) {
    for (const Vec2& v : bev_corners(*b)) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  const double zmin = std::min(b1.z - 0.5 * b1.h, b2.z - 0.5 * b2.h);
  const double zmax = std::max(b1.z + 0.5 * b1.h, b2.z + 0.5 * b2.h);
  return std::hypot(xmax - xmin, ymax - ymin, zmax - zmin);
}

inline double center_distance(const Box3D& b1, const Box3D& b2) {
  return std::hypot(b1.x - b2.x, b1.y - b2.y, b1.z - b2.z);
}

// Normalized center-distance term 1 - rho / diagonal, in [0, 1].
// Coincident point boxes (zero diagonal) score 1.
inline double distance_term(const Box3D& b1, const Box3D& b2) {
  const double diag = enclosing_diagonal(b1, b2);
  if (diag <= kGeometryEps) return 1.0;
  return std::clamp(1.0 - center_distance(b1, b2) / diag, 0.0, 1.0);
}

// 3D-DIoU affinity: distance term plus 3D IoU, in [0, 2].
inline double diou_affinity(const Box3D& b1, const Box3D& b2) {
  if (enclosing_diagonal(b1, b2) <= kGeometryEps) return 2.0;
  return distance_term(b1, b2) + iou_3d(b1, b2);
}

}  // namespace mipmot
