#include "camplace/geometry.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace camplace {

Box bounding_box(std::span<const Facet> facets) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Box b{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const auto& f : facets)
    for (const auto& v : f.v) {
      b.lo = {std::min(b.lo.x, v.x), std::min(b.lo.y, v.y), std::min(b.lo.z, v.z)};
      b.hi = {std::max(b.hi.x, v.x), std::max(b.hi.y, v.y), std::max(b.hi.z, v.z)};
    }
  return b;
}

double box_box_distance(const Box& a, const Box& b) {
  auto gap = [](double alo, double ahi, double blo, double bhi) {
    return std::max({0.0, blo - ahi, alo - bhi});
  };
  const double dx = gap(a.lo.x, a.hi.x, b.lo.x, b.hi.x);
  const double dy = gap(a.lo.y, a.hi.y, b.lo.y, b.hi.y);
  const double dz = gap(a.lo.z, a.hi.z, b.lo.z, b.hi.z);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Sphere bounding_sphere(std::span<const Facet> facets) {
  const Box b = bounding_box(facets);
  Sphere s{(b.lo + b.hi) * 0.5, 0.0};
  for (const auto& f : facets)
    for (const auto& v : f.v) s.radius = std::max(s.radius, distance(v, s.center));
  // slack so that culling never rejects a triangle the exact test would hit
  s.radius = s.radius * (1.0 + 1e-9) + 1e-9;
  return s;
}

bool ray_meets_sphere(const Vec3& origin, const Vec3& dir, const Sphere& s) {
  const Vec3 oc = s.center - origin;
  const double t = std::max(0.0, dot(oc, dir) / dir.norm2());
  return (origin + dir * t - s.center).norm2() <= s.radius * s.radius;
}

// Woop, Benthin and Wald, "Watertight Ray/Triangle Intersection", JCGT 2013.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Facet& f) {
  const double ad[3] = {std::abs(dir.x), std::abs(dir.y), std::abs(dir.z)};
  int kz = 0;
  if (ad[1] > ad[kz]) kz = 1;
  if (ad[2] > ad[kz]) kz = 2;
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0) std::swap(kx, ky);
  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 a = f.v[0] - origin;
  const Vec3 b = f.v[1] - origin;
  const Vec3 c = f.v[2] - origin;
  const double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = sz * a[kz], bz = sz * b[kz], cz = sz * c[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t >= 0.0)) return std::nullopt;
  return t;
}

double point_segment_distance2(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.norm2();
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + ab * t - p).norm2();
}

// Ericson, Real-Time Collision Detection, 5.1.9.
double segment_segment_distance2(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.norm2(), e = d2.norm2(), f = dot(d2, r);
  double s = 0, t = 0;
  if (a <= 0 && e <= 0) return r.norm2();
  if (a <= 0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 c1 = p1 + d1 * s, c2 = p2 + d2 * t;
  // the clamped parametric solution can be off by rounding on near-parallel
  // pairs; endpoint projections bound it from above
  double best = (c1 - c2).norm2();
  best = std::min(best, point_segment_distance2(p1, p2, q2));
  best = std::min(best, point_segment_distance2(q1, p2, q2));
  best = std::min(best, point_segment_distance2(p2, p1, q1));
  best = std::min(best, point_segment_distance2(q2, p1, q1));
  return best;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Facet& f) {
  const Vec3 &a = f.v[0], &b = f.v[1], &c = f.v[2];
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance2(const Vec3& p, const Facet& f) {
  return (closest_point_on_triangle(p, f) - p).norm2();
}

double point_box_distance2(const Vec3& p, const Box& b) {
  const double dx = std::max({0.0, b.lo.x - p.x, p.x - b.hi.x});
  const double dy = std::max({0.0, b.lo.y - p.y, p.y - b.hi.y});
  const double dz = std::max({0.0, b.lo.z - p.z, p.z - b.hi.z});
  return dx * dx + dy * dy + dz * dz;
}

bool segment_intersects_triangle(const Vec3& a, const Vec3& b, const Facet& f) {
  if (a == b) return point_triangle_distance2(a, f) == 0.0;
  const auto t = ray_triangle(a, b - a, f);
  return t && *t <= 1.0;
}

bool segment_intersects_box(const Vec3& a, const Vec3& b, const Box& box) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = b - a;
  for (int k = 0; k < 3; ++k) {
    const double lo = k == 0 ? box.lo.x : (k == 1 ? box.lo.y : box.lo.z);
    const double hi = k == 0 ? box.hi.x : (k == 1 ? box.hi.y : box.hi.z);
    if (d[k] == 0.0) {
      if (a[k] < lo || a[k] > hi) return false;
      continue;
    }
    double ta = (lo - a[k]) / d[k];
    double tb = (hi - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double segment_triangle_distance(const Vec3& a, const Vec3& b, const Facet& f) {
  if (segment_intersects_triangle(a, b, f)) return 0.0;
  double best = std::min(point_triangle_distance2(a, f), point_triangle_distance2(b, f));
  for (int e = 0; e < 3; ++e)
    best = std::min(best, segment_segment_distance2(a, b, f.v[e], f.v[(e + 1) % 3]));
  return std::sqrt(best);
}

namespace {

std::array<Vec3, 8> box_corners(const Box& b) {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i)
    c[i] = {(i & 1) ? b.hi.x : b.lo.x, (i & 2) ? b.hi.y : b.lo.y, (i & 4) ? b.hi.z : b.lo.z};
  return c;
}

// corner index pairs differing in exactly one bit
constexpr std::array<std::pair<int, int>, 12> kBoxEdges{{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                                                         {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}};

}  // namespace

double segment_box_distance(const Vec3& a, const Vec3& b, const Box& box) {
  if (segment_intersects_box(a, b, box)) return 0.0;
  double best = std::min(point_box_distance2(a, box), point_box_distance2(b, box));
  const auto c = box_corners(box);
  for (const auto& [i, j] : kBoxEdges) best = std::min(best, segment_segment_distance2(a, b, c[i], c[j]));
  return std::sqrt(best);
}

// For two convex polytopes the closest pair is realised by an edge of one
// against the other solid; containment shows up as an edge inside the box.
double triangle_triangle_distance(const Facet& a, const Facet& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3 && best > 0; ++e) {
    best = std::min(best, segment_triangle_distance(a.v[e], a.v[(e + 1) % 3], b));
    best = std::min(best, segment_triangle_distance(b.v[e], b.v[(e + 1) % 3], a));
  }
  return best;
}

double box_triangle_distance(const Box& box, const Facet& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3 && best > 0; ++e)
    best = std::min(best, segment_box_distance(f.v[e], f.v[(e + 1) % 3], box));
  if (best == 0) return 0.0;
  const auto c = box_corners(box);
  for (const auto& [i, j] : kBoxEdges) {
    best = std::min(best, segment_triangle_distance(c[i], c[j], f));
    if (best == 0) break;
  }
  return best;
}

bool triangles_intersect(const Facet& a, const Facet& b) { return triangle_triangle_distance(a, b) == 0.0; }

bool point_in_mesh(const Vec3& p, std::span<const Facet> facets) {
  // an irrational-looking direction keeps rays off edges of axis-aligned meshes
  const Vec3 dir{0.5773502691896258, 0.5812381937190965, 0.5734623443633283};
  int crossings = 0;
  for (const auto& f : facets) {
    if (const auto t = ray_triangle(p, dir, f)) {
      if (*t == 0.0) return true;
      ++crossings;
    }
  }
  return crossings % 2 == 1;
}

}  // namespace camplace
