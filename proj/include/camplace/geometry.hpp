// Vector math and exact distance/intersection kernels for triangles, segments
// and axis-aligned boxes.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>

namespace camplace {

struct Vec3 {
  double x{0}, y{0}, z{0};

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr double norm2() const { return x * x + y * y + z * z; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

struct Facet {
  std::array<Vec3, 3> v;

  double area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]).norm(); }
  Vec3 barycenter() const { return (v[0] + v[1] + v[2]) / 3.0; }
  bool operator==(const Facet&) const = default;
};

/// Closed axis-aligned box [lo, hi].
struct Box {
  Vec3 lo, hi;

  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return extent().norm(); }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol && p.y <= hi.y + tol &&
           p.z >= lo.z - tol && p.z <= hi.z + tol;
  }
  bool contains(const Box& b, double tol = 0.0) const {
    return contains(b.lo, tol) && contains(b.hi, tol);
  }
  bool valid() const { return lo.finite() && hi.finite() && lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  bool operator==(const Box&) const = default;
};

Box bounding_box(std::span<const Facet> facets);
double box_box_distance(const Box& a, const Box& b);

struct Sphere {
  Vec3 center;
  double radius{0};
};

Sphere bounding_sphere(std::span<const Facet> facets);

/// True if the ray origin + t*dir, t >= 0, passes within the sphere.
bool ray_meets_sphere(const Vec3& origin, const Vec3& dir, const Sphere& s);

/// Watertight ray/triangle intersection (double-sided). Returns the ray
/// parameter t >= 0 in units of |dir|, or nullopt.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Facet& f);

double point_segment_distance2(const Vec3& p, const Vec3& a, const Vec3& b);
double segment_segment_distance2(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2);
Vec3 closest_point_on_triangle(const Vec3& p, const Facet& f);
double point_triangle_distance2(const Vec3& p, const Facet& f);
double point_box_distance2(const Vec3& p, const Box& b);

bool segment_intersects_triangle(const Vec3& a, const Vec3& b, const Facet& f);
bool segment_intersects_box(const Vec3& a, const Vec3& b, const Box& box);

double segment_triangle_distance(const Vec3& a, const Vec3& b, const Facet& f);
double segment_box_distance(const Vec3& a, const Vec3& b, const Box& box);

/// Exact minimum distance between two closed triangles.
double triangle_triangle_distance(const Facet& a, const Facet& b);
/// Exact minimum distance between a closed box and a closed triangle.
double box_triangle_distance(const Box& box, const Facet& f);

bool triangles_intersect(const Facet& a, const Facet& b);

/// Parity test against a closed triangle mesh.
bool point_in_mesh(const Vec3& p, std::span<const Facet> facets);

}  // namespace camplace
