#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace fracvem {

using Index = int;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 &operator+=(const Vec2 &o) { x += o.x; y += o.y; return *this; }
    Vec2 &operator-=(const Vec2 &o) { x -= o.x; y -= o.y; return *this; }
    Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
inline bool operator==(const Vec2 &a, const Vec2 &b) { return a.x == b.x && a.y == b.y; }

inline double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2 &a, const Vec2 &b) { return norm(a - b); }
inline Vec2 normalized(const Vec2 &a) { return a * (1.0 / norm(a)); }
/// Rotate by -90 degrees: for a CCW boundary edge direction this is the outward normal.
inline Vec2 right_normal(const Vec2 &t) { return {t.y, -t.x}; }
/// Rotate by +90 degrees.
inline Vec2 left_normal(const Vec2 &t) { return {-t.y, t.x}; }

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(const Vec2 &p, double tol = 0.0) const {
        return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
    }
};

// Polygon helpers. Polygons are vertex loops without repetition of the first vertex.

double signed_area(std::span<const Vec2> poly);
Vec2 polygon_centroid(std::span<const Vec2> poly);
double polygon_diameter(std::span<const Vec2> poly);
bool point_in_polygon(const Vec2 &p, std::span<const Vec2> poly);
bool is_convex(std::span<const Vec2> poly, double tol = 1e-12);

/// Sutherland-Hodgman clipping of `subject` against a convex, counter-clockwise `clip` polygon.
/// The returned loop may contain degenerate edges; its area is exact.
std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Area of the intersection of an arbitrary simple polygon with a convex CCW polygon.
double overlap_area(std::span<const Vec2> subject, std::span<const Vec2> convex_clip);

/// Keep the part of a convex polygon on the side where dot(n, x) <= c.
std::vector<Vec2> clip_halfplane(std::span<const Vec2> poly, const Vec2 &n, double c);

double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b);

/// Parameter t in [0,1] of the projection of p on segment a-b (unclamped).
double segment_parameter(const Vec2 &p, const Vec2 &a, const Vec2 &b);

struct SegmentHit {
    double t = 0.0;  // parameter along the first segment
    double u = 0.0;  // parameter along the second segment
    Vec2 point;
};

/// Proper or touching intersection of segments p0-p1 and q0-q1. Parallel segments return nullopt.
std::optional<SegmentHit> intersect_segments(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0,
                                             const Vec2 &q1, double tol = 1e-12);

/// True when the segments are collinear (within tol, relative to their length) and share
/// a portion of positive length.
bool collinear_overlap(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1,
                       double tol);

}  // namespace fracvem
