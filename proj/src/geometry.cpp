#include "fracvem/geometry.hpp"

#include <algorithm>

namespace fracvem {

double signed_area(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * a;
}

Vec2 polygon_centroid(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    // Shift to the first vertex to limit cancellation for far-from-origin polygons.
    const Vec2 o = poly[0];
    double a = 0.0;
    Vec2 c;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i] - o;
        const Vec2 q = poly[(i + 1) % n] - o;
        const double w = cross(p, q);
        a += w;
        c += (p + q) * w;
    }
    return o + c * (1.0 / (3.0 * a));
}

double polygon_diameter(std::span<const Vec2> poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            d = std::max(d, distance(poly[i], poly[j]));
        }
    }
    return d;
}

bool point_in_polygon(const Vec2 &p, std::span<const Vec2> poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

bool is_convex(std::span<const Vec2> poly, double tol) {
    const std::size_t n = poly.size();
    if (n < 3) {
        return false;
    }
    const double scale = polygon_diameter(poly);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[(i + 1) % n] - poly[i];
        const Vec2 b = poly[(i + 2) % n] - poly[(i + 1) % n];
        if (cross(a, b) < -tol * scale * scale) {
            return false;
        }
    }
    return true;
}

std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> clip) {
    std::vector<Vec2> out(subject.begin(), subject.end());
    const std::size_t m = clip.size();
    for (std::size_t k = 0; k < m && !out.empty(); ++k) {
        const Vec2 a = clip[k];
        const Vec2 b = clip[(k + 1) % m];
        const Vec2 e = b - a;
        auto inside = [&](const Vec2 &p) { return cross(e, p - a) >= 0.0; };
        std::vector<Vec2> in;
        in.swap(out);
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 &cur = in[i];
            const Vec2 &prev = in[(i + n - 1) % n];
            const bool ci = inside(cur);
            const bool pi = inside(prev);
            if (ci != pi) {
                const double dp = cross(e, prev - a);
                const double dc = cross(e, cur - a);
                const double t = dp / (dp - dc);
                out.push_back(prev + (cur - prev) * t);
            }
            if (ci) {
                out.push_back(cur);
            }
        }
    }
    return out;
}

double overlap_area(std::span<const Vec2> subject, std::span<const Vec2> convex_clip) {
    const auto loop = clip_polygon(subject, convex_clip);
    if (loop.size() < 3) {
        return 0.0;
    }
    return std::abs(signed_area(loop));
}

std::vector<Vec2> clip_halfplane(std::span<const Vec2> poly, const Vec2 &n, double c) {
    std::vector<Vec2> out;
    const std::size_t m = poly.size();
    out.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 &cur = poly[i];
        const Vec2 &prev = poly[(i + m - 1) % m];
        const double dc = dot(n, cur) - c;
        const double dp = dot(n, prev) - c;
        if ((dc <= 0.0) != (dp <= 0.0)) {
            const double t = dp / (dp - dc);
            out.push_back(prev + (cur - prev) * t);
        }
        if (dc <= 0.0) {
            out.push_back(cur);
        }
    }
    return out;
}

double segment_parameter(const Vec2 &p, const Vec2 &a, const Vec2 &b) {
    const Vec2 d = b - a;
    return dot(p - a, d) / dot(d, d);
}

double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b) {
    const double t = std::clamp(segment_parameter(p, a, b), 0.0, 1.0);
    return distance(p, a + (b - a) * t);
}

std::optional<SegmentHit> intersect_segments(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0,
                                             const Vec2 &q1, double tol) {
    const Vec2 r = p1 - p0;
    const Vec2 s = q1 - q0;
    const double denom = cross(r, s);
    if (std::abs(denom) <= 1e-14 * norm(r) * norm(s)) {
        return std::nullopt;
    }
    const Vec2 qp = q0 - p0;
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    if (t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol) {
        return std::nullopt;
    }
    SegmentHit hit;
    hit.t = std::clamp(t, 0.0, 1.0);
    hit.u = std::clamp(u, 0.0, 1.0);
    hit.point = p0 + r * hit.t;
    return hit;
}

bool collinear_overlap(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1,
                       double tol) {
    const double len = distance(p0, p1);
    if (point_segment_distance(q0, p0, p1) > tol * len &&
        std::abs(cross(normalized(p1 - p0), q0 - p0)) > tol * len) {
        return false;
    }
    const Vec2 t = normalized(p1 - p0);
    if (std::abs(cross(t, q0 - p0)) > tol * len || std::abs(cross(t, q1 - p0)) > tol * len) {
        return false;
    }
    const double a0 = 0.0;
    const double a1 = len;
    double b0 = dot(q0 - p0, t);
    double b1 = dot(q1 - p0, t);
    if (b0 > b1) {
        std::swap(b0, b1);
    }
    return std::min(a1, b1) - std::max(a0, b0) > tol * len;
}

}  // namespace fracvem
