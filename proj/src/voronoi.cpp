#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "fracvem/errors.hpp"
#include "fracvem/gridgen.hpp"
#include "spatial.hpp"

namespace fracvem {

namespace {

// Length of the part of segment a-b inside the closed rectangle.
double clipped_length(const Vec2 &a, const Vec2 &b, const Rect &r) {
    double t0 = 0.0, t1 = 1.0;
    const Vec2 d = b - a;
    auto clip = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double t = q / p;
        if (p < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        return t0 <= t1;
    };
    if (!clip(-d.x, a.x - r.xmin) || !clip(d.x, r.xmax - a.x) || !clip(-d.y, a.y - r.ymin) ||
        !clip(d.y, r.ymax - a.y)) {
        return 0.0;
    }
    return (t1 - t0) * norm(d);
}

double segment_distance(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d) {
    if (intersect_segments(a, b, c, d, 0.0)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

}  // namespace

std::vector<Vec2> voronoi_seeds(const Rect &domain, const SplitNetwork &split,
                                const VoronoiParams &params) {
    if (params.nx < 1 || params.ny < 1) {
        throw ConfigError("voronoi seed counts must be at least 1");
    }
    const double dx = domain.width() / params.nx;
    const double dy = domain.height() / params.ny;
    const double h = std::min(dx, dy);
    const double delta = params.delta * h;
    const double delta1 = params.delta1 * h;
    const double delta2 = params.delta2 * h;
    for (double d : {params.delta, params.delta1, params.delta2}) {
        if (!(d > 0.0) || d >= 0.5) {
            throw ConfigError("voronoi offsets must lie in (0, 0.5) of the cell size");
        }
    }
    const auto &brs = split.branches;

    for (std::size_t i = 0; i < brs.size(); ++i) {
        for (std::size_t j = i + 1; j < brs.size(); ++j) {
            const Branch &a = brs[i];
            const Branch &b = brs[j];
            if (a.fracture == b.fracture) continue;
            const bool share = (a.start_intersection >= 0 &&
                                (a.start_intersection == b.start_intersection ||
                                 a.start_intersection == b.end_intersection)) ||
                               (a.end_intersection >= 0 &&
                                (a.end_intersection == b.start_intersection ||
                                 a.end_intersection == b.end_intersection));
            if (share) continue;
            if (segment_distance(a.a, a.b, b.a, b.b) < 2.0 * delta) {
                std::ostringstream os;
                os << "fractures " << a.fracture << " and " << b.fracture
                   << " are closer than twice the seed offset";
                throw MeshError(os.str());
            }
        }
    }

    std::vector<Vec2> seeds;
    // Background seeds in cells not crossed by a fracture.
    for (int j = 0; j < params.ny; ++j) {
        for (int i = 0; i < params.nx; ++i) {
            const Rect cell{domain.xmin + i * dx, domain.ymin + j * dy, domain.xmin + (i + 1) * dx,
                            domain.ymin + (j + 1) * dy};
            bool cut = false;
            for (const Branch &br : brs) {
                if (clipped_length(br.a, br.b, cell) > 1e-9 * h) {
                    cut = true;
                    break;
                }
            }
            if (!cut) {
                seeds.push_back({0.5 * (cell.xmin + cell.xmax), 0.5 * (cell.ymin + cell.ymax)});
            }
        }
    }

    for (const Branch &br : brs) {
        const Vec2 t = br.tangent();
        const Vec2 n = br.normal();
        const double len = br.length();
        // Stations where the branch crosses background grid lines.
        std::vector<double> st{0.0, 1.0};
        const Vec2 d = br.b - br.a;
        for (int i = 1; i < params.nx; ++i) {
            const double x = domain.xmin + i * dx;
            if (d.x != 0.0) st.push_back((x - br.a.x) / d.x);
        }
        for (int j = 1; j < params.ny; ++j) {
            const double y = domain.ymin + j * dy;
            if (d.y != 0.0) st.push_back((y - br.a.y) / d.y);
        }
        std::erase_if(st, [](double s) { return s < 0.0 || s > 1.0; });
        std::sort(st.begin(), st.end());
        // End zones reserved for tip and intersection seeds.
        const double s0 = br.start_kind == EndKind::boundary ? 0.0 : 2.0 * delta2 / len;
        const double s1 = br.end_kind == EndKind::boundary ? 1.0 : 1.0 - 2.0 * delta2 / len;
        std::vector<double> mids;
        for (std::size_t k = 0; k + 1 < st.size(); ++k) {
            const double piece = (st[k + 1] - st[k]) * len;
            if (piece <= 1e-9 * h) continue;
            const int m = std::max(1, static_cast<int>(std::ceil(piece / (0.5 * h))));
            for (int q = 0; q < m; ++q) {
                mids.push_back(st[k] + (st[k + 1] - st[k]) * (q + 0.5) / m);
            }
        }
        for (double s : mids) {
            if (s < s0 || s > s1) continue;
            const Vec2 x = br.a + d * s;
            seeds.push_back(x + n * delta);
            seeds.push_back(x - n * delta);
        }
        for (int end = 0; end < 2; ++end) {
            const EndKind kind = end == 0 ? br.start_kind : br.end_kind;
            if (kind != EndKind::tip_noflow) continue;
            const Vec2 x = end == 0 ? br.a : br.b;
            for (int a : {-1, 1}) {
                for (int b : {-1, 1}) {
                    seeds.push_back(x + n * (a * delta1) + t * (b * delta2));
                }
            }
        }
    }

    // Around an intersection, every branch gets a pair straddling it; all seeds lie on a
    // circle around the point so that it becomes a Voronoi vertex.
    for (const IntersectionPoint &ip : split.intersections) {
        std::vector<double> ang;
        for (const Vec2 &t : ip.tangents) ang.push_back(std::atan2(t.y, t.x));
        std::sort(ang.begin(), ang.end());
        double gap = 2.0 * std::numbers::pi;
        for (std::size_t k = 0; k < ang.size(); ++k) {
            const double next = k + 1 < ang.size() ? ang[k + 1] : ang[0] + 2.0 * std::numbers::pi;
            gap = std::min(gap, next - ang[k]);
        }
        const double d1 = std::min(delta1, delta2 * std::tan(0.4 * gap));
        for (const Vec2 &t : ip.tangents) {
            const Vec2 n = left_normal(t);
            seeds.push_back(ip.location + t * delta2 + n * d1);
            seeds.push_back(ip.location + t * delta2 - n * d1);
        }
    }

    std::erase_if(seeds, [&](const Vec2 &p) { return !domain.contains(p, 0.0); });
    detail::PointRegistry reg(h, 1e-12 * domain.diameter());
    for (const Vec2 &p : seeds) {
        if (reg.find(p) >= 0) {
            throw MeshError("seed collision");
        }
        reg.push(p);
    }
    return seeds;
}

PolyMesh voronoi_diagram(const Rect &domain, const std::vector<Vec2> &seeds) {
    if (seeds.empty()) {
        throw MeshError("no seeds");
    }
    const double bucket = std::sqrt(domain.area() / static_cast<double>(seeds.size()));
    const int bx = std::max(1, static_cast<int>(std::ceil(domain.width() / bucket)));
    const int by = std::max(1, static_cast<int>(std::ceil(domain.height() / bucket)));
    std::vector<std::vector<Index>> grid(static_cast<std::size_t>(bx) * by);
    auto bidx = [&](const Vec2 &p) {
        const int i = std::clamp(static_cast<int>((p.x - domain.xmin) / bucket), 0, bx - 1);
        const int j = std::clamp(static_cast<int>((p.y - domain.ymin) / bucket), 0, by - 1);
        return std::pair{i, j};
    };
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto [i, j] = bidx(seeds[s]);
        grid[static_cast<std::size_t>(j) * bx + i].push_back(static_cast<Index>(s));
    }

    std::vector<std::vector<Vec2>> cells(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const Vec2 x = seeds[s];
        std::vector<Vec2> poly{{domain.xmin, domain.ymin},
                               {domain.xmax, domain.ymin},
                               {domain.xmax, domain.ymax},
                               {domain.xmin, domain.ymax}};
        const auto [ci, cj] = bidx(x);
        auto clip_by = [&](Index o) {
            if (o == static_cast<Index>(s)) return;
            const Vec2 y = seeds[o];
            const Vec2 nrm = y - x;
            poly = clip_halfplane(poly, nrm, 0.5 * (dot(y, y) - dot(x, x)));
        };
        for (int ring = 0;; ++ring) {
            for (int j = cj - ring; j <= cj + ring; ++j) {
                for (int i = ci - ring; i <= ci + ring; ++i) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
                    if (i < 0 || j < 0 || i >= bx || j >= by) continue;
                    for (Index o : grid[static_cast<std::size_t>(j) * bx + i]) clip_by(o);
                }
            }
            double rmax = 0.0;
            for (const Vec2 &p : poly) rmax = std::max(rmax, distance(p, x));
            // Seeds outside the processed rings are at least ring*bucket away.
            if (ring * bucket >= 2.0 * rmax || ring > bx + by) break;
        }
        cells[s] = std::move(poly);
    }

    // Merge vertices and make neighbouring polygons share every vertex.
    const double tol = 1e-10 * domain.diameter();
    detail::PointRegistry reg(bucket, tol);
    std::vector<std::vector<Index>> loops(cells.size());
    for (std::size_t s = 0; s < cells.size(); ++s) {
        for (const Vec2 &p : cells[s]) {
            const Index id = reg.insert(p);
            if (loops[s].empty() || (loops[s].back() != id && loops[s].front() != id)) {
                loops[s].push_back(id);
            }
        }
    }
    const auto &pts = reg.points();
    for (auto &loop : loops) {
        std::vector<Index> full;
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const Index a = loop[k];
            const Index b = loop[(k + 1) % loop.size()];
            full.push_back(a);
            const Vec2 pa = pts[a], pb = pts[b];
            std::vector<std::pair<double, Index>> mid;
            for (Index c : reg.in_box({std::min(pa.x, pb.x), std::min(pa.y, pb.y)},
                                      {std::max(pa.x, pb.x), std::max(pa.y, pb.y)})) {
                if (c == a || c == b) continue;
                const double t = segment_parameter(pts[c], pa, pb);
                if (t > 0.0 && t < 1.0 && point_segment_distance(pts[c], pa, pb) <= tol) {
                    mid.push_back({t, c});
                }
            }
            std::sort(mid.begin(), mid.end());
            for (auto [t, c] : mid) full.push_back(c);
        }
        loop = std::move(full);
    }

    MeshData md;
    std::vector<Index> remap(pts.size(), -1);
    std::map<std::pair<Index, Index>, Index> face_id;
    for (auto &loop : loops) {
        if (loop.size() < 3) {
            throw MeshError("degenerate Voronoi cell");
        }
        std::vector<Index> faces;
        std::vector<int> signs;
        for (std::size_t k = 0; k < loop.size(); ++k) {
            Index a = loop[k], b = loop[(k + 1) % loop.size()];
            for (Index *n : {&a, &b}) {
                if (remap[*n] < 0) {
                    remap[*n] = static_cast<Index>(md.nodes.size());
                    md.nodes.push_back(pts[*n]);
                }
                *n = remap[*n];
            }
            const auto key = std::minmax(a, b);
            auto it = face_id.find(key);
            if (it == face_id.end()) {
                it = face_id.emplace(key, static_cast<Index>(md.faces.size())).first;
                md.faces.push_back({a, b});
            }
            faces.push_back(it->second);
            signs.push_back(md.faces[it->second][0] == a ? 1 : -1);
        }
        md.cells.push_back(std::move(faces));
        md.signs.push_back(std::move(signs));
    }
    return build_poly_mesh(std::move(md));
}

PolyMesh voronoi_constrained(const Rect &domain, const SplitNetwork &split,
                             const VoronoiParams &params) {
    const PolyMesh raw = voronoi_diagram(domain, voronoi_seeds(domain, split, params));
    if (split.branches.empty()) {
        return raw;
    }
    CutParams cp;
    // Fracture seeds put Voronoi vertices close to the fracture lines; a coarser snap
    // keeps them from spawning slivers.
    cp.snap_tol = std::max(params.snap_tol, 1e-3);
    cp.max_fractures_per_cell = std::numeric_limits<int>::max();
    return cut_mesh(raw, split, {}, cp);
}

}  // namespace fracvem
