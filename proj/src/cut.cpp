#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "fracvem/errors.hpp"
#include "fracvem/gridgen.hpp"
#include "locator.hpp"
#include "spatial.hpp"

namespace fracvem {

namespace {

struct CutSeg {
    Index n0 = -1;
    Index n1 = -1;
    Index tag = -1;   // fracture branch, -1 otherwise
    Index line = -1;  // cutting line id (fracture or constraint), -1 for background/connectors
    std::vector<Index> on;  // nodes lying on the segment
};

struct Edge {
    Index a;
    Index b;
    Index tag;
};

// Faces of a planar straight-line graph. Every bounded face becomes a cell.
MeshData mesh_from_graph(const std::vector<Vec2> &nodes, const std::vector<Edge> &edges) {
    const std::size_t nn = nodes.size();
    std::vector<std::vector<std::pair<double, int>>> out(nn);  // (angle, half-edge)
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Vec2 d = nodes[edges[e].b] - nodes[edges[e].a];
        out[edges[e].a].push_back({std::atan2(d.y, d.x), static_cast<int>(2 * e)});
        out[edges[e].b].push_back({std::atan2(-d.y, -d.x), static_cast<int>(2 * e + 1)});
    }
    std::vector<int> pos(2 * edges.size());
    for (auto &lst : out) {
        std::sort(lst.begin(), lst.end());
        for (std::size_t k = 0; k < lst.size(); ++k) pos[lst[k].second] = static_cast<int>(k);
    }
    auto tail = [&](int h) { return h % 2 == 0 ? edges[h / 2].a : edges[h / 2].b; };
    auto head = [&](int h) { return h % 2 == 0 ? edges[h / 2].b : edges[h / 2].a; };

    MeshData md;
    md.nodes = nodes;
    for (const Edge &e : edges) {
        md.faces.push_back({e.a, e.b});
        md.face_tags.push_back(e.tag);
    }
    std::vector<char> used(2 * edges.size(), 0);
    int outer = 0;
    for (std::size_t h0 = 0; h0 < used.size(); ++h0) {
        if (used[h0]) continue;
        std::vector<int> loop;
        int h = static_cast<int>(h0);
        while (!used[h]) {
            used[h] = 1;
            loop.push_back(h);
            const Index v = head(h);
            const int twin = h ^ 1;
            const auto &lst = out[v];
            const int k = (pos[twin] + static_cast<int>(lst.size()) - 1) % static_cast<int>(lst.size());
            h = lst[k].second;
        }
        double area = 0.0;
        for (int x : loop) area += cross(nodes[tail(x)], nodes[head(x)]);
        if (area <= 0.0) {
            ++outer;
            continue;
        }
        std::vector<Index> faces;
        std::vector<int> signs;
        std::set<Index> seen;
        for (int x : loop) {
            if (!seen.insert(x / 2).second) {
                throw MeshError("dangling edge inside a cell (unconnected fracture tip)");
            }
            faces.push_back(x / 2);
            signs.push_back(x % 2 == 0 ? 1 : -1);
        }
        md.cells.push_back(std::move(faces));
        md.signs.push_back(std::move(signs));
    }
    if (outer != 1) {
        throw MeshError("cut produced a disconnected arrangement");
    }
    return md;
}

}  // namespace

PolyMesh cut_mesh(const PolyMesh &background, const SplitNetwork &split,
                  const std::vector<Segment> &constraints, const CutParams &params) {
    if (!(params.snap_tol > 0.0) || params.snap_tol >= 0.1) {
        throw ConfigError("snapping tolerance must lie in (0, 0.1)");
    }
    const Rect box = background.bounding_box();
    const double h = std::sqrt(box.area() / static_cast<double>(background.num_cells()));
    const double tol = params.snap_tol * h;

    detail::PointRegistry reg(h, tol);
    for (const Vec2 &p : background.nodes()) reg.push(p);
    const auto nbg = static_cast<Index>(background.num_nodes());

    std::vector<CutSeg> segs;
    for (std::size_t f = 0; f < background.num_faces(); ++f) {
        const auto &nd = background.face(static_cast<Index>(f)).nodes;
        segs.push_back({nd[0], nd[1], background.face_tag(static_cast<Index>(f)), -1, {}});
    }
    const auto nbf = segs.size();

    // Cutting lines: fracture branches first, then constraints.
    std::vector<std::pair<Vec2, Vec2>> tips;  // (tip, outward direction)
    for (std::size_t b = 0; b < split.branches.size(); ++b) {
        const Branch &br = split.branches[b];
        segs.push_back({reg.insert(br.a), reg.insert(br.b), static_cast<Index>(b), br.fracture, {}});
        if (br.start_kind == EndKind::tip_noflow) tips.push_back({br.a, -br.tangent()});
        if (br.end_kind == EndKind::tip_noflow) tips.push_back({br.b, br.tangent()});
    }
    Index nlines = 0;
    for (const auto &br : split.branches) nlines = std::max(nlines, br.fracture + 1);
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto &[a, b] = constraints[k];
        segs.push_back({reg.insert(a), reg.insert(b), -1, nlines + static_cast<Index>(k), {}});
        tips.push_back({a, normalized(a - b)});
        tips.push_back({b, normalized(b - a)});
    }

    // Tips strictly inside a background cell get two connectors to the edge hit by the
    // prolongation of the fracture.
    detail::CellLocator locator(background);
    for (const auto &[tip, dir] : tips) {
        const Index id = reg.find(tip);
        if (id >= 0 && id < nbg) continue;
        bool on_face = false;
        for (Index c : locator.candidates(tip)) {
            for (Index f : background.cell(c).faces) {
                const auto &nd = background.face(f).nodes;
                if (point_segment_distance(tip, background.node(nd[0]), background.node(nd[1])) <=
                    tol) {
                    on_face = true;
                }
            }
        }
        if (on_face) continue;
        const Index c = locator.locate(tip);
        if (c < 0) continue;  // on the domain boundary
        const double reach = 4.0 * background.cell(c).diameter;
        double best = INFINITY;
        Index hit_face = -1;
        Vec2 hit_point;
        for (Index f : background.cell(c).faces) {
            const auto &nd = background.face(f).nodes;
            auto hit = intersect_segments(tip, tip + dir * reach, background.node(nd[0]),
                                          background.node(nd[1]), 1e-12);
            if (hit && hit->t * reach > tol && hit->t < best) {
                best = hit->t;
                hit_face = f;
                hit_point = hit->point;
            }
        }
        if (hit_face < 0) {
            throw MeshError("cannot connect fracture tip to its cell boundary");
        }
        const Index t = reg.insert(tip);
        const auto &nd = background.face(hit_face).nodes;
        const Index snapped = reg.find(hit_point);
        if (snapped >= 0 && snapped < nbg) {
            segs.push_back({t, snapped, -1, -1, {}});
        } else {
            segs.push_back({t, nd[0], -1, -1, {}});
            segs.push_back({t, nd[1], -1, -1, {}});
        }
    }

    auto P = [&](Index n) { return reg.points()[n]; };
    auto seg_len = [&](const CutSeg &s) { return distance(P(s.n0), P(s.n1)); };

    // Pairwise tests between a cutting segment and any other segment.
    auto test = [&](CutSeg &s, CutSeg &q) {
        const Vec2 sa = P(s.n0), sb = P(s.n1), qa = P(q.n0), qb = P(q.n1);
        for (Index n : {q.n0, q.n1}) {
            if (point_segment_distance(P(n), sa, sb) <= tol) s.on.push_back(n);
        }
        for (Index n : {s.n0, s.n1}) {
            if (point_segment_distance(P(n), qa, qb) <= tol) q.on.push_back(n);
        }
        const double ls = seg_len(s);
        auto hit = intersect_segments(sa, sb, qa, qb, tol / ls);
        if (hit) {
            const Index n = reg.insert(hit->point);
            s.on.push_back(n);
            q.on.push_back(n);
        }
    };
    auto bbox_overlap = [&](const CutSeg &s, const CutSeg &q) {
        const Vec2 sa = P(s.n0), sb = P(s.n1), qa = P(q.n0), qb = P(q.n1);
        return std::min(sa.x, sb.x) <= std::max(qa.x, qb.x) + tol &&
               std::min(qa.x, qb.x) <= std::max(sa.x, sb.x) + tol &&
               std::min(sa.y, sb.y) <= std::max(qa.y, qb.y) + tol &&
               std::min(qa.y, qb.y) <= std::max(sa.y, sb.y) + tol;
    };
    for (std::size_t i = nbf; i < segs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (bbox_overlap(segs[i], segs[j])) test(segs[i], segs[j]);
        }
    }

    // Nodes created (or snapped) by one pair may also lie on a third segment.
    for (CutSeg &s : segs) {
        const Vec2 a = P(s.n0), b = P(s.n1);
        const Rect sb{std::min(a.x, b.x) - tol, std::min(a.y, b.y) - tol, std::max(a.x, b.x) + tol,
                      std::max(a.y, b.y) + tol};
        for (Index n = nbg; n < static_cast<Index>(reg.size()); ++n) {
            if (n == s.n0 || n == s.n1 || !sb.contains(P(n))) continue;
            if (point_segment_distance(P(n), a, b) <= tol) s.on.push_back(n);
        }
    }

    // Split segments at the nodes found on them and collect unique edges.
    std::map<std::pair<Index, Index>, std::size_t> edge_id;
    std::vector<Edge> edges;
    std::vector<Index> edge_line;
    for (const CutSeg &s : segs) {
        const Vec2 a = P(s.n0), b = P(s.n1);
        std::vector<std::pair<double, Index>> st{{0.0, s.n0}, {1.0, s.n1}};
        for (Index n : s.on) {
            if (n != s.n0 && n != s.n1) st.push_back({segment_parameter(P(n), a, b), n});
        }
        std::sort(st.begin(), st.end());
        for (std::size_t k = 0; k + 1 < st.size(); ++k) {
            Index u = st[k].second, v = st[k + 1].second;
            if (u == v) continue;
            const auto key = std::minmax(u, v);
            auto it = edge_id.find(key);
            if (it == edge_id.end()) {
                edge_id[key] = edges.size();
                edges.push_back({u, v, s.tag});
                edge_line.push_back(s.line);
            } else {
                if (s.tag >= 0) edges[it->second].tag = s.tag;
                if (s.line >= 0) edge_line[it->second] = s.line;
            }
        }
    }

    // Drop unused nodes and renumber.
    std::vector<Index> remap(reg.size(), -1);
    std::vector<Vec2> nodes;
    for (Edge &e : edges) {
        for (Index *n : {&e.a, &e.b}) {
            if (remap[*n] < 0) {
                remap[*n] = static_cast<Index>(nodes.size());
                nodes.push_back(P(*n));
            }
            *n = remap[*n];
        }
    }

    MeshData md = mesh_from_graph(nodes, edges);

    // Each sub-cell belongs to one background cell: check areas and cut multiplicity.
    std::vector<double> parent_area(background.num_cells(), 0.0);
    std::vector<std::set<Index>> parent_lines(background.num_cells());
    for (std::size_t c = 0; c < md.cells.size(); ++c) {
        std::vector<Vec2> loop;
        double area = 0.0;
        for (std::size_t k = 0; k < md.cells[c].size(); ++k) {
            const Edge &e = edges[md.cells[c][k]];
            const Vec2 u = md.signs[c][k] > 0 ? nodes[e.a] : nodes[e.b];
            const Vec2 v = md.signs[c][k] > 0 ? nodes[e.b] : nodes[e.a];
            area += 0.5 * cross(u, v);
            loop.push_back(u);
        }
        Vec2 probe = polygon_centroid(loop);
        if (!point_in_polygon(probe, loop)) {
            const Vec2 u = loop[0], v = loop[1];
            probe = 0.5 * (u + v) + left_normal(normalized(v - u)) * (1e-6 * h);
        }
        const Index parent = locator.locate(probe);
        if (parent < 0) {
            throw MeshError("cut sub-cell outside the background mesh");
        }
        parent_area[parent] += area;
        for (Index f : md.cells[c]) {
            if (edge_line[f] >= 0) parent_lines[parent].insert(edge_line[f]);
        }
    }
    for (std::size_t c = 0; c < background.num_cells(); ++c) {
        const double a = background.cell(static_cast<Index>(c)).area;
        if (std::abs(parent_area[c] - a) > 1e-9 * a) {
            std::ostringstream os;
            os << "cut of cell " << c << " does not preserve its area";
            throw MeshError(os.str());
        }
        if (static_cast<int>(parent_lines[c].size()) > params.max_fractures_per_cell) {
            std::ostringstream os;
            os << "cell " << c << " is cut by " << parent_lines[c].size()
               << " fractures; use a finer background grid";
            throw MeshError(os.str());
        }
    }
    return build_poly_mesh(std::move(md));
}

PolyMesh cut_cartesian(const Rect &domain, const SplitNetwork &split, const CutParams &params,
                       const std::vector<Segment> &constraints) {
    if (params.nx < 1 || params.ny < 1) {
        throw ConfigError("cut grid counts must be at least 1");
    }
    return cut_mesh(cartesian_mesh(params.nx, params.ny, domain), split, constraints, params);
}

}  // namespace fracvem
