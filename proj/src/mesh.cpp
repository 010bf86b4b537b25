#include "fracvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "fracvem/errors.hpp"

namespace fracvem {

const char *to_string(BoundarySide side) {
    switch (side) {
    case BoundarySide::interior: return "interior";
    case BoundarySide::left: return "left";
    case BoundarySide::right: return "right";
    case BoundarySide::bottom: return "bottom";
    case BoundarySide::top: return "top";
    case BoundarySide::other: return "other";
    }
    return "?";
}

namespace {

// Even-odd membership of p in the region bounded by the given edges.
bool inside_edges(const Vec2 &p, std::span<const std::array<Vec2, 2>> edges) {
    bool inside = false;
    for (const auto &[a, b] : edges) {
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

BoundarySide classify_side(const Face &f, const Rect &box, double tol) {
    const Vec2 &m = f.midpoint;
    if (std::abs(f.normal.x) > 1.0 - 1e-9) {
        if (std::abs(m.x - box.xmin) <= tol) return BoundarySide::left;
        if (std::abs(m.x - box.xmax) <= tol) return BoundarySide::right;
    }
    if (std::abs(f.normal.y) > 1.0 - 1e-9) {
        if (std::abs(m.y - box.ymin) <= tol) return BoundarySide::bottom;
        if (std::abs(m.y - box.ymax) <= tol) return BoundarySide::top;
    }
    return BoundarySide::other;
}

}  // namespace

PolyMesh build_poly_mesh(MeshData data) {
    PolyMesh mesh;
    const auto n_nodes = static_cast<Index>(data.nodes.size());
    const auto n_faces = static_cast<Index>(data.faces.size());
    if (n_nodes == 0 || data.cells.empty()) {
        throw MeshError("empty mesh");
    }
    for (const Vec2 &p : data.nodes) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw MeshError("non-finite node coordinate");
        }
    }
    mesh.nodes_ = std::move(data.nodes);

    Rect box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const Vec2 &p : mesh.nodes_) {
        box.xmin = std::min(box.xmin, p.x);
        box.ymin = std::min(box.ymin, p.y);
        box.xmax = std::max(box.xmax, p.x);
        box.ymax = std::max(box.ymax, p.y);
    }
    mesh.bbox_ = box;

    mesh.faces_.resize(n_faces);
    for (Index f = 0; f < n_faces; ++f) {
        const auto [a, b] = data.faces[f];
        if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
            throw MeshError("face " + std::to_string(f) + " references an invalid node");
        }
        Face &face = mesh.faces_[f];
        face.nodes = {a, b};
        const Vec2 d = mesh.nodes_[b] - mesh.nodes_[a];
        face.measure = norm(d);
        if (!(face.measure > 0.0)) {
            throw MeshError("face " + std::to_string(f) + " has zero length");
        }
        face.normal = right_normal(d) * (1.0 / face.measure);
        face.midpoint = 0.5 * (mesh.nodes_[a] + mesh.nodes_[b]);
    }

    const auto n_cells = static_cast<Index>(data.cells.size());
    mesh.cells_.resize(n_cells);
    mesh.face_cells_.assign(n_faces, {-1, -1});
    std::vector<int> face_count(n_faces, 0);

    for (Index c = 0; c < n_cells; ++c) {
        Cell &cell = mesh.cells_[c];
        cell.faces = std::move(data.cells[c]);
        const std::size_t nf = cell.faces.size();
        if (nf < 2) {
            throw MeshError("open cell boundary: cell " + std::to_string(c));
        }
        std::map<Index, int> degree;
        for (Index f : cell.faces) {
            if (f < 0 || f >= n_faces) {
                throw MeshError("cell " + std::to_string(c) + " references an invalid face");
            }
            ++degree[mesh.faces_[f].nodes[0]];
            ++degree[mesh.faces_[f].nodes[1]];
        }
        for (const auto &[node, deg] : degree) {
            if (deg % 2 != 0) {
                throw MeshError("open cell boundary: cell " + std::to_string(c) + " at node " +
                                std::to_string(node));
            }
        }

        if (c < static_cast<Index>(data.signs.size()) && !data.signs[c].empty()) {
            cell.signs = std::move(data.signs[c]);
            if (cell.signs.size() != nf) {
                throw MeshError("sign list size mismatch in cell " + std::to_string(c));
            }
        } else {
            std::vector<std::array<Vec2, 2>> edges;
            edges.reserve(nf);
            for (Index f : cell.faces) {
                edges.push_back({mesh.nodes_[mesh.faces_[f].nodes[0]],
                                 mesh.nodes_[mesh.faces_[f].nodes[1]]});
            }
            cell.signs.resize(nf);
            for (std::size_t k = 0; k < nf; ++k) {
                const Face &face = mesh.faces_[cell.faces[k]];
                const Vec2 probe = face.midpoint + face.normal * (1e-7 * face.measure);
                cell.signs[k] = inside_edges(probe, edges) ? -1 : 1;
            }
        }

        // Area and first moments from the divergence theorem, relative to a local origin.
        const Vec2 o = mesh.nodes_[mesh.faces_[cell.faces[0]].nodes[0]];
        double area = 0.0;
        double mx = 0.0;
        double my = 0.0;
        Vec2 closure;
        double perimeter = 0.0;
        for (std::size_t k = 0; k < nf; ++k) {
            const Face &face = mesh.faces_[cell.faces[k]];
            const double s = cell.signs[k];
            const Vec2 a = mesh.nodes_[face.nodes[0]] - o;
            const Vec2 b = mesh.nodes_[face.nodes[1]] - o;
            const Vec2 n = face.normal * (s * face.measure);
            area += 0.5 * dot(0.5 * (a + b), n);
            mx += n.x * (a.x * a.x + a.x * b.x + b.x * b.x) / 6.0;
            my += n.y * (a.y * a.y + a.y * b.y + b.y * b.y) / 6.0;
            closure += n;
            perimeter += face.measure;
        }
        if (norm(closure) > 1e-12 * perimeter) {
            throw MeshError("open cell boundary: cell " + std::to_string(c) +
                            " does not close");
        }
        const double scale = perimeter * perimeter;
        if (!(area > 1e-14 * scale) || !(area > 0.0)) {
            throw MeshError("zero-area cell " + std::to_string(c));
        }
        cell.area = area;
        cell.centroid = o + Vec2{mx / area, my / area};

        double diam = 0.0;
        std::vector<Index> cn;
        for (const auto &[node, deg] : degree) {
            cn.push_back(node);
        }
        for (std::size_t i = 0; i < cn.size(); ++i) {
            for (std::size_t j = i + 1; j < cn.size(); ++j) {
                diam = std::max(diam, distance(mesh.nodes_[cn[i]], mesh.nodes_[cn[j]]));
            }
        }
        cell.diameter = diam;

        for (std::size_t k = 0; k < nf; ++k) {
            const Index f = cell.faces[k];
            ++face_count[f];
            if (face_count[f] > 2) {
                throw MeshError("non-manifold face " + std::to_string(f) +
                                " (shared by 3 or more cells)");
            }
            auto &slot = cell.signs[k] > 0 ? mesh.face_cells_[f][0] : mesh.face_cells_[f][1];
            if (slot >= 0) {
                throw MeshError("inconsistent orientation: face " + std::to_string(f) +
                                " has the same sign in two cells");
            }
            slot = c;
        }
    }

    for (Index f = 0; f < n_faces; ++f) {
        if (face_count[f] == 0) {
            throw MeshError("face " + std::to_string(f) + " belongs to no cell");
        }
    }

    // Boundary faces point out of the domain.
    for (Index f = 0; f < n_faces; ++f) {
        auto &fc = mesh.face_cells_[f];
        if (fc[0] < 0) {
            Face &face = mesh.faces_[f];
            std::swap(face.nodes[0], face.nodes[1]);
            face.normal = -face.normal;
            fc = {fc[1], -1};
            Cell &cell = mesh.cells_[fc[0]];
            for (std::size_t k = 0; k < cell.faces.size(); ++k) {
                if (cell.faces[k] == f) {
                    cell.signs[k] = 1;
                }
            }
        }
    }

    const double tol = 1e-10 * box.diameter();
    for (Index f = 0; f < n_faces; ++f) {
        mesh.faces_[f].side = mesh.is_boundary(f) ? classify_side(mesh.faces_[f], box, tol)
                                                  : BoundarySide::interior;
    }

    mesh.face_tags_ = std::move(data.face_tags);
    if (mesh.face_tags_.empty()) {
        mesh.face_tags_.assign(n_faces, -1);
    } else if (static_cast<Index>(mesh.face_tags_.size()) != n_faces) {
        throw MeshError("face tag list size mismatch");
    }
    return mesh;
}

double PolyMesh::total_area() const {
    double a = 0.0;
    for (const Cell &c : cells_) {
        a += c.area;
    }
    return a;
}

std::vector<Index> PolyMesh::cell_nodes(Index c) const {
    auto loops = cell_loops(c);
    std::size_t best = 0;
    double best_area = -1.0;
    for (std::size_t k = 0; k < loops.size(); ++k) {
        std::vector<Vec2> poly;
        for (Index n : loops[k]) poly.push_back(nodes_[n]);
        const double a = std::abs(signed_area(poly));
        if (a > best_area) {
            best_area = a;
            best = k;
        }
    }
    return loops[best];
}

std::vector<std::vector<Index>> PolyMesh::cell_loops(Index c) const {
    const Cell &cell = cells_[c];
    const std::size_t nf = cell.faces.size();
    // Directed edges with the cell on the left.
    std::vector<std::array<Index, 2>> dir(nf);
    for (std::size_t k = 0; k < nf; ++k) {
        const auto &nd = faces_[cell.faces[k]].nodes;
        // The stored normal is right_normal(b - a); an outward normal means a->b keeps
        // the cell on the left.
        if (cell.signs[k] > 0) {
            dir[k] = {nd[0], nd[1]};
        } else {
            dir[k] = {nd[1], nd[0]};
        }
    }
    std::multimap<Index, std::size_t> outgoing;
    for (std::size_t k = 0; k < nf; ++k) {
        outgoing.emplace(dir[k][0], k);
    }
    std::vector<bool> used(nf, false);
    std::vector<std::vector<Index>> loops;
    for (std::size_t start = 0; start < nf; ++start) {
        if (used[start]) {
            continue;
        }
        std::vector<Index> loop;
        std::size_t cur = start;
        while (!used[cur]) {
            used[cur] = true;
            loop.push_back(dir[cur][0]);
            const Index v = dir[cur][1];
            const Vec2 back = nodes_[dir[cur][0]] - nodes_[v];
            const double back_angle = std::atan2(back.y, back.x);
            // Sharpest left turn: first outgoing edge clockwise from the reversed edge.
            double best = std::numeric_limits<double>::max();
            std::size_t next = cur;
            auto [lo, hi] = outgoing.equal_range(v);
            for (auto it = lo; it != hi; ++it) {
                if (used[it->second]) {
                    continue;
                }
                const Vec2 d = nodes_[dir[it->second][1]] - nodes_[v];
                double turn = back_angle - std::atan2(d.y, d.x);
                while (turn <= 0.0) turn += 2.0 * std::numbers::pi;
                while (turn > 2.0 * std::numbers::pi) turn -= 2.0 * std::numbers::pi;
                if (turn < best) {
                    best = turn;
                    next = it->second;
                }
            }
            cur = next;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<Vec2> PolyMesh::cell_polygon(Index c) const {
    const auto loops = cell_loops(c);
    std::vector<Vec2> best;
    double best_area = -1.0;
    for (const auto &loop : loops) {
        std::vector<Vec2> poly;
        poly.reserve(loop.size());
        for (Index n : loop) {
            poly.push_back(nodes_[n]);
        }
        const double a = std::abs(signed_area(poly));
        if (a > best_area) {
            best_area = a;
            best = std::move(poly);
        }
    }
    return best;
}

MeshData PolyMesh::to_data() const {
    MeshData d;
    d.nodes = nodes_;
    d.faces.reserve(faces_.size());
    for (const Face &f : faces_) {
        d.faces.push_back(f.nodes);
    }
    for (const Cell &c : cells_) {
        d.cells.push_back(c.faces);
        d.signs.push_back(c.signs);
    }
    d.face_tags = face_tags_;
    return d;
}

PolyMesh cartesian_mesh(int nx, int ny, const Rect &domain) {
    if (nx < 1 || ny < 1) {
        throw MeshError("cartesian_mesh: nx and ny must be at least 1");
    }
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
        throw MeshError("cartesian_mesh: degenerate rectangle");
    }
    MeshData d;
    const double dx = domain.width() / nx;
    const double dy = domain.height() / ny;
    auto node_id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = i == nx ? domain.xmax : domain.xmin + i * dx;
            const double y = j == ny ? domain.ymax : domain.ymin + j * dy;
            d.nodes.push_back({x, y});
        }
    }
    // Vertical faces (normal +x) first, then horizontal faces (normal +y).
    auto vface = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
    const Index nv = static_cast<Index>((nx + 1) * ny);
    auto hface = [nx, nv](int i, int j) { return nv + static_cast<Index>(j * nx + i); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            d.faces.push_back({node_id(i, j), node_id(i, j + 1)});
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            d.faces.push_back({node_id(i + 1, j), node_id(i, j)});
        }
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            d.cells.push_back({hface(i, j), vface(i + 1, j), hface(i, j + 1), vface(i, j)});
            d.signs.push_back({-1, 1, 1, -1});
        }
    }
    return build_poly_mesh(std::move(d));
}

double aspect_ratio(const PolyMesh &mesh, Index cell) {
    const Cell &c = mesh.cell(cell);
    // Reference diameter of the equal-area square, or of the equilateral triangle for triangles.
    const double ref = c.num_faces() == 3 ? std::sqrt(4.0 * c.area / std::sqrt(3.0))
                                          : std::sqrt(2.0 * c.area);
    return c.diameter / ref;
}

QualityReport quality_stats(const PolyMesh &mesh) {
    if (mesh.num_cells() == 0) {
        throw MeshError("quality_stats: empty mesh");
    }
    QualityReport r;
    const std::size_t n = mesh.num_cells();
    for (std::size_t c = 0; c < n; ++c) {
        r.aspect.push_back(aspect_ratio(mesh, static_cast<Index>(c)));
        r.area.push_back(mesh.cell(static_cast<Index>(c)).area);
        r.n_faces.push_back(static_cast<int>(mesh.cell(static_cast<Index>(c)).num_faces()));
    }
    auto summarize = [](const auto &v) {
        Stat s{std::numeric_limits<double>::max(), 0.0, std::numeric_limits<double>::lowest()};
        for (const auto x : v) {
            s.min = std::min<double>(s.min, x);
            s.max = std::max<double>(s.max, x);
            s.avg += x;
        }
        s.avg /= static_cast<double>(v.size());
        return s;
    };
    r.aspect_stat = summarize(r.aspect);
    r.area_stat = summarize(r.area);
    r.faces_stat = summarize(r.n_faces);
    return r;
}

}  // namespace fracvem
