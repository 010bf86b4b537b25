#include "fracvem/fracture.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracvem/errors.hpp"

namespace fracvem {

void FractureNetwork::validate() const {
    for (std::size_t i = 0; i < fractures.size(); ++i) {
        const auto &f = fractures[i];
        auto bad = [&](const char *what) {
            std::ostringstream os;
            os << "fracture " << i << ": " << what;
            throw ConfigError(os.str());
        };
        if (!(distance(f.a, f.b) > 0.0)) {
            bad("endpoints coincide");
        }
        if (!(f.aperture > 0.0) || !std::isfinite(f.aperture)) {
            bad("aperture must be positive");
        }
        if (!(f.tangential_permeability > 0.0) || !(f.normal_permeability > 0.0)) {
            bad("permeabilities must be positive");
        }
    }
}

namespace {

BoundarySide boundary_side(const Vec2 &p, const Rect &box, double tol) {
    if (!box.contains(p, tol)) {
        return BoundarySide::other;
    }
    if (std::abs(p.x - box.xmin) <= tol) return BoundarySide::left;
    if (std::abs(p.x - box.xmax) <= tol) return BoundarySide::right;
    if (std::abs(p.y - box.ymin) <= tol) return BoundarySide::bottom;
    if (std::abs(p.y - box.ymax) <= tol) return BoundarySide::top;
    return BoundarySide::interior;
}

struct Split {
    double t;
    Index point;  // registered intersection point or -1
};

}  // namespace

SplitNetwork split_network(const FractureNetwork &network, const Rect &domain,
                           const IntersectionOverrides &overrides, double tol_rel) {
    network.validate();
    const double tol = tol_rel * domain.diameter();
    const auto &fr = network.fractures;
    const std::size_t nf = fr.size();

    for (std::size_t i = 0; i < nf; ++i) {
        for (const Vec2 &p : {fr[i].a, fr[i].b}) {
            if (!domain.contains(p, tol)) {
                std::ostringstream os;
                os << "fracture " << i << " leaves the domain";
                throw MeshError(os.str());
            }
        }
    }

    std::vector<Vec2> points;
    auto register_point = [&](const Vec2 &p) -> Index {
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (distance(points[k], p) <= tol) {
                return static_cast<Index>(k);
            }
        }
        points.push_back(p);
        return static_cast<Index>(points.size() - 1);
    };

    std::vector<std::vector<Split>> splits(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = i + 1; j < nf; ++j) {
            const auto &a = fr[i];
            const auto &b = fr[j];
            if (collinear_overlap(a.a, a.b, b.a, b.b, tol_rel)) {
                std::ostringstream os;
                os << "fractures " << i << " and " << j << " overlap";
                throw MeshError(os.str());
            }
            const double ptol = tol / std::min(distance(a.a, a.b), distance(b.a, b.b));
            auto hit = intersect_segments(a.a, a.b, b.a, b.b, ptol);
            if (!hit) {
                continue;
            }
            if (boundary_side(hit->point, domain, tol) != BoundarySide::interior) {
                // Fractures meeting on the boundary do not exchange flow through a point.
                continue;
            }
            const Index id = register_point(hit->point);
            splits[i].push_back({hit->t, id});
            splits[j].push_back({hit->u, id});
        }
    }

    SplitNetwork out;
    std::vector<std::vector<std::pair<Index, int>>> incident(points.size());

    for (std::size_t i = 0; i < nf; ++i) {
        const auto &f = fr[i];
        const double len = distance(f.a, f.b);
        auto &s = splits[i];
        s.push_back({0.0, -1});
        s.push_back({1.0, -1});
        std::sort(s.begin(), s.end(), [](const Split &x, const Split &y) { return x.t < y.t; });
        // Merge stations closer than tol, keeping the intersection id and the end parameter.
        std::vector<Split> st;
        for (const Split &x : s) {
            if (!st.empty() && (x.t - st.back().t) * len <= tol) {
                if (x.point >= 0) st.back().point = x.point;
                if (x.t == 1.0) st.back().t = 1.0;
                continue;
            }
            st.push_back(x);
        }
        auto location = [&](const Split &x) {
            if (x.point >= 0) return points[x.point];
            if (x.t == 0.0) return f.a;
            if (x.t == 1.0) return f.b;
            return f.a + (f.b - f.a) * x.t;
        };
        auto classify = [&](const Split &x, EndKind &kind, BoundarySide &side, Index &iota) {
            iota = x.point;
            side = boundary_side(location(x), domain, tol);
            if (x.point >= 0) {
                kind = EndKind::intersection;
                side = BoundarySide::interior;
            } else if (side != BoundarySide::interior) {
                kind = EndKind::boundary;
            } else {
                kind = EndKind::tip_noflow;
            }
        };
        for (std::size_t k = 0; k + 1 < st.size(); ++k) {
            Branch br;
            br.fracture = static_cast<Index>(i);
            br.a = location(st[k]);
            br.b = location(st[k + 1]);
            br.aperture = f.aperture;
            br.tangential_permeability = f.tangential_permeability;
            br.normal_permeability = f.normal_permeability;
            classify(st[k], br.start_kind, br.start_side, br.start_intersection);
            classify(st[k + 1], br.end_kind, br.end_side, br.end_intersection);
            const auto id = static_cast<Index>(out.branches.size());
            if (br.start_intersection >= 0) incident[br.start_intersection].push_back({id, 1});
            if (br.end_intersection >= 0) incident[br.end_intersection].push_back({id, -1});
            out.branches.push_back(br);
        }
    }

    for (std::size_t k = 0; k < points.size(); ++k) {
        IntersectionPoint ip;
        ip.location = points[k];
        double min_ap = INFINITY;
        double inv_sum = 0.0;
        for (auto [b, alpha] : incident[k]) {
            const Branch &br = out.branches[b];
            ip.branches.push_back(b);
            ip.alpha.push_back(alpha);
            ip.tangents.push_back(alpha > 0 ? br.tangent() : -br.tangent());
            min_ap = std::min(min_ap, br.aperture);
            inv_sum += 1.0 / br.normal_permeability;
        }
        ip.measure = overrides.measure.value_or(min_ap);
        ip.permeability =
            overrides.permeability.value_or(static_cast<double>(incident[k].size()) / inv_sum);
        out.intersections.push_back(std::move(ip));
    }
    return out;
}

std::size_t MixedDimMesh::num_fracture_cells() const {
    std::size_t n = 0;
    for (const auto &s : fractures) n += s.num_cells();
    return n;
}

std::size_t MixedDimMesh::num_fracture_faces() const {
    std::size_t n = 0;
    for (const auto &s : fractures) n += s.num_faces();
    return n;
}

Index MixedDimMesh::mortar_of(Index f, Index cell) const {
    for (Index m : face_mortars[f]) {
        if (m >= 0 && mortars[m].bulk_cell == cell) {
            return m;
        }
    }
    return -1;
}

MixedDimMesh bulk_only(PolyMesh bulk) {
    MixedDimMesh md;
    md.face_mortars.assign(bulk.num_faces(), {-1, -1});
    md.bulk = std::move(bulk);
    return md;
}

MixedDimMesh build_mixed_mesh(PolyMesh bulk, const SplitNetwork &split,
                              const MixedMeshOptions &opts) {
    MixedDimMesh md;
    md.branches = split.branches;
    md.intersections = split.intersections;
    md.face_mortars.assign(bulk.num_faces(), {-1, -1});
    const double tol = opts.tol_rel * bulk.bounding_box().diameter();

    const bool tagged =
        opts.use_tags && std::any_of(bulk.face_tags().begin(), bulk.face_tags().end(),
                                     [](Index t) { return t >= 0; });

    for (std::size_t b = 0; b < split.branches.size(); ++b) {
        const Branch &br = split.branches[b];
        auto fail = [&](const std::string &what) {
            std::ostringstream os;
            os << "fracture branch " << b << " (fracture " << br.fracture << "): " << what;
            throw MeshError(os.str());
        };
        std::vector<Index> faces;
        for (std::size_t f = 0; f < bulk.num_faces(); ++f) {
            const Face &fc = bulk.face(static_cast<Index>(f));
            bool on;
            if (tagged) {
                on = bulk.face_tag(static_cast<Index>(f)) == static_cast<Index>(b);
            } else {
                on = point_segment_distance(bulk.node(fc.nodes[0]), br.a, br.b) <= tol &&
                     point_segment_distance(bulk.node(fc.nodes[1]), br.a, br.b) <= tol;
            }
            if (on) {
                faces.push_back(static_cast<Index>(f));
            }
        }
        if (faces.empty()) {
            fail("no mesh faces along the branch");
        }
        std::vector<std::pair<double, Index>> order;
        for (Index f : faces) {
            if (bulk.is_boundary(f)) {
                fail("lies on the domain boundary");
            }
            if (md.face_mortars[f][0] >= 0) {
                fail("face shared with another branch");
            }
            order.push_back({segment_parameter(bulk.face(f).midpoint, br.a, br.b), f});
        }
        std::sort(order.begin(), order.end());

        SegmentMesh seg;
        seg.branch = static_cast<Index>(b);
        seg.tangent = br.tangent();
        seg.start_kind = br.start_kind;
        seg.end_kind = br.end_kind;
        seg.start_side = br.start_side;
        seg.end_side = br.end_side;
        seg.start_intersection = br.start_intersection;
        seg.end_intersection = br.end_intersection;

        Index prev = -1;
        std::vector<Index> chain;
        for (auto [t, f] : order) {
            auto nd = bulk.face(f).nodes;
            if (segment_parameter(bulk.node(nd[0]), br.a, br.b) >
                segment_parameter(bulk.node(nd[1]), br.a, br.b)) {
                std::swap(nd[0], nd[1]);
            }
            if (prev < 0) {
                seg.points.push_back(bulk.node(nd[0]));
            } else if (nd[0] != prev) {
                fail("faces do not form a chain");
            }
            seg.points.push_back(bulk.node(nd[1]));
            prev = nd[1];
            chain.push_back(f);
        }
        const double etol = std::max(tol, 1e-9 * br.length());
        if (distance(seg.points.front(), br.a) > etol || distance(seg.points.back(), br.b) > etol) {
            fail("faces do not cover the branch");
        }

        const Vec2 n = br.normal();
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const Index f = chain[k];
            const auto &fc = bulk.face_cells(f);
            // The cell on the + side sees the fracture through an outward normal along -n.
            const bool aligned = dot(bulk.face(f).normal, n) > 0.0;
            const Index plus = aligned ? fc[1] : fc[0];
            const Index minus = aligned ? fc[0] : fc[1];
            const auto base = static_cast<Index>(md.mortars.size());
            md.mortars.push_back({static_cast<Index>(b), static_cast<Index>(k), 1, f, plus,
                                  bulk.face(f).measure});
            md.mortars.push_back({static_cast<Index>(b), static_cast<Index>(k), -1, f, minus,
                                  bulk.face(f).measure});
            md.face_mortars[f] = {base, base + 1};
        }
        md.segment_faces.push_back(std::move(chain));
        md.fractures.push_back(std::move(seg));
    }
    md.bulk = std::move(bulk);
    return md;
}

}  // namespace fracvem
