#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fracvem/errors.hpp"
#include "fracvem/gridgen.hpp"
#include "fracvem/local.hpp"

namespace fracvem {

namespace {

bool is_fracture_face(const PolyMesh &m, Index f) { return m.face_tag(f) >= 0; }

// Union-find over cells that refuses to join groups separated by a fracture face.
class Groups {
public:
    explicit Groups(const PolyMesh &mesh) : mesh_(mesh), parent_(mesh.num_cells()) {
        std::iota(parent_.begin(), parent_.end(), 0);
        members_.resize(mesh.num_cells());
        area_.resize(mesh.num_cells());
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            members_[c] = {static_cast<Index>(c)};
            area_[c] = mesh.cell(static_cast<Index>(c)).area;
        }
        for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
            if (is_fracture_face(mesh, static_cast<Index>(f)) && !mesh.is_boundary(static_cast<Index>(f))) {
                const auto &fc = mesh.face_cells(static_cast<Index>(f));
                barrier_.push_back({fc[0], fc[1]});
            }
        }
        cell_barriers_.resize(mesh.num_cells());
        for (std::size_t k = 0; k < barrier_.size(); ++k) {
            cell_barriers_[barrier_[k][0]].push_back(barrier_[k][1]);
            cell_barriers_[barrier_[k][1]].push_back(barrier_[k][0]);
        }
    }

    Index find(Index c) {
        while (parent_[c] != c) {
            parent_[c] = parent_[parent_[c]];
            c = parent_[c];
        }
        return c;
    }

    bool admissible(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        const auto &small = members_[a].size() < members_[b].size() ? members_[a] : members_[b];
        const Index other = members_[a].size() < members_[b].size() ? b : a;
        for (Index c : small) {
            for (Index o : cell_barriers_[c]) {
                if (find(o) == other) return false;
            }
        }
        return true;
    }

    bool merge(Index a, Index b) {
        if (!admissible(a, b)) return false;
        a = find(a);
        b = find(b);
        // Keep the smaller root id for determinism.
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
        members_[b].clear();
        area_[a] += area_[b];
        return true;
    }

    double area(Index c) { return area_[find(c)]; }
    std::size_t size(Index c) { return members_[find(c)].size(); }
    const std::vector<Index> &members(Index c) { return members_[find(c)]; }

    std::vector<Index> labels() {
        std::vector<Index> out(parent_.size());
        std::map<Index, Index> id;
        for (std::size_t c = 0; c < parent_.size(); ++c) {
            const Index r = find(static_cast<Index>(c));
            auto it = id.find(r);
            if (it == id.end()) it = id.emplace(r, static_cast<Index>(id.size())).first;
            out[c] = it->second;
        }
        return out;
    }

private:
    const PolyMesh &mesh_;
    std::vector<Index> parent_;
    std::vector<std::vector<Index>> members_;
    std::vector<double> area_;
    std::vector<std::array<Index, 2>> barrier_;
    std::vector<std::vector<Index>> cell_barriers_;
};

}  // namespace

Agglomeration agglomerate(const PolyMesh &fine, const std::vector<Index> &group) {
    if (group.size() != fine.num_cells()) {
        throw MeshError("partition size does not match the mesh");
    }
    const Index ng = group.empty() ? 0 : *std::max_element(group.begin(), group.end()) + 1;
    Agglomeration out;
    out.fine_to_coarse = group;
    out.coarse_to_fine.resize(ng);
    for (std::size_t c = 0; c < group.size(); ++c) {
        if (group[c] < 0) throw MeshError("negative group id");
        out.coarse_to_fine[group[c]].push_back(static_cast<Index>(c));
    }

    MeshData md;
    std::vector<Index> node_map(fine.num_nodes(), -1);
    std::vector<Index> face_map(fine.num_faces(), -1);
    md.cells.resize(ng);
    md.signs.resize(ng);
    for (Index g = 0; g < ng; ++g) {
        if (out.coarse_to_fine[g].empty()) throw MeshError("empty group in partition");
        for (Index c : out.coarse_to_fine[g]) {
            const Cell &cell = fine.cell(c);
            for (std::size_t k = 0; k < cell.faces.size(); ++k) {
                const Index f = cell.faces[k];
                const auto &fc = fine.face_cells(f);
                const Index other = fc[0] == c ? fc[1] : fc[0];
                if (other >= 0 && group[other] == g) continue;
                if (face_map[f] < 0) {
                    std::array<Index, 2> nd = fine.face(f).nodes;
                    for (Index &n : nd) {
                        if (node_map[n] < 0) {
                            node_map[n] = static_cast<Index>(md.nodes.size());
                            md.nodes.push_back(fine.node(n));
                        }
                        n = node_map[n];
                    }
                    face_map[f] = static_cast<Index>(md.faces.size());
                    md.faces.push_back(nd);
                    md.face_tags.push_back(fine.face_tag(f));
                }
                md.cells[g].push_back(face_map[f]);
                md.signs[g].push_back(cell.signs[k]);
            }
        }
    }
    out.mesh = build_poly_mesh(std::move(md));
    return out;
}

Agglomeration agglomerate_by_volume(const PolyMesh &mesh, const CoarsenParams &params) {
    if (!(params.volume_factor > 0.0) || params.volume_factor > 1.0) {
        throw ConfigError("volume factor must lie in (0, 1]");
    }
    const double mean = mesh.total_area() / static_cast<double>(mesh.num_cells());
    const double threshold = params.volume_factor * mean;
    Groups groups(mesh);

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<double, Index>> small;
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const Index r = groups.find(static_cast<Index>(c));
            if (r == static_cast<Index>(c) && groups.area(r) < threshold) {
                small.push_back({groups.area(r), r});
            }
        }
        std::sort(small.begin(), small.end());
        for (auto [a, r] : small) {
            if (groups.find(r) != r || groups.area(r) >= threshold) continue;
            // Neighbour group sharing the longest non-fracture boundary.
            std::map<Index, double> shared;
            for (Index c : groups.members(r)) {
                for (Index f : mesh.cell(c).faces) {
                    if (is_fracture_face(mesh, f) || mesh.is_boundary(f)) continue;
                    const auto &fc = mesh.face_cells(f);
                    const Index o = groups.find(fc[0] == c ? fc[1] : fc[0]);
                    if (o != r) shared[o] += mesh.face(f).measure;
                }
            }
            Index best = -1;
            double best_len = -1.0;
            for (auto [o, len] : shared) {
                if (len > best_len * (1.0 + 1e-12) && groups.admissible(r, o)) {
                    best = o;
                    best_len = len;
                }
            }
            if (best >= 0 && groups.merge(r, best)) changed = true;
        }
    }
    return agglomerate(mesh, groups.labels());
}

Agglomeration agglomerate_by_strength(const PolyMesh &mesh, const std::vector<double> &permeability,
                                      const CoarsenParams &params) {
    if (permeability.size() != mesh.num_cells()) {
        throw ConfigError("permeability field size does not match the mesh");
    }
    for (double k : permeability) {
        if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("non-positive permeability");
    }
    if (!(params.strength_threshold > 0.0) || params.strength_threshold >= 1.0) {
        throw ConfigError("strength threshold must lie in (0, 1)");
    }
    const std::size_t n = mesh.num_cells();

    // Cell graph weighted by TPFA transmissibility over non-fracture interior faces.
    // contrast[i][j] = T_ij / (T_ij at K = 1 times sqrt(K_i K_j)), 1 for equal K.
    std::vector<std::map<Index, double>> trans(n), contrast(n);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto fi = static_cast<Index>(f);
        if (mesh.is_boundary(fi) || is_fracture_face(mesh, fi)) continue;
        const auto &fc = mesh.face_cells(fi);
        const double ki = permeability[fc[0]], kj = permeability[fc[1]];
        const double t = tpfa_transmissibility(mesh, fi, ki, kj);
        const double g = tpfa_transmissibility(mesh, fi, 1.0, 1.0) * std::sqrt(ki * kj);
        trans[fc[0]][fc[1]] += t;
        trans[fc[1]][fc[0]] += t;
        contrast[fc[0]][fc[1]] = t / g;
        contrast[fc[1]][fc[0]] = t / g;
    }
    // Strong: large against the row maximum, and no large jump in K across the face.
    // The second test is what keeps an isolated pair with a big contrast apart.
    std::vector<std::vector<Index>> strong(n);
    for (std::size_t i = 0; i < n; ++i) {
        double tmax = 0.0;
        for (auto [j, t] : trans[i]) tmax = std::max(tmax, t);
        for (auto [j, t] : trans[i]) {
            if (t >= params.strength_threshold * tmax && contrast[i][j] >= params.strength_threshold) {
                strong[i].push_back(j);
            }
        }
    }
    auto strongly = [&](Index i, Index j) {
        return std::find(strong[i].begin(), strong[i].end(), j) != strong[i].end() ||
               std::find(strong[j].begin(), strong[j].end(), i) != strong[j].end();
    };

    Groups groups(mesh);
    std::vector<char> taken(n, 0);
    // Pass 1: roots whose strong neighbourhood is still free.
    for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        bool free = true;
        for (Index j : strong[i]) free = free && !taken[j];
        if (!free) continue;
        taken[i] = 1;
        for (Index j : strong[i]) {
            if (groups.merge(static_cast<Index>(i), j)) taken[j] = 1;
        }
    }
    // Pass 2: attach leftovers to the strongest neighbouring aggregate.
    for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        Index best = -1;
        double bt = -1.0;
        for (auto [j, t] : trans[i]) {
            if (taken[j] && strongly(static_cast<Index>(i), j) && t > bt &&
                groups.admissible(static_cast<Index>(i), j)) {
                best = j;
                bt = t;
            }
        }
        if (best >= 0) {
            groups.merge(static_cast<Index>(i), best);
            taken[i] = 1;
        }
    }
    // Pass 3: remaining cells form aggregates with their free strong neighbours.
    for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        taken[i] = 1;
        for (Index j : strong[i]) {
            if (!taken[j] && groups.merge(static_cast<Index>(i), j)) taken[j] = 1;
        }
    }

    // Optional reduction to a target count: merge the smallest aggregates into the
    // neighbour aggregate they are most strongly connected to.
    if (params.target_cells > 0) {
        auto count = [&]() {
            std::size_t k = 0;
            for (std::size_t c = 0; c < n; ++c) k += groups.find(static_cast<Index>(c)) == static_cast<Index>(c);
            return k;
        };
        std::size_t current = count();
        while (current > static_cast<std::size_t>(params.target_cells)) {
            std::map<Index, std::map<Index, double>> coupling;
            for (std::size_t i = 0; i < n; ++i) {
                const Index ri = groups.find(static_cast<Index>(i));
                for (auto [j, t] : trans[i]) {
                    const Index rj = groups.find(j);
                    if (ri != rj) coupling[ri][rj] += t;
                }
            }
            std::vector<std::pair<std::size_t, Index>> order;
            for (auto &[r, nb] : coupling) order.push_back({groups.size(r), r});
            std::sort(order.begin(), order.end());
            const std::size_t excess = current - static_cast<std::size_t>(params.target_cells);
            // Merge at most half of the excess per sweep so sizes stay balanced.
            const std::size_t budget = std::max<std::size_t>(1, (excess + 1) / 2);
            std::size_t merged = 0;
            std::set<Index> touched;
            for (auto [sz, r] : order) {
                if (merged >= budget) break;
                if (touched.count(r)) continue;
                Index best = -1;
                double bt = -1.0;
                for (auto [o, t] : coupling[r]) {
                    if (touched.count(o)) continue;
                    const double w = t / static_cast<double>(groups.size(o));
                    if (w > bt && groups.admissible(r, o)) {
                        best = o;
                        bt = w;
                    }
                }
                if (best < 0) continue;
                touched.insert(r);
                touched.insert(best);
                groups.merge(r, best);
                ++merged;
            }
            if (merged == 0) break;
            current -= merged;
        }
    }
    return agglomerate(mesh, groups.labels());
}

}  // namespace fracvem
