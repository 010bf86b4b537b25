#pragma once

#include <optional>
#include <vector>

#include "fracvem/geometry.hpp"
#include "fracvem/mesh.hpp"

namespace fracvem {

/// A straight fracture with its hydraulic data.
struct Fracture {
    Vec2 a;
    Vec2 b;
    double aperture = 1e-4;                // epsilon_gamma
    double tangential_permeability = 1.0;  // K_gamma
    double normal_permeability = 1.0;      // kappa_gamma
};

struct FractureNetwork {
    std::vector<Fracture> fractures;

    bool empty() const { return fractures.empty(); }
    /// Throws ConfigError on non-positive data or coincident endpoints.
    void validate() const;
};

/// Piece of a fracture between two consecutive special points (tips, intersections,
/// boundary contacts).
struct Branch {
    Index fracture = -1;
    Vec2 a;
    Vec2 b;
    double aperture = 0.0;
    double tangential_permeability = 0.0;
    double normal_permeability = 0.0;
    EndKind start_kind = EndKind::tip_noflow;
    EndKind end_kind = EndKind::tip_noflow;
    BoundarySide start_side = BoundarySide::interior;
    BoundarySide end_side = BoundarySide::interior;
    Index start_intersection = -1;
    Index end_intersection = -1;

    double length() const { return distance(a, b); }
    Vec2 tangent() const { return normalized(b - a); }
    /// Unit normal defining the + side of the branch.
    Vec2 normal() const { return left_normal(tangent()); }
};

struct IntersectionPoint {
    Vec2 location;
    std::vector<Index> branches;  // incident branches
    std::vector<int> alpha;       // +1 when the branch starts at this point
    std::vector<Vec2> tangents;   // unit tangents pointing away from the point
    double measure = 0.0;         // epsilon_iota
    double permeability = 0.0;    // kappa_iota
};

struct IntersectionOverrides {
    std::optional<double> measure;
    std::optional<double> permeability;
};

struct SplitNetwork {
    std::vector<Branch> branches;
    std::vector<IntersectionPoint> intersections;
};

/// Split fractures at their mutual intersections (X, T and L contacts). Points closer than
/// tol_rel * domain diameter coincide. Throws MeshError for overlapping collinear fractures.
SplitNetwork split_network(const FractureNetwork &network, const Rect &domain,
                           const IntersectionOverrides &overrides = {}, double tol_rel = 1e-9);

/// One side of a fracture segment, coupling a bulk face to a fracture cell.
struct MortarCell {
    Index branch = -1;
    Index segment = -1;  // fracture cell within the branch
    int side = 1;        // +1: side the branch normal points to
    Index bulk_face = -1;
    Index bulk_cell = -1;
    double measure = 0.0;
};

struct MixedDimMesh {
    PolyMesh bulk;
    std::vector<Branch> branches;
    std::vector<IntersectionPoint> intersections;
    std::vector<SegmentMesh> fractures;              // one per branch
    std::vector<std::vector<Index>> segment_faces;   // bulk face covering each segment
    std::vector<MortarCell> mortars;                 // ordered by branch, segment, (+, -)
    std::vector<std::array<Index, 2>> face_mortars;  // per bulk face: {+, -} mortar ids or -1

    std::size_t num_fracture_cells() const;
    std::size_t num_fracture_faces() const;
    bool is_fracture_face(Index f) const { return face_mortars[f][0] >= 0; }
    /// Mortar cell through which `cell` sees fracture face `f`.
    Index mortar_of(Index f, Index cell) const;
};

struct MixedMeshOptions {
    /// Geometric tolerance relative to the domain diameter.
    double tol_rel = 1e-6;
    /// Use generator face tags (branch ids) when present.
    bool use_tags = true;
};

/// Assemble the mixed-dimensional bundle. Every branch must be tiled by bulk faces;
/// throws MeshError otherwise.
MixedDimMesh build_mixed_mesh(PolyMesh bulk, const SplitNetwork &split,
                              const MixedMeshOptions &opts = {});

/// Mixed-dimensional bundle with no fractures (pure bulk problem).
MixedDimMesh bulk_only(PolyMesh bulk);

}  // namespace fracvem
