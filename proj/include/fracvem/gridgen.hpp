#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "fracvem/fracture.hpp"
#include "fracvem/mesh.hpp"

namespace fracvem {

using Segment = std::array<Vec2, 2>;

struct CutParams {
    int nx = 1;
    int ny = 1;
    /// Snapping tolerance relative to the background cell size.
    double snap_tol = 1e-6;
    /// Cells cut by more distinct fractures or constraint lines are rejected.
    int max_fractures_per_cell = 2;
};

/// Cut every cell of `background` by the fracture branches and by the extra constraint
/// lines. Faces lying on branch b carry face tag b. Tips inside a cell are connected to
/// the nodes of the edge hit by the fracture prolongation.
PolyMesh cut_mesh(const PolyMesh &background, const SplitNetwork &split,
                  const std::vector<Segment> &constraints, const CutParams &params);

PolyMesh cut_cartesian(const Rect &domain, const SplitNetwork &split, const CutParams &params,
                       const std::vector<Segment> &constraints = {});

struct VoronoiParams {
    int nx = 1;
    int ny = 1;
    /// Offsets as fractions of the background cell size min(dx, dy).
    double delta = 0.1;
    double delta1 = 0.1;
    double delta2 = 0.15;
    double snap_tol = 1e-6;
};

/// Seeds of the constrained Voronoi diagram (exposed for testing).
std::vector<Vec2> voronoi_seeds(const Rect &domain, const SplitNetwork &split,
                                const VoronoiParams &params);

/// Voronoi diagram of arbitrary seeds clipped to the domain rectangle.
PolyMesh voronoi_diagram(const Rect &domain, const std::vector<Vec2> &seeds);

PolyMesh voronoi_constrained(const Rect &domain, const SplitNetwork &split,
                             const VoronoiParams &params);

enum class CoarsenMode { by_volume, by_strength };

struct CoarsenParams {
    CoarsenMode mode = CoarsenMode::by_volume;
    /// Cells smaller than factor * mean area are merged.
    double volume_factor = 0.5;
    /// Strong connection: T_ij >= threshold * max_k T_ik.
    double strength_threshold = 0.25;
    /// Optional final cell count for strength coarsening (0: plain aggregation only).
    int target_cells = 0;
};

struct Agglomeration {
    PolyMesh mesh;
    std::vector<Index> fine_to_coarse;
    std::vector<std::vector<Index>> coarse_to_fine;
};

/// Build the coarse mesh for a given cell partition. Faces interior to a group are removed,
/// the remaining faces are kept unfused.
Agglomeration agglomerate(const PolyMesh &fine, const std::vector<Index> &group);

Agglomeration agglomerate_by_volume(const PolyMesh &mesh, const CoarsenParams &params);

/// `permeability` holds one positive scalar per cell.
Agglomeration agglomerate_by_strength(const PolyMesh &mesh, const std::vector<double> &permeability,
                                      const CoarsenParams &params);

struct GmshMesh {
    PolyMesh mesh;
    std::map<int, std::string> physical_names;  // (tag -> name), any dimension
    std::vector<int> face_physical;             // physical tag per face, -1 if none
};

/// Read a 2D Gmsh ASCII mesh, format 2.2 or 4.1.
GmshMesh import_gmsh(const std::string &path);
GmshMesh parse_gmsh(const std::string &text);

/// Straight fractures recovered from 1D physical groups whose name starts with `prefix`.
FractureNetwork fractures_from_gmsh(const GmshMesh &gm, const std::string &prefix = "FRACTURE");

}  // namespace fracvem
