#pragma once

#include <array>
#include <span>
#include <vector>

#include "fracvem/geometry.hpp"

namespace fracvem {

enum class BoundarySide { interior, left, right, bottom, top, other };

const char *to_string(BoundarySide side);

struct Face {
    std::array<Index, 2> nodes{};
    Vec2 normal;    // unit; outward from the domain on boundary faces
    double measure = 0.0;
    Vec2 midpoint;
    BoundarySide side = BoundarySide::interior;
};

struct Cell {
    std::vector<Index> faces;
    std::vector<int> signs;  // +1 iff the face normal points out of the cell
    Vec2 centroid;
    double area = 0.0;
    double diameter = 0.0;

    std::size_t num_faces() const { return faces.size(); }
};

/// Raw connectivity handed to build_poly_mesh.
struct MeshData {
    std::vector<Vec2> nodes;
    std::vector<std::array<Index, 2>> faces;
    std::vector<std::vector<Index>> cells;
    /// Optional per-cell orientation signs; deduced from the boundary loops when empty.
    std::vector<std::vector<int>> signs;
    /// Optional per-face fracture tag (branch id, -1 for ordinary faces).
    std::vector<Index> face_tags;
};

/// Two-dimensional polygonal mesh with signed cell-face incidence. Immutable after build.
class PolyMesh {
public:
    PolyMesh() = default;

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_cells() const { return cells_.size(); }

    const std::vector<Vec2> &nodes() const { return nodes_; }
    const std::vector<Face> &faces() const { return faces_; }
    const std::vector<Cell> &cells() const { return cells_; }
    const Vec2 &node(Index i) const { return nodes_[i]; }
    const Face &face(Index i) const { return faces_[i]; }
    const Cell &cell(Index i) const { return cells_[i]; }

    /// [0]: cell for which the face normal is outward, [1]: the other cell or -1.
    const std::array<Index, 2> &face_cells(Index f) const { return face_cells_[f]; }
    bool is_boundary(Index f) const { return face_cells_[f][1] < 0; }
    /// Fracture tag of a face, -1 when the face is not on a fracture.
    Index face_tag(Index f) const { return face_tags_[f]; }
    const std::vector<Index> &face_tags() const { return face_tags_; }

    Rect bounding_box() const { return bbox_; }
    double total_area() const;

    /// Node loops bounding the cell, each oriented so the cell lies to its left.
    std::vector<std::vector<Index>> cell_loops(Index c) const;
    /// Outer boundary loop as coordinates (the loop with the largest area).
    std::vector<Vec2> cell_polygon(Index c) const;
    /// Node ids of the outer loop, in order.
    std::vector<Index> cell_nodes(Index c) const;

    /// Copy of the connectivity, suitable for feeding back into build_poly_mesh.
    MeshData to_data() const;

private:
    friend PolyMesh build_poly_mesh(MeshData data);

    std::vector<Vec2> nodes_;
    std::vector<Face> faces_;
    std::vector<Cell> cells_;
    std::vector<std::array<Index, 2>> face_cells_;
    std::vector<Index> face_tags_;
    Rect bbox_;
};

/// Validate connectivity and compute all derived geometry. Throws MeshError on
/// non-manifold faces, open cell boundaries, zero-area cells or inconsistent orientation.
PolyMesh build_poly_mesh(MeshData data);

PolyMesh cartesian_mesh(int nx, int ny, const Rect &domain);

/// Diameter over the diameter of an equal-area square (equilateral triangle for 3-face
/// cells): 1 for squares and equilateral triangles.
double aspect_ratio(const PolyMesh &mesh, Index cell);

struct Stat {
    double min = 0.0;
    double avg = 0.0;
    double max = 0.0;
};

struct QualityReport {
    std::vector<double> aspect;
    std::vector<double> area;
    std::vector<int> n_faces;
    Stat aspect_stat;
    Stat area_stat;
    Stat faces_stat;
};

QualityReport quality_stats(const PolyMesh &mesh);

enum class EndKind { tip_noflow, boundary, intersection };

/// One-dimensional grid of a fracture branch: ordered vertices, segments between them.
struct SegmentMesh {
    Index branch = -1;
    std::vector<Vec2> points;
    Vec2 tangent;  // unit, from points.front() to points.back()
    EndKind start_kind = EndKind::tip_noflow;
    EndKind end_kind = EndKind::tip_noflow;
    BoundarySide start_side = BoundarySide::interior;
    BoundarySide end_side = BoundarySide::interior;
    Index start_intersection = -1;
    Index end_intersection = -1;

    std::size_t num_cells() const { return points.size() - 1; }
    std::size_t num_faces() const { return points.size(); }
    double cell_length(std::size_t i) const { return distance(points[i], points[i + 1]); }
    Vec2 cell_center(std::size_t i) const { return 0.5 * (points[i] + points[i + 1]); }
    double length() const { return distance(points.front(), points.back()); }
};

}  // namespace fracvem
