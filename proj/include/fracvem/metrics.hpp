#pragma once

#include <string>
#include <vector>

#include "fracvem/fracture.hpp"
#include "fracvem/mesh.hpp"

namespace fracvem {

enum class MeanKind { arithmetic, harmonic };

/// Volume-weighted mean of positive values.
double upscale_permeability(const std::vector<double> &values, const std::vector<double> &weights,
                            MeanKind kind);

/// Coarse permeability per group of fine cells (weights are fine cell areas).
std::vector<double> upscale_field(const PolyMesh &fine, const std::vector<double> &k,
                                  const std::vector<std::vector<Index>> &coarse_to_fine, MeanKind kind);

/// ||P p_coarse - p_ref|| / ||p_ref|| with area-weighted cell sums on the fine mesh;
/// fine_to_coarse maps each reference cell to the coarse cell covering it.
double relative_l2_error(const std::vector<double> &p_coarse, const std::vector<double> &p_ref,
                         const std::vector<Index> &fine_to_coarse, const std::vector<double> &fine_area);

/// Cells of a method mesh described as unions of simple polygons (agglomerates are listed
/// through their fine cells).
struct CellPieces {
    std::vector<std::vector<std::vector<Vec2>>> pieces;  // per cell, list of polygons
};

CellPieces cell_pieces(const PolyMesh &mesh);
CellPieces cell_pieces(const PolyMesh &fine, const std::vector<std::vector<Index>> &coarse_to_fine);

struct OverlapError {
    double error = 0.0;
    double overlap_area = 0.0;  // sum of |K_m cap K_ref|
    double domain_area = 0.0;
    double reference_range = 0.0;
};

/// Pressure error of a method solution against a reference on another grid, summed over
/// the pairwise cell overlaps and normalized by the domain area and the reference range.
OverlapError benchmark_error(const CellPieces &method, const std::vector<double> &p_method,
                             const PolyMesh &reference, const std::vector<double> &p_ref);

/// Triangulation of a simple polygon (ear clipping); orientation of the input is free.
std::vector<std::array<Vec2, 3>> triangulate_polygon(std::vector<Vec2> poly);

struct LineSample {
    Vec2 p0;
    Vec2 p1;
    std::vector<double> param;
    std::vector<Vec2> points;
    std::vector<double> pressure;
    std::vector<Index> cell;
};

/// n samples at the midpoints of n equal sub-intervals of p0-p1. A sample on a cell edge
/// takes the value of the adjacent cell with the smallest id.
LineSample sample_over_line(const PolyMesh &mesh, const std::vector<double> &pressure, const Vec2 &p0,
                            const Vec2 &p1, int n);

/// "param,x,y,p" CSV.
void write_line_csv(const std::string &path, const LineSample &s);

struct VtkField {
    std::string name;
    std::vector<double> values;
};

struct VtkInput {
    const PolyMesh *mesh = nullptr;
    std::vector<VtkField> cell_fields;
    /// Optional bulk face flux densities (along face normals); exported as the cell
    /// velocity of the projected constant field.
    std::vector<double> face_flux;
    const std::vector<SegmentMesh> *fractures = nullptr;
    /// Per fracture segment, concatenated over branches.
    std::vector<VtkField> fracture_fields;
};

/// Legacy ASCII unstructured grid: polygons for bulk cells, 2-point polylines for fracture
/// segments. Fields are written for every cell (0 where a field does not apply).
void export_vtk(const std::string &path, const VtkInput &in);
std::string vtk_string(const VtkInput &in);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin.
Histogram histogram(const std::vector<double> &values, int bins);

}  // namespace fracvem
