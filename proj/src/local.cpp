#include "fracvem/local.hpp"

#include <cmath>
#include <sstream>

#include "fracvem/errors.hpp"

namespace fracvem {

PermeabilityField isotropic_field(const std::vector<double> &k) {
    PermeabilityField out;
    out.reserve(k.size());
    for (double v : k) out.push_back(v * Mat2::Identity());
    return out;
}

PermeabilityField uniform_field(std::size_t n, const Mat2 &k) { return PermeabilityField(n, k); }

void check_permeability(const Mat2 &k) {
    const double scale = k.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !k.allFinite()) {
        throw NumericError("permeability tensor is zero or non-finite");
    }
    if (std::abs(k(0, 1) - k(1, 0)) > 1e-14 * scale) {
        throw NumericError("permeability tensor is not symmetric");
    }
    if (!(k(0, 0) > 0.0) || !(k.determinant() > 0.0)) {
        throw NumericError("permeability tensor is not positive definite");
    }
}

namespace {

// Rows sigma_j |e_j| (x_j - x_C): the integral of each basis function over the cell.
Eigen::MatrixXd moments(const PolyMesh &mesh, Index cell) {
    const Cell &c = mesh.cell(cell);
    const auto n = static_cast<Eigen::Index>(c.faces.size());
    Eigen::MatrixXd r(n, 2);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Face &f = mesh.face(c.faces[j]);
        const Vec2 d = (f.midpoint - c.centroid) * (c.signs[j] * f.measure);
        r(j, 0) = d.x;
        r(j, 1) = d.y;
    }
    return r;
}

Eigen::MatrixXd normals(const PolyMesh &mesh, Index cell) {
    const Cell &c = mesh.cell(cell);
    const auto n = static_cast<Eigen::Index>(c.faces.size());
    Eigen::MatrixXd nn(n, 2);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Face &f = mesh.face(c.faces[j]);
        nn(j, 0) = f.normal.x;
        nn(j, 1) = f.normal.y;
    }
    return nn;
}

double spectral_norm(const Mat2 &h) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd local_projection(const PolyMesh &mesh, Index cell) {
    const Cell &c = mesh.cell(cell);
    if (!(c.area > 0.0)) {
        throw NumericError("degenerate cell " + std::to_string(cell));
    }
    return normals(mesh, cell) * moments(mesh, cell).transpose() / c.area;
}

Eigen::MatrixXd local_consistency(const PolyMesh &mesh, Index cell, const Mat2 &k) {
    check_permeability(k);
    const Eigen::MatrixXd r = moments(mesh, cell);
    const Mat2 h = k.inverse();
    return r * h * r.transpose() / mesh.cell(cell).area;
}

Eigen::MatrixXd local_stabilization(const PolyMesh &mesh, Index cell, const Mat2 &k) {
    check_permeability(k);
    const Cell &c = mesh.cell(cell);
    const auto n = static_cast<Eigen::Index>(c.faces.size());
    const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n) - local_projection(mesh, cell);
    // Dof-wise sum taken on total face fluxes so that S scales like the consistency term.
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = mesh.face(c.faces[j]).measure;
    const Eigen::MatrixXd dt = w.asDiagonal() * t;
    const Eigen::MatrixXd s = spectral_norm(k.inverse()) * dt.transpose() * dt;
    return 0.5 * (s + s.transpose());
}

Eigen::RowVectorXd local_divergence(const PolyMesh &mesh, Index cell) {
    const Cell &c = mesh.cell(cell);
    Eigen::RowVectorXd b(static_cast<Eigen::Index>(c.faces.size()));
    for (std::size_t j = 0; j < c.faces.size(); ++j) {
        b(static_cast<Eigen::Index>(j)) = -c.signs[j] * mesh.face(c.faces[j]).measure;
    }
    return b;
}

LocalMatrices local_matrices(const PolyMesh &mesh, Index cell, const Mat2 &k) {
    check_permeability(k);
    const Cell &c = mesh.cell(cell);
    const auto n = static_cast<Eigen::Index>(c.faces.size());
    LocalMatrices m;
    const Eigen::MatrixXd r = moments(mesh, cell);
    const Mat2 h = k.inverse();
    m.proj = normals(mesh, cell) * r.transpose() / c.area;
    m.cons = r * h * r.transpose() / c.area;
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = mesh.face(c.faces[j]).measure;
    const Eigen::MatrixXd dt = w.asDiagonal() * (Eigen::MatrixXd::Identity(n, n) - m.proj);
    const Eigen::MatrixXd s = spectral_norm(h) * dt.transpose() * dt;
    m.stab = 0.5 * (s + s.transpose());
    m.div = local_divergence(mesh, cell);
    return m;
}

LocalMatrices fracture_local_matrices(double h, double aperture, double kt) {
    if (!(h > 0.0) || !(aperture > 0.0) || !(kt > 0.0)) {
        throw NumericError("invalid fracture segment data");
    }
    LocalMatrices m;
    // Dofs: tangential flux at the start and end points; constants project to the mean.
    m.proj = Eigen::MatrixXd::Constant(2, 2, 0.5);
    const double hg = 1.0 / (aperture * kt);
    m.cons = Eigen::MatrixXd::Constant(2, 2, hg * h / 4.0);
    const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2) - m.proj;
    m.stab = h * (1.0 / kt) * t.transpose() * t;
    m.div.resize(2);
    m.div << 1.0, -1.0;
    return m;
}

double stabilization_index(const Eigen::MatrixXd &stab, const Eigen::MatrixXd &full) {
    const double s = stab.norm();
    const double a = full.norm();
    if (s + a == 0.0) {
        throw NumericError("stabilization index undefined for zero matrices");
    }
    return s / (s + a);
}

double stabilization_index(const LocalMatrices &m) { return stabilization_index(m.stab, m.full()); }

double stabilization_index(const PolyMesh &mesh, Index cell, const LocalMatrices &m) {
    const Cell &c = mesh.cell(cell);
    if (static_cast<Index>(c.num_faces()) != m.stab.rows()) {
        throw NumericError("stabilization index: matrix size does not match the cell");
    }
    Eigen::VectorXd w(c.num_faces());
    for (std::size_t j = 0; j < c.num_faces(); ++j) w(j) = 1.0 / mesh.face(c.faces[j]).measure;
    return stabilization_index(w.asDiagonal() * m.stab * w.asDiagonal(), w.asDiagonal() * m.full() * w.asDiagonal());
}

std::vector<LocalMatrices> all_local_matrices(const PolyMesh &mesh, const PermeabilityField &k,
                                              Exec exec) {
    const auto n = static_cast<long>(mesh.num_cells());
    if (k.size() != mesh.num_cells()) {
        throw NumericError("permeability field size does not match the mesh");
    }
    std::vector<LocalMatrices> out(mesh.num_cells());
    if (exec == Exec::serial) {
        for (long c = 0; c < n; ++c) {
            out[c] = local_matrices(mesh, static_cast<Index>(c), k[c]);
        }
        return out;
    }
    // Exceptions may not escape an OpenMP region: record the first failure instead.
    std::string error;
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) {
        try {
            out[c] = local_matrices(mesh, static_cast<Index>(c), k[c]);
        } catch (const std::exception &e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) {
        throw NumericError(error);
    }
    return out;
}

double tpfa_local(double k_left, double k_right, double measure, double d_left, double d_right) {
    if (!(d_left > 0.0) || !(d_right > 0.0)) {
        throw NumericError("TPFA: zero center-to-face distance");
    }
    const double tl = k_left * measure / d_left;
    const double tr = k_right * measure / d_right;
    if (tl == 0.0 || tr == 0.0) return 0.0;
    return tl * tr / (tl + tr);
}

double tpfa_half(const PolyMesh &mesh, Index face, Index cell, double k) {
    const Face &f = mesh.face(face);
    const Vec2 d = f.midpoint - mesh.cell(cell).centroid;
    const double dn = std::abs(dot(d, f.normal));
    if (!(dn > 0.0)) {
        throw NumericError("TPFA: zero center-to-face distance");
    }
    return k * f.measure / dn;
}

double tpfa_transmissibility(const PolyMesh &mesh, Index face, double k_left, double k_right) {
    const auto &fc = mesh.face_cells(face);
    const double tl = tpfa_half(mesh, face, fc[0], k_left);
    const double tr = tpfa_half(mesh, face, fc[1], k_right);
    return tl * tr / (tl + tr);
}

}  // namespace fracvem
