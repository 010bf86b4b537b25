#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracvem/mesh.hpp"

namespace fracvem::detail {

/// Uniform-grid index of cell bounding boxes for point location.
class CellLocator {
public:
    explicit CellLocator(const PolyMesh &mesh) : mesh_(mesh) {
        box_ = mesh.bounding_box();
        const double n = std::max<double>(1.0, static_cast<double>(mesh.num_cells()));
        const double side = std::sqrt(box_.area() / n);
        nx_ = std::clamp(static_cast<int>(box_.width() / side), 1, 4096);
        ny_ = std::clamp(static_cast<int>(box_.height() / side), 1, 4096);
        buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
        polys_.resize(mesh.num_cells());
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            polys_[c] = mesh.cell_polygon(static_cast<Index>(c));
            Vec2 lo = polys_[c][0];
            Vec2 hi = lo;
            for (const Vec2 &p : polys_[c]) {
                lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
                hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
            }
            const auto [i0, j0] = bucket(lo);
            const auto [i1, j1] = bucket(hi);
            for (int i = i0; i <= i1; ++i) {
                for (int j = j0; j <= j1; ++j) {
                    buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<Index>(c));
                }
            }
        }
    }

    /// Cells whose outer loop contains p (strictly, by the even-odd rule), in increasing id.
    std::vector<Index> locate_all(const Vec2 &p) const {
        std::vector<Index> out;
        const auto [i, j] = bucket(p);
        for (Index c : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
            if (point_in_polygon(p, polys_[c])) {
                out.push_back(c);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    Index locate(const Vec2 &p) const {
        const auto all = locate_all(p);
        return all.empty() ? -1 : all.front();
    }

    /// Candidate cells whose bucket contains p (no containment test).
    const std::vector<Index> &candidates(const Vec2 &p) const {
        const auto [i, j] = bucket(p);
        return buckets_[static_cast<std::size_t>(j) * nx_ + i];
    }

    const std::vector<Vec2> &polygon(Index c) const { return polys_[c]; }

private:
    std::pair<int, int> bucket(const Vec2 &p) const {
        const int i = static_cast<int>(std::floor((p.x - box_.xmin) / box_.width() * nx_));
        const int j = static_cast<int>(std::floor((p.y - box_.ymin) / box_.height() * ny_));
        return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
    }

    const PolyMesh &mesh_;
    Rect box_;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<Index>> buckets_;
    std::vector<std::vector<Vec2>> polys_;
};

}  // namespace fracvem::detail
