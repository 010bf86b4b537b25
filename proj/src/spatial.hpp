#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fracvem/geometry.hpp"

namespace fracvem::detail {

/// Point set with tolerance-based deduplication on a uniform bucket grid.
class PointRegistry {
public:
    PointRegistry(double bucket, double tol) : bucket_(bucket), tol_(tol) {}

    const std::vector<Vec2> &points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }

    /// Id of an existing point within tol of p (closest one), or -1.
    Index find(const Vec2 &p) const {
        const auto [i, j] = key(p);
        Index best = -1;
        double bd = tol_;
        for (std::int64_t di = -1; di <= 1; ++di) {
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                auto it = grid_.find(hash(i + di, j + dj));
                if (it == grid_.end()) continue;
                for (Index id : it->second) {
                    const double d = distance(pts_[id], p);
                    if (d <= bd) {
                        bd = d;
                        best = id;
                    }
                }
            }
        }
        return best;
    }

    Index insert(const Vec2 &p) {
        if (const Index id = find(p); id >= 0) {
            return id;
        }
        return push(p);
    }

    /// Add without deduplication.
    Index push(const Vec2 &p) {
        const auto id = static_cast<Index>(pts_.size());
        pts_.push_back(p);
        const auto [i, j] = key(p);
        grid_[hash(i, j)].push_back(id);
        return id;
    }

    /// Ids of points inside the axis-aligned box [lo, hi] grown by tol.
    std::vector<Index> in_box(Vec2 lo, Vec2 hi) const {
        std::vector<Index> out;
        const auto [i0, j0] = key({lo.x - tol_, lo.y - tol_});
        const auto [i1, j1] = key({hi.x + tol_, hi.y + tol_});
        for (std::int64_t i = i0; i <= i1; ++i) {
            for (std::int64_t j = j0; j <= j1; ++j) {
                auto it = grid_.find(hash(i, j));
                if (it == grid_.end()) continue;
                for (Index id : it->second) {
                    const Vec2 &q = pts_[id];
                    if (q.x >= lo.x - tol_ && q.x <= hi.x + tol_ && q.y >= lo.y - tol_ &&
                        q.y <= hi.y + tol_) {
                        out.push_back(id);
                    }
                }
            }
        }
        return out;
    }

private:
    std::pair<std::int64_t, std::int64_t> key(const Vec2 &p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / bucket_)),
                static_cast<std::int64_t>(std::floor(p.y / bucket_))};
    }
    static std::uint64_t hash(std::int64_t i, std::int64_t j) {
        return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffff);
    }

    double bucket_;
    double tol_;
    std::vector<Vec2> pts_;
    std::unordered_map<std::uint64_t, std::vector<Index>> grid_;
};

}  // namespace fracvem::detail
