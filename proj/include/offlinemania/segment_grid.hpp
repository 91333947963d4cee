#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "offlinemania/geometry.hpp"

namespace omania {

/// Uniform grid bucketing line segments by their (slightly padded) bounding
/// boxes. Immutable after construction; all queries are const and
/// thread-safe.
class SegmentGrid {
public:
    SegmentGrid() = default;
    SegmentGrid(std::vector<Segment> segments, double cell_size);

    std::span<const Segment> segments() const { return segments_; }
    double cell_size() const { return cell_; }

    /// Nearest-segment search in expanding rings of cells around `p`.
    /// `consider(index)` must fold segment `index` into the caller's running
    /// best and return the best distance so far. The search stops once no
    /// unvisited cell can hold anything strictly closer.
    template <class Consider>
    void nearest(Vec2 p, Consider&& consider) const;

    /// Calls `visit(index)` for every segment registered in a cell that
    /// overlaps the axis-aligned box around the disc (p, radius). A segment
    /// may be visited more than once.
    template <class Visit>
    void around(Vec2 p, double radius, Visit&& visit) const;

    /// Walks the cells pierced by the ray `origin + t * dir` (dir unit
    /// length) for t in [0, max_t] and returns the smallest hit distance,
    /// or +inf when nothing is hit within max_t.
    double raycast(Vec2 origin, Vec2 dir, double max_t) const;

private:
    std::span<const std::uint32_t> cell(int ix, int iy) const {
        const std::size_t c = static_cast<std::size_t>(iy) * nx_ + ix;
        return {indices_.data() + starts_[c], indices_.data() + starts_[c + 1]};
    }
    int cell_x(double x) const { return static_cast<int>(std::floor((x - origin_.x) / cell_)); }
    int cell_y(double y) const { return static_cast<int>(std::floor((y - origin_.y) / cell_)); }

    std::vector<Segment> segments_;
    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<std::uint32_t> starts_;
    std::vector<std::uint32_t> indices_;
};

template <class Consider>
void SegmentGrid::nearest(Vec2 p, Consider&& consider) const {
    if (nx_ == 0) return;
    const int qx = cell_x(p.x);
    const int qy = cell_y(p.y);
    const int r_max = std::max({std::abs(qx), std::abs(qx - (nx_ - 1)), std::abs(qy), std::abs(qy - (ny_ - 1))});
    double best = std::numeric_limits<double>::infinity();
    auto visit_cell = [&](int ix, int iy) {
        for (std::uint32_t idx : cell(ix, iy)) best = consider(idx);
    };
    for (int r = 0; r <= r_max; ++r) {
        const int y0 = std::max(qy - r, 0);
        const int y1 = std::min(qy + r, ny_ - 1);
        for (int iy = y0; iy <= y1; ++iy) {
            if (iy == qy - r || iy == qy + r) {
                const int x0 = std::max(qx - r, 0);
                const int x1 = std::min(qx + r, nx_ - 1);
                for (int ix = x0; ix <= x1; ++ix) visit_cell(ix, iy);
            } else {
                if (qx - r >= 0 && qx - r < nx_) visit_cell(qx - r, iy);
                if (r > 0 && qx + r >= 0 && qx + r < nx_) visit_cell(qx + r, iy);
            }
        }
        // cells in ring r + 1 are at least r * cell away from p
        if (best < r * cell_) return;
    }
}

template <class Visit>
void SegmentGrid::around(Vec2 p, double radius, Visit&& visit) const {
    const int x0 = std::max(cell_x(p.x - radius), 0);
    const int x1 = std::min(cell_x(p.x + radius), nx_ - 1);
    const int y0 = std::max(cell_y(p.y - radius), 0);
    const int y1 = std::min(cell_y(p.y + radius), ny_ - 1);
    for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix)
            for (std::uint32_t idx : cell(ix, iy)) visit(idx);
}

}  // namespace omania
