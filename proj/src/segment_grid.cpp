#include "offlinemania/segment_grid.hpp"

#include <stdexcept>

namespace omania {

namespace {

// Bounding boxes are padded so that rays and rings grazing a cell border
// still see segments that end exactly on it.
constexpr double kPad = 1e-6;

}  // namespace

SegmentGrid::SegmentGrid(std::vector<Segment> segments, double cell_size)
    : segments_(std::move(segments)), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("SegmentGrid: cell size must be positive");
    if (segments_.empty()) return;

    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    for (const auto& s : segments_) {
        min_x = std::min({min_x, s.a.x, s.b.x});
        min_y = std::min({min_y, s.a.y, s.b.y});
        max_x = std::max({max_x, s.a.x, s.b.x});
        max_y = std::max({max_y, s.a.y, s.b.y});
    }
    origin_ = {min_x - cell_, min_y - cell_};
    nx_ = static_cast<int>(std::floor((max_x - origin_.x) / cell_)) + 2;
    ny_ = static_cast<int>(std::floor((max_y - origin_.y) / cell_)) + 2;

    auto for_each_cell = [&](const Segment& s, auto&& fn) {
        const int x0 = std::max(cell_x(std::min(s.a.x, s.b.x) - kPad), 0);
        const int x1 = std::min(cell_x(std::max(s.a.x, s.b.x) + kPad), nx_ - 1);
        const int y0 = std::max(cell_y(std::min(s.a.y, s.b.y) - kPad), 0);
        const int y1 = std::min(cell_y(std::max(s.a.y, s.b.y) + kPad), ny_ - 1);
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) fn(static_cast<std::size_t>(iy) * nx_ + ix);
    };

    const std::size_t n_cells = static_cast<std::size_t>(nx_) * ny_;
    std::vector<std::uint32_t> counts(n_cells, 0);
    for (const auto& s : segments_) for_each_cell(s, [&](std::size_t c) { ++counts[c]; });
    starts_.assign(n_cells + 1, 0);
    for (std::size_t c = 0; c < n_cells; ++c) starts_[c + 1] = starts_[c] + counts[c];
    indices_.resize(starts_.back());
    std::vector<std::uint32_t> fill(starts_.begin(), starts_.end() - 1);
    for (std::uint32_t i = 0; i < segments_.size(); ++i)
        for_each_cell(segments_[i], [&](std::size_t c) { indices_[fill[c]++] = i; });
}

double SegmentGrid::raycast(Vec2 origin, Vec2 dir, double max_t) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (nx_ == 0) return inf;

    // clip the ray against the grid box
    const Vec2 box_max{origin_.x + nx_ * cell_, origin_.y + ny_ * cell_};
    double t_enter = 0.0;
    double t_leave = max_t;
    for (int axis = 0; axis < 2; ++axis) {
        const double o = axis == 0 ? origin.x : origin.y;
        const double d = axis == 0 ? dir.x : dir.y;
        const double lo = axis == 0 ? origin_.x : origin_.y;
        const double hi = axis == 0 ? box_max.x : box_max.y;
        if (d == 0.0) {
            if (o < lo || o > hi) return inf;
            continue;
        }
        double t0 = (lo - o) / d;
        double t1 = (hi - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_leave = std::min(t_leave, t1);
    }
    if (t_enter > t_leave) return inf;

    const Vec2 start = origin + dir * t_enter;
    int ix = std::clamp(cell_x(start.x), 0, nx_ - 1);
    int iy = std::clamp(cell_y(start.y), 0, ny_ - 1);
    const int step_x = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
    const int step_y = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);
    auto boundary_t = [&](int i, int step, double o, double d, double lo) {
        if (step == 0) return inf;
        const double edge = lo + (step > 0 ? i + 1 : i) * cell_;
        return (edge - o) / d;
    };
    double t_next_x = boundary_t(ix, step_x, origin.x, dir.x, origin_.x);
    double t_next_y = boundary_t(iy, step_y, origin.y, dir.y, origin_.y);
    const double dt_x = step_x != 0 ? cell_ / std::abs(dir.x) : inf;
    const double dt_y = step_y != 0 ? cell_ / std::abs(dir.y) : inf;

    double best = inf;
    while (true) {
        for (std::uint32_t idx : cell(ix, iy)) {
            if (auto t = ray_segment_hit(origin, dir, segments_[idx]); t && *t < best) best = *t;
        }
        const double t_exit = std::min(t_next_x, t_next_y);
        if (best <= t_exit || t_exit > t_leave) break;
        if (t_next_x < t_next_y) {
            ix += step_x;
            t_next_x += dt_x;
        } else {
            iy += step_y;
            t_next_y += dt_y;
        }
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) break;
    }
    return best <= max_t ? best : inf;
}

}  // namespace omania
