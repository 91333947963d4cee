#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "offlinemania/geometry.hpp"
#include "offlinemania/rng.hpp"
#include "offlinemania/segment_grid.hpp"

namespace omania {

/// Raw contents of a track file, before validation.
///
/// File format (JSON, `version` "1"):
///
///     {
///       "version": "1",
///       "name": "offlinemania-1",
///       "half_width": 6.0,
///       "centerline": [[x, y], ...],            // closed loop, meters
///       "start_area": {
///         "center": [x, y],                      // snapped onto the centerline
///         "size_m": 8.0,                         // side of the square
///         "heading_offset_deg_range": [-30, 30]  // optional, this default
///       }
///     }
///
/// The loop is implicitly closed (the last vertex connects to the first).
/// Arc length is measured from vertex 0 in vertex order, which is also the
/// direction of travel.
struct TrackSpec {
    std::string version = "1";
    std::string name;
    double half_width = 6.0;
    std::vector<Vec2> centerline;
    Vec2 start_center;
    double start_size = 8.0;
    double heading_offset_min_deg = -30.0;
    double heading_offset_max_deg = 30.0;
};

void to_json(nlohmann::json& j, const TrackSpec& spec);

struct StartArea {
    Vec2 center;            // on the centerline
    double size = 0.0;      // side length, meters
    double s = 0.0;         // arc length of the center
    double orientation = 0.0;  // tangent angle at s, radians
    double heading_offset_min = 0.0;  // radians
    double heading_offset_max = 0.0;

    std::array<Vec2, 4> corners() const;
};

struct Projection {
    double s = 0.0;         // arc length in [0, L)
    double lateral = 0.0;   // signed offset, positive = left of travel
    std::size_t segment_index = 0;
    Vec2 tangent;           // unit travel direction of the nearest segment
    Vec2 foot;              // closest point on the centerline
};

/// Lap-unwrapped progress along the centerline. `lap_count` is the wrap index
/// of the current position; it goes negative if the car backs over the
/// start line on its first lap.
struct ProgressTracker {
    int lap_count = 0;
    double u = 0.0;
    double u_best = 0.0;
};

struct ProgressStep {
    ProgressTracker tracker;
    double delta = 0.0;  // max(0, u' - previous u_best)
};

ProgressTracker start_progress(double s);

/// Unwraps `new_s` to the lap offset nearest the previous `u` and folds it
/// into the best-so-far position.
ProgressStep advance_progress(const ProgressTracker& tracker, double new_s, double length);

struct StartPose {
    Vec2 position;
    double heading = 0.0;
};

/// Validated, immutable track geometry. Safe to share between threads.
class Track {
public:
    /// Validates `spec` and derives arc lengths, walls and search grids.
    /// Throws GeometryError for invalid geometry.
    explicit Track(TrackSpec spec);

    /// Parses a track document. Throws ParseError or GeometryError.
    static Track parse(std::string_view text);
    static Track load(const std::filesystem::path& path);

    /// The bundled `offlinemania-1` circuit, or the file named by
    /// OMD_TRACK_PATH when that variable is set.
    static const Track& canonical();
    static const Track& bundled();

    const TrackSpec& spec() const { return spec_; }
    const std::string& name() const { return spec_.name; }
    double half_width() const { return spec_.half_width; }
    double length() const { return length_; }
    std::span<const Vec2> centerline() const { return spec_.centerline; }
    std::span<const double> cum_arc() const { return cum_arc_; }
    const StartArea& start_area() const { return start_; }

    std::span<const Vec2> left_wall() const { return left_wall_; }
    std::span<const Vec2> right_wall() const { return right_wall_; }
    /// Both wall loops as segments: the left loop first, then the right.
    std::span<const Segment> wall_segments() const { return wall_grid_.segments(); }
    /// Unit normal of each wall segment pointing into the corridor.
    std::span<const Vec2> wall_normals() const { return wall_normals_; }
    const SegmentGrid& wall_grid() const { return wall_grid_; }

    /// Closest point on the centerline; ties go to the smaller arc length.
    Projection project(Vec2 p) const;

    Vec2 point_at(double s) const;
    Vec2 tangent_at(double s) const;
    /// Signed curvature (1/m, positive for left turns) averaged over a few
    /// meters around s.
    double curvature_at(double s) const;

    /// Wraps an arc length into [0, L).
    double wrap_s(double s) const;

    StartPose sample_start(Rng& rng) const;

private:
    std::size_t segment_at(double s) const;

    TrackSpec spec_;
    std::vector<double> cum_arc_;
    std::vector<double> seg_len_;
    std::vector<Vec2> seg_dir_;  // unit
    double length_ = 0.0;
    std::vector<double> curvature_;  // smoothed, per vertex
    std::vector<Vec2> left_wall_;
    std::vector<Vec2> right_wall_;
    std::vector<Vec2> wall_normals_;
    SegmentGrid center_grid_;
    SegmentGrid wall_grid_;
    StartArea start_;
};

}  // namespace omania
