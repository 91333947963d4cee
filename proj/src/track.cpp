#include "offlinemania/track.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "offlinemania/errors.hpp"
#include "bundled_track.inc"

namespace omania {

namespace {

// half-window of the curvature average, meters
constexpr double kCurvatureWindow = 3.0;
// grid cell edge for centerline and wall lookups, meters
constexpr double kGridCell = 2.5;

Vec2 parse_point(const nlohmann::json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(std::string(what) + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class Visit>
void for_each_crossing(const SegmentGrid& grid, Visit&& on_pair) {
    const auto segs = grid.segments();
    for (std::uint32_t i = 0; i < segs.size(); ++i) {
        const Segment& s = segs[i];
        const Vec2 mid = (s.a + s.b) * 0.5;
        grid.around(mid, 0.5 * s.length() + 1e-6, [&](std::uint32_t j) {
            if (j > i && segments_intersect(s, segs[j])) on_pair(i, j);
        });
    }
}

}  // namespace

void to_json(nlohmann::json& j, const TrackSpec& spec) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec2& p : spec.centerline) pts.push_back({p.x, p.y});
    j = {
        {"version", spec.version},
        {"name", spec.name},
        {"half_width", spec.half_width},
        {"centerline", std::move(pts)},
        {"start_area",
         {{"center", {spec.start_center.x, spec.start_center.y}},
          {"size_m", spec.start_size},
          {"heading_offset_deg_range", {spec.heading_offset_min_deg, spec.heading_offset_max_deg}}}},
    };
}

std::array<Vec2, 4> StartArea::corners() const {
    const Vec2 t = unit_from_angle(orientation) * (0.5 * size);
    const Vec2 n = left_normal(t);
    return {center - t - n, center + t - n, center + t + n, center - t + n};
}

ProgressTracker start_progress(double s) { return {0, s, s}; }

ProgressStep advance_progress(const ProgressTracker& tracker, double new_s, double length) {
    int best_k = tracker.lap_count;
    double best_u = best_k * length + new_s;
    for (int k : {tracker.lap_count - 1, tracker.lap_count + 1}) {
        const double u = k * length + new_s;
        if (std::abs(u - tracker.u) < std::abs(best_u - tracker.u)) {
            best_k = k;
            best_u = u;
        }
    }
    ProgressStep out;
    out.tracker.lap_count = best_k;
    out.tracker.u = best_u;
    out.delta = std::max(0.0, best_u - tracker.u_best);
    out.tracker.u_best = std::max(tracker.u_best, best_u);
    return out;
}

Track::Track(TrackSpec spec) : spec_(std::move(spec)) {
    const auto& pts = spec_.centerline;
    const std::size_t n = pts.size();
    if (n < 3) throw GeometryError("centerline needs at least 3 vertices");
    if (!(spec_.half_width > 0.0) || !std::isfinite(spec_.half_width))
        throw GeometryError("half_width must be positive");
    for (const Vec2& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite centerline vertex");

    cum_arc_.resize(n);
    seg_len_.resize(n);
    seg_dir_.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = pts[(i + 1) % n] - pts[i];
        const double len = norm(d);
        if (len == 0.0) throw GeometryError("duplicate consecutive vertex " + std::to_string(i));
        cum_arc_[i] = acc;
        seg_len_[i] = len;
        seg_dir_[i] = d * (1.0 / len);
        acc += len;
    }
    length_ = acc;

    std::vector<Segment> center_segs(n);
    for (std::size_t i = 0; i < n; ++i) center_segs[i] = {pts[i], pts[(i + 1) % n]};
    center_grid_ = SegmentGrid(std::move(center_segs), kGridCell);
    for_each_crossing(center_grid_, [&](std::uint32_t i, std::uint32_t j) {
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        if (!adjacent) throw GeometryError("centerline self-intersects (segments " + std::to_string(i) + ", " + std::to_string(j) + ")");
    });

    // mitered offsets of the centerline
    left_wall_.resize(n);
    right_wall_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 n0 = left_normal(seg_dir_[(i + n - 1) % n]);
        const Vec2 n1 = left_normal(seg_dir_[i]);
        const Vec2 m = n0 + n1;
        if (norm(m) < 0.2) throw GeometryError("centerline folds back at vertex " + std::to_string(i));
        const Vec2 miter = normalized(m) * (spec_.half_width / dot(normalized(m), n0));
        left_wall_[i] = pts[i] + miter;
        right_wall_[i] = pts[i] - miter;
    }
    std::vector<Segment> wall_segs(2 * n);
    wall_normals_.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        wall_segs[i] = {left_wall_[i], left_wall_[(i + 1) % n]};
        wall_segs[n + i] = {right_wall_[i], right_wall_[(i + 1) % n]};
        wall_normals_[i] = -left_normal(normalized(wall_segs[i].direction()));
        wall_normals_[n + i] = left_normal(normalized(wall_segs[n + i].direction()));
    }
    wall_grid_ = SegmentGrid(std::move(wall_segs), kGridCell);
    for_each_crossing(wall_grid_, [&](std::uint32_t i, std::uint32_t j) {
        const bool same_loop = (i < n) == (j < n);
        const std::uint32_t a = i % n;
        const std::uint32_t b = j % n;
        const bool adjacent = same_loop && (b == a + 1 || (a == 0 && b == n - 1));
        if (!adjacent) throw GeometryError("corridor walls intersect (track pinches or overlaps itself)");
    });
    // a wall that folds over itself without crossing runs backwards or
    // comes closer to the centerline than half_width
    const auto walls = wall_grid_.segments();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(dot(walls[i].direction(), seg_dir_[i]) > 0.0) || !(dot(walls[n + i].direction(), seg_dir_[i]) > 0.0))
            throw GeometryError("corridor wall reverses near vertex " + std::to_string(i) + " (turn tighter than half_width)");
        for (const Vec2 w : {left_wall_[i], right_wall_[i]})
            if (std::abs(project(w).lateral) < spec_.half_width * (1.0 - 1e-9))
                throw GeometryError("corridor pinches near vertex " + std::to_string(i));
    }

    curvature_.assign(n, 0.0);
    std::vector<double> turn(n);
    for (std::size_t i = 0; i < n; ++i)
        turn[i] = std::atan2(cross(seg_dir_[(i + n - 1) % n], seg_dir_[i]), dot(seg_dir_[(i + n - 1) % n], seg_dir_[i]));
    for (std::size_t i = 0; i < n; ++i) {
        double sum = turn[i];
        for (std::size_t k = 1; k < n; ++k) {
            const std::size_t j = (i + k) % n;
            double ds = cum_arc_[j] - cum_arc_[i];
            if (ds < 0.0) ds += length_;
            if (ds > kCurvatureWindow) break;
            sum += turn[j];
        }
        for (std::size_t k = 1; k < n; ++k) {
            const std::size_t j = (i + n - k) % n;
            double ds = cum_arc_[i] - cum_arc_[j];
            if (ds < 0.0) ds += length_;
            if (ds > kCurvatureWindow) break;
            sum += turn[j];
        }
        curvature_[i] = sum / (2.0 * kCurvatureWindow);
    }

    if (!(spec_.start_size > 0.0)) throw GeometryError("start area size must be positive");
    if (!(spec_.heading_offset_min_deg <= spec_.heading_offset_max_deg) || spec_.heading_offset_min_deg <= -90.0 ||
        spec_.heading_offset_max_deg >= 90.0)
        throw GeometryError("heading offset range must lie within (-90, 90) degrees");
    const Projection c = project(spec_.start_center);
    start_.center = spec_.start_center;
    start_.size = spec_.start_size;
    start_.s = c.s;
    start_.orientation = angle_of(c.tangent);
    start_.heading_offset_min = deg_to_rad(spec_.heading_offset_min_deg);
    start_.heading_offset_max = deg_to_rad(spec_.heading_offset_max_deg);
    const auto corners = start_.corners();
    for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(project(corners[k]).lateral) > spec_.half_width)
            throw GeometryError("start area leaves the corridor");
        const Segment edge{corners[k], corners[(k + 1) % 4]};
        wall_grid_.around((edge.a + edge.b) * 0.5, 0.5 * edge.length() + 1e-6, [&](std::uint32_t j) {
            if (segments_intersect(edge, wall_grid_.segments()[j]))
                throw GeometryError("start area crosses a wall");
        });
    }
}

Track Track::parse(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("track file is not valid JSON: ") + e.what());
    }
    TrackSpec spec;
    try {
        if (!doc.is_object()) throw ParseError("track file must be a JSON object");
        spec.version = doc.at("version").get<std::string>();
        if (spec.version != "1") throw ParseError("unsupported track format version '" + spec.version + "'");
        spec.name = doc.at("name").get<std::string>();
        spec.half_width = doc.at("half_width").get<double>();
        const auto& cl = doc.at("centerline");
        if (!cl.is_array()) throw ParseError("centerline must be an array");
        for (const auto& p : cl) spec.centerline.push_back(parse_point(p, "centerline"));
        const auto& sa = doc.at("start_area");
        spec.start_center = parse_point(sa.at("center"), "start_area.center");
        spec.start_size = sa.at("size_m").get<double>();
        if (sa.contains("heading_offset_deg_range")) {
            const auto& range = sa.at("heading_offset_deg_range");
            if (!range.is_array() || range.size() != 2) throw ParseError("heading_offset_deg_range must be [min, max]");
            spec.heading_offset_min_deg = range[0].get<double>();
            spec.heading_offset_max_deg = range[1].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed track file: ") + e.what());
    }
    return Track(std::move(spec));
}

Track Track::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open track file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const Track& Track::bundled() {
    static const Track track = parse(kBundledTrackJson);
    return track;
}

const Track& Track::canonical() {
    static const Track track = [] {
        if (const char* path = std::getenv("OMD_TRACK_PATH"); path && *path) return load(path);
        return parse(kBundledTrackJson);
    }();
    return track;
}

double Track::wrap_s(double s) const {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
    return s >= length_ ? 0.0 : s;
}

std::size_t Track::segment_at(double s) const {
    const auto it = std::upper_bound(cum_arc_.begin(), cum_arc_.end(), s);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum_arc_.begin() - 1, 0));
}

Vec2 Track::point_at(double s) const {
    s = wrap_s(s);
    const std::size_t i = segment_at(s);
    return spec_.centerline[i] + seg_dir_[i] * (s - cum_arc_[i]);
}

Vec2 Track::tangent_at(double s) const { return seg_dir_[segment_at(wrap_s(s))]; }

double Track::curvature_at(double s) const {
    s = wrap_s(s);
    const std::size_t i = segment_at(s);
    const double f = (s - cum_arc_[i]) / seg_len_[i];
    return curvature_[i] * (1.0 - f) + curvature_[(i + 1) % curvature_.size()] * f;
}

Projection Track::project(Vec2 p) const {
    const auto segs = center_grid_.segments();
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_s = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    Vec2 best_foot;
    center_grid_.nearest(p, [&](std::uint32_t i) {
        const double t = closest_param(segs[i], p);
        const Vec2 foot = point_on(segs[i], t);
        const double d2 = norm_sq(p - foot);
        double s = cum_arc_[i] + t * seg_len_[i];
        if (s >= length_) s -= length_;
        if (d2 < best_d2 || (d2 == best_d2 && s < best_s)) {
            best_d2 = d2;
            best_s = s;
            best_i = i;
            best_foot = foot;
        }
        return std::sqrt(best_d2);
    });
    Projection out;
    out.s = best_s;
    out.segment_index = best_i;
    out.tangent = seg_dir_[best_i];
    out.foot = best_foot;
    const double side = cross(seg_dir_[best_i], p - segs[best_i].a);
    out.lateral = side < 0.0 ? -std::sqrt(best_d2) : std::sqrt(best_d2);
    return out;
}

StartPose Track::sample_start(Rng& rng) const {
    const Vec2 t = unit_from_angle(start_.orientation);
    const Vec2 n = left_normal(t);
    const double a = rng.uniform(-0.5, 0.5) * start_.size;
    const double b = rng.uniform(-0.5, 0.5) * start_.size;
    StartPose pose;
    pose.position = start_.center + t * a + n * b;
    const double offset = rng.uniform(start_.heading_offset_min, start_.heading_offset_max);
    pose.heading = wrap_angle(angle_of(project(pose.position).tangent) + offset);
    return pose;
}

}  // namespace omania
