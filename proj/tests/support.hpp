#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "offlinemania/env.hpp"
#include "offlinemania/track.hpp"

namespace omania::testing {

// Axis-aligned rectangle loop, counter-clockwise from (0, 0).
inline TrackSpec rectangle_spec(double w, double h, double half_width) {
    TrackSpec spec;
    spec.name = "rectangle";
    spec.half_width = half_width;
    spec.centerline = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
    spec.start_center = {w / 2, 0.0};
    spec.start_size = half_width;
    return spec;
}

// Regular n-gon approximating a circle, counter-clockwise.
inline TrackSpec ring_spec(double radius, int n, double half_width) {
    TrackSpec spec;
    spec.name = "ring";
    spec.half_width = half_width;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n - std::numbers::pi / 2;
        spec.centerline.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    spec.start_center = spec.centerline[0];
    spec.start_size = half_width;
    return spec;
}

inline EnvConfig env_on(TrackSpec spec) {
    EnvConfig cfg = EnvConfig::canonical();
    cfg.track = std::make_shared<const Track>(std::move(spec));
    return cfg;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("omania-" + tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace omania::testing
