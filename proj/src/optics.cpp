#include "vlcmux/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vlcmux/error.hpp"

namespace vlcmux::optics {

namespace {

// images exactly one pitch apart must count as separated despite rounding
constexpr double kPitchRelTolerance = 1e-9;

}  // namespace

void OpticalSetup::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSetup, msg); };
    if (!(pixel_pitch_m > 0.0)) fail("pixel pitch must be positive");
    if (!(emitter_distance_m > 0.0)) fail("emitter distance must be positive");
    if (!(back_focal_length_m > 0.0)) fail("back focal length must be positive");
    if (grid_rows < 1 || grid_cols < 1) fail("shutter grid needs at least one pixel");
    if (!(emitter_distance_m > back_focal_length_m))
        fail("emitter must sit beyond the focal length");
    if (!std::isfinite(pixel_pitch_m) || !std::isfinite(emitter_distance_m) ||
        !std::isfinite(back_focal_length_m))
        fail("lengths must be finite");
}

double min_separation(const OpticalSetup& setup) {
    setup.validate();
    return setup.pixel_pitch_m * setup.emitter_distance_m / setup.back_focal_length_m;
}

double min_angle_deg(const OpticalSetup& setup) {
    const double h = min_separation(setup);
    const double rad = 2.0 * std::atan(h / (2.0 * setup.emitter_distance_m));
    return rad * 180.0 / std::numbers::pi;
}

double round_deg(double degrees) { return std::round(degrees * 10.0) / 10.0; }

std::string to_string(InfeasibleReason reason) {
    switch (reason) {
        case InfeasibleReason::SamePixel: return "same-pixel";
        case InfeasibleReason::OutsideGrid: return "outside-grid";
    }
    return "unknown";
}

Point2 project(const OpticalSetup& setup, Point2 emitter) {
    const double m = setup.back_focal_length_m / setup.emitter_distance_m;
    return {emitter.x * m, emitter.y * m};
}

std::optional<std::size_t> pixel_at(const OpticalSetup& setup, Point2 image) {
    const double d = setup.pixel_pitch_m;
    const double x0 = -0.5 * d * static_cast<double>(setup.grid_cols);
    const double y0 = -0.5 * d * static_cast<double>(setup.grid_rows);
    const double col = std::floor((image.x - x0) / d);
    const double row = std::floor((image.y - y0) / d);
    if (col < 0.0 || row < 0.0 || col >= static_cast<double>(setup.grid_cols) ||
        row >= static_cast<double>(setup.grid_rows))
        return std::nullopt;
    return static_cast<std::size_t>(row) * setup.grid_cols + static_cast<std::size_t>(col);
}

PixelMapping map_emitters_to_pixels(const OpticalSetup& setup,
                                    const EmitterPlacement& placement) {
    setup.validate();
    PixelMapping out;
    const auto& pos = placement.positions;
    std::vector<Point2> images;
    images.reserve(pos.size());
    for (const auto& p : pos) images.push_back(project(setup, p));

    const double min_gap = setup.pixel_pitch_m * (1.0 - kPitchRelTolerance);
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            const double gap = std::max(std::abs(images[i].x - images[j].x),
                                        std::abs(images[i].y - images[j].y));
            if (gap < min_gap) {
                std::ostringstream os;
                os << "emitters " << i << " and " << j << " image " << gap
                   << " m apart, below pitch " << setup.pixel_pitch_m << " m";
                out.infeasible = InfeasibleReason::SamePixel;
                out.detail = os.str();
                return out;
            }
        }
    }

    std::vector<std::size_t> pixels;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto px = pixel_at(setup, images[i]);
        if (!px) {
            out.infeasible = InfeasibleReason::OutsideGrid;
            out.detail = "emitter " + std::to_string(i) + " images outside the shutter grid";
            return out;
        }
        if (std::find(pixels.begin(), pixels.end(), *px) != pixels.end()) {
            out.infeasible = InfeasibleReason::SamePixel;
            out.detail = "emitter " + std::to_string(i) + " shares pixel " + std::to_string(*px);
            return out;
        }
        pixels.push_back(*px);
    }
    out.emitter_pixel = std::move(pixels);
    return out;
}

}  // namespace vlcmux::optics
