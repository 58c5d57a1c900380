#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vlcmux::optics {

/// Lens, shutter and emitter geometry of the receiver. Lengths in meters.
struct OpticalSetup {
    double pixel_pitch_m = 0.036;
    double emitter_distance_m = 0.155;     // emitter plane to lens
    double shutter_distance_m = 0.082;     // lens to shutter plane; stored only
    double back_focal_length_m = 0.0375;
    std::size_t grid_rows = 1;
    std::size_t grid_cols = 2;

    std::size_t pixel_count() const { return grid_rows * grid_cols; }

    /// Throws Error(InvalidSetup) when any geometric invariant is violated.
    void validate() const;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct EmitterPlacement {
    std::vector<Point2> positions;  // emitter plane, meters from the optical axis
};

/// Smallest emitter separation whose images land one pixel pitch apart.
double min_separation(const OpticalSetup& setup);

/// Full angle subtended at the lens by two emitters `min_separation` apart.
double min_angle_deg(const OpticalSetup& setup);

/// Rounds an angle to the one-decimal precision used for reporting.
double round_deg(double degrees);

enum class InfeasibleReason { SamePixel, OutsideGrid };

std::string to_string(InfeasibleReason reason);

struct PixelMapping {
    /// pixel index (row-major) per emitter; empty when infeasible
    std::vector<std::size_t> emitter_pixel;
    std::optional<InfeasibleReason> infeasible;
    std::string detail;

    bool feasible() const { return !infeasible.has_value(); }
};

/// Image of an emitter on the shutter plane (magnification BFL/S1).
Point2 project(const OpticalSetup& setup, Point2 emitter);

/// Row-major pixel containing an image point, or nullopt outside the grid.
/// Pixels are half-open [k*d, (k+1)*d) per axis with the grid centered on
/// the optical axis, so a point on a boundary goes to the higher index.
std::optional<std::size_t> pixel_at(const OpticalSetup& setup, Point2 image);

/// Assigns each emitter to the pixel holding its image. Infeasible when an
/// image leaves the grid, or when two images are closer than one pixel pitch
/// on both axes (their footprints share a pixel).
PixelMapping map_emitters_to_pixels(const OpticalSetup& setup,
                                    const EmitterPlacement& placement);

}  // namespace vlcmux::optics
