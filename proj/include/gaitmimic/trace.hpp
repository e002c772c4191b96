#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gaitmimic/types.hpp"

namespace gaitmimic {

/// One video frame worth of key points. Coordinates are stored up-positive:
/// ingestion negates the image y axis so foot height thresholding works on
/// heights, not raster rows.
struct FrameSample {
    double t = 0.0;  // seconds
    std::array<Vec2, kNumKeyPoints> points{};
    std::optional<std::array<double, kNumKeyPoints>> confidence;
};

struct KeyPointTrace {
    std::vector<FrameSample> frames;
    double fps = 0.0;
    std::string source_id;

    std::size_t size() const { return frames.size(); }

    /// Column of one coordinate across all frames (axis 0 = x, 1 = height).
    std::vector<double> series(KeyPoint point, int axis) const;
};

/// Per-foot binary ground-contact indicators derived from foot heights.
struct ContactSeries {
    std::array<std::vector<int>, kNumLegs> d;
    double gamma = 0.1;
};

/// Parse a trace CSV (schema in README), repair low-confidence samples by
/// linear interpolation in time, and flip the image y axis to up-positive.
/// Throws MalformedFile on schema violations and TooSparse when more than
/// half of any key point's samples fall below min_confidence.
KeyPointTrace load_trace(const std::string& path, double min_confidence);

/// Heading of the head-rear axis, quadrant-aware, in (-pi, pi].
/// Throws DegenerateBody when the two points coincide within 1e-9.
double heading_angle(const Vec2& head, const Vec2& rear);

/// Rotate a point into the animal body frame given heading beta:
///   x_body = x cos(beta) + y sin(beta),  y_body = y cos(beta) - x sin(beta).
Vec2 to_body_frame(const Vec2& point, double beta);

/// Ground indicator for one height series: 1 where the height is at or below
/// h_min + (h_max - h_min) * gamma. A flat series is always in contact.
std::vector<int> contact_indicator(const std::vector<double>& heights, double gamma);

ContactSeries detect_contacts(const std::array<std::vector<double>, kNumLegs>& foot_heights,
                              double gamma);

/// Finite-difference velocity of a foot's body-frame position; entry k is the
/// velocity between frames k and k+1 (length = frames - 1).
std::vector<Vec2> body_frame_velocity(const KeyPointTrace& trace, Leg foot);

/// Body-frame position of one key point in every frame (rotation only,
/// no translation; a fixed world point under fixed heading stays fixed).
std::vector<Vec2> body_frame_positions(const KeyPointTrace& trace, KeyPoint point);

}  // namespace gaitmimic
