#pragma once

#include <cstdint>
#include <string>

namespace gaitmimic {

/// Synthetic side-view trot footage, fixed camera, image coordinates in
/// pixels (y down). Diagonal leg pairs move in antiphase; cycle durations
/// jitter around the nominal length and every coordinate carries tracker
/// noise, so the trace exercises period estimation and seasonal filtering
/// the way real footage would.
struct TrotTraceOptions {
    int cycles = 12;
    int frames_per_cycle = 20;
    double fps = 40.0;
    double duty = 0.6;           // stance fraction of a cycle
    double duty_bias = 0.03;     // left legs hold stance longer, right shorter
    double stride = 0.35;        // subject units per cycle
    double swing_height = 0.06;  // subject units
    double body_height = 0.45;
    double body_length = 0.6;
    double bob_amplitude = 0.008;
    double jitter = 0.02;        // fractional cycle-length jitter
    double noise_px = 0.3;       // tracker noise sigma in pixels
    double px_per_unit = 240.0;
    int confidence_dips = 3;     // frames with a low-confidence key point
    std::uint64_t seed = 7;
};

std::string make_trot_trace_csv(const TrotTraceOptions& opts);

/// Synthetic backflip footage from a tracking crop: the camera follows the
/// subject, so coordinates are relative to the trunk center (pixels, y
/// down). Unlike the trot clip this is a sparse key-pose track, the kind a
/// hand-annotated burst sequence produces: a fixed script of poses (load,
/// drop, crouch, front pop, rear drive, tuck, extend, catch, stand) at
/// uneven timestamps. Every scripted pose is bracketed by a slightly
/// shallower lead-in sample and a short hold so it reads as a corner in
/// joint space rather than a point on a ramp, and the tuck carries extra
/// samples at intermediate body angles so consecutive headings stay under
/// a half turn.
struct BackflipTraceOptions {
    double body_length = 0.36;     // subject units, head to rear key point
    double px_per_unit = 520.0;
    double noise_px = 0.05;        // tracker noise sigma in pixels
    double bracket_s = 0.001;      // lead-in / hold spacing around a pose
    double lead_in_depth = 0.008;  // lead-in sits this much shallower (units)
    int tuck_samples = 3;          // extra mid-tuck frames for continuity
    std::uint64_t seed = 9;
};

std::string make_backflip_trace_csv(const BackflipTraceOptions& opts);

}  // namespace gaitmimic
