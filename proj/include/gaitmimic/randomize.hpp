#pragma once

#include <cstdint>
#include <string>

namespace gaitmimic {

/// Physical parameters drawn per episode. Multipliers apply to the robot
/// model's nominal values; the rest are absolute quantities.
struct WorldParams {
    double mass_mult = 1.0;
    double inertia_mult = 1.0;
    double strength_mult = 1.0;
    double motor_friction = 0.0;   // N m s / rad
    double latency_s = 0.0;
    double lateral_friction = 0.875;  // contact friction coefficient
    double battery_v = 16.8;
    double joint_friction = 0.0;   // N m
    double com_noise_m = 0.0;      // fore-aft CoM shift
    double ext_force_n = 0.0;      // horizontal disturbance magnitude
    double ext_force_dir_rad = 0.0;  // direction on the horizontal circle
    double step_height_m = 0.04;
    double step_width_m = 0.205;

    std::string to_json() const;
    static WorldParams from_json(const std::string& text);
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform sampling intervals, one per WorldParams field.
struct RandomizationRanges {
    Interval mass_mult{0.8, 1.2};
    Interval inertia_mult{0.5, 1.5};
    Interval strength_mult{0.8, 1.2};
    Interval motor_friction{0.0, 0.05};
    Interval latency_s{0.0, 0.04};
    Interval lateral_friction{0.5, 1.25};
    Interval battery_v{14.0, 16.8};
    Interval joint_friction{0.0, 0.05};
    Interval com_noise_m{-0.05, 0.05};
    Interval ext_force_n{-3.0, 3.0};
    Interval step_height_m{0.02, 0.06};
    Interval step_width_m{0.18, 0.23};

    void validate() const;  // lo <= hi everywhere
    std::string to_json() const;
    static RandomizationRanges from_json(const std::string& text);
};

/// Each field drawn independently and uniformly from its interval; the
/// disturbance direction is drawn uniformly on [0, 2*pi). Deterministic in
/// the seed and independent of platform RNG internals.
WorldParams sample(const RandomizationRanges& ranges, std::uint64_t seed);

/// Unperturbed world: unit multipliers, zero noise terms, full battery,
/// midpoint lateral friction.
WorldParams nominal();

}  // namespace gaitmimic
