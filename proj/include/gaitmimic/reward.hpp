#pragma once

#include <array>

#include "gaitmimic/types.hpp"

namespace gaitmimic {

/// Per-step reward terms. Exponential terms live in (0,1]; per-foot stamp
/// terms in {-1,0}; per-foot motion terms in {-1,0,+1}.
struct RewardBreakdown {
    double r_lin = 0.0;
    double r_ang = 0.0;
    double r_body = 0.0;
    std::array<double, kNumLegs> stamp{};   // per foot
    std::array<double, kNumLegs> motion{};  // per foot
    double r_angle = 0.0;
    double total = 0.0;

    double stamp_sum() const { return stamp[0] + stamp[1] + stamp[2] + stamp[3]; }
    double motion_sum() const { return motion[0] + motion[1] + motion[2] + motion[3]; }
};

/// Forward-speed reward: saturates at 1 once v_x reaches 0.3 m/s,
/// exp(-5 (v_x - 0.3)^2) below.
double r_lin(double v_x);

/// Turn-rate penalty shaped as exp(-3 w_y^2).
double r_ang(double w_y);

/// Lateral drift and attitude term: exp(-3 v_y^2) + exp(-3 (roll + yaw)^2).
double r_body(double v_y, double roll, double yaw);

/// -1 when the video foot is airborne (d=0) while the robot foot is grounded
/// (p=1); 0 otherwise.
double stamp_reward(int d, int p);

/// Sign agreement of reference vs actual foot velocity. 0 when the reference
/// speed is below `delta` or when the dot product magnitude is below 1e-12.
double motion_consistency(const Vec2& v_ref, const Vec2& v_real, double delta);

/// Rotation tracking for aperiodic skills: exp(-5 (beta_ref - beta_real)^2)
/// on unwrapped angles.
double angle_consistency(double beta_ref, double beta_real);

/// 2 r_lin + 2 r_ang + r_body + sum(stamp) + sum(motion).
double total_periodic(const RewardBreakdown& b);

/// 2 r_angle + sum(motion) + sum(stamp).
double total_backflip(const RewardBreakdown& b);

}  // namespace gaitmimic
