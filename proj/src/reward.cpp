#include "gaitmimic/reward.hpp"

#include <cmath>

namespace gaitmimic {

double r_lin(double v_x) {
    if (v_x >= 0.3) return 1.0;
    const double e = v_x - 0.3;
    return std::exp(-5.0 * e * e);
}

double r_ang(double w_y) { return std::exp(-3.0 * w_y * w_y); }

double r_body(double v_y, double roll, double yaw) {
    const double a = roll + yaw;
    return std::exp(-3.0 * v_y * v_y) + std::exp(-3.0 * a * a);
}

double stamp_reward(int d, int p) { return (d == 0 && p == 1) ? -1.0 : 0.0; }

double motion_consistency(const Vec2& v_ref, const Vec2& v_real, double delta) {
    if (v_ref.norm() < delta) return 0.0;
    const double dot = v_ref.dot(v_real);
    if (std::abs(dot) < 1e-12) return 0.0;
    return dot > 0.0 ? 1.0 : -1.0;
}

double angle_consistency(double beta_ref, double beta_real) {
    const double e = beta_ref - beta_real;
    return std::exp(-5.0 * e * e);
}

double total_periodic(const RewardBreakdown& b) {
    return 2.0 * b.r_lin + 2.0 * b.r_ang + b.r_body + b.stamp_sum() + b.motion_sum();
}

double total_backflip(const RewardBreakdown& b) {
    return 2.0 * b.r_angle + b.motion_sum() + b.stamp_sum();
}

}  // namespace gaitmimic
