#pragma once

#include <array>
#include <string>
#include <vector>

#include "gaitmimic/trace.hpp"
#include "gaitmimic/types.hpp"

namespace gaitmimic {

struct JointRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Desk-scale quadruped description. Legs are planar 2-link chains in the
/// sagittal plane; the abduction joint is held at zero.
struct RobotModel {
    std::array<Vec3, kNumLegs> hip_offset;  // from trunk center, trunk frame
    double l1 = 0.2;                        // upper link (m)
    double l2 = 0.2;                        // lower link (m)
    JointRange abduction_range{-0.6, 0.6};
    JointRange hip_range{-2.4, 2.4};
    JointRange knee_range{-2.7, 0.0};
    double x_lim_x = 0.12;  // workspace half-range, fore-aft (m)
    double x_lim_z = 0.08;  // workspace half-range, vertical (m)
    double trunk_mass = 12.0;      // kg
    double pitch_inertia = 0.15;   // kg m^2
    double standing_height = 0.3;  // hip above ground (m)

    static RobotModel defaults();
    void validate() const;  // throws InvalidModel
};

/// Motion program executed by the rollout. Periodic mode carries one-period
/// foot displacement templates around the standing pose (axis 0 fore-aft,
/// axis 1 vertical, meters) plus per-phase reference contacts and reference
/// foot velocities derived from the same templates, so consistency rewards
/// can be evaluated at any phase. Aperiodic mode carries key frames.
struct KeyFrame {
    std::array<double, 12> joint_angles{};  // abd, hip, knee per leg, FL FR RL RR
    double interval_s = 0.0;                // time until the next key frame
    double beta_ref = 0.0;                  // unwrapped reference body angle
    std::array<int, kNumLegs> d{};          // reference contact indicators
    std::array<Vec2, kNumLegs> foot_ref;    // body-frame foot position (m)
};

struct GaitProgram {
    TaskMode mode = TaskMode::kPeriodic;
    int period = 0;           // frames (periodic mode)
    double base_interval_s = 0.025;

    // [leg][axis][phase]; axis 0 = fore-aft x, axis 1 = vertical z
    std::array<std::array<std::vector<double>, 2>, kNumLegs> f;
    std::array<std::vector<int>, kNumLegs> d;     // reference contacts per phase
    std::array<std::vector<Vec2>, kNumLegs> v_ref;  // reference foot velocity (m/s)

    std::vector<KeyFrame> key_frames;  // aperiodic mode

    std::string to_json() const;
    static GaitProgram from_json(const std::string& text);
};

/// Per-step policy output: multiplicative scale and additive offset per leg
/// and axis, plus a frame-interval adjustment.
struct AdaptationAction {
    std::array<std::array<double, 2>, kNumLegs> scale;   // A
    std::array<std::array<double, 2>, kNumLegs> offset;  // b (m)
    double dt_adjust = 0.0;                              // added to base interval (s)

    AdaptationAction() {
        for (auto& row : scale) row = {1.0, 1.0};
        for (auto& row : offset) row = {0.0, 0.0};
    }
};

struct AdaptedValue {
    double g = 0.0;
    bool clamped = false;
};

struct BuildOptions {
    double gamma = 0.1;        // contact threshold fraction
    double delta_angle = 0.05;  // key-frame threshold (rad)
    bool x11_filter = true;     // false: raw first-cycle template, no filtering
    double min_confidence = 0.3;
};

/// f(t) = (x_lim / max_t |S(t)|) * S(t). Throws DegenerateAmplitude when the
/// template is flat (max |S| <= 1e-9).
std::vector<double> scale_to_robot(const std::vector<double>& tmpl, double x_lim);

/// g = A*f + b, clamped to [-x_lim, x_lim] with the clamp flagged.
AdaptedValue apply_adaptation(double f_value, const AdaptationAction& action, int leg, int axis,
                              double x_lim);

/// Planar two-link inverse kinematics in the hip frame (x forward, z down),
/// knee-backward branch (knee angle in [-pi, 0]). Throws Unreachable outside
/// the annulus [|l1-l2|, l1+l2] (tolerance 1e-12).
std::array<double, 2> leg_ik(const Vec2& target, double l1, double l2);

/// Forward kinematics matching leg_ik's frame and branch conventions.
Vec2 leg_fk(double hip, double knee, double l1, double l2);

/// Radially clamp a hip-frame target into the reachable annulus.
Vec2 clamp_to_annulus(const Vec2& target, double l1, double l2);

/// Key frame indices t where theta(t)-theta(t-1) > theta(t+1)-theta(t)+delta,
/// for 1 <= t <= n-2.
std::vector<int> extract_key_frames(const std::vector<double>& theta_mean, double delta_angle);

/// Full retarget pipeline: body-frame foot series -> period estimate ->
/// decomposition -> seasonal template -> workspace scaling (periodic), or
/// key-frame extraction + IK (aperiodic).
GaitProgram build_gait_program(const KeyPointTrace& trace, const RobotModel& model, TaskMode mode,
                               const BuildOptions& options = {});

std::string robot_model_to_json(const RobotModel& model);
RobotModel robot_model_from_json(const std::string& text);

}  // namespace gaitmimic
