#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gaitmimic/randomize.hpp"
#include "gaitmimic/retarget.hpp"
#include "gaitmimic/types.hpp"

namespace gaitmimic {

enum class EpisodeStatus { kRunning, kFell, kOutOfArea, kMaxSteps };

const char* episode_status_name(EpisodeStatus s);

struct SimState {
    Vec3 position;                 // trunk center, world (m)
    double roll = 0.0;
    double pitch = 0.0;            // unwrapped, nose-up positive
    double yaw = 0.0;
    Vec3 velocity;                 // world (m/s)
    Vec3 angular_velocity;         // (roll, pitch, yaw) rates (rad/s)
    std::array<std::array<double, 3>, kNumLegs> joint_angles{};  // abd, hip, knee
    std::array<Vec3, kNumLegs> foot_world;
    std::array<int, kNumLegs> contact{};  // 1 when foot height <= 1 mm above ground
    double time_s = 0.0;
    long step_count = 0;

    // Bookkeeping the termination rules read.
    double standing_height = 0.3;
    double support_violation_s = 0.0;  // CoM outside support polygon by > 2 cm
    double airborne_s = 0.0;           // all feet commanded airborne
    EpisodeStatus status = EpisodeStatus::kRunning;
};

/// Distance from a ground-projected point to the support region:
/// 0 inside/on the convex hull, the Euclidean gap otherwise. With two
/// contacts the region is the segment, with one the point itself.
double support_polygon_distance(const std::vector<Vec2>& support_xy, const Vec2& com_xy);

/// Balance and arena rules. Periodic: fell when the support-polygon
/// violation timer exceeds 0.1 s, trunk height drops below 40% of standing,
/// |roll| or |pitch| exceeds 1 rad, or all feet have been airborne > 0.2 s;
/// out of area when |y| > arena_half_width or x < -0.5. Backflip: fell when
/// the trunk touches the ground while unwrapped pitch is more than 0.5 rad
/// away from a full backward rotation. Terminal states are absorbing.
EpisodeStatus check_termination(const SimState& state, double arena_half_width, TaskMode task);

class Simulator {
public:
    Simulator(const RobotModel& model, const WorldParams& world, std::uint64_t seed,
              bool staircase = false);

    void reset(std::uint64_t seed);
    const SimState& state() const { return state_; }
    const RobotModel& model() const { return model_; }
    const WorldParams& world() const { return world_; }

    /// Gait mode: swing feet track hip-frame targets (fore-aft, vertical
    /// displacement around the standing pose), stance feet stay world-fixed,
    /// the trunk pose is fit by damped least squares to the stance anchors.
    /// Commands take effect after the world's latency (ceil(latency/dt)
    /// steps). dt in [1 ms, 50 ms].
    void step_kinematic(const std::array<Vec2, kNumLegs>& foot_targets, double dt);

    /// Planar rigid-trunk mode (y, roll, yaw frozen): stance feet push
    /// through critically damped position servos saturated by the friction
    /// cone and the motor force cap; flight is ballistic. Semi-implicit
    /// integration, dt <= 5 ms. Throws NumericalDivergence when the trunk
    /// energy exceeds 10x its initial scale.
    void step_dynamic(const std::array<std::array<double, 3>, kNumLegs>& joint_targets,
                      double dt);

    /// Record a terminal status; further stepping throws.
    void mark_terminated(EpisodeStatus status);

    /// Diagnostic hook: place the trunk mid-air with the given planar state
    /// and release all anchors. Used by physics oracle tests and by the
    /// backflip analysis tooling.
    void teleport(double x, double z, double pitch, double vx, double vz, double pitch_rate);

    double ground_height(double x, double y) const;

private:
    struct Anchor {
        bool active = false;
        Vec3 pos;
    };

    void refresh_contacts();
    void update_support_violation(double dt);
    Vec3 commanded_foot_trunk(int leg, const Vec2& target) const;

    RobotModel model_;
    WorldParams world_;
    bool staircase_ = false;

    SimState state_;
    std::array<double, 9> rot_;  // row-major world-from-trunk rotation
    std::array<Anchor, kNumLegs> anchors_;
    std::deque<std::array<Vec2, kNumLegs>> kin_cmd_history_;
    std::deque<std::array<std::array<double, 3>, kNumLegs>> dyn_cmd_history_;
    double energy_floor_ = 50.0;  // divergence guard threshold basis (J)
    Vec3 com_offset_;             // trunk-frame CoM shift from WorldParams
    Vec2 ext_force_;              // horizontal disturbance (N)
};

}  // namespace gaitmimic
