#include "gaitmimic/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace gaitmimic {
namespace {

constexpr double kGravity = 9.81;
constexpr double kContactTolerance = 1e-3;  // 1 mm
constexpr double kGroundStiffness = 20000.0;  // N/m
constexpr double kMaxLegForce = 150.0;        // N at full strength and battery
constexpr double kTrunkClearance = 0.05;      // trunk "touches ground" below this (m)
constexpr double kSupportMargin = 0.02;       // allowed CoM overhang (m)
constexpr double kUprightWeight = 0.05;       // soft prior in the trunk fit
constexpr std::size_t kMaxCommandHistory = 64;

using Mat3 = Eigen::Matrix3d;
using EVec3 = Eigen::Vector3d;

Mat3 to_eigen(const std::array<double, 9>& r) {
    Mat3 m;
    m << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
    return m;
}

std::array<double, 9> from_eigen(const Mat3& m) {
    return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

Mat3 rodrigues(const EVec3& w) {
    const double angle = w.norm();
    Mat3 skew;
    skew << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    if (angle < 1e-12) return Mat3::Identity() + skew;
    return Mat3::Identity() + std::sin(angle) / angle * skew +
           (1.0 - std::cos(angle)) / (angle * angle) * skew * skew;
}

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void extract_rpy(const Mat3& R, double& roll, double& pitch, double& yaw) {
    yaw = std::atan2(R(1, 0), R(0, 0));
    pitch = std::asin(clampd(R(2, 0), -1.0, 1.0));  // nose-up positive
    roll = std::atan2(R(2, 1), R(2, 2));
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 < 1e-18) return (p - a).norm();
    const double t = clampd((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

const char* episode_status_name(EpisodeStatus s) {
    switch (s) {
        case EpisodeStatus::kRunning: return "running";
        case EpisodeStatus::kFell: return "fell";
        case EpisodeStatus::kOutOfArea: return "out_of_area";
        case EpisodeStatus::kMaxSteps: return "max_steps";
    }
    return "unknown";
}

double support_polygon_distance(const std::vector<Vec2>& support_xy, const Vec2& com_xy) {
    if (support_xy.empty()) return std::numeric_limits<double>::infinity();
    if (support_xy.size() == 1) return (com_xy - support_xy[0]).norm();
    const auto hull = convex_hull(support_xy);
    if (hull.size() == 1) return (com_xy - hull[0]).norm();
    if (hull.size() == 2) return segment_distance(hull[0], hull[1], com_xy);
    bool inside = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % hull.size()];
        if (cross2(a, b, com_xy) < 0.0) {
            inside = false;
            break;
        }
    }
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i)
        best = std::min(best, segment_distance(hull[i], hull[(i + 1) % hull.size()], com_xy));
    return best;
}

EpisodeStatus check_termination(const SimState& state, double arena_half_width, TaskMode task) {
    if (state.status != EpisodeStatus::kRunning) return state.status;
    if (task == TaskMode::kPeriodic) {
        if (state.support_violation_s > 0.1) return EpisodeStatus::kFell;
        if (state.position.z < 0.4 * state.standing_height) return EpisodeStatus::kFell;
        if (std::abs(state.roll) > 1.0 || std::abs(state.pitch) > 1.0) return EpisodeStatus::kFell;
        if (state.airborne_s > 0.2) return EpisodeStatus::kFell;
    } else {
        const double full_turn = 2.0 * std::numbers::pi;
        if (state.position.z < kTrunkClearance && std::abs(state.pitch - full_turn) > 0.5)
            return EpisodeStatus::kFell;
    }
    if (std::abs(state.position.y) > arena_half_width || state.position.x < -0.5)
        return EpisodeStatus::kOutOfArea;
    return EpisodeStatus::kRunning;
}

Simulator::Simulator(const RobotModel& model, const WorldParams& world, std::uint64_t seed,
                     bool staircase)
    : model_(model), world_(world), staircase_(staircase) {
    reset(seed);
}

double Simulator::ground_height(double x, double /*y*/) const {
    if (!staircase_ || x <= 0.0) return 0.0;
    return world_.step_height_m * std::floor(x / world_.step_width_m);
}

void Simulator::reset(std::uint64_t /*seed*/) {
    model_.validate();
    state_ = SimState{};
    state_.standing_height = model_.standing_height;
    state_.position = {0.0, 0.0, model_.standing_height};
    rot_ = from_eigen(Mat3::Identity());

    const auto standing = leg_ik({0.0, model_.standing_height}, model_.l1, model_.l2);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        state_.joint_angles[leg] = {0.0, standing[0], standing[1]};
        const Vec3& hip = model_.hip_offset[leg];
        state_.foot_world[leg] = {hip.x, hip.y, 0.0};
        anchors_[leg].active = true;
        anchors_[leg].pos = state_.foot_world[leg];
        state_.contact[leg] = 1;
    }
    kin_cmd_history_.clear();
    dyn_cmd_history_.clear();
    com_offset_ = {world_.com_noise_m, 0.0, 0.0};
    ext_force_ = {world_.ext_force_n * std::cos(world_.ext_force_dir_rad),
                  world_.ext_force_n * std::sin(world_.ext_force_dir_rad)};
    const double e0 = model_.trunk_mass * world_.mass_mult * kGravity * model_.standing_height;
    energy_floor_ = std::max(e0, 50.0);
}

void Simulator::mark_terminated(EpisodeStatus status) {
    if (status != EpisodeStatus::kRunning) state_.status = status;
}

Vec3 Simulator::commanded_foot_trunk(int leg, const Vec2& target) const {
    const Vec3& hip = model_.hip_offset[leg];
    const double gx = clampd(target.x, -model_.x_lim_x, model_.x_lim_x);
    const double gz = clampd(target.y, -model_.x_lim_z, model_.x_lim_z);
    return {hip.x + gx, hip.y, -model_.standing_height + gz};
}

void Simulator::refresh_contacts() {
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec3& f = state_.foot_world[leg];
        state_.contact[leg] = f.z <= ground_height(f.x, f.y) + kContactTolerance ? 1 : 0;
    }
}

void Simulator::update_support_violation(double dt) {
    std::vector<Vec2> support;
    for (int leg = 0; leg < kNumLegs; ++leg)
        if (state_.contact[leg])
            support.push_back({state_.foot_world[leg].x, state_.foot_world[leg].y});
    if (support.empty()) return;  // airborne handled by its own timer

    const Mat3 R = to_eigen(rot_);
    const EVec3 com = EVec3(state_.position.x, state_.position.y, state_.position.z) +
                      R * EVec3(com_offset_.x, com_offset_.y, com_offset_.z);
    // A constant horizontal push tips the robot like a CoM shift of F*h/(m*g).
    const double mg = model_.trunk_mass * world_.mass_mult * kGravity;
    const Vec2 com_eff{com.x() + ext_force_.x * com.z() / mg,
                       com.y() + ext_force_.y * com.z() / mg};
    const double dist = support_polygon_distance(support, com_eff);
    if (dist > kSupportMargin)
        state_.support_violation_s += dt;
    else
        state_.support_violation_s = 0.0;
}

void Simulator::step_kinematic(const std::array<Vec2, kNumLegs>& foot_targets, double dt) {
    if (state_.status != EpisodeStatus::kRunning)
        throw std::logic_error("step_kinematic: episode already terminated");
    if (!(dt >= 1e-3 - 1e-12 && dt <= 0.05 + 1e-12))
        throw std::invalid_argument("step_kinematic: dt outside [1 ms, 50 ms]");

    kin_cmd_history_.push_back(foot_targets);
    if (kin_cmd_history_.size() > kMaxCommandHistory) kin_cmd_history_.pop_front();
    const auto delay = static_cast<std::size_t>(std::ceil(world_.latency_s / dt - 1e-12));
    const std::size_t idx = kin_cmd_history_.size() > delay ? kin_cmd_history_.size() - 1 - delay : 0;
    const auto& eff = kin_cmd_history_[idx];

    Mat3 R = to_eigen(rot_);
    EVec3 pos(state_.position.x, state_.position.y, state_.position.z);
    const EVec3 prev_pos = pos;
    const double prev_roll = state_.roll, prev_pitch = state_.pitch, prev_yaw = state_.yaw;

    std::array<EVec3, kNumLegs> cmd_trunk;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec3 c = commanded_foot_trunk(leg, eff[leg]);
        cmd_trunk[leg] = {c.x, c.y, c.z};
    }

    // Swing/stance decision from the commanded height under the nominal
    // standing trunk, so it depends only on the command: a target at or below
    // standing depth is a stance foot. Using the current (fitted) trunk pose
    // here instead lets the trunk ride the mean command depth and release
    // shallow-stance feet one by one. A released foot drops its anchor
    // immediately; a landing foot anchors where it touches.
    const double reach = model_.l1 + model_.l2;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const bool grounded_cmd =
            cmd_trunk[leg].z() <= -model_.standing_height + kContactTolerance;
        if (!grounded_cmd) {
            anchors_[leg].active = false;
            continue;
        }
        if (anchors_[leg].active) {
            // Slip release when the anchor has drifted beyond leg reach.
            const EVec3 rel = R.transpose() * (EVec3(anchors_[leg].pos.x, anchors_[leg].pos.y,
                                                     anchors_[leg].pos.z) -
                                               pos);
            const Vec2 planar{rel.x() - model_.hip_offset[leg].x, -rel.z()};
            if (planar.norm() > reach * 1.02) anchors_[leg].active = false;
        }
        if (!anchors_[leg].active) {
            const EVec3 w = pos + R * cmd_trunk[leg];
            anchors_[leg].active = true;
            anchors_[leg].pos = {w.x(), w.y(), ground_height(w.x(), w.y())};
        }
    }

    std::vector<int> stance;
    for (int leg = 0; leg < kNumLegs; ++leg)
        if (anchors_[leg].active) stance.push_back(leg);

    if (stance.empty()) {
        state_.airborne_s += dt;
        state_.velocity = {0.0, 0.0, 0.0};
        state_.angular_velocity = {0.0, 0.0, 0.0};
    } else {
        state_.airborne_s = 0.0;
        // Damped Gauss-Newton fit of the 6-DOF trunk pose to the stance
        // anchors, with a weak upright prior on roll and pitch.
        for (int iter = 0; iter < 3; ++iter) {
            const std::size_t rows = stance.size() * 3 + 2;
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, 6);
            Eigen::VectorXd r = Eigen::VectorXd::Zero(rows);
            std::size_t row = 0;
            for (int leg : stance) {
                const EVec3 rc = R * cmd_trunk[leg];
                const EVec3 resid =
                    pos + rc -
                    EVec3(anchors_[leg].pos.x, anchors_[leg].pos.y, anchors_[leg].pos.z);
                J.block<3, 3>(row, 0) = Mat3::Identity();
                Mat3 skew;
                skew << 0, -rc.z(), rc.y(), rc.z(), 0, -rc.x(), -rc.y(), rc.x(), 0;
                J.block<3, 3>(row, 3) = -skew;
                r.segment<3>(row) = resid;
                row += 3;
            }
            double roll, pitch, yaw;
            extract_rpy(R, roll, pitch, yaw);
            const double sw = std::sqrt(kUprightWeight);
            J(row, 3) = sw;
            r(row) = sw * roll;
            ++row;
            J(row, 4) = -sw;  // nose-up pitch decreases under +y rotation
            r(row) = sw * pitch;

            const Eigen::Matrix<double, 6, 6> H =
                J.transpose() * J + 1e-6 * Eigen::Matrix<double, 6, 6>::Identity();
            const Eigen::Matrix<double, 6, 1> delta = H.ldlt().solve(-J.transpose() * r);
            pos += delta.head<3>();
            R = rodrigues(delta.tail<3>()) * R;
        }
    }

    double roll, pitch, yaw;
    extract_rpy(R, roll, pitch, yaw);
    state_.position = {pos.x(), pos.y(), pos.z()};
    state_.roll = roll;
    state_.pitch = pitch;
    state_.yaw = yaw;
    state_.velocity = {(pos.x() - prev_pos.x()) / dt, (pos.y() - prev_pos.y()) / dt,
                       (pos.z() - prev_pos.z()) / dt};
    state_.angular_velocity = {(roll - prev_roll) / dt, (pitch - prev_pitch) / dt,
                               (yaw - prev_yaw) / dt};

    for (int leg = 0; leg < kNumLegs; ++leg) {
        if (anchors_[leg].active) {
            state_.foot_world[leg] = anchors_[leg].pos;
        } else {
            EVec3 w = pos + R * cmd_trunk[leg];
            const double gh = ground_height(w.x(), w.y());
            if (w.z() < gh) w.z() = gh;
            state_.foot_world[leg] = {w.x(), w.y(), w.z()};
        }
        const EVec3 rel =
            R.transpose() * (EVec3(state_.foot_world[leg].x, state_.foot_world[leg].y,
                                   state_.foot_world[leg].z) -
                             pos);
        const Vec2 target = clamp_to_annulus({rel.x() - model_.hip_offset[leg].x, -rel.z()},
                                             model_.l1, model_.l2);
        const auto angles = leg_ik(target, model_.l1, model_.l2);
        state_.joint_angles[leg] = {
            0.0, clampd(angles[0], model_.hip_range.lo, model_.hip_range.hi),
            clampd(angles[1], model_.knee_range.lo, model_.knee_range.hi)};
    }

    rot_ = from_eigen(R);
    refresh_contacts();
    update_support_violation(dt);
    state_.time_s += dt;
    ++state_.step_count;
}

void Simulator::step_dynamic(const std::array<std::array<double, 3>, kNumLegs>& joint_targets,
                             double dt) {
    if (state_.status != EpisodeStatus::kRunning)
        throw std::logic_error("step_dynamic: episode already terminated");
    if (!(dt > 0.0 && dt <= 5e-3 + 1e-12))
        throw std::invalid_argument("step_dynamic: dt outside (0, 5 ms]");

    dyn_cmd_history_.push_back(joint_targets);
    if (dyn_cmd_history_.size() > kMaxCommandHistory) dyn_cmd_history_.pop_front();
    const auto delay = static_cast<std::size_t>(std::ceil(world_.latency_s / dt - 1e-12));
    const std::size_t idx = dyn_cmd_history_.size() > delay ? dyn_cmd_history_.size() - 1 - delay : 0;
    const auto& eff = dyn_cmd_history_[idx];

    const double mass = model_.trunk_mass * world_.mass_mult;
    const double inertia = model_.pitch_inertia * world_.inertia_mult;
    const double theta = state_.pitch;
    const double c = std::cos(theta), s = std::sin(theta);
    auto rot2 = [&](double bx, double bz) { return Vec2{c * bx - s * bz, s * bx + c * bz}; };

    Vec2 pos{state_.position.x, state_.position.z};
    Vec2 vel{state_.velocity.x, state_.velocity.z};
    double omega = state_.angular_velocity.y;
    const Vec2 com = pos + rot2(com_offset_.x, com_offset_.z);

    Vec2 force{ext_force_.x, -mass * kGravity};
    double torque = 0.0;

    const double servo_damping = 2.0 * std::sqrt(kGroundStiffness * mass / kNumLegs) +
                                 400.0 * (world_.motor_friction + world_.joint_friction);
    const double force_cap =
        kMaxLegForce * world_.strength_mult * (world_.battery_v / 16.8);

    std::array<std::array<double, 3>, kNumLegs> q{};
    for (int leg = 0; leg < kNumLegs; ++leg) {
        q[leg] = {0.0, clampd(eff[leg][1], model_.hip_range.lo, model_.hip_range.hi),
                  clampd(eff[leg][2], model_.knee_range.lo, model_.knee_range.hi)};
        const Vec2 fk = leg_fk(q[leg][1], q[leg][2], model_.l1, model_.l2);
        const Vec2 foot_body{model_.hip_offset[leg].x + fk.x, -fk.y};
        const Vec2 p_cmd = pos + rot2(foot_body.x, foot_body.y);

        if (!anchors_[leg].active && p_cmd.y <= 0.0) {
            anchors_[leg].active = true;
            anchors_[leg].pos = {p_cmd.x, model_.hip_offset[leg].y, 0.0};
        }
        if (!anchors_[leg].active) {
            state_.foot_world[leg] = {p_cmd.x, model_.hip_offset[leg].y, p_cmd.y};
            continue;
        }

        Vec2 a{anchors_[leg].pos.x, 0.0};
        const Vec2 r_pt = p_cmd - com;
        const Vec2 v_pt{vel.x - omega * r_pt.y, vel.y + omega * r_pt.x};
        Vec2 F = (a - p_cmd) * kGroundStiffness - v_pt * servo_damping;
        if (F.y <= 0.0) {
            anchors_[leg].active = false;
            state_.foot_world[leg] = {p_cmd.x, model_.hip_offset[leg].y, p_cmd.y};
            continue;
        }
        const double f_tan_max = world_.lateral_friction * F.y;
        if (std::abs(F.x) > f_tan_max) {
            F.x = F.x > 0.0 ? f_tan_max : -f_tan_max;
            // Let the anchor slip so the tangential spring stays on the cone.
            a.x = p_cmd.x + (F.x + servo_damping * v_pt.x) / kGroundStiffness;
            anchors_[leg].pos.x = a.x;
        }
        const double fmag = F.norm();
        if (fmag > force_cap) F = F * (force_cap / fmag);

        force = force + F;
        const Vec2 r_contact = a - com;
        torque += r_contact.x * F.y - r_contact.y * F.x;
        state_.foot_world[leg] = {a.x, model_.hip_offset[leg].y, 0.0};
    }

    vel = vel + force * (dt / mass);
    omega += dt * torque / inertia;
    pos = pos + vel * dt;
    const double pitch = theta + dt * omega;

    state_.position = {pos.x, 0.0, pos.y};
    state_.velocity = {vel.x, 0.0, vel.y};
    state_.pitch = pitch;
    state_.roll = 0.0;
    state_.yaw = 0.0;
    state_.angular_velocity = {0.0, omega, 0.0};
    state_.joint_angles = q;

    const double cp = std::cos(pitch), sp = std::sin(pitch);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        if (anchors_[leg].active) continue;
        const Vec2 fk = leg_fk(q[leg][1], q[leg][2], model_.l1, model_.l2);
        const Vec2 foot_body{model_.hip_offset[leg].x + fk.x, -fk.y};
        const Vec2 w{pos.x + cp * foot_body.x - sp * foot_body.y,
                     pos.y + sp * foot_body.x + cp * foot_body.y};
        state_.foot_world[leg] = {w.x, model_.hip_offset[leg].y, w.y};
    }

    const double energy = 0.5 * mass * vel.dot(vel) + 0.5 * inertia * omega * omega +
                          mass * kGravity * pos.y;
    if (energy > 10.0 * energy_floor_)
        throw NumericalDivergence("trunk energy " + std::to_string(energy) + " J exceeds " +
                                  std::to_string(10.0 * energy_floor_) + " J");

    // Row-major rotation for the planar pitch so rpy extraction stays valid.
    rot_ = {cp, 0.0, -sp, 0.0, 1.0, 0.0, sp, 0.0, cp};
    refresh_contacts();
    state_.time_s += dt;
    ++state_.step_count;
}

void Simulator::teleport(double x, double z, double pitch, double vx, double vz,
                         double pitch_rate) {
    state_.position = {x, 0.0, z};
    state_.velocity = {vx, 0.0, vz};
    state_.pitch = pitch;
    state_.roll = 0.0;
    state_.yaw = 0.0;
    state_.angular_velocity = {0.0, pitch_rate, 0.0};
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    rot_ = {cp, 0.0, -sp, 0.0, 1.0, 0.0, sp, 0.0, cp};
    for (int leg = 0; leg < kNumLegs; ++leg) {
        anchors_[leg].active = false;
        const Vec2 fk =
            leg_fk(state_.joint_angles[leg][1], state_.joint_angles[leg][2], model_.l1, model_.l2);
        const Vec2 foot_body{model_.hip_offset[leg].x + fk.x, -fk.y};
        state_.foot_world[leg] = {x + cp * foot_body.x - sp * foot_body.y,
                                  model_.hip_offset[leg].y, z + sp * foot_body.x + cp * foot_body.y};
    }
    refresh_contacts();
}

}  // namespace gaitmimic
