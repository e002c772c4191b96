#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gaitmimic/randomize.hpp"
#include "gaitmimic/retarget.hpp"
#include "gaitmimic/reward.hpp"
#include "gaitmimic/sim.hpp"

namespace gaitmimic {

inline constexpr int kObsJointHistory = 3;
inline constexpr int kObsSize = 3 * 12 + 6 + 12 + 1;  // joints, IMU, feet, phase
inline constexpr int kPeriodicHead = 2 * kNumLegs * 2 + 1;  // A, b per leg/axis + dT
inline constexpr int kBackflipPerKeyFrame = 13;  // 12 angle deltas + interval adjust

/// Fixed-order observation: three most recent joint frames (newest first,
/// angles / pi), IMU (roll, pitch, yaw / pi; angular rates / 10), per-foot
/// hip-frame positions from forward kinematics (m, unscaled), gait phase.
std::vector<double> build_observation(const SimState& state,
                                      const std::array<std::array<double, 12>, kObsJointHistory>& history,
                                      double phase, const RobotModel& model);

/// Single-hidden-layer tanh network stored as a flat vector
/// [W1 (hidden x in), b1, W2 (out x hidden), b2]. Output squashing lives in
/// the action decoders so zero parameters mean the neutral policy.
struct PolicyParams {
    int n_in = kObsSize;
    int n_hidden = 32;
    int n_out = kPeriodicHead;
    std::vector<double> w;

    static std::size_t param_count(int n_in, int n_hidden, int n_out);
    static PolicyParams zeros(int n_in, int n_hidden, int n_out);

    /// Raw head outputs (linear). Throws DimensionMismatch when the
    /// observation or parameter vector size disagrees with the layout.
    std::vector<double> forward(const std::vector<double>& obs) const;

    std::string to_json() const;
    static PolicyParams from_json(const std::string& text);
};

/// A = 1 + 0.5 tanh, b = 0.03 tanh (m), dT = 0.5 * base_interval * tanh.
AdaptationAction decode_periodic_action(const std::vector<double>& raw, double base_interval_s);

struct KeyFrameAdjust {
    std::array<double, 12> angle_delta{};  // rad, in [-0.4, 0.4]
    double interval_mult = 1.0;            // in [0.5, 1.5]
};

/// Per key frame: angle deltas 0.4 tanh, interval multiplier 1 + 0.5 tanh.
std::vector<KeyFrameAdjust> decode_backflip_adjust(const std::vector<double>& raw,
                                                   std::size_t key_frames);

struct RolloutOptions {
    int max_steps = 2400;
    double arena_half_width = 0.5;
    double goal_distance = 10.0;
    bool stop_at_goal = false;       // true for evaluation, false for training
    bool use_stamp = true;
    bool use_motion = true;
    double speed_delta = 0.05;       // motion-consistency reference threshold
    double settle_time_s = 0.8;      // aperiodic: hold after the last key frame
    bool record = false;
};

struct RolloutResult {
    double ret = 0.0;
    int steps = 0;
    EpisodeStatus status = EpisodeStatus::kRunning;
    bool success = false;
    double distance_x = 0.0;
    double elapsed_s = 0.0;
    double mean_speed = 0.0;
    double stamp_mean = 0.0;         // per foot-step, in [-1, 0]
    double motion_mean = 0.0;        // per foot-step, in [-1, 1]
    double contact_agreement = 0.0;  // fraction of foot-steps with d == p
    double final_pitch = 0.0;        // unwrapped (aperiodic)
    std::vector<SimState> states;          // when record
    std::vector<RewardBreakdown> rewards;  // when record
};

/// Execute the program under the policy: per control step build the
/// observation, decode the adaptation, advance the template phase by one
/// frame with the adjusted interval, step the simulator, and accumulate the
/// task total reward. Aperiodic programs query the policy once at reset for
/// key-frame adjustments and run the planar dynamic mode.
RolloutResult rollout(const GaitProgram& program, const PolicyParams& params,
                      const RobotModel& model, const WorldParams& world, std::uint64_t seed,
                      const RolloutOptions& opts);

struct TrainConfig {
    int population = 32;
    double elite_frac = 0.25;
    int iterations = 40;
    int episode_steps = 2000;
    int seeds_per_candidate = 2;
    double noise_initial = 0.5;
    double noise_final = 0.05;
    TaskMode task = TaskMode::kPeriodic;
    bool randomize = true;
    bool use_stamp = true;
    bool use_motion = true;
    std::uint64_t master_seed = 1;
    RandomizationRanges ranges;

    void validate() const;
    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

struct CemIterStats {
    int iter = 0;
    double best_return = 0.0;
    double elite_mean = 0.0;
    double population_mean = 0.0;
    double sigma_mean = 0.0;
};

struct CemResult {
    std::vector<double> best;
    std::vector<double> mean;
    double best_return = 0.0;
    std::vector<CemIterStats> history;
};

/// Diagonal-Gaussian cross-entropy search from a zero mean. Candidates are
/// seeded by (seed, iter, index) so parallel evaluation order cannot change
/// the outcome; sigma is refit to the elites with a linearly decaying noise
/// schedule as a lower bound. Returns both the best candidate ever seen and
/// the final distribution mean; under a noisy objective the mean is the
/// robust pick since the single best score is inflated by evaluation luck.
CemResult cem_optimize(std::size_t dim,
                       const std::function<double(const std::vector<double>&, int, int)>& objective,
                       int population, double elite_frac, int iterations, double noise_initial,
                       double noise_final, std::uint64_t seed);

struct TrainResult {
    /// Final search-distribution mean, not the single best-scoring sample;
    /// with few evaluation worlds per candidate the latter overfits to them.
    PolicyParams policy;
    double best_return = 0.0;
    std::vector<CemIterStats> history;
};

TrainResult train(const TrainConfig& config, const GaitProgram& program, const RobotModel& model);

struct EvalMetrics {
    double success_rate = 0.0;
    double mean_speed = 0.0;   // m/s
    double mean_stamp = 0.0;   // per foot-step
    double mean_motion = 0.0;  // per foot-step
    double mean_contact_agreement = 0.0;
    std::vector<RolloutResult> episodes;
};

struct EvalOptions {
    int episodes = 20;
    std::uint64_t seed = 1;
    bool randomize_world = true;  // periodic default; aperiodic runs nominal
    RandomizationRanges ranges;
    RolloutOptions rollout;
};

/// Success on the periodic task means covering the goal distance without
/// termination; aperiodic success means landing within 0.5 rad of a full
/// rotation and settling upright. Episode seeds are independent, so the
/// metrics do not depend on evaluation order.
EvalMetrics evaluate(const PolicyParams& params, const GaitProgram& program,
                     const RobotModel& model, const EvalOptions& opts);

}  // namespace gaitmimic
