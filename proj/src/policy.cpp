#include "gaitmimic/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "gaitmimic/util.hpp"

namespace gaitmimic {
namespace {

using nlohmann::json;

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

std::array<double, 12> flatten_joints(const SimState& state) {
    std::array<double, 12> out{};
    for (int leg = 0; leg < kNumLegs; ++leg)
        for (int j = 0; j < 3; ++j) out[3 * leg + j] = state.joint_angles[leg][j];
    return out;
}

}  // namespace

std::vector<double> build_observation(
    const SimState& state, const std::array<std::array<double, 12>, kObsJointHistory>& history,
    double phase, const RobotModel& model) {
    std::vector<double> obs;
    obs.reserve(kObsSize);
    for (const auto& frame : history)
        for (double a : frame) obs.push_back(a / std::numbers::pi);
    obs.push_back(state.roll / std::numbers::pi);
    obs.push_back(state.pitch / std::numbers::pi);
    obs.push_back(state.yaw / std::numbers::pi);
    obs.push_back(state.angular_velocity.x / 10.0);
    obs.push_back(state.angular_velocity.y / 10.0);
    obs.push_back(state.angular_velocity.z / 10.0);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec2 fk = leg_fk(state.joint_angles[leg][1], state.joint_angles[leg][2], model.l1,
                               model.l2);
        obs.push_back(fk.x);
        obs.push_back(0.0);
        obs.push_back(-fk.y);
    }
    obs.push_back(phase);
    return obs;
}

std::size_t PolicyParams::param_count(int n_in, int n_hidden, int n_out) {
    return static_cast<std::size_t>(n_hidden) * n_in + n_hidden +
           static_cast<std::size_t>(n_out) * n_hidden + n_out;
}

PolicyParams PolicyParams::zeros(int n_in, int n_hidden, int n_out) {
    PolicyParams p;
    p.n_in = n_in;
    p.n_hidden = n_hidden;
    p.n_out = n_out;
    p.w.assign(param_count(n_in, n_hidden, n_out), 0.0);
    return p;
}

std::vector<double> PolicyParams::forward(const std::vector<double>& obs) const {
    if (static_cast<int>(obs.size()) != n_in)
        throw DimensionMismatch("observation size " + std::to_string(obs.size()) +
                                " does not match policy input " + std::to_string(n_in));
    if (w.size() != param_count(n_in, n_hidden, n_out))
        throw DimensionMismatch("parameter vector size " + std::to_string(w.size()) +
                                " does not match layout " +
                                std::to_string(param_count(n_in, n_hidden, n_out)));
    const std::size_t w1 = 0;
    const std::size_t b1 = w1 + static_cast<std::size_t>(n_hidden) * n_in;
    const std::size_t w2 = b1 + n_hidden;
    const std::size_t b2 = w2 + static_cast<std::size_t>(n_out) * n_hidden;

    std::vector<double> hidden(n_hidden);
    for (int k = 0; k < n_hidden; ++k) {
        double acc = w[b1 + k];
        const std::size_t row = w1 + static_cast<std::size_t>(k) * n_in;
        for (int i = 0; i < n_in; ++i) acc += w[row + i] * obs[i];
        hidden[k] = std::tanh(acc);
    }
    std::vector<double> out(n_out);
    for (int o = 0; o < n_out; ++o) {
        double acc = w[b2 + o];
        const std::size_t row = w2 + static_cast<std::size_t>(o) * n_hidden;
        for (int k = 0; k < n_hidden; ++k) acc += w[row + k] * hidden[k];
        out[o] = acc;
    }
    return out;
}

std::string PolicyParams::to_json() const {
    json j;
    j["n_in"] = n_in;
    j["n_hidden"] = n_hidden;
    j["n_out"] = n_out;
    j["w"] = w;
    return j.dump(2) + "\n";
}

PolicyParams PolicyParams::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("policy params JSON: ") + e.what());
    }
    PolicyParams p;
    try {
        p.n_in = j.at("n_in").get<int>();
        p.n_hidden = j.at("n_hidden").get<int>();
        p.n_out = j.at("n_out").get<int>();
        p.w = j.at("w").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("policy params JSON: ") + e.what());
    }
    if (p.w.size() != PolicyParams::param_count(p.n_in, p.n_hidden, p.n_out))
        throw DimensionMismatch("policy params JSON: weight count does not match layout");
    return p;
}

AdaptationAction decode_periodic_action(const std::vector<double>& raw, double base_interval_s) {
    if (raw.size() != kPeriodicHead)
        throw DimensionMismatch("periodic head needs " + std::to_string(kPeriodicHead) +
                                " outputs, got " + std::to_string(raw.size()));
    AdaptationAction act;
    for (int leg = 0; leg < kNumLegs; ++leg)
        for (int axis = 0; axis < 2; ++axis) {
            act.scale[leg][axis] = 1.0 + 0.5 * std::tanh(raw[2 * leg + axis]);
            act.offset[leg][axis] = 0.03 * std::tanh(raw[8 + 2 * leg + axis]);
        }
    act.dt_adjust = 0.5 * base_interval_s * std::tanh(raw[16]);
    return act;
}

std::vector<KeyFrameAdjust> decode_backflip_adjust(const std::vector<double>& raw,
                                                   std::size_t key_frames) {
    if (raw.size() != key_frames * kBackflipPerKeyFrame)
        throw DimensionMismatch("aperiodic head needs " +
                                std::to_string(key_frames * kBackflipPerKeyFrame) +
                                " outputs, got " + std::to_string(raw.size()));
    std::vector<KeyFrameAdjust> out(key_frames);
    for (std::size_t k = 0; k < key_frames; ++k) {
        for (int j = 0; j < 12; ++j)
            out[k].angle_delta[j] = 0.4 * std::tanh(raw[k * kBackflipPerKeyFrame + j]);
        out[k].interval_mult = 1.0 + 0.5 * std::tanh(raw[k * kBackflipPerKeyFrame + 12]);
    }
    return out;
}

namespace {

RolloutResult rollout_periodic(const GaitProgram& program, const PolicyParams& params,
                               const RobotModel& model, const WorldParams& world,
                               std::uint64_t seed, const RolloutOptions& opts) {
    RolloutResult result;
    Simulator sim(model, world, seed);
    const int period = program.period;
    const double base = program.base_interval_s;

    std::array<std::array<double, 12>, kObsJointHistory> history;
    history.fill(flatten_joints(sim.state()));
    std::array<Vec3, kNumLegs> prev_feet = sim.state().foot_world;

    int phase_idx = 0;
    double stamp_acc = 0.0, motion_acc = 0.0;
    long agree = 0;

    for (int step = 0; step < opts.max_steps; ++step) {
        const auto obs =
            build_observation(sim.state(), history, static_cast<double>(phase_idx) / period, model);
        const auto act = decode_periodic_action(params.forward(obs), base);
        const double dt = clampd(base + act.dt_adjust, 1e-3, 0.05);

        std::array<Vec2, kNumLegs> targets;
        for (int leg = 0; leg < kNumLegs; ++leg)
            targets[leg] = {
                apply_adaptation(program.f[leg][0][phase_idx], act, leg, 0, model.x_lim_x).g,
                apply_adaptation(program.f[leg][1][phase_idx], act, leg, 1, model.x_lim_z).g};
        sim.step_kinematic(targets, dt);
        const SimState& st = sim.state();

        for (int f = kObsJointHistory - 1; f > 0; --f) history[f] = history[f - 1];
        history[0] = flatten_joints(st);

        RewardBreakdown b;
        b.r_lin = r_lin(st.velocity.x);
        b.r_ang = r_ang(st.angular_velocity.z);
        b.r_body = r_body(st.velocity.y, st.roll, st.yaw);
        for (int leg = 0; leg < kNumLegs; ++leg) {
            const int d = program.d[leg][phase_idx];
            const int p = st.contact[leg];
            if (opts.use_stamp) b.stamp[leg] = stamp_reward(d, p);
            const Vec2 v_real{(st.foot_world[leg].x - prev_feet[leg].x) / dt,
                              (st.foot_world[leg].z - prev_feet[leg].z) / dt};
            if (opts.use_motion)
                b.motion[leg] =
                    motion_consistency(program.v_ref[leg][phase_idx], v_real, opts.speed_delta);
            if (d == p) ++agree;
        }
        b.total = total_periodic(b);
        result.ret += b.total;
        stamp_acc += b.stamp_sum() / kNumLegs;
        motion_acc += b.motion_sum() / kNumLegs;
        prev_feet = st.foot_world;
        if (opts.record) {
            result.states.push_back(st);
            result.rewards.push_back(b);
        }
        result.steps = step + 1;
        result.distance_x = st.position.x;
        result.elapsed_s = st.time_s;

        const EpisodeStatus status =
            check_termination(st, opts.arena_half_width, TaskMode::kPeriodic);
        if (status != EpisodeStatus::kRunning) {
            sim.mark_terminated(status);
            result.status = status;
            break;
        }
        if (st.position.x >= opts.goal_distance) {
            result.success = true;
            if (opts.stop_at_goal) break;
        }
        phase_idx = (phase_idx + 1) % period;
    }
    if (result.status == EpisodeStatus::kRunning && result.steps >= opts.max_steps)
        result.status = EpisodeStatus::kMaxSteps;
    if (result.steps > 0) {
        result.stamp_mean = stamp_acc / result.steps;
        result.motion_mean = motion_acc / result.steps;
        result.contact_agreement =
            static_cast<double>(agree) / (static_cast<double>(result.steps) * kNumLegs);
    }
    if (result.elapsed_s > 0.0) result.mean_speed = result.distance_x / result.elapsed_s;
    return result;
}

RolloutResult rollout_aperiodic(const GaitProgram& program, const PolicyParams& params,
                                const RobotModel& model, const WorldParams& world,
                                std::uint64_t seed, const RolloutOptions& opts) {
    RolloutResult result;
    Simulator sim(model, world, seed);
    const std::size_t n_kf = program.key_frames.size();
    if (n_kf < 2) throw MalformedInput("aperiodic rollout: need at least 2 key frames");

    std::array<std::array<double, 12>, kObsJointHistory> history;
    history.fill(flatten_joints(sim.state()));
    const auto obs = build_observation(sim.state(), history, 0.0, model);
    const auto adjust = decode_backflip_adjust(params.forward(obs), n_kf);

    std::vector<KeyFrame> kf = program.key_frames;
    for (std::size_t k = 0; k < n_kf; ++k) {
        for (int leg = 0; leg < kNumLegs; ++leg) {
            kf[k].joint_angles[3 * leg + 1] =
                clampd(kf[k].joint_angles[3 * leg + 1] + adjust[k].angle_delta[3 * leg + 1],
                       model.hip_range.lo, model.hip_range.hi);
            kf[k].joint_angles[3 * leg + 2] =
                clampd(kf[k].joint_angles[3 * leg + 2] + adjust[k].angle_delta[3 * leg + 2],
                       model.knee_range.lo, model.knee_range.hi);
        }
        kf[k].interval_s = std::max(1e-3, kf[k].interval_s * adjust[k].interval_mult);
    }
    std::vector<double> start(n_kf, 0.0);
    for (std::size_t k = 1; k < n_kf; ++k) start[k] = start[k - 1] + kf[k - 1].interval_s;
    const double plan_end = start[n_kf - 1] + kf[n_kf - 1].interval_s;
    const double total_time = plan_end + opts.settle_time_s;

    const double dt = 0.002;
    std::array<Vec3, kNumLegs> prev_feet = sim.state().foot_world;
    double stamp_acc = 0.0, motion_acc = 0.0;
    long agree = 0;
    double t = 0.0;
    int steps = 0;
    const int step_cap = std::min(opts.max_steps, static_cast<int>(total_time / dt) + 1);

    while (t < total_time && steps < step_cap) {
        // Segment lookup with linear interpolation of joint targets and the
        // reference rotation; references hold their final values afterwards.
        std::size_t k = 0;
        while (k + 1 < n_kf && t >= start[k + 1]) ++k;
        std::array<std::array<double, 3>, kNumLegs> targets{};
        double beta_ref;
        std::array<int, kNumLegs> d_ref{};
        std::array<Vec2, kNumLegs> v_ref;
        if (k + 1 < n_kf) {
            const double u = clampd((t - start[k]) / kf[k].interval_s, 0.0, 1.0);
            for (int leg = 0; leg < kNumLegs; ++leg)
                for (int j = 0; j < 3; ++j)
                    targets[leg][j] = (1.0 - u) * kf[k].joint_angles[3 * leg + j] +
                                      u * kf[k + 1].joint_angles[3 * leg + j];
            beta_ref = (1.0 - u) * kf[k].beta_ref + u * kf[k + 1].beta_ref;
            for (int leg = 0; leg < kNumLegs; ++leg) {
                d_ref[leg] = kf[k].d[leg];
                v_ref[leg] = (kf[k + 1].foot_ref[leg] - kf[k].foot_ref[leg]) / kf[k].interval_s;
            }
        } else {
            for (int leg = 0; leg < kNumLegs; ++leg)
                for (int j = 0; j < 3; ++j) targets[leg][j] = kf[n_kf - 1].joint_angles[3 * leg + j];
            beta_ref = kf[n_kf - 1].beta_ref;
            d_ref = kf[n_kf - 1].d;
            for (auto& v : v_ref) v = {0.0, 0.0};
        }

        sim.step_dynamic(targets, dt);
        const SimState& st = sim.state();

        RewardBreakdown b;
        b.r_angle = angle_consistency(beta_ref, st.pitch);
        for (int leg = 0; leg < kNumLegs; ++leg) {
            const int p = st.contact[leg];
            if (opts.use_stamp) b.stamp[leg] = stamp_reward(d_ref[leg], p);
            const Vec2 v_real{(st.foot_world[leg].x - prev_feet[leg].x) / dt,
                              (st.foot_world[leg].z - prev_feet[leg].z) / dt};
            if (opts.use_motion)
                b.motion[leg] = motion_consistency(v_ref[leg], v_real, opts.speed_delta);
            if (d_ref[leg] == p) ++agree;
        }
        b.total = total_backflip(b);
        result.ret += b.total;
        stamp_acc += b.stamp_sum() / kNumLegs;
        motion_acc += b.motion_sum() / kNumLegs;
        prev_feet = st.foot_world;
        if (opts.record) {
            result.states.push_back(st);
            result.rewards.push_back(b);
        }
        t += dt;
        ++steps;
        result.steps = steps;
        result.distance_x = st.position.x;
        result.elapsed_s = st.time_s;
        result.final_pitch = st.pitch;

        const EpisodeStatus status =
            check_termination(st, opts.arena_half_width, TaskMode::kBackflip);
        if (status != EpisodeStatus::kRunning) {
            sim.mark_terminated(status);
            result.status = status;
            break;
        }
    }
    if (result.status == EpisodeStatus::kRunning) result.status = EpisodeStatus::kMaxSteps;

    const SimState& st = sim.state();
    const double full_turn = 2.0 * std::numbers::pi;
    const bool any_contact = st.contact[0] || st.contact[1] || st.contact[2] || st.contact[3];
    result.success = result.status == EpisodeStatus::kMaxSteps &&
                     std::abs(st.pitch - full_turn) <= 0.5 &&
                     st.position.z >= 0.5 * st.standing_height && any_contact;
    if (result.steps > 0) {
        result.stamp_mean = stamp_acc / result.steps;
        result.motion_mean = motion_acc / result.steps;
        result.contact_agreement =
            static_cast<double>(agree) / (static_cast<double>(result.steps) * kNumLegs);
    }
    if (result.elapsed_s > 0.0) result.mean_speed = result.distance_x / result.elapsed_s;
    return result;
}

}  // namespace

RolloutResult rollout(const GaitProgram& program, const PolicyParams& params,
                      const RobotModel& model, const WorldParams& world, std::uint64_t seed,
                      const RolloutOptions& opts) {
    if (program.mode == TaskMode::kPeriodic) {
        if (program.period < 2 || program.f[0][0].empty())
            throw MalformedInput("periodic rollout: program has no templates");
        return rollout_periodic(program, params, model, world, seed, opts);
    }
    return rollout_aperiodic(program, params, model, world, seed, opts);
}

void TrainConfig::validate() const {
    if (population < 8) throw MalformedInput("train config: population must be >= 8");
    if (!(elite_frac > 0.0 && elite_frac <= 0.5))
        throw MalformedInput("train config: elite_frac must be in (0, 0.5]");
    if (seeds_per_candidate < 1) throw MalformedInput("train config: seeds must be >= 1");
    if (iterations < 1) throw MalformedInput("train config: iterations must be >= 1");
    if (episode_steps < 1) throw MalformedInput("train config: episode_steps must be >= 1");
    ranges.validate();
}

std::string TrainConfig::to_json() const {
    json j;
    j["population"] = population;
    j["elite_frac"] = elite_frac;
    j["iterations"] = iterations;
    j["episode_steps"] = episode_steps;
    j["seeds_per_candidate"] = seeds_per_candidate;
    j["noise_initial"] = noise_initial;
    j["noise_final"] = noise_final;
    j["task"] = task == TaskMode::kPeriodic ? "periodic" : "backflip";
    j["randomize"] = randomize;
    j["use_stamp"] = use_stamp;
    j["use_motion"] = use_motion;
    j["master_seed"] = master_seed;
    j["ranges"] = json::parse(ranges.to_json());
    return j.dump(2) + "\n";
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("train config JSON: ") + e.what());
    }
    TrainConfig c;
    try {
        if (j.contains("population")) c.population = j.at("population").get<int>();
        if (j.contains("elite_frac")) c.elite_frac = j.at("elite_frac").get<double>();
        if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
        if (j.contains("episode_steps")) c.episode_steps = j.at("episode_steps").get<int>();
        if (j.contains("seeds_per_candidate"))
            c.seeds_per_candidate = j.at("seeds_per_candidate").get<int>();
        if (j.contains("noise_initial")) c.noise_initial = j.at("noise_initial").get<double>();
        if (j.contains("noise_final")) c.noise_final = j.at("noise_final").get<double>();
        if (j.contains("task")) {
            const std::string t = j.at("task").get<std::string>();
            if (t == "periodic")
                c.task = TaskMode::kPeriodic;
            else if (t == "backflip")
                c.task = TaskMode::kBackflip;
            else
                throw MalformedInput("train config JSON: unknown task '" + t + "'");
        }
        if (j.contains("randomize")) c.randomize = j.at("randomize").get<bool>();
        if (j.contains("use_stamp")) c.use_stamp = j.at("use_stamp").get<bool>();
        if (j.contains("use_motion")) c.use_motion = j.at("use_motion").get<bool>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("ranges"))
            c.ranges = RandomizationRanges::from_json(j.at("ranges").dump());
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("train config JSON: ") + e.what());
    }
    c.validate();
    return c;
}

CemResult cem_optimize(
    std::size_t dim, const std::function<double(const std::vector<double>&, int, int)>& objective,
    int population, double elite_frac, int iterations, double noise_initial, double noise_final,
    std::uint64_t seed) {
    std::vector<double> mu(dim, 0.0);
    std::vector<double> sigma(dim, noise_initial);
    const int n_elite = std::max(1, static_cast<int>(std::lround(population * elite_frac)));

    CemResult result;
    result.best.assign(dim, 0.0);
    result.best_return = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> theta(population, std::vector<double>(dim));
    std::vector<double> returns(population);

    for (int iter = 0; iter < iterations; ++iter) {
        const double frac = iterations <= 1 ? 1.0 : static_cast<double>(iter) / (iterations - 1);
        const double floor = noise_initial + (noise_final - noise_initial) * frac;

        for (int j = 0; j < population; ++j) {
            std::mt19937_64 rng(seed_mix(seed, static_cast<std::uint64_t>(iter),
                                         static_cast<std::uint64_t>(j)));
            for (std::size_t i = 0; i < dim; ++i) theta[j][i] = mu[i] + sigma[i] * gaussian(rng);
        }
        parallel_for_index(static_cast<std::size_t>(population),
                           [&](std::size_t j) { returns[j] = objective(theta[j], iter, static_cast<int>(j)); });

        std::vector<int> order(population);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return returns[a] > returns[b]; });

        if (returns[order[0]] > result.best_return) {
            result.best_return = returns[order[0]];
            result.best = theta[order[0]];
        }

        for (std::size_t i = 0; i < dim; ++i) {
            double m = 0.0;
            for (int e = 0; e < n_elite; ++e) m += theta[order[e]][i];
            m /= n_elite;
            double var = 0.0;
            for (int e = 0; e < n_elite; ++e) {
                const double d = theta[order[e]][i] - m;
                var += d * d;
            }
            var /= n_elite;
            mu[i] = m;
            // The exploration schedule bounds sigma from below. Adding it
            // instead would compound: with a small elite set the refit stddev
            // of an unselected dimension tracks the sampling sigma, so any
            // additive term grows the distribution once per iteration.
            sigma[i] = std::max(std::sqrt(var), floor);
        }

        CemIterStats stats;
        stats.iter = iter;
        stats.best_return = returns[order[0]];
        double elite_mean = 0.0;
        for (int e = 0; e < n_elite; ++e) elite_mean += returns[order[e]];
        stats.elite_mean = elite_mean / n_elite;
        stats.population_mean = mean_of(returns);
        stats.sigma_mean = mean_of(sigma);
        result.history.push_back(stats);
    }
    result.mean = mu;
    return result;
}

TrainResult train(const TrainConfig& config, const GaitProgram& program, const RobotModel& model) {
    config.validate();
    if ((config.task == TaskMode::kPeriodic) != (program.mode == TaskMode::kPeriodic))
        throw MalformedInput("train: config task does not match program mode");
    const int n_out = program.mode == TaskMode::kPeriodic
                          ? kPeriodicHead
                          : static_cast<int>(program.key_frames.size()) * kBackflipPerKeyFrame;
    const std::size_t dim = PolicyParams::param_count(kObsSize, 32, n_out);

    const auto objective = [&](const std::vector<double>& theta, int iter, int /*cand*/) {
        PolicyParams p;
        p.n_in = kObsSize;
        p.n_hidden = 32;
        p.n_out = n_out;
        p.w = theta;
        RolloutOptions ro;
        ro.max_steps = config.episode_steps;
        ro.stop_at_goal = false;
        ro.use_stamp = config.use_stamp;
        ro.use_motion = config.use_motion;
        double acc = 0.0;
        for (int k = 0; k < config.seeds_per_candidate; ++k) {
            // Worlds and episode seeds are shared across candidates within an
            // iteration (common random numbers), so candidate comparisons are
            // fair and the schedule cannot affect results.
            const std::uint64_t episode = seed_mix(config.master_seed,
                                                   static_cast<std::uint64_t>(iter),
                                                   static_cast<std::uint64_t>(k));
            const WorldParams world =
                config.randomize ? sample(config.ranges, seed_mix(episode, 0x77)) : nominal();
            try {
                acc += rollout(program, p, model, world, seed_mix(episode, 0x99), ro).ret;
            } catch (const std::exception&) {
                acc += -1e6;  // divergent or invalid candidate
            }
        }
        return acc / config.seeds_per_candidate;
    };

    const CemResult cem =
        cem_optimize(dim, objective, config.population, config.elite_frac, config.iterations,
                     config.noise_initial, config.noise_final, config.master_seed);

    TrainResult out;
    out.policy.n_in = kObsSize;
    out.policy.n_hidden = 32;
    out.policy.n_out = n_out;
    out.policy.w = cem.mean;
    out.best_return = cem.best_return;
    out.history = cem.history;
    return out;
}

EvalMetrics evaluate(const PolicyParams& params, const GaitProgram& program,
                     const RobotModel& model, const EvalOptions& opts) {
    if (opts.episodes < 1) throw MalformedInput("evaluate: episodes must be >= 1");
    EvalMetrics metrics;
    for (int e = 0; e < opts.episodes; ++e) {
        const std::uint64_t ep_seed = seed_mix(opts.seed, 0xE, static_cast<std::uint64_t>(e));
        const WorldParams world = (program.mode == TaskMode::kPeriodic && opts.randomize_world)
                                      ? sample(opts.ranges, seed_mix(ep_seed, 0x5))
                                      : nominal();
        RolloutOptions ro = opts.rollout;
        if (program.mode == TaskMode::kPeriodic) ro.stop_at_goal = true;
        RolloutResult r = rollout(program, params, model, world, seed_mix(ep_seed, 0x6), ro);
        metrics.success_rate += r.success ? 1.0 : 0.0;
        metrics.mean_speed += r.mean_speed;
        metrics.mean_stamp += r.stamp_mean;
        metrics.mean_motion += r.motion_mean;
        metrics.mean_contact_agreement += r.contact_agreement;
        metrics.episodes.push_back(std::move(r));
    }
    const double n = opts.episodes;
    metrics.success_rate /= n;
    metrics.mean_speed /= n;
    metrics.mean_stamp /= n;
    metrics.mean_motion /= n;
    metrics.mean_contact_agreement /= n;
    return metrics;
}

}  // namespace gaitmimic
