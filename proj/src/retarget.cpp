#include "gaitmimic/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "gaitmimic/decompose.hpp"
#include "gaitmimic/util.hpp"

namespace gaitmimic {
namespace {

using nlohmann::json;

json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec2_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

double clamp01_range(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

RobotModel RobotModel::defaults() {
    RobotModel m;
    m.hip_offset[kFL] = {0.18, 0.13, 0.0};
    m.hip_offset[kFR] = {0.18, -0.13, 0.0};
    m.hip_offset[kRL] = {-0.18, 0.13, 0.0};
    m.hip_offset[kRR] = {-0.18, -0.13, 0.0};
    return m;
}

void RobotModel::validate() const {
    if (!(l1 > 0.0) || !(l2 > 0.0)) throw InvalidModel("link lengths must be positive");
    if (x_lim_x > l1 + l2 || x_lim_z > l1 + l2)
        throw InvalidModel("workspace limit exceeds leg reach");
    if (!(x_lim_x > 0.0) || !(x_lim_z > 0.0)) throw InvalidModel("workspace limits must be positive");
    for (const auto* r : {&abduction_range, &hip_range, &knee_range})
        if (!(r->lo < r->hi)) throw InvalidModel("empty joint range");
    if (!(trunk_mass > 0.0) || !(pitch_inertia > 0.0))
        throw InvalidModel("mass and inertia must be positive");
    if (!(standing_height > 0.0) || standing_height > l1 + l2)
        throw InvalidModel("standing height outside leg reach");
}

std::vector<double> scale_to_robot(const std::vector<double>& tmpl, double x_lim) {
    double peak = 0.0;
    for (double v : tmpl) peak = std::max(peak, std::abs(v));
    if (peak <= 1e-9) throw DegenerateAmplitude("flat template, peak magnitude <= 1e-9");
    std::vector<double> out(tmpl.size());
    const double scale = x_lim / peak;
    for (std::size_t i = 0; i < tmpl.size(); ++i) out[i] = scale * tmpl[i];
    return out;
}

AdaptedValue apply_adaptation(double f_value, const AdaptationAction& action, int leg, int axis,
                              double x_lim) {
    AdaptedValue out;
    const double g = action.scale[leg][axis] * f_value + action.offset[leg][axis];
    out.g = clamp01_range(g, -x_lim, x_lim);
    out.clamped = out.g != g;
    return out;
}

std::array<double, 2> leg_ik(const Vec2& target, double l1, double l2) {
    const double x = target.x;
    const double z = target.y;
    const double r = std::hypot(x, z);
    const double lo = std::abs(l1 - l2);
    const double hi = l1 + l2;
    if (r > hi + 1e-12 || r < lo - 1e-12)
        throw Unreachable("target radius " + std::to_string(r) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (r < 1e-9) return {0.0, -std::numbers::pi};

    const double cos_inner = clamp01_range((l1 * l1 + l2 * l2 - r * r) / (2.0 * l1 * l2), -1.0, 1.0);
    const double knee = std::acos(cos_inner) - std::numbers::pi;
    const double cos_psi = clamp01_range((l1 * l1 + r * r - l2 * l2) / (2.0 * l1 * r), -1.0, 1.0);
    double hip = std::atan2(x, z) + std::acos(cos_psi);
    if (hip > std::numbers::pi) hip -= 2.0 * std::numbers::pi;
    return {hip, knee};
}

Vec2 leg_fk(double hip, double knee, double l1, double l2) {
    return {l1 * std::sin(hip) + l2 * std::sin(hip + knee),
            l1 * std::cos(hip) + l2 * std::cos(hip + knee)};
}

Vec2 clamp_to_annulus(const Vec2& target, double l1, double l2) {
    const double lo = std::abs(l1 - l2);
    const double hi = l1 + l2;
    const double r = target.norm();
    if (r < lo) {
        if (r < 1e-12) return {0.0, lo};
        return target * (lo / r);
    }
    if (r > hi) return target * (hi / r);
    return target;
}

std::vector<int> extract_key_frames(const std::vector<double>& theta_mean, double delta_angle) {
    std::vector<int> keys;
    if (theta_mean.size() < 3) return keys;
    for (std::size_t t = 1; t + 1 < theta_mean.size(); ++t) {
        const double rise = theta_mean[t] - theta_mean[t - 1];
        const double next_rise = theta_mean[t + 1] - theta_mean[t];
        if (rise > next_rise + delta_angle) keys.push_back(static_cast<int>(t));
    }
    return keys;
}

namespace {

int common_period(const std::array<std::vector<double>, kNumLegs>& heights) {
    double mean = 0.0;
    for (const auto& h : heights) mean += estimate_period(h);
    return static_cast<int>(std::llround(mean / kNumLegs));
}

std::vector<double> raw_template(const std::vector<double>& series, int period) {
    if (series.size() < static_cast<std::size_t>(period))
        throw SeriesTooShort("raw template: series shorter than one period");
    std::vector<double> tmpl(series.begin(), series.begin() + period);
    const double mean = mean_of(tmpl);
    for (auto& v : tmpl) v -= mean;
    return tmpl;
}

void build_periodic(const KeyPointTrace& trace, const RobotModel& model,
                    const BuildOptions& options, GaitProgram& program) {
    std::array<std::vector<double>, kNumLegs> xs, zs;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const auto pos = body_frame_positions(trace, static_cast<KeyPoint>(kFootFL + leg));
        xs[leg].reserve(pos.size());
        zs[leg].reserve(pos.size());
        for (const auto& p : pos) {
            xs[leg].push_back(p.x);
            zs[leg].push_back(p.y);
        }
    }
    const int period = common_period(zs);
    program.period = period;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        std::vector<double> tx, tz;
        if (options.x11_filter) {
            tx = seasonal_template(x11_decompose(xs[leg], period));
            tz = seasonal_template(x11_decompose(zs[leg], period));
        } else {
            tx = raw_template(xs[leg], period);
            tz = raw_template(zs[leg], period);
        }
        program.f[leg][0] = scale_to_robot(tx, model.x_lim_x);
        program.f[leg][1] = scale_to_robot(tz, model.x_lim_z);

        program.d[leg] = contact_indicator(program.f[leg][1], options.gamma);

        // Reference velocities come from the template plus the per-frame
        // trend advance, so a stance foot references ~zero velocity (it is
        // stationary in the video) while a swing foot references the forward
        // sweep. Detrended differences alone would make stance feet appear to
        // move backwards.
        double peak_x = 0.0, peak_z = 0.0;
        for (double v : tx) peak_x = std::max(peak_x, std::abs(v));
        for (double v : tz) peak_z = std::max(peak_z, std::abs(v));
        const double n1 = static_cast<double>(xs[leg].size() - 1);
        const double adv_x =
            (model.x_lim_x / peak_x) * (xs[leg].back() - xs[leg].front()) / n1;
        const double adv_z =
            (model.x_lim_z / peak_z) * (zs[leg].back() - zs[leg].front()) / n1;

        program.v_ref[leg].resize(period);
        for (int p = 0; p < period; ++p) {
            const int q = (p + 1) % period;
            program.v_ref[leg][p] = {
                (program.f[leg][0][q] - program.f[leg][0][p] + adv_x) / program.base_interval_s,
                (program.f[leg][1][q] - program.f[leg][1][p] + adv_z) / program.base_interval_s};
        }
    }
}

void build_aperiodic(const KeyPointTrace& trace, const RobotModel& model,
                     const BuildOptions& options, GaitProgram& program) {
    const std::size_t n = trace.frames.size();
    if (n < 3) throw SeriesTooShort("aperiodic retarget: need at least 3 frames");

    std::vector<double> beta(n);
    double body_len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = trace.frames[i];
        beta[i] = heading_angle(f.points[kHead], f.points[kRear]);
        body_len += (f.points[kHead] - f.points[kRear]).norm();
    }
    body_len /= static_cast<double>(n);
    beta = unwrap_angles(beta);
    const double beta0 = beta[0];
    for (auto& b : beta) b -= beta0;

    const double robot_span = std::abs(model.hip_offset[kFL].x - model.hip_offset[kRL].x);
    const double scale = robot_span / body_len;

    std::array<std::vector<Vec2>, kNumLegs> body_pos;
    std::array<std::vector<double>, kNumLegs> heights;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        body_pos[leg] = body_frame_positions(trace, static_cast<KeyPoint>(kFootFL + leg));
        heights[leg].reserve(n);
        for (std::size_t i = 0; i < n; ++i) heights[leg].push_back(trace.frames[i].points[kFootFL + leg].y);
    }
    std::array<std::vector<int>, kNumLegs> contacts;
    for (int leg = 0; leg < kNumLegs; ++leg)
        contacts[leg] = contact_indicator(heights[leg], options.gamma);

    // Per-frame joint angles: displacement from the first frame mapped into
    // the hip frame, clamped into the reachable annulus.
    std::vector<std::array<double, 12>> angles(n);
    std::vector<double> theta_mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int leg = 0; leg < kNumLegs; ++leg) {
            const Vec2 rel = (body_pos[leg][i] - body_pos[leg][0]) * scale;
            const Vec2 target =
                clamp_to_annulus({rel.x, model.standing_height - rel.y}, model.l1, model.l2);
            auto [hip, knee] = leg_ik(target, model.l1, model.l2);
            hip = clamp01_range(hip, model.hip_range.lo, model.hip_range.hi);
            knee = clamp01_range(knee, model.knee_range.lo, model.knee_range.hi);
            angles[i][3 * leg + 0] = 0.0;
            angles[i][3 * leg + 1] = hip;
            angles[i][3 * leg + 2] = knee;
            theta_mean[i] += (hip + knee) / (2.0 * kNumLegs);
        }
    }

    std::vector<int> keys = extract_key_frames(theta_mean, options.delta_angle);
    keys.insert(keys.begin(), 0);
    keys.push_back(static_cast<int>(n) - 1);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    for (std::size_t k = 0; k < keys.size(); ++k) {
        KeyFrame kf;
        const int idx = keys[k];
        kf.joint_angles = angles[idx];
        kf.interval_s = k + 1 < keys.size()
                            ? trace.frames[keys[k + 1]].t - trace.frames[idx].t
                            : 0.5;
        kf.beta_ref = beta[idx];
        for (int leg = 0; leg < kNumLegs; ++leg) {
            kf.d[leg] = contacts[leg][idx];
            kf.foot_ref[leg] = (body_pos[leg][idx] - body_pos[leg][0]) * scale;
        }
        program.key_frames.push_back(kf);
    }
}

}  // namespace

GaitProgram build_gait_program(const KeyPointTrace& trace, const RobotModel& model, TaskMode mode,
                               const BuildOptions& options) {
    model.validate();
    GaitProgram program;
    program.mode = mode;
    program.base_interval_s = 1.0 / trace.fps;
    if (mode == TaskMode::kPeriodic)
        build_periodic(trace, model, options, program);
    else
        build_aperiodic(trace, model, options, program);
    return program;
}

std::string GaitProgram::to_json() const {
    json j;
    j["mode"] = mode == TaskMode::kPeriodic ? "periodic" : "aperiodic";
    j["period"] = period;
    j["base_interval_s"] = base_interval_s;
    if (mode == TaskMode::kPeriodic) {
        json legs = json::array();
        for (int leg = 0; leg < kNumLegs; ++leg) {
            json entry;
            entry["name"] = leg_name(static_cast<Leg>(leg));
            entry["fx"] = f[leg][0];
            entry["fz"] = f[leg][1];
            entry["d"] = d[leg];
            json vr = json::array();
            for (const auto& v : v_ref[leg]) vr.push_back(vec2_json(v));
            entry["v_ref"] = vr;
            legs.push_back(entry);
        }
        j["legs"] = legs;
    } else {
        json kfs = json::array();
        for (const auto& kf : key_frames) {
            json entry;
            entry["joint_angles"] = kf.joint_angles;
            entry["interval_s"] = kf.interval_s;
            entry["beta_ref"] = kf.beta_ref;
            entry["d"] = kf.d;
            json fr = json::array();
            for (const auto& v : kf.foot_ref) fr.push_back(vec2_json(v));
            entry["foot_ref"] = fr;
            kfs.push_back(entry);
        }
        j["key_frames"] = kfs;
    }
    return j.dump(2) + "\n";
}

GaitProgram GaitProgram::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("gait program JSON: ") + e.what());
    }
    GaitProgram p;
    try {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "periodic")
            p.mode = TaskMode::kPeriodic;
        else if (mode == "aperiodic")
            p.mode = TaskMode::kBackflip;
        else
            throw MalformedInput("gait program JSON: unknown mode '" + mode + "'");
        p.period = j.at("period").get<int>();
        p.base_interval_s = j.at("base_interval_s").get<double>();
        if (p.mode == TaskMode::kPeriodic) {
            const auto& legs = j.at("legs");
            if (legs.size() != kNumLegs) throw MalformedInput("gait program JSON: need 4 legs");
            for (int leg = 0; leg < kNumLegs; ++leg) {
                const auto& entry = legs.at(leg);
                p.f[leg][0] = entry.at("fx").get<std::vector<double>>();
                p.f[leg][1] = entry.at("fz").get<std::vector<double>>();
                p.d[leg] = entry.at("d").get<std::vector<int>>();
                for (const auto& v : entry.at("v_ref")) p.v_ref[leg].push_back(vec2_from(v));
            }
        } else {
            for (const auto& entry : j.at("key_frames")) {
                KeyFrame kf;
                const auto ja = entry.at("joint_angles").get<std::vector<double>>();
                if (ja.size() != 12)
                    throw MalformedInput("gait program JSON: key frame needs 12 angles");
                std::copy(ja.begin(), ja.end(), kf.joint_angles.begin());
                kf.interval_s = entry.at("interval_s").get<double>();
                kf.beta_ref = entry.at("beta_ref").get<double>();
                const auto dd = entry.at("d").get<std::vector<int>>();
                std::copy(dd.begin(), dd.end(), kf.d.begin());
                int leg = 0;
                for (const auto& v : entry.at("foot_ref")) kf.foot_ref[leg++] = vec2_from(v);
                p.key_frames.push_back(kf);
            }
        }
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("gait program JSON: ") + e.what());
    }
    return p;
}

std::string robot_model_to_json(const RobotModel& m) {
    json j;
    json hips = json::array();
    for (const auto& h : m.hip_offset) hips.push_back(json::array({h.x, h.y, h.z}));
    j["hip_offset"] = hips;
    j["l1"] = m.l1;
    j["l2"] = m.l2;
    j["abduction_range"] = json::array({m.abduction_range.lo, m.abduction_range.hi});
    j["hip_range"] = json::array({m.hip_range.lo, m.hip_range.hi});
    j["knee_range"] = json::array({m.knee_range.lo, m.knee_range.hi});
    j["x_lim_x"] = m.x_lim_x;
    j["x_lim_z"] = m.x_lim_z;
    j["trunk_mass"] = m.trunk_mass;
    j["pitch_inertia"] = m.pitch_inertia;
    j["standing_height"] = m.standing_height;
    return j.dump(2) + "\n";
}

RobotModel robot_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("robot model JSON: ") + e.what());
    }
    RobotModel m = RobotModel::defaults();
    try {
        if (j.contains("hip_offset")) {
            const auto& hips = j.at("hip_offset");
            if (hips.size() != kNumLegs) throw MalformedInput("robot model JSON: need 4 hips");
            for (int i = 0; i < kNumLegs; ++i)
                m.hip_offset[i] = {hips.at(i).at(0).get<double>(), hips.at(i).at(1).get<double>(),
                                   hips.at(i).at(2).get<double>()};
        }
        auto range = [&j](const char* key, JointRange& r) {
            if (!j.contains(key)) return;
            r.lo = j.at(key).at(0).get<double>();
            r.hi = j.at(key).at(1).get<double>();
        };
        auto scalar = [&j](const char* key, double& v) {
            if (j.contains(key)) v = j.at(key).get<double>();
        };
        scalar("l1", m.l1);
        scalar("l2", m.l2);
        range("abduction_range", m.abduction_range);
        range("hip_range", m.hip_range);
        range("knee_range", m.knee_range);
        scalar("x_lim_x", m.x_lim_x);
        scalar("x_lim_z", m.x_lim_z);
        scalar("trunk_mass", m.trunk_mass);
        scalar("pitch_inertia", m.pitch_inertia);
        scalar("standing_height", m.standing_height);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("robot model JSON: ") + e.what());
    }
    m.validate();
    return m;
}

}  // namespace gaitmimic
