#include "gaitmimic/randomize.hpp"

#include <numbers>
#include <random>

#include <json.hpp>

#include "gaitmimic/types.hpp"
#include "gaitmimic/util.hpp"

namespace gaitmimic {
namespace {

using nlohmann::json;

/// Uniform in [lo, hi) from the engine's raw 64-bit output. Avoids
/// std::uniform_real_distribution so the byte-level behavior is pinned down.
double uniform(std::mt19937_64& rng, const Interval& iv) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return iv.lo + u * (iv.hi - iv.lo);
}

}  // namespace

void RandomizationRanges::validate() const {
    for (const Interval* iv :
         {&mass_mult, &inertia_mult, &strength_mult, &motor_friction, &latency_s,
          &lateral_friction, &battery_v, &joint_friction, &com_noise_m, &ext_force_n,
          &step_height_m, &step_width_m})
        if (!(iv->lo <= iv->hi)) throw MalformedInput("randomization range with lo > hi");
}

WorldParams sample(const RandomizationRanges& ranges, std::uint64_t seed) {
    ranges.validate();
    std::mt19937_64 rng(seed_mix(seed));
    WorldParams w;
    w.mass_mult = uniform(rng, ranges.mass_mult);
    w.inertia_mult = uniform(rng, ranges.inertia_mult);
    w.strength_mult = uniform(rng, ranges.strength_mult);
    w.motor_friction = uniform(rng, ranges.motor_friction);
    w.latency_s = uniform(rng, ranges.latency_s);
    w.lateral_friction = uniform(rng, ranges.lateral_friction);
    w.battery_v = uniform(rng, ranges.battery_v);
    w.joint_friction = uniform(rng, ranges.joint_friction);
    w.com_noise_m = uniform(rng, ranges.com_noise_m);
    w.ext_force_n = uniform(rng, ranges.ext_force_n);
    w.ext_force_dir_rad = uniform(rng, Interval{0.0, 2.0 * std::numbers::pi});
    w.step_height_m = uniform(rng, ranges.step_height_m);
    w.step_width_m = uniform(rng, ranges.step_width_m);
    return w;
}

WorldParams nominal() { return WorldParams{}; }

std::string WorldParams::to_json() const {
    json j;
    j["mass_mult"] = mass_mult;
    j["inertia_mult"] = inertia_mult;
    j["strength_mult"] = strength_mult;
    j["motor_friction"] = motor_friction;
    j["latency_s"] = latency_s;
    j["lateral_friction"] = lateral_friction;
    j["battery_v"] = battery_v;
    j["joint_friction"] = joint_friction;
    j["com_noise_m"] = com_noise_m;
    j["ext_force_n"] = ext_force_n;
    j["ext_force_dir_rad"] = ext_force_dir_rad;
    j["step_height_m"] = step_height_m;
    j["step_width_m"] = step_width_m;
    return j.dump(2) + "\n";
}

WorldParams WorldParams::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("world params JSON: ") + e.what());
    }
    WorldParams w;
    auto scalar = [&j](const char* key, double& v) {
        if (j.contains(key)) v = j.at(key).get<double>();
    };
    scalar("mass_mult", w.mass_mult);
    scalar("inertia_mult", w.inertia_mult);
    scalar("strength_mult", w.strength_mult);
    scalar("motor_friction", w.motor_friction);
    scalar("latency_s", w.latency_s);
    scalar("lateral_friction", w.lateral_friction);
    scalar("battery_v", w.battery_v);
    scalar("joint_friction", w.joint_friction);
    scalar("com_noise_m", w.com_noise_m);
    scalar("ext_force_n", w.ext_force_n);
    scalar("ext_force_dir_rad", w.ext_force_dir_rad);
    scalar("step_height_m", w.step_height_m);
    scalar("step_width_m", w.step_width_m);
    return w;
}

std::string RandomizationRanges::to_json() const {
    json j;
    auto put = [&j](const char* key, const Interval& iv) {
        j[key] = json::array({iv.lo, iv.hi});
    };
    put("mass_mult", mass_mult);
    put("inertia_mult", inertia_mult);
    put("strength_mult", strength_mult);
    put("motor_friction", motor_friction);
    put("latency_s", latency_s);
    put("lateral_friction", lateral_friction);
    put("battery_v", battery_v);
    put("joint_friction", joint_friction);
    put("com_noise_m", com_noise_m);
    put("ext_force_n", ext_force_n);
    put("step_height_m", step_height_m);
    put("step_width_m", step_width_m);
    return j.dump(2) + "\n";
}

RandomizationRanges RandomizationRanges::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("randomization ranges JSON: ") + e.what());
    }
    RandomizationRanges r;
    auto get = [&j](const char* key, Interval& iv) {
        if (!j.contains(key)) return;
        iv.lo = j.at(key).at(0).get<double>();
        iv.hi = j.at(key).at(1).get<double>();
    };
    get("mass_mult", r.mass_mult);
    get("inertia_mult", r.inertia_mult);
    get("strength_mult", r.strength_mult);
    get("motor_friction", r.motor_friction);
    get("latency_s", r.latency_s);
    get("lateral_friction", r.lateral_friction);
    get("battery_v", r.battery_v);
    get("joint_friction", r.joint_friction);
    get("com_noise_m", r.com_noise_m);
    get("ext_force_n", r.ext_force_n);
    get("step_height_m", r.step_height_m);
    get("step_width_m", r.step_width_m);
    r.validate();
    return r;
}

}  // namespace gaitmimic
