#include "gaitmimic/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitmimic/decompose.hpp"
#include "gaitmimic/randomize.hpp"
#include "gaitmimic/sim.hpp"
#include "gaitmimic/trace.hpp"
#include "gaitmimic/util.hpp"

namespace gaitmimic {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string task_name(TaskMode t) { return t == TaskMode::kPeriodic ? "periodic" : "backflip"; }

TaskMode task_from(const std::string& s) {
    if (s == "periodic") return TaskMode::kPeriodic;
    if (s == "backflip") return TaskMode::kBackflip;
    throw MalformedInput("unknown task '" + s + "' (expected periodic or backflip)");
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::vector<std::string>& artifacts) {
    json j;
    j["command"] = command;
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    j["config_hash"] = hex;
    j["seed"] = seed;
    j["artifacts"] = artifacts;
    write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Plot data

struct Series {
    std::string name;
    std::vector<double> key;
    std::vector<double> value;
};

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<Series> series_from_csv(const std::string& text, const std::string& path) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw MalformedInput(path + ": empty plot input");
    const auto header = split_commas(line);
    if (header.size() < 2) throw MalformedInput(path + ": need a key column plus data columns");
    std::vector<Series> series(header.size() - 1);
    for (std::size_t c = 1; c < header.size(); ++c) series[c - 1].name = header[c];
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size())
            throw MalformedInput(path + ": ragged row in plot input");
        const double key = std::strtod(cells[0].c_str(), nullptr);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            series[c - 1].key.push_back(key);
            series[c - 1].value.push_back(std::strtod(cells[c].c_str(), nullptr));
        }
        ++rows;
    }
    if (rows == 0) throw MalformedInput(path + ": no data rows in plot input");
    return series;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
                          "#bcbd22", "#7f7f7f", "#aec7e8", "#ffbb78"};

std::string render_svg(const std::vector<Series>& series) {
    double kmin = series[0].key.front(), kmax = series[0].key.back();
    double vmin = series[0].value[0], vmax = vmin;
    for (const auto& s : series) {
        for (double k : s.key) {
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }
        for (double v : s.value) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (kmax - kmin < 1e-12) kmax = kmin + 1.0;
    if (vmax - vmin < 1e-12) {
        vmax += 1.0;
        vmin -= 1.0;
    }
    const double x0 = 45.0, x1 = 790.0, y0 = 300.0, y1 = 14.0;
    auto sx = [&](double k) { return x0 + (k - kmin) / (kmax - kmin) * (x1 - x0); };
    auto sy = [&](double v) { return y0 + (v - vmin) / (vmax - vmin) * (y1 - y0); };

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"320\" "
        "viewBox=\"0 0 800 320\">\n"
        "<rect width=\"800\" height=\"320\" fill=\"#ffffff\"/>\n";
    svg += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" +
           fmt("%.2f", x1) + "\" y2=\"" + fmt("%.2f", y0) +
           "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" +
           fmt("%.2f", x0) + "\" y2=\"" + fmt("%.2f", y1) +
           "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].key.size(); ++i) {
            if (i) svg += ' ';
            svg += fmt("%.2f", sx(series[s].key[i])) + "," + fmt("%.2f", sy(series[s].value[i]));
        }
        svg += "\"/>\n";
        svg += "<text x=\"" + fmt("%.2f", x0 + 8.0) + "\" y=\"" +
               fmt("%.2f", y1 + 12.0 + 14.0 * static_cast<double>(s)) +
               "\" font-family=\"monospace\" font-size=\"12\" fill=\"";
        svg += color;
        svg += "\">" + series[s].name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string tidy_csv(const std::vector<Series>& series) {
    std::string out = "key,series,value\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.key.size(); ++i)
            out += fmt("%.10g", s.key[i]) + "," + s.name + "," + fmt("%.10g", s.value[i]) + "\n";
    return out;
}

std::vector<Series> gait_series(const std::string& text, const std::string& path) {
    const GaitProgram p = GaitProgram::from_json(text);
    std::vector<Series> out;
    if (p.mode == TaskMode::kPeriodic) {
        for (int leg = 0; leg < kNumLegs; ++leg)
            for (int axis = 0; axis < 2; ++axis) {
                Series s;
                s.name = std::string(leg_name(leg)) + (axis == 0 ? "_x" : "_z");
                for (std::size_t i = 0; i < p.f[leg][axis].size(); ++i) {
                    s.key.push_back(static_cast<double>(i));
                    s.value.push_back(p.f[leg][axis][i]);
                }
                out.push_back(std::move(s));
            }
        return out;
    }
    if (p.key_frames.empty()) throw MalformedInput(path + ": program has no key frames");
    for (int leg = 0; leg < kNumLegs; ++leg)
        for (int j = 1; j < 3; ++j) {
            Series s;
            s.name = std::string(leg_name(leg)) + (j == 1 ? "_hip" : "_knee");
            for (std::size_t k = 0; k < p.key_frames.size(); ++k) {
                s.key.push_back(static_cast<double>(k));
                s.value.push_back(p.key_frames[k].joint_angles[3 * leg + j]);
            }
            out.push_back(std::move(s));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_decompose(const std::string& trace_path, const std::string& out_dir, double gamma,
                  double min_confidence) {
    const KeyPointTrace trace = load_trace(trace_path, min_confidence);
    std::array<std::vector<double>, kNumLegs> heights;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const auto pos = body_frame_positions(trace, static_cast<KeyPoint>(kFootFL + leg));
        for (const auto& v : pos) heights[leg].push_back(v.y);
    }
    double mean_period = 0.0;
    for (const auto& h : heights) mean_period += estimate_period(h);
    const int period = static_cast<int>(std::llround(mean_period / kNumLegs));

    fs::create_directories(out_dir);
    const char* kp_names[] = {"head", "rear", "fl", "fr", "rl", "rr"};
    std::vector<std::string> artifacts;
    for (int kp = 0; kp < kNumKeyPoints; ++kp) {
        for (int axis = 0; axis < 2; ++axis) {
            const auto pos = body_frame_positions(trace, static_cast<KeyPoint>(kp));
            std::vector<double> series;
            for (const auto& v : pos) series.push_back(axis == 0 ? v.x : v.y);
            const Decomposition d = x11_decompose(series, period);
            std::string csv = "t,raw,trend,seasonal,residual\n";
            for (std::size_t i = 0; i < series.size(); ++i)
                csv += fmt("%.6f", trace.frames[i].t) + "," + fmt("%.10g", series[i]) + "," +
                       fmt("%.10g", d.trend[i]) + "," + fmt("%.10g", d.seasonal[i]) + "," +
                       fmt("%.10g", d.residual[i]) + "\n";
            const std::string name =
                std::string("decompose_") + kp_names[kp] + (axis == 0 ? "_x" : "_z") + ".csv";
            write_file(out_dir + "/" + name, csv);
            artifacts.push_back(name);
        }
    }
    json cfg;
    cfg["trace"] = fs::path(trace_path).filename().string();
    cfg["gamma"] = gamma;
    cfg["min_confidence"] = min_confidence;
    cfg["period"] = period;
    write_manifest(out_dir, "decompose", cfg.dump(), 0, artifacts);
    std::cout << "period " << period << " frames, wrote " << artifacts.size()
              << " decomposition files to " << out_dir << "\n";
    return 0;
}

int cmd_retarget(const PipelineConfig& config, const std::string& out_dir) {
    const GaitProgram program = config.build_program();
    fs::create_directories(out_dir);
    write_file(out_dir + "/gait_program.json", program.to_json());
    write_manifest(out_dir, "retarget", config.to_json(), config.master_seed,
                   {"gait_program.json"});
    if (program.mode == TaskMode::kPeriodic)
        std::cout << "periodic program: period " << program.period << " frames\n";
    else
        std::cout << "aperiodic program: " << program.key_frames.size() << " key frames\n";
    return 0;
}

int cmd_train(const PipelineConfig& config, const std::string& out_dir) {
    const RobotModel model = config.load_model();
    const GaitProgram program = config.build_program();
    const TrainResult result = train(config.train, program, model);

    fs::create_directories(out_dir);
    write_file(out_dir + "/policy.json", result.policy.to_json());
    std::string hist = "iter,best_return,elite_mean,population_mean,sigma_mean\n";
    for (const auto& row : result.history)
        hist += std::to_string(row.iter) + "," + fmt("%.10g", row.best_return) + "," +
                fmt("%.10g", row.elite_mean) + "," + fmt("%.10g", row.population_mean) + "," +
                fmt("%.10g", row.sigma_mean) + "\n";
    write_file(out_dir + "/train_history.csv", hist);
    write_file(out_dir + "/config_used.json", config.to_json());
    write_manifest(out_dir, "train", config.to_json(), config.train.master_seed,
                   {"policy.json", "train_history.csv", "config_used.json"});
    std::cout << "best return " << fmt("%.6g", result.best_return) << " after "
              << result.history.size() << " iterations\n";
    return 0;
}

int cmd_eval(const PipelineConfig& config, const std::string& policy_path,
             const std::string& out_dir, int episodes, bool nominal_world,
             const std::string& record_path) {
    const RobotModel model = config.load_model();
    const GaitProgram program = config.build_program();
    const PolicyParams params = PolicyParams::from_json(read_file(policy_path));

    EvalOptions opts;
    opts.episodes = episodes;
    opts.seed = config.master_seed;
    opts.randomize_world = !nominal_world;
    opts.ranges = config.train.ranges;
    opts.rollout.max_steps = config.train.episode_steps;
    opts.rollout.use_stamp = config.train.use_stamp;
    opts.rollout.use_motion = config.train.use_motion;
    opts.rollout.speed_delta = config.speed_delta;
    opts.rollout.record = !record_path.empty();
    const EvalMetrics m = evaluate(params, program, model, opts);

    fs::create_directories(out_dir);
    std::string csv = "success_rate,speed,stamp,movement,episodes\n";
    csv += fmt("%.10g", m.success_rate) + "," + fmt("%.10g", m.mean_speed) + "," +
           fmt("%.10g", m.mean_stamp) + "," + fmt("%.10g", m.mean_motion) + "," +
           std::to_string(episodes) + "\n";
    write_file(out_dir + "/metrics.csv", csv);

    std::string per = "episode,return,steps,status,success,distance_x,mean_speed,stamp,motion\n";
    for (std::size_t e = 0; e < m.episodes.size(); ++e) {
        const auto& r = m.episodes[e];
        per += std::to_string(e) + "," + fmt("%.10g", r.ret) + "," + std::to_string(r.steps) +
               "," + episode_status_name(r.status) + "," + (r.success ? "1" : "0") + "," +
               fmt("%.10g", r.distance_x) + "," + fmt("%.10g", r.mean_speed) + "," +
               fmt("%.10g", r.stamp_mean) + "," + fmt("%.10g", r.motion_mean) + "\n";
    }
    write_file(out_dir + "/episodes.csv", per);
    std::vector<std::string> artifacts{"metrics.csv", "episodes.csv"};

    if (!record_path.empty()) {
        const auto& r = m.episodes.front();
        std::string state_csv = "t,x,y,z,roll,pitch,yaw,vx,vy,wy,p_fl,p_fr,p_rl,p_rr\n";
        for (const auto& st : r.states) {
            state_csv += fmt("%.6f", st.time_s) + "," + fmt("%.10g", st.position.x) + "," +
                         fmt("%.10g", st.position.y) + "," + fmt("%.10g", st.position.z) + "," +
                         fmt("%.10g", st.roll) + "," + fmt("%.10g", st.pitch) + "," +
                         fmt("%.10g", st.yaw) + "," + fmt("%.10g", st.velocity.x) + "," +
                         fmt("%.10g", st.velocity.y) + "," +
                         fmt("%.10g", st.angular_velocity.y);
            for (int leg = 0; leg < kNumLegs; ++leg)
                state_csv += std::string(",") + (st.contact[leg] ? "1" : "0");
            state_csv += "\n";
        }
        write_file(record_path, state_csv);

        std::string rewards_path = record_path;
        const std::string suffix = ".csv";
        if (rewards_path.size() >= suffix.size() &&
            rewards_path.compare(rewards_path.size() - suffix.size(), suffix.size(), suffix) == 0)
            rewards_path.resize(rewards_path.size() - suffix.size());
        rewards_path += ".rewards.csv";
        std::string rew_csv = "step,r_lin,r_ang,r_body,r_f,r_g,r_a,total\n";
        for (std::size_t i = 0; i < r.rewards.size(); ++i) {
            const auto& b = r.rewards[i];
            rew_csv += std::to_string(i) + "," + fmt("%.10g", b.r_lin) + "," +
                       fmt("%.10g", b.r_ang) + "," + fmt("%.10g", b.r_body) + "," +
                       fmt("%.10g", b.stamp_sum()) + "," + fmt("%.10g", b.motion_sum()) + "," +
                       fmt("%.10g", b.r_angle) + "," + fmt("%.10g", b.total) + "\n";
        }
        write_file(rewards_path, rew_csv);
    }
    write_manifest(out_dir, "eval", config.to_json(), config.master_seed, artifacts);
    std::cout << "success_rate " << fmt("%.3f", m.success_rate) << " speed "
              << fmt("%.3f", m.mean_speed) << " stamp " << fmt("%.3f", m.mean_stamp)
              << " movement " << fmt("%.3f", m.mean_motion) << "\n";
    return 0;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MalformedFile(path + ": cannot open for writing");
    out << content;
    if (!out) throw MalformedFile(path + ": write failed");
}

void PipelineConfig::validate() const {
    if (trace_csv.empty()) throw MalformedInput("config: trace_csv is required");
    if (!fs::exists(trace_csv)) throw MalformedInput("config: trace file not found: " + trace_csv);
    if (!model_json.empty() && !fs::exists(model_json))
        throw MalformedInput("config: model file not found: " + model_json);
    if (!(build.gamma > 0.0 && build.gamma < 1.0))
        throw MalformedInput("config: gamma must lie in (0, 1)");
    if (build.delta_angle < 0.0) throw MalformedInput("config: delta_angle must be >= 0");
    if (!(build.min_confidence >= 0.0 && build.min_confidence <= 1.0))
        throw MalformedInput("config: min_confidence must lie in [0, 1]");
    if (!(speed_delta > 0.0)) throw MalformedInput("config: speed_delta must be > 0");
    train.validate();
}

std::string PipelineConfig::to_json() const {
    json j;
    j["trace_csv"] = trace_csv;
    if (!model_json.empty()) j["model_json"] = model_json;
    j["task"] = task_name(task);
    j["gamma"] = build.gamma;
    j["delta_angle"] = build.delta_angle;
    j["min_confidence"] = build.min_confidence;
    j["x11_filter"] = build.x11_filter;
    j["speed_delta"] = speed_delta;
    j["master_seed"] = master_seed;
    j["train"] = json::parse(train.to_json());
    return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("pipeline config JSON: ") + e.what());
    }
    PipelineConfig c;
    try {
        c.trace_csv = j.at("trace_csv").get<std::string>();
        if (j.contains("model_json")) c.model_json = j.at("model_json").get<std::string>();
        if (j.contains("task")) c.task = task_from(j.at("task").get<std::string>());
        if (j.contains("gamma")) c.build.gamma = j.at("gamma").get<double>();
        if (j.contains("delta_angle")) c.build.delta_angle = j.at("delta_angle").get<double>();
        if (j.contains("min_confidence"))
            c.build.min_confidence = j.at("min_confidence").get<double>();
        if (j.contains("x11_filter")) c.build.x11_filter = j.at("x11_filter").get<bool>();
        if (j.contains("speed_delta")) c.speed_delta = j.at("speed_delta").get<double>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train").dump());
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("pipeline config JSON: ") + e.what());
    }
    c.train.task = c.task;
    if (!j.contains("train") || !j.at("train").contains("master_seed"))
        c.train.master_seed = c.master_seed;
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    return from_json(read_file(path));
}

RobotModel PipelineConfig::load_model() const {
    if (model_json.empty()) return RobotModel::defaults();
    return robot_model_from_json(read_file(model_json));
}

GaitProgram PipelineConfig::build_program() const {
    validate();
    const KeyPointTrace trace = load_trace(trace_csv, build.min_confidence);
    return build_gait_program(trace, load_model(), task, build);
}

void emit_plot_data(const std::string& kind, const std::string& input_path,
                    const std::string& output_path) {
    const std::string text = read_file(input_path);
    if (text.empty()) throw MalformedInput(input_path + ": empty plot input");

    std::vector<Series> series;
    if (kind == "decomposition") {
        series = series_from_csv(text, input_path);
        std::vector<Series> keep;
        for (auto& s : series)
            if (s.name == "trend" || s.name == "seasonal" || s.name == "residual")
                keep.push_back(std::move(s));
        if (keep.size() != 3)
            throw MalformedInput(input_path + ": expected trend/seasonal/residual columns");
        series = std::move(keep);
    } else if (kind == "gait") {
        series = gait_series(text, input_path);
    } else if (kind == "rewards" || kind == "trajectory") {
        series = series_from_csv(text, input_path);
    } else {
        throw UnknownKind("unknown plot kind '" + kind + "'");
    }

    write_file(output_path, render_svg(series));
    fs::path csv_path(output_path);
    csv_path.replace_extension(".csv");
    write_file(csv_path.string(), tidy_csv(series));
}

int run_subcommand(const std::vector<std::string>& args) {
    CLI::App app{"animal-to-quadruped motion retargeting pipeline"};
    app.require_subcommand(1);

    std::string trace_path, config_path, model_path, out_dir = "out";
    std::string policy_path, record_path, plot_kind, plot_input, plot_output;
    double gamma = 0.1, min_confidence = 0.3;
    std::string task_str;
    int episodes = 20;
    bool nominal_world = false, no_x11 = false;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* dec = app.add_subcommand("decompose", "Estimate the gait period and write "
                                                "trend/seasonal/residual CSVs per coordinate");
    dec->add_option("--trace", trace_path, "key point trace CSV")->required();
    dec->add_option("--out", out_dir, "output directory");
    dec->add_option("--gamma", gamma, "contact threshold coefficient");
    dec->add_option("--min-confidence", min_confidence, "confidence repair threshold");

    auto* ret = app.add_subcommand("retarget", "Build a gait program from a trace");
    ret->add_option("--config", config_path, "pipeline config JSON");
    ret->add_option("--trace", trace_path, "key point trace CSV (overrides config)");
    ret->add_option("--model", model_path, "robot model JSON (overrides config)");
    ret->add_option("--task", task_str, "periodic | backflip (overrides config)");
    ret->add_flag("--no-x11", no_x11, "use the raw first cycle instead of the seasonal template");
    double delta_angle = 0.05;
    ret->add_option("--gamma", gamma, "contact threshold coefficient (overrides config)");
    ret->add_option("--delta-angle", delta_angle, "key frame deceleration threshold, radians");
    ret->add_option("--out", out_dir, "output directory");

    auto* trn = app.add_subcommand("train", "Optimize the adaptation policy");
    trn->add_option("--config", config_path, "pipeline config JSON")->required();
    trn->add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_given = true; });
    trn->add_flag("--no-x11", no_x11, "train on the raw first cycle instead of the seasonal template");
    trn->add_option("--out", out_dir, "output directory");

    auto* evl = app.add_subcommand("eval", "Evaluate a trained policy");
    evl->add_option("--config", config_path, "pipeline config JSON")->required();
    evl->add_option("--policy", policy_path, "policy params JSON")->required();
    evl->add_option("--episodes", episodes, "number of evaluation episodes");
    evl->add_flag("--nominal", nominal_world, "evaluate in the nominal world only");
    evl->add_flag("--no-x11", no_x11, "drive the raw first cycle instead of the seasonal template");
    evl->add_option("--record", record_path, "write a per-step state CSV for episode 0");
    evl->add_option("--seed", seed, "evaluation seed (overrides config)")
        ->each([&](const std::string&) { seed_given = true; });
    evl->add_option("--out", out_dir, "output directory");

    auto* rnd = app.add_subcommand("randomize", "Sample world parameters");
    auto* rnd_sample = rnd->add_subcommand("sample", "print a WorldParams JSON");
    rnd_sample->add_option("--seed", seed, "sample seed")->required();
    std::string rnd_out;
    rnd_sample->add_option("--out", rnd_out, "also write the JSON to this file");

    auto* plt = app.add_subcommand("plot", "Convert an artifact into tidy CSV + SVG");
    plt->add_option("--kind", plot_kind, "decomposition | gait | rewards | trajectory")
        ->required();
    plt->add_option("--input", plot_input, "input artifact path")->required();
    plt->add_option("--output", plot_output, "output SVG path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(dec))
            return cmd_decompose(trace_path, out_dir, gamma, min_confidence);

        if (app.got_subcommand(ret)) {
            PipelineConfig config;
            if (!config_path.empty()) config = PipelineConfig::from_file(config_path);
            if (!trace_path.empty()) config.trace_csv = trace_path;
            if (!model_path.empty()) config.model_json = model_path;
            if (!task_str.empty()) {
                config.task = task_from(task_str);
                config.train.task = config.task;
            }
            if (ret->count("--gamma")) config.build.gamma = gamma;
            if (ret->count("--delta-angle")) config.build.delta_angle = delta_angle;
            if (no_x11) config.build.x11_filter = false;
            return cmd_retarget(config, out_dir);
        }

        if (app.got_subcommand(trn)) {
            PipelineConfig config = PipelineConfig::from_file(config_path);
            if (seed_given) {
                config.master_seed = seed;
                config.train.master_seed = seed;
            }
            if (no_x11) config.build.x11_filter = false;
            return cmd_train(config, out_dir);
        }

        if (app.got_subcommand(evl)) {
            PipelineConfig config = PipelineConfig::from_file(config_path);
            if (seed_given) config.master_seed = seed;
            if (no_x11) config.build.x11_filter = false;
            return cmd_eval(config, policy_path, out_dir, episodes, nominal_world, record_path);
        }

        if (app.got_subcommand(rnd)) {
            const WorldParams w = sample(RandomizationRanges{}, seed);
            const std::string text = w.to_json();
            std::cout << text;
            if (!rnd_out.empty()) write_file(rnd_out, text);
            return 0;
        }

        if (app.got_subcommand(plt)) {
            emit_plot_data(plot_kind, plot_input, plot_output);
            std::cout << "wrote " << plot_output << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace gaitmimic
