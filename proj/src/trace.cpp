#include "gaitmimic/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gaitmimic {
namespace {

const std::array<std::string, 14> kBaseColumns = {
    "frame", "time_s", "head_x", "head_y", "rear_x", "rear_y", "fl_x",
    "fl_y",  "fr_x",   "fr_y",   "rl_x",   "rl_y",   "rr_x",   "rr_y"};

const std::array<std::string, 6> kConfidenceColumns = {"head_c", "rear_c", "fl_c",
                                                       "fr_c",   "rl_c",   "rr_c"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& path, std::size_t line,
                    const std::string& column) {
    const std::string s = trim(field);
    if (s.empty())
        throw MalformedFile(path + ":" + std::to_string(line) + ": empty field '" + column + "'");
    // Accept nan/inf spellings; they are treated as gaps downstream.
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw MalformedFile(path + ":" + std::to_string(line) + ": field '" + column +
                            "' is not a number: '" + s + "'");
    return v;
}

/// Repair entries of `values` whose `valid` flag is false: linear
/// interpolation in t between the nearest valid neighbors, nearest valid
/// value at the edges.
void repair_gaps(std::vector<double>& values, const std::vector<bool>& valid,
                 const std::vector<double>& t) {
    const std::size_t n = values.size();
    std::size_t first_valid = n, last_valid = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (valid[i]) {
            if (first_valid == n) first_valid = i;
            last_valid = i;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (valid[i]) continue;
        if (i < first_valid) {
            values[i] = values[first_valid];
        } else if (i > last_valid) {
            values[i] = values[last_valid];
        } else {
            std::size_t lo = i;
            while (!valid[lo]) --lo;
            std::size_t hi = i;
            while (!valid[hi]) ++hi;
            const double w = (t[i] - t[lo]) / (t[hi] - t[lo]);
            values[i] = values[lo] + w * (values[hi] - values[lo]);
        }
    }
}

}  // namespace

std::vector<double> KeyPointTrace::series(KeyPoint point, int axis) const {
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(axis == 0 ? f.points[point].x : f.points[point].y);
    return out;
}

KeyPointTrace load_trace(const std::string& path, double min_confidence) {
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
        throw std::invalid_argument("min_confidence must be in [0, 1]");

    std::ifstream in(path);
    if (!in) throw MalformedFile(path + ": cannot open file");

    std::string line;
    if (!std::getline(in, line)) throw MalformedFile(path + ": empty file");
    auto header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    bool has_confidence = false;
    if (header.size() == kBaseColumns.size() + kConfidenceColumns.size()) {
        has_confidence = true;
    } else if (header.size() != kBaseColumns.size()) {
        throw MalformedFile(path + ":1: expected 14 or 20 columns, got " +
                            std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < kBaseColumns.size(); ++i)
        if (header[i] != kBaseColumns[i])
            throw MalformedFile(path + ":1: column " + std::to_string(i + 1) + " must be '" +
                                kBaseColumns[i] + "', got '" + header[i] + "'");
    if (has_confidence)
        for (std::size_t i = 0; i < kConfidenceColumns.size(); ++i)
            if (header[kBaseColumns.size() + i] != kConfidenceColumns[i])
                throw MalformedFile(path + ":1: column " +
                                    std::to_string(kBaseColumns.size() + i + 1) + " must be '" +
                                    kConfidenceColumns[i] + "'");

    KeyPointTrace trace;
    trace.source_id = path;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MalformedFile(path + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
        FrameSample s;
        s.t = parse_number(fields[1], path, line_no, "time_s");
        if (!std::isfinite(s.t))
            throw MalformedFile(path + ":" + std::to_string(line_no) + ": non-finite time_s");
        for (int k = 0; k < kNumKeyPoints; ++k) {
            const double x = parse_number(fields[2 + 2 * k], path, line_no, header[2 + 2 * k]);
            const double y = parse_number(fields[3 + 2 * k], path, line_no, header[3 + 2 * k]);
            s.points[k] = {x, -y};  // image y points down; store heights up-positive
        }
        if (has_confidence) {
            std::array<double, kNumKeyPoints> conf{};
            for (int k = 0; k < kNumKeyPoints; ++k) {
                conf[k] = parse_number(fields[14 + k], path, line_no, header[14 + k]);
                if (!(conf[k] >= 0.0 && conf[k] <= 1.0))
                    throw MalformedFile(path + ":" + std::to_string(line_no) + ": field '" +
                                        header[14 + k] + "' outside [0, 1]");
            }
            s.confidence = conf;
        }
        if (!trace.frames.empty() && s.t <= trace.frames.back().t)
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": time_s not strictly increasing");
        trace.frames.push_back(s);
    }
    if (trace.frames.size() < 2) throw MalformedFile(path + ": fewer than 2 data rows");

    const std::size_t n = trace.frames.size();
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = trace.frames[i].t;

    // fps from the median frame interval
    std::vector<double> dts(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) dts[i] = t[i + 1] - t[i];
    std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
    trace.fps = 1.0 / dts[dts.size() / 2];

    // Gap repair per key point per coordinate. A sample is a gap when its
    // confidence is below the cutoff or the stored coordinate is non-finite.
    for (int k = 0; k < kNumKeyPoints; ++k) {
        std::vector<bool> valid(n);
        std::size_t invalid = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& f = trace.frames[i];
            const bool conf_ok = !f.confidence || (*f.confidence)[k] >= min_confidence;
            valid[i] = conf_ok && std::isfinite(f.points[k].x) && std::isfinite(f.points[k].y);
            if (!valid[i]) ++invalid;
        }
        if (invalid * 2 > n)
            throw TooSparse(path + ": key point " + std::to_string(k) + " has " +
                            std::to_string(invalid) + "/" + std::to_string(n) +
                            " samples below confidence " + std::to_string(min_confidence));
        if (invalid == 0) continue;
        for (int axis = 0; axis < 2; ++axis) {
            std::vector<double> vals(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2& p = trace.frames[i].points[k];
                vals[i] = axis == 0 ? p.x : p.y;
            }
            repair_gaps(vals, valid, t);
            for (std::size_t i = 0; i < n; ++i) {
                Vec2& p = trace.frames[i].points[k];
                (axis == 0 ? p.x : p.y) = vals[i];
            }
        }
    }
    return trace;
}

double heading_angle(const Vec2& head, const Vec2& rear) {
    const double dx = head.x - rear.x;
    const double dy = head.y - rear.y;
    if (std::hypot(dx, dy) < 1e-9)
        throw DegenerateBody("head and rear coincide within 1e-9");
    double beta = std::atan2(dy, dx);
    if (beta <= -std::numbers::pi) beta = std::numbers::pi;  // keep range (-pi, pi]
    return beta;
}

Vec2 to_body_frame(const Vec2& point, double beta) {
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    return {point.x * c + point.y * s, point.y * c - point.x * s};
}

std::vector<int> contact_indicator(const std::vector<double>& heights, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0, 1)");
    const auto [lo_it, hi_it] = std::minmax_element(heights.begin(), heights.end());
    if (heights.empty()) return {};
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double threshold = lo + (hi - lo) * gamma;
    std::vector<int> d(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) d[i] = heights[i] <= threshold ? 1 : 0;
    return d;
}

ContactSeries detect_contacts(const std::array<std::vector<double>, kNumLegs>& foot_heights,
                              double gamma) {
    ContactSeries cs;
    cs.gamma = gamma;
    for (int i = 0; i < kNumLegs; ++i) {
        if (foot_heights[i].size() < 2)
            throw std::invalid_argument("detect_contacts: series needs at least 2 samples");
        cs.d[i] = contact_indicator(foot_heights[i], gamma);
    }
    return cs;
}

std::vector<Vec2> body_frame_positions(const KeyPointTrace& trace, KeyPoint point) {
    std::vector<Vec2> out;
    out.reserve(trace.frames.size());
    for (const auto& f : trace.frames) {
        const double beta = heading_angle(f.points[kHead], f.points[kRear]);
        out.push_back(to_body_frame(f.points[point], beta));
    }
    return out;
}

std::vector<Vec2> body_frame_velocity(const KeyPointTrace& trace, Leg foot) {
    if (trace.frames.size() < 2)
        throw std::invalid_argument("body_frame_velocity: trace needs at least 2 frames");
    const auto pos = body_frame_positions(trace, static_cast<KeyPoint>(static_cast<int>(kFootFL) + static_cast<int>(foot)));
    std::vector<Vec2> v;
    v.reserve(pos.size() - 1);
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        const double dt = trace.frames[i + 1].t - trace.frames[i].t;
        v.push_back((pos[i + 1] - pos[i]) / dt);
    }
    return v;
}

}  // namespace gaitmimic
