#include "gaitmimic/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <numbers>
#include <utility>
#include <vector>

#include "gaitmimic/types.hpp"
#include "gaitmimic/util.hpp"

namespace gaitmimic {
namespace {

constexpr double kPi = std::numbers::pi;

std::string format_row(int frame, double t, const double* px, const double* conf) {
    char buf[512];
    int n = std::snprintf(buf, sizeof buf, "%d,%.6f", frame, t);
    for (int i = 0; i < 12; ++i)
        n += std::snprintf(buf + n, sizeof buf - n, ",%.3f", px[i]);
    for (int i = 0; i < 6; ++i)
        n += std::snprintf(buf + n, sizeof buf - n, ",%.3f", conf[i]);
    buf[n++] = '\n';
    return std::string(buf, n);
}

const char* kHeader =
    "frame,time_s,head_x,head_y,rear_x,rear_y,fl_x,fl_y,fr_x,fr_y,rl_x,rl_y,rr_x,rr_y,"
    "head_c,rear_c,fl_c,fr_c,rl_c,rr_c\n";

/// One scripted backflip pose: trunk-relative foot targets for the front
/// and rear pair (x forward, depth below the hip, units of a 0.36-unit
/// body), the hold until the next pose, and the body angle the subject
/// shows at that moment (radians, unwrapped across the rotation).
struct FlipKey {
    double front_x, front_d, rear_x, rear_d;
    double hold_s;
    double beta;
};

/// Countermovement load, drop to a crouch, front pop, rear drive, a long
/// tuck carrying most of the turn, extension before touchdown, catch,
/// stand. Depths beyond 0.3 press into the ground (the trunk rides up);
/// depths under 0.3 drop the trunk.
constexpr FlipKey kFlipScript[] = {
    {0.0000, 0.3000, 0.0000, 0.3000, 0.1500, 0.0000},
    {-0.0120, 0.3377, -0.0120, 0.3377, 0.1311, -0.0012},
    {0.0237, 0.2367, 0.0237, 0.2367, 0.1557, 0.0075},
    {-0.0082, 0.1141, 0.0238, 0.2240, 0.0797, -0.2480},
    {-0.1780, 0.3236, 0.2274, 0.1424, 0.0315, 0.0038},
    {-0.0259, 0.3804, -0.1539, 0.3794, 0.0204, 0.3401},
    {0.0200, 0.1706, 0.0200, 0.1706, 0.5021, 0.7096},
    {0.0000, 0.3000, 0.0000, 0.3000, 0.0775, 6.6938},
    {0.0300, 0.3200, 0.0300, 0.3200, 0.4000, 6.6055},
    {0.0000, 0.3000, 0.0000, 0.3000, 0.0000, 6.2282},
};
constexpr double kFlipSpan = 0.36;  // head-rear distance in script units
constexpr int kFlipTuckIndex = 6;

}  // namespace

std::string make_trot_trace_csv(const TrotTraceOptions& opts) {
    std::mt19937_64 rng(seed_mix(opts.seed, 0x7407));

    const double cycle_s = opts.frames_per_cycle / opts.fps;
    std::vector<double> boundary{0.0};
    for (int k = 0; k < opts.cycles; ++k) {
        const double dur = cycle_s * (1.0 + opts.jitter * (2.0 * uniform01(rng) - 1.0));
        boundary.push_back(boundary.back() + dur);
    }
    const double total = boundary.back();
    const int n = static_cast<int>(total * opts.fps);

    // Diagonal pairs share phase: FL with RR, FR with RL.
    const double phase_off[kNumLegs] = {0.0, 0.5, 0.5, 0.0};
    const double home_x[kNumLegs] = {0.25, 0.25, -0.25, -0.25};

    std::string csv = kHeader;
    std::vector<std::pair<int, int>> dips;
    for (int d = 0; d < opts.confidence_dips; ++d)
        dips.emplace_back(2 + static_cast<int>(uniform01(rng) * std::max(1, n - 5)),
                          static_cast<int>(uniform01(rng) * kNumKeyPoints));

    std::size_t cyc = 0;
    for (int i = 0; i < n; ++i) {
        const double t = i / opts.fps;
        while (cyc + 1 < boundary.size() - 1 && t >= boundary[cyc + 1]) ++cyc;
        const double phi = cyc + (t - boundary[cyc]) / (boundary[cyc + 1] - boundary[cyc]);

        const double sway = 0.03 * std::sin(2.0 * kPi * t / 3.1);
        const double body_y = opts.body_height + opts.bob_amplitude * std::sin(4.0 * kPi * phi);

        // Subject-relative x (panning camera), world y (fixed camera height).
        double ux[kNumKeyPoints], uy[kNumKeyPoints];
        ux[kHead] = opts.body_length / 2.0 + sway;
        uy[kHead] = body_y + 0.002 * std::sin(2.0 * kPi * phi + 1.0);
        ux[kRear] = -opts.body_length / 2.0 + sway;
        uy[kRear] = body_y;
        for (int leg = 0; leg < kNumLegs; ++leg) {
            const double psi = phi + phase_off[leg];
            const double c = std::floor(psi);
            const double p = psi - c;
            // Left legs (FL, RL) linger in stance, right legs lift early: a
            // mild lateral asymmetry of the kind real footage shows.
            const double duty =
                opts.duty + (leg == kFL || leg == kRL ? opts.duty_bias : -opts.duty_bias);
            double gx = 0.0, gy = 0.0;
            if (p >= duty) {
                const double u = (p - duty) / (1.0 - duty);
                gx = u * u * (3.0 - 2.0 * u);
                gy = opts.swing_height * std::sin(kPi * u);
            }
            ux[kFootFL + leg] = home_x[leg] + opts.stride * (c + gx) - opts.stride * phi + sway;
            uy[kFootFL + leg] = gy;
        }

        double px[12], conf[kNumKeyPoints];
        for (int k = 0; k < kNumKeyPoints; ++k) {
            px[2 * k] = 200.0 + opts.px_per_unit * ux[k] + opts.noise_px * gaussian(rng);
            px[2 * k + 1] = 420.0 - opts.px_per_unit * uy[k] + opts.noise_px * gaussian(rng);
            conf[k] = 0.88 + 0.1 * uniform01(rng);
        }
        for (const auto& [frame, kp] : dips)
            if (frame == i) conf[kp] = 0.12;
        csv += format_row(i, t, px, conf);
    }
    return csv;
}

std::string make_backflip_trace_csv(const BackflipTraceOptions& opts) {
    std::mt19937_64 rng(seed_mix(opts.seed, 0xBF11));
    constexpr int n_keys = static_cast<int>(std::size(kFlipScript));

    struct Row {
        double t, fx, fd, rx, rd, beta;
    };
    std::vector<Row> rows;
    double t = 0.0;
    for (int k = 0; k < n_keys; ++k) {
        const FlipKey& key = kFlipScript[k];
        if (k == 0 || k == n_keys - 1) {
            rows.push_back({t, key.front_x, key.front_d, key.rear_x, key.rear_d, key.beta});
        } else {
            rows.push_back({t - opts.bracket_s, key.front_x, key.front_d - opts.lead_in_depth,
                            key.rear_x, key.rear_d - opts.lead_in_depth, key.beta});
            rows.push_back({t, key.front_x, key.front_d, key.rear_x, key.rear_d, key.beta});
            rows.push_back(
                {t + opts.bracket_s, key.front_x, key.front_d, key.rear_x, key.rear_d, key.beta});
        }
        if (k == kFlipTuckIndex) {
            // Most of the rotation happens inside the tuck; without samples
            // at intermediate angles the unwrap would alias the turn away.
            const double next_beta = kFlipScript[k + 1].beta;
            for (int j = 1; j <= opts.tuck_samples; ++j) {
                const double f = static_cast<double>(j) / (opts.tuck_samples + 1);
                rows.push_back({t + key.hold_s * f, key.front_x, key.front_d, key.rear_x,
                                key.rear_d, key.beta + (next_beta - key.beta) * f});
            }
        }
        t += key.hold_s;
    }

    const double zoom = opts.body_length / kFlipSpan;
    std::string csv = kHeader;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const double cb = std::cos(r.beta), sb = std::sin(r.beta);
        auto rot = [&](double x, double y) { return Vec2{cb * x - sb * y, sb * x + cb * y}; };

        double ux[kNumKeyPoints], uy[kNumKeyPoints];
        const Vec2 head = rot(kFlipSpan / 2.0, 0.0);
        const Vec2 rear = rot(-kFlipSpan / 2.0, 0.0);
        const Vec2 front_foot = rot(kFlipSpan / 2.0 + r.fx, -r.fd);
        const Vec2 rear_foot = rot(-kFlipSpan / 2.0 + r.rx, -r.rd);
        ux[kHead] = head.x;
        uy[kHead] = head.y;
        ux[kRear] = rear.x;
        uy[kRear] = rear.y;
        for (int leg = 0; leg < kNumLegs; ++leg) {
            // Side view: the left and right leg of a pair track one target.
            const Vec2& w = leg < 2 ? front_foot : rear_foot;
            ux[kFootFL + leg] = w.x;
            uy[kFootFL + leg] = w.y;
        }

        // Tracking-crop coordinates centered on the subject: a full-rotation
        // clip only de-rotates cleanly when the frame origin rides the body.
        double px[12], conf[kNumKeyPoints];
        for (int k = 0; k < kNumKeyPoints; ++k) {
            px[2 * k] = opts.px_per_unit * zoom * ux[k] + opts.noise_px * gaussian(rng);
            px[2 * k + 1] = -opts.px_per_unit * zoom * uy[k] + opts.noise_px * gaussian(rng);
            conf[k] = 0.9 + 0.08 * uniform01(rng);
        }
        csv += format_row(static_cast<int>(i), r.t, px, conf);
    }
    return csv;
}

}  // namespace gaitmimic
