#include "gaitmimic/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gaitmimic {
namespace {

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] > y[i + 1]) peaks.push_back(i);
    return peaks;
}

/// Centered moving average of window length m. Even m uses the weighted
/// (m+1)-point window [0.5, 1, ..., 1, 0.5]/m; odd m the plain m-point mean.
/// Near the ends the window is clipped to the series and its weights
/// renormalized, so the trend is defined at every index.
std::vector<double> trend_moving_average(const std::vector<double>& y, int m) {
    const long n = static_cast<long>(y.size());
    const bool even = m % 2 == 0;
    const long half = even ? m / 2 : (m - 1) / 2;
    std::vector<double> trend(y.size());
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        double wsum = 0.0;
        for (long j = -half; j <= half; ++j) {
            const long k = i + j;
            if (k < 0 || k >= n) continue;
            const double w = (even && (j == -half || j == half)) ? 0.5 : 1.0;
            acc += w * y[k];
            wsum += w;
        }
        trend[i] = acc / wsum;
    }
    return trend;
}

/// Per-phase means re-centered to zero, tiled over the series length.
std::vector<double> seasonal_from_detrended(const std::vector<double>& detrended, int period) {
    std::vector<double> phase_mean(period, 0.0);
    std::vector<int> phase_count(period, 0);
    for (std::size_t i = 0; i < detrended.size(); ++i) {
        phase_mean[i % period] += detrended[i];
        ++phase_count[i % period];
    }
    for (int p = 0; p < period; ++p) phase_mean[p] /= phase_count[p];
    const double mean =
        std::accumulate(phase_mean.begin(), phase_mean.end(), 0.0) / period;
    for (int p = 0; p < period; ++p) phase_mean[p] -= mean;
    std::vector<double> seasonal(detrended.size());
    for (std::size_t i = 0; i < detrended.size(); ++i) seasonal[i] = phase_mean[i % period];
    return seasonal;
}

}  // namespace

double peak_prominence(const std::vector<double>& y, std::size_t peak) {
    const double h = y[peak];
    double left_min = h;
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] > h) break;
        left_min = std::min(left_min, y[i]);
    }
    double right_min = h;
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] > h) break;
        right_min = std::min(right_min, y[i]);
    }
    return h - std::max(left_min, right_min);
}

int estimate_period(const std::vector<double>& y) {
    if (y.size() < 3) throw NoPeriodicity("series too short for peak detection");
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double range = *hi - *lo;
    if (range <= 0.0) throw NoPeriodicity("constant series");

    std::vector<std::size_t> qualified;
    for (std::size_t p : local_maxima(y))
        if (peak_prominence(y, p) >= 0.2 * range) qualified.push_back(p);
    if (qualified.size() < 2)
        throw NoPeriodicity("found " + std::to_string(qualified.size()) +
                            " prominent peaks, need at least 2");

    double mean_dist = 0.0;
    for (std::size_t i = 0; i + 1 < qualified.size(); ++i)
        mean_dist += static_cast<double>(qualified[i + 1] - qualified[i]);
    mean_dist /= static_cast<double>(qualified.size() - 1);
    const int period = static_cast<int>(std::llround(mean_dist));
    if (period < 2) throw NoPeriodicity("peak spacing below 2 frames");
    return period;
}

Decomposition x11_decompose(const std::vector<double>& y, int period) {
    if (period < 2) throw std::invalid_argument("x11_decompose: period must be >= 2");
    if (y.size() < static_cast<std::size_t>(3 * period))
        throw SeriesTooShort("x11_decompose: need at least 3 periods (" +
                             std::to_string(3 * period) + " samples), got " +
                             std::to_string(y.size()));

    // Pass 1: trend on the raw series, seasonal on the detrended series.
    std::vector<double> trend = trend_moving_average(y, period);
    std::vector<double> detrended(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) detrended[i] = y[i] - trend[i];
    std::vector<double> seasonal = seasonal_from_detrended(detrended, period);

    // Pass 2: remove the seasonal estimate, re-estimate the trend, redo the
    // seasonal on the refined detrended series.
    std::vector<double> deseasonalized(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) deseasonalized[i] = y[i] - seasonal[i];
    trend = trend_moving_average(deseasonalized, period);
    for (std::size_t i = 0; i < y.size(); ++i) detrended[i] = y[i] - trend[i];
    seasonal = seasonal_from_detrended(detrended, period);

    Decomposition d;
    d.period = period;
    d.trend = std::move(trend);
    d.seasonal = std::move(seasonal);
    d.residual.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        d.residual[i] = y[i] - (d.trend[i] + d.seasonal[i]);
    return d;
}

std::vector<double> seasonal_template(const Decomposition& d) {
    if (d.period < 2) throw std::invalid_argument("seasonal_template: invalid period");
    const std::size_t full = d.seasonal.size() / d.period;
    if (full == 0) throw SeriesTooShort("seasonal_template: no full period available");
    std::vector<double> tmpl(d.period, 0.0);
    for (std::size_t k = 0; k < full; ++k)
        for (int p = 0; p < d.period; ++p) tmpl[p] += d.seasonal[k * d.period + p];
    for (int p = 0; p < d.period; ++p) tmpl[p] /= static_cast<double>(full);
    const double mean =
        std::accumulate(tmpl.begin(), tmpl.end(), 0.0) / static_cast<double>(d.period);
    for (auto& v : tmpl) v -= mean;
    return tmpl;
}

}  // namespace gaitmimic
