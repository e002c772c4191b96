#pragma once

#include <vector>

#include "gaitmimic/types.hpp"

namespace gaitmimic {

/// Additive split y = trend + seasonal + residual.
/// residual is defined by subtraction, so the identity
/// `residual[i] == y[i] - (trend[i] + seasonal[i])` holds bitwise.
struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    int period = 0;
};

/// Period in frames from the mean distance between prominent local maxima.
/// A peak qualifies when its prominence reaches 20% of the series range.
/// Throws NoPeriodicity when fewer than 2 peaks qualify.
int estimate_period(const std::vector<double>& y);

/// Prominence of a local maximum at `peak` (scipy-style: walk outward to the
/// nearest higher sample on each side, base = the lower of the two interval
/// minima). Exposed for tests.
double peak_prominence(const std::vector<double>& y, std::size_t peak);

/// Classic additive X11 skeleton: centered moving-average trend (weighted over
/// period+1 points for even periods), per-phase seasonal means re-centered to
/// zero, residual by subtraction; the trend is re-estimated on the
/// deseasonalized series for a second pass. Endpoint trend uses shortened
/// renormalized windows so every index has a trend value.
/// Requires y.size() >= 3*period, otherwise throws SeriesTooShort.
Decomposition x11_decompose(const std::vector<double>& y, int period);

/// One canonical period of the seasonal component: phase-wise mean over all
/// full periods, re-centered to zero mean. Length == decomposition period.
std::vector<double> seasonal_template(const Decomposition& d);

}  // namespace gaitmimic
