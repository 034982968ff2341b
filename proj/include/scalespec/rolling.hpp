#pragma once

#include "scalespec/core.hpp"
#include "scalespec/fit.hpp"
#include "scalespec/series.hpp"

#include <optional>
#include <span>
#include <vector>

namespace scalespec {

enum class TrackMode { robust, fixed_h };

struct RollingConfig {
    Index window = 256;                  // M
    Index j_first = 1;
    std::optional<Index> j_last;         // defaults to floor(M/2)
    TrackMode mode = TrackMode::robust;
    double h0 = 0.5;                     // used when mode == fixed_h
    double steps_per_year = kDefaultStepsPerYear;

    Index resolved_j_last() const { return j_last.value_or(window / 2); }
    void validate() const;
};

/// One estimate per center index n0 = 1..N. Entries whose window is
/// degenerate are flagged in `missing` and hold NaN.
struct ParameterTrack {
    std::vector<Index> centers;
    VectorXd h;
    VectorXd sigma_step;
    VectorXd sigma_annual;
    VectorXd misfit;
    std::vector<bool> missing;
    RollingConfig config;

    Index size() const noexcept { return static_cast<Index>(centers.size()); }
};

struct Variogram {
    std::vector<Index> lags;
    VectorXd gamma;              // NaN where no valid pair exists
    std::vector<Index> pairs;    // number of valid pairs per lag
};

ParameterTrack rolling_estimates(const SampledSeries& log_prices, const RollingConfig& config);
ParameterTrack rolling_estimates(const VectorXd& log_prices, const RollingConfig& config);

/// gamma(l) = 1/(2 N_l) sum (z_{i+l} - z_i)^2 over pairs with both ends
/// present (NaN marks a missing entry).
Variogram variogram(std::span<const double> z, Index max_lag);
Variogram variogram(const VectorXd& z, Index max_lag);

}  // namespace scalespec
