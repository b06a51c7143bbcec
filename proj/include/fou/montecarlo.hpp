#pragma once

// Ensemble statistics with standard errors and the empirical checks that tie
// sampled paths to the analytic layer.

#include <cmath>
#include <optional>
#include <vector>

#include "fou/analytics.hpp"
#include "fou/errors.hpp"
#include "fou/simulate.hpp"

namespace fou {

struct CovEstimate {
    double value = 0.0;
    /// Sample standard deviation of the per-path terms over sqrt(n_paths).
    double std_error = 0.0;
    int n_paths = 0;
};

/// Smallest ensemble for which a standard error is reported.
inline constexpr int kMinPaths = 30;

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean and standard error of a sample.
inline CovEstimate mean_with_error(const std::vector<double>& xs) {
    CovEstimate out;
    out.n_paths = static_cast<int>(xs.size());
    if (xs.empty()) return out;
    if (xs.size() < static_cast<std::size_t>(kMinPaths)) {
        throw DomainError("at least 30 paths are needed for a standard error");
    }
    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double n = static_cast<double>(xs.size());
    const double mean = s.value() / n;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - mean) * (x - mean));
    out.value = mean;
    out.std_error = std::sqrt(ss.value() / (n - 1.0) / n);
    return out;
}

}  // namespace detail

/// Sample mean of X_s X_t across paths.
inline CovEstimate estimate_cov(const PathEnsemble& e, double s, double t) {
    if (e.n_paths() == 0) return {};
    const int i = e.grid.index_of(s);
    const int j = e.grid.index_of(t);
    std::vector<double> terms(static_cast<std::size_t>(e.n_paths()));
    for (int r = 0; r < e.n_paths(); ++r) terms[static_cast<std::size_t>(r)] = e.paths(r, i) * e.paths(r, j);
    return detail::mean_with_error(terms);
}

/// Sample p-th moment at t.
inline CovEstimate estimate_moment(const PathEnsemble& e, double t, int p) {
    if (p < 1) throw DomainError("moment order must be >= 1");
    if (e.n_paths() == 0) return {};
    const int i = e.grid.index_of(t);
    std::vector<double> terms(static_cast<std::size_t>(e.n_paths()));
    for (int r = 0; r < e.n_paths(); ++r) terms[static_cast<std::size_t>(r)] = std::pow(e.paths(r, i), p);
    return detail::mean_with_error(terms);
}

/// Mean over paths of the lag-`lag` product averaged over every admissible
/// time origin of a stationary ensemble; the standard error is taken across
/// paths, which are independent.
inline CovEstimate estimate_lag_cov(const PathEnsemble& e, double lag) {
    if (e.n_paths() == 0) return {};
    if (!e.grid.is_uniform()) throw DomainError("lag averaging needs a uniform grid");
    const double steps = lag / e.grid.dt();
    const int k = static_cast<int>(std::lround(steps));
    if (k < 0 || std::abs(steps - k) > 1e-9 * std::max(1.0, steps) || k >= e.grid.size()) {
        throw DomainError("lag is not a whole number of grid steps inside the grid");
    }
    const int origins = e.grid.size() - k;
    std::vector<double> terms(static_cast<std::size_t>(e.n_paths()));
    for (int r = 0; r < e.n_paths(); ++r) {
        detail::CompensatedSum s;
        for (int i = 0; i < origins; ++i) s.add(e.paths(r, i) * e.paths(r, i + k));
        terms[static_cast<std::size_t>(r)] = s.value() / origins;
    }
    return detail::mean_with_error(terms);
}

enum class ErgodicStatistic { identity, square };

struct ErgodicityResult {
    double time_avg_mean = 0.0;
    double expected = 0.0;
    double z_score = 0.0;
    /// Set when the per-path time averages do not vary, so no z-score exists.
    bool degenerate = false;
};

/// Per-path trapezoidal time averages of Z or Z^2 against the stationary
/// expectation (0, or E[Z_0^2]).
inline ErgodicityResult ergodicity_check(const PathEnsemble& e, const OUSpec& ou, ErgodicStatistic stat,
                                         const QuadConfig& q = {}) {
    validate(ou);
    if (!(ou.theta > 0.0)) throw DomainError("ergodicity check needs theta > 0");
    const double span = e.grid.t1() - e.grid.t0();
    if (span < 50.0 / ou.theta * (1.0 - 1e-12)) throw DomainError("ergodicity check needs T >= 50 / theta");
    ErgodicityResult out;
    out.expected = stat == ErgodicStatistic::identity ? 0.0 : stationary_variance(ou, q);
    if (e.n_paths() == 0) {
        out.degenerate = true;
        return out;
    }
    std::vector<double> avgs(static_cast<std::size_t>(e.n_paths()));
    for (int r = 0; r < e.n_paths(); ++r) {
        detail::CompensatedSum s;
        for (int i = 1; i < e.grid.size(); ++i) {
            double a = e.paths(r, i - 1);
            double b = e.paths(r, i);
            if (stat == ErgodicStatistic::square) {
                a *= a;
                b *= b;
            }
            s.add(0.5 * (e.grid[i] - e.grid[i - 1]) * (a + b));
        }
        avgs[static_cast<std::size_t>(r)] = s.value() / span;
    }
    const CovEstimate m = detail::mean_with_error(avgs);
    out.time_avg_mean = m.value;
    if (!(m.std_error > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.z_score = (m.value - out.expected) / m.std_error;
    return out;
}

struct DecayRow {
    double lag = 0.0;
    CovEstimate estimate;
    double analytic = 0.0;
};

/// Lag covariances of stationary paths against E[Z_t Z_0], one row per lag.
/// Lags must be multiples of dt.
inline std::vector<DecayRow> decay_study(const OUSpec& ou, const std::vector<double>& lags, int n_paths,
                                         std::uint64_t seed, double dt = 1.0 / 64,
                                         std::optional<double> burn_in = std::nullopt,
                                         const SamplingOptions& opt = {}, const QuadConfig& q = {}) {
    validate(ou);
    if (lags.empty()) return {};
    double max_lag = 0.0;
    for (double l : lags) {
        if (!(l >= 0.0)) throw DomainError("lags must be >= 0");
        max_lag = std::max(max_lag, l);
    }
    const int steps = std::max(1, static_cast<int>(std::lround(max_lag / dt)));
    const Grid grid = Grid::uniform(0.0, steps * dt, steps + 1);
    const PathEnsemble z = stationary_path(ou, grid, n_paths, seed, burn_in, opt);
    std::vector<DecayRow> rows;
    for (double l : lags) {
        DecayRow row;
        row.lag = l;
        row.estimate = estimate_cov(z, 0.0, grid[grid.index_of(l)]);
        row.analytic = stationary_autocov(ou, l, q);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fou
