#pragma once

// Moments and covariances of Ornstein-Uhlenbeck processes dX = -theta X dt + dN,
// X_0 = 0, driven either by a process G directly (first kind) or by the
// second-kind noise Y(1) built on a self-similar base U. Z denotes the
// stationary solution.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fou/errors.hpp"
#include "fou/kernels.hpp"
#include "fou/quadrature.hpp"

namespace fou {

enum class NoiseKind { first, second };

struct OUSpec {
    NoiseKind kind = NoiseKind::first;
    ProcessSpec process = Fbm{0.5};
    double theta = 1.0;
};

inline std::string to_string(const OUSpec& ou) {
    std::ostringstream os;
    os.precision(17);
    os << (ou.kind == NoiseKind::first ? "first" : "second") << ":" << to_string(ou.process)
       << ":theta=" << ou.theta;
    return os.str();
}

inline void validate(const OUSpec& ou) {
    validate(ou.process);
    if (!std::isfinite(ou.theta)) throw DomainError("theta must be finite");
    if (ou.kind == NoiseKind::second) detail::require_second_kind_base(ou.process);
}

/// True when the OU process has a stationary version Z.
inline bool has_stationary_solution(const OUSpec& ou) {
    return ou.kind == NoiseKind::second || has_stationary_increments(ou.process);
}

/// A lag kernel k(u), u > 0, with k(u) ~ C u^beta as u -> 0.
struct LagKernel {
    std::function<double(double)> fn;
    double small_lag_exponent = 0.0;
};

/// The kernel entering E[Z_t Z_0] = e^{-theta t} E[Z_0^2] + stationary_double(k, theta, t):
/// half the second derivative of rho_G for the first kind, f_U - f_U'' for the second.
inline LagKernel autocov_kernel(const OUSpec& ou) {
    validate(ou);
    if (!has_stationary_solution(ou)) {
        throw DomainError("non-stationary driver: " + to_string(ou.process) + " has no stationary solution");
    }
    if (ou.kind == NoiseKind::first) {
        const double h = hurst(ou.process);
        if (h == 0.5) return {[](double) { return 0.0; }, 0.0};
        return {[h](double u) { return h * (2 * h - 1) * detail::pow_nonneg(u, 2 * h - 2); }, 2 * h - 2};
    }
    const ProcessSpec p = ou.process;
    return {[p](double u) { return rho_dd_y1(p, u); }, second_kind_small_lag_exponent(p)};
}

namespace detail {

inline void require_positive_theta(const OUSpec& ou) {
    if (!(ou.theta > 0.0)) throw DomainError("theta must be positive for stationary quantities");
}

inline double checked(const QuadResult& r, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (value " << r.value << ", achieved error "
           << r.est_error << ")";
        throw NumericError(os.str());
    }
    return r.value;
}

}  // namespace detail

/// int_0^inf f_U(t) e^{-theta t} dt
inline double laplace_f_u(const ProcessSpec& p, double theta, const QuadConfig& q = {}) {
    const QuadResult r = integrate_1d([&](double x) { return f_u(p, x) * std::exp(-theta * x); }, 0.0,
                                      std::numeric_limits<double>::infinity(), EndpointSingularity::left, q);
    return detail::checked(r, "laplace_f_u");
}

/// E[Z_0^2] from the closed forms: H Gamma(2H) / theta^{2H} for the first kind,
/// f_U(0) + (1/theta - theta) int_0^inf f_U e^{-theta t} dt for the second.
inline double stationary_variance(const OUSpec& ou, const QuadConfig& q = {}) {
    validate(ou);
    detail::require_positive_theta(ou);
    if (!has_stationary_solution(ou)) {
        throw DomainError("non-stationary driver: " + to_string(ou.process) + " has no stationary solution");
    }
    if (ou.kind == NoiseKind::first) {
        const double h = hurst(ou.process);
        if (h == 0.5) return 1.0 / (2.0 * ou.theta);
        return h * std::tgamma(2 * h) / std::pow(ou.theta, 2 * h);
    }
    const double th = ou.theta;
    return f_u(ou.process, 0.0) + (1.0 / th - th) * laplace_f_u(ou.process, th, q);
}

/// E[Z_0^2] = (theta / 2) int_0^inf e^{-theta t} rho_G(t) dt, first kind only.
inline QuadResult stationary_variance_quadrature(const OUSpec& ou, const QuadConfig& q = {}) {
    validate(ou);
    detail::require_positive_theta(ou);
    if (ou.kind != NoiseKind::first || !has_stationary_increments(ou.process)) {
        throw DomainError("stationary_variance_quadrature needs a first-kind driver with stationary increments");
    }
    const ProcessSpec p = ou.process;
    const double th = ou.theta;
    QuadResult r = integrate_1d([&](double t) { return std::exp(-th * t) * rho(p, t); }, 0.0,
                                std::numeric_limits<double>::infinity(), EndpointSingularity::left, q);
    r.value *= 0.5 * th;
    r.est_error *= 0.5 * th;
    return r;
}

/// E[Z_0^p] for Gaussian stationary solutions: zero for odd p, otherwise
/// p! / (2^{p/2} (p/2)!) sigma^p.
inline double stationary_moment(const OUSpec& ou, int p, const QuadConfig& q = {}) {
    validate(ou);
    if (p < 1) throw DomainError("moment order must be >= 1");
    if (ou.kind == NoiseKind::first && !is_gaussian(ou.process)) {
        throw DomainError("moment formula needs a Gaussian driver");
    }
    if (p % 2 == 1) return 0.0;
    const double var = stationary_variance(ou, q);
    const int half = p / 2;
    const double coef = std::exp(std::lgamma(p + 1.0) - half * std::log(2.0) - std::lgamma(half + 1.0));
    return coef * std::pow(var, half);
}

/// E[Z_t Z_0].
inline double stationary_autocov(const OUSpec& ou, double t, const QuadConfig& q = {}) {
    validate(ou);
    detail::require_positive_theta(ou);
    const double lag = std::abs(t);
    const double th = ou.theta;
    if (ou.kind == NoiseKind::first && has_stationary_increments(ou.process) && hurst(ou.process) == 0.5) {
        return std::exp(-th * lag) / (2 * th);
    }
    const double var = stationary_variance(ou, q);
    if (lag == 0.0) return var;
    const LagKernel k = autocov_kernel(ou);
    const QuadResult r = stationary_double(k.fn, th, lag, q, k.small_lag_exponent);
    return std::exp(-th * lag) * var + detail::checked(r, "stationary_autocov");
}

/// E[X_s X_t] from the stationary covariance C: X_t = Z_t - e^{-theta t} Z_0.
inline double cov_from_stationary(const OUSpec& ou, double s, double t, const QuadConfig& q = {}) {
    const double th = ou.theta;
    const double c0 = stationary_autocov(ou, 0.0, q);
    const double cs = stationary_autocov(ou, s, q);
    const double ct = s == t ? cs : stationary_autocov(ou, t, q);
    const double cts = stationary_autocov(ou, t - s, q);
    return cts - std::exp(-th * t) * cs - std::exp(-th * s) * ct + std::exp(-th * (s + t)) * c0;
}

/// E[X_t^2] for the first kind straight from
/// R(t,t) - 2 theta e^{-theta t} int_0^t R(s,t) e^{theta s} ds + theta^2 e^{-2 theta t} int int R e^{theta(s+r)}.
inline QuadResult first_kind_variance_direct(const OUSpec& ou, double t, const QuadConfig& q = {}) {
    validate(ou);
    if (ou.kind != NoiseKind::first) throw DomainError("first_kind_variance_direct needs a first-kind spec");
    if (!(t >= 0.0)) throw DomainError("t must be >= 0");
    if (t == 0.0) return {};
    const ProcessSpec p = ou.process;
    auto g = [&p](double s, double r) { return cov(p, s, r); };
    return detail::delta_g_three_term(g, ou.theta, t, q);
}

/// Delta_g(t) for the remainder g of covariance_split, in derivative form.
inline QuadResult split_remainder_delta(const ProcessSpec& p, double theta, double t, const QuadConfig& q = {}) {
    auto zero = [](double) { return 0.0; };
    auto d2 = [&p](double s, double r) { return split_remainder_d2(p, s, r); };
    return detail::delta_g_derivative_form(zero, d2, theta, t, q);
}

/// E[X_t^2] for either kind.
inline double ou_variance(const OUSpec& ou, double t, const QuadConfig& q = {}) {
    validate(ou);
    if (!(t >= 0.0)) throw DomainError("t must be >= 0");
    if (t == 0.0) return 0.0;
    const double th = ou.theta;
    if (ou.kind == NoiseKind::first) {
        if (th == 0.0) return rho(ou.process, t);
        if (has_stationary_increments(ou.process)) {
            if (th > 0.0) return cov_from_stationary(ou, t, t, q);
            return detail::checked(first_kind_variance_direct(ou, t, q), "ou_variance");
        }
        if (th > 0.0) {
            const auto split = covariance_split(ou.process);
            const OUSpec base{NoiseKind::first, Fbm{split.hurst}, th};
            const double stationary_part = split.weight * ou_variance(base, t, q);
            return stationary_part +
                   detail::checked(split_remainder_delta(ou.process, th, t, q), "ou_variance");
        }
        return detail::checked(first_kind_variance_direct(ou, t, q), "ou_variance");
    }
    detail::require_positive_theta(ou);
    return cov_from_stationary(ou, t, t, q);
}

/// E[X_s X_t] for either kind. For the first kind with non-stationary
/// increments the covariance is e^{-theta(t-s)} E[X_s^2] plus the Wiener
/// cross covariance of the two disjoint stretches. With theta > 0 the driver
/// covariance is split as in ou_variance: the fBm part goes through the
/// stationary route and only the remainder, whose kernel is singular at the
/// origin alone, needs the cross integral.
inline double ou_cov(const OUSpec& ou, double s, double t, const QuadConfig& q = {}) {
    validate(ou);
    if (s > t) std::swap(s, t);
    if (!(s >= 0.0)) throw DomainError("times must be >= 0");
    if (s == 0.0) return 0.0;
    if (s == t) return ou_variance(ou, s, q);
    const double th = ou.theta;
    if (th > 0.0 && has_stationary_solution(ou)) return cov_from_stationary(ou, s, t, q);
    if (ou.kind == NoiseKind::second) detail::require_positive_theta(ou);
    const ProcessSpec p = ou.process;
    if (th > 0.0 && ou.kind == NoiseKind::first) {
        const auto split = covariance_split(p);
        const OUSpec base{NoiseKind::first, Fbm{split.hurst}, th};
        auto d2 = [&p](double x, double y) { return split_remainder_d2(p, x, y); };
        const QuadResult rem_cross = cross_cov(d2, th, 0.0, s, s, t, q, s, t);
        const double rem_var = detail::checked(split_remainder_delta(p, th, s, q), "ou_cov");
        return split.weight * ou_cov(base, s, t, q) + std::exp(-th * (t - s)) * rem_var +
               detail::checked(rem_cross, "ou_cov");
    }
    auto kernel = [&p](double x, double y) { return mixed_partial(p, x, y); };
    const QuadResult cross = cross_cov(kernel, th, 0.0, s, s, t, q, s, t);
    return std::exp(-th * (t - s)) * ou_variance(ou, s, q) + detail::checked(cross, "ou_cov");
}

// ---------------------------------------------------------------------------
// Asymptotic regimes

enum class RegimeKind { power_law, exponential, closed };

struct AsymptoticRegime {
    RegimeKind kind = RegimeKind::closed;
    /// Power-law exponent (negative) for power_law.
    double exponent = 0.0;
    /// Exponential rate for exponential and closed.
    double rate = 0.0;
    /// 1 when the leading term carries a factor t (critical theta).
    int poly_degree = 0;
    bool boundary = false;
    /// Identifier of the exact form for closed regimes.
    std::string closed_form;
    /// Leading constant, evaluated on demand because some are integrals.
    std::function<double(const QuadConfig&)> constant;

    /// The leading term at t.
    [[nodiscard]] double leading(double t, const QuadConfig& q = {}) const {
        const double c = constant(q);
        switch (kind) {
            case RegimeKind::power_law:
                return c * std::pow(t, exponent);
            case RegimeKind::exponential:
            case RegimeKind::closed:
                return c * std::pow(t, poly_degree) * std::exp(-rate * t);
        }
        return 0.0;
    }
};

namespace detail {

inline bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

}  // namespace detail

/// Decay law of E[Z_t Z_0] as t -> infinity.
///
/// First kind with H != 1/2: t^{2H-2} H(2H-1) / theta^2.
/// Second kind with rho_dd_y1(u) ~ A e^{-c u}:
///   theta < c : e^{-theta t} [E Z_0^2 + (1/2theta) int_0^inf (e^{theta u} - e^{-theta u}) k(u) du]
///   theta = c : t e^{-theta t} A / (2 theta)
///   theta > c : e^{-c t} A / (theta^2 - c^2)
inline AsymptoticRegime classify_regime(const OUSpec& ou) {
    validate(ou);
    detail::require_positive_theta(ou);
    const double th = ou.theta;
    AsymptoticRegime r;
    if (ou.kind == NoiseKind::first) {
        if (!has_stationary_increments(ou.process)) {
            throw DomainError("non-stationary driver: " + to_string(ou.process) + " has no stationary solution");
        }
        const double h = hurst(ou.process);
        if (h == 0.5) {
            r.kind = RegimeKind::closed;
            r.rate = th;
            r.closed_form = "exp(-theta*t)/(2*theta)";
            r.constant = [th](const QuadConfig&) { return 1.0 / (2.0 * th); };
            return r;
        }
        r.kind = RegimeKind::power_law;
        r.exponent = 2 * h - 2;
        r.constant = [h, th](const QuadConfig&) { return h * (2 * h - 1) / (th * th); };
        return r;
    }
    const ProcessSpec p = ou.process;
    if (const auto* b = std::get_if<BiFbm>(&p); b && b->k != 1.0) {
        if (b->hurst == 0.5) throw DomainError("second-kind bifBm regime is not covered for H = 1/2");
        if (b->hurst * b->k == 0.5) throw DomainError("second-kind bifBm regime needs HK != 1/2");
    }
    r.kind = RegimeKind::exponential;
    const ExponentialTail tail = second_kind_tail(p);
    const OUSpec spec = ou;
    if (tail.amplitude == 0.0) {
        r.rate = th;
        r.constant = [spec](const QuadConfig& q) { return stationary_variance(spec, q); };
        return r;
    }
    const double c = tail.rate;
    const double a = tail.amplitude;
    if (detail::same_rate(th, c)) {
        r.rate = th;
        r.poly_degree = 1;
        r.boundary = true;
        r.constant = [a, th](const QuadConfig&) { return a / (2 * th); };
    } else if (th < c) {
        r.rate = th;
        r.constant = [spec, p, th](const QuadConfig& q) {
            auto integrand = [&](double u) { return 2.0 * std::sinh(th * u) * rho_dd_y1(p, u); };
            const QuadResult i = integrate_1d(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                              EndpointSingularity::left, q);
            return stationary_variance(spec, q) + detail::checked(i, "regime constant") / (2 * th);
        };
    } else {
        r.rate = c;
        r.constant = [a, th, c](const QuadConfig&) { return a / (th * th - c * c); };
    }
    return r;
}

/// Limit of E[X_t^2] for first-kind subfBm / bifBm and the exponent of the
/// power-law approach.
struct VarianceLimit {
    double limit;
    double rate_exponent;
};

inline VarianceLimit nonstationary_variance_limit(const OUSpec& ou) {
    validate(ou);
    detail::require_positive_theta(ou);
    if (ou.kind != NoiseKind::first) throw DomainError("nonstationary_variance_limit needs a first-kind spec");
    const double th = ou.theta;
    if (const auto* s = std::get_if<SubFbm>(&ou.process)) {
        const double h = s->hurst;
        if (h == 0.5) throw DomainError("subfBm limit needs H != 1/2");
        return {h * std::tgamma(2 * h) / std::pow(th, 2 * h), 2 * h - 2};
    }
    if (const auto* b = std::get_if<BiFbm>(&ou.process)) {
        const double hk = b->hurst * b->k;
        if (hk == 0.5) throw DomainError("bifBm limit needs HK != 1/2");
        return {hk * std::tgamma(2 * hk) / (std::exp2(b->k - 1) * std::pow(th, 2 * hk)), 2 * hk - 2};
    }
    throw DomainError("nonstationary_variance_limit covers subfBm and bifBm drivers");
}

/// Exponent e in |E[X_s X_t]| <= C |t - s|^e for first-kind drivers.
inline double nonstationary_cov_bound_exponent(const OUSpec& ou) {
    validate(ou);
    if (ou.kind != NoiseKind::first) throw DomainError("covariance bound exponent is defined for the first kind");
    if (const auto* b = std::get_if<BiFbm>(&ou.process)) {
        const double h = b->hurst;
        const double hk = h * b->k;
        if (h < 0.5) return 2 * hk - 2 * h - 1;
        return 2 * hk - 2;
    }
    return 2 * hurst(ou.process) - 2;
}

// ---------------------------------------------------------------------------
// Decay fitting

enum class DecayModel { power, exponential, exponential_poly };

struct DecayFit {
    /// Slope of log|v| against log t for power; decay rate for the exponential models.
    double exponent_or_rate = 0.0;
    /// Coefficient of log t in the exponential_poly model.
    double poly_power = 0.0;
    double r_squared = 0.0;
    int used = 0;
    int dropped = 0;
};

/// Least-squares fit of a decay law to (t, value) samples. Values are fitted on
/// |value| once zeros and points whose sign differs from the majority are
/// dropped; the dropped count is reported.
inline DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, DecayModel model) {
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].first > series[i - 1].first)) throw DomainError("fit_decay: t must be increasing");
    }
    int positive = 0;
    int negative = 0;
    for (const auto& [t, v] : series) {
        if (v > 0) ++positive;
        if (v < 0) ++negative;
    }
    const double sign = positive >= negative ? 1.0 : -1.0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, v] : series) {
        if (v * sign > 0 && std::isfinite(v) && (model != DecayModel::power || t > 0)) {
            pts.emplace_back(t, std::log(std::abs(v)));
        }
    }
    DecayFit fit;
    fit.used = static_cast<int>(pts.size());
    fit.dropped = static_cast<int>(series.size() - pts.size());
    if (pts.size() < 5) throw DomainError("fit_decay: fewer than 5 usable points");
    const int cols = model == DecayModel::exponential_poly ? 3 : 2;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double t = pts[static_cast<std::size_t>(i)].first;
        a(i, 0) = 1.0;
        switch (model) {
            case DecayModel::power:
                a(i, 1) = std::log(t);
                break;
            case DecayModel::exponential:
                a(i, 1) = t;
                break;
            case DecayModel::exponential_poly:
                a(i, 1) = t;
                a(i, 2) = std::log(t);
                break;
        }
        y(i) = pts[static_cast<std::size_t>(i)].second;
    }
    const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - a * beta;
    const double ss_res = resid.squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (model == DecayModel::power) {
        fit.exponent_or_rate = beta(1);
    } else {
        fit.exponent_or_rate = -beta(1);
        if (model == DecayModel::exponential_poly) fit.poly_power = beta(2);
    }
    return fit;
}

}  // namespace fou
