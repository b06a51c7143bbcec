#pragma once

// Covariance kernels of the driving processes and the auxiliary functions of
// the second-kind construction Y(1)_t = int_0^t e^{-s} dU_{a_s}, a_t = gamma e^{t/gamma}.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fou/errors.hpp"
#include "fou/quadrature.hpp"

namespace fou {

struct Fbm {
    double hurst;
};
struct SubFbm {
    double hurst;
};
struct BiFbm {
    double hurst;
    double k;
};
/// Hermite process of order q. Only its covariance is modelled; it equals the
/// covariance of fBm with the same Hurst index.
struct Hermite {
    int order;
    double hurst;
};

using ProcessSpec = std::variant<Fbm, SubFbm, BiFbm, Hermite>;

namespace detail {

inline bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

/// x^e for x >= 0 through exp/log; 0^e is 0 for e > 0, 1 for e == 0, and a
/// singularity otherwise.
inline double pow_nonneg(double x, double e) {
    if (x > 0.0) return std::exp(e * std::log(x));
    if (x == 0.0) {
        if (e > 0.0) return 0.0;
        if (e == 0.0) return 1.0;
        throw SingularityError("power of zero with negative exponent");
    }
    throw DomainError("power of a negative base");
}

/// log(2 sinh y) for y > 0.
inline double log_two_sinh(double y) { return y + std::log(-std::expm1(-2.0 * y)); }
/// log(2 cosh y).
inline double log_two_cosh(double y) {
    const double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a));
}

inline double abs_pow(double x, double e) { return pow_nonneg(std::abs(x), e); }

}  // namespace detail

inline void validate(const ProcessSpec& p) {
    std::visit(
        [](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Fbm> || std::is_same_v<T, SubFbm>) {
                if (!detail::in_open_unit(x.hurst)) throw DomainError("H must lie in (0, 1)");
            } else if constexpr (std::is_same_v<T, BiFbm>) {
                if (!detail::in_open_unit(x.hurst)) throw DomainError("H must lie in (0, 1)");
                if (!(x.k > 0.0 && x.k <= 1.0)) throw DomainError("K must lie in (0, 1]");
            } else {
                if (x.order < 1) throw DomainError("Hermite order must be >= 1");
                if (!(x.hurst > 0.5 && x.hurst < 1.0)) {
                    throw DomainError("Hermite process needs H in (1/2, 1)");
                }
            }
        },
        p);
}

inline std::string to_string(const ProcessSpec& p) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Fbm>) {
                os << "fbm(H=" << x.hurst << ")";
            } else if constexpr (std::is_same_v<T, SubFbm>) {
                os << "subfbm(H=" << x.hurst << ")";
            } else if constexpr (std::is_same_v<T, BiFbm>) {
                os << "bifbm(H=" << x.hurst << ",K=" << x.k << ")";
            } else {
                os << "hermite(q=" << x.order << ",H=" << x.hurst << ")";
            }
        },
        p);
    return os.str();
}

/// Hurst index of the driver (the H parameter of every family).
inline double hurst(const ProcessSpec& p) {
    return std::visit([](const auto& x) { return x.hurst; }, p);
}

/// Holder exponent gamma: H, or H K for bifBm.
inline double holder_exponent(const ProcessSpec& p) {
    validate(p);
    if (const auto* b = std::get_if<BiFbm>(&p)) return b->hurst * b->k;
    return hurst(p);
}

/// True for the drivers with stationary increments (fBm and Hermite, and
/// bifBm with K = 1).
inline bool has_stationary_increments(const ProcessSpec& p) {
    if (std::holds_alternative<Fbm>(p) || std::holds_alternative<Hermite>(p)) return true;
    if (const auto* b = std::get_if<BiFbm>(&p)) return b->k == 1.0;
    return false;
}

/// bifBm with K = 1 is fBm; every kernel routes it there.
inline ProcessSpec canonical(const ProcessSpec& p) {
    if (const auto* b = std::get_if<BiFbm>(&p); b && b->k == 1.0) return Fbm{b->hurst};
    return p;
}

inline bool is_gaussian(const ProcessSpec& p) {
    if (const auto* h = std::get_if<Hermite>(&p)) return h->order == 1;
    return true;
}

namespace detail {

inline double fbm_cov(double h, double s, double t) {
    if (h == 0.5) return 0.5 * (std::abs(s) + std::abs(t) - std::abs(t - s));
    return 0.5 * (abs_pow(s, 2 * h) + abs_pow(t, 2 * h) - abs_pow(t - s, 2 * h));
}

inline void require_nonneg_times(double s, double t) {
    if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("this process is defined for t >= 0 only");
}

}  // namespace detail

/// Covariance R_G(s, t).
inline double cov(const ProcessSpec& p0, double s, double t) {
    validate(p0);
    const ProcessSpec p = canonical(p0);
    if (const auto* f = std::get_if<Fbm>(&p)) return detail::fbm_cov(f->hurst, s, t);
    detail::require_nonneg_times(s, t);
    if (const auto* h = std::get_if<Hermite>(&p)) return detail::fbm_cov(h->hurst, s, t);
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double e = 2.0 * sf->hurst;
        return detail::pow_nonneg(s, e) + detail::pow_nonneg(t, e) -
               0.5 * (detail::pow_nonneg(s + t, e) + detail::abs_pow(t - s, e));
    }
    const auto& b = std::get<BiFbm>(p);
    const double e = 2.0 * b.hurst;
    const double base = detail::pow_nonneg(s, e) + detail::pow_nonneg(t, e);
    return std::exp2(-b.k) *
           (detail::pow_nonneg(base, b.k) - detail::abs_pow(t - s, e * b.k));
}

/// rho_G(t) = E[G_t^2].
inline double rho(const ProcessSpec& p, double t) { return cov(p, t, t); }

/// Mixed partial d^2 R_G / du dv off the diagonal.
inline double mixed_partial(const ProcessSpec& p0, double u, double v) {
    validate(p0);
    const ProcessSpec p = canonical(p0);
    if (u == v) throw SingularityError("mixed partial is singular on the diagonal u = v");
    auto fbm_like = [&](double h) {
        if (h == 0.5) return 0.0;
        return h * (2 * h - 1) * detail::abs_pow(v - u, 2 * h - 2);
    };
    if (const auto* f = std::get_if<Fbm>(&p)) return fbm_like(f->hurst);
    if (!(u > 0.0) || !(v > 0.0)) throw DomainError("mixed partial needs u, v > 0 for this process");
    if (const auto* h = std::get_if<Hermite>(&p)) return fbm_like(h->hurst);
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double h = sf->hurst;
        if (h == 0.5) return 0.0;
        return h * (2 * h - 1) *
               (detail::abs_pow(v - u, 2 * h - 2) - detail::pow_nonneg(u + v, 2 * h - 2));
    }
    const auto& b = std::get<BiFbm>(p);
    const double h = b.hurst;
    const double k = b.k;
    const double hk = h * k;
    double out = 0.0;
    if (hk != 0.5) out += std::exp2(1 - k) * hk * (2 * hk - 1) * detail::abs_pow(v - u, 2 * hk - 2);
    const double base = detail::pow_nonneg(u, 2 * h) + detail::pow_nonneg(v, 2 * h);
    out += std::exp2(-k) * 4 * h * h * k * (k - 1) * detail::pow_nonneg(base, k - 2) *
           detail::pow_nonneg(u * v, 2 * h - 1);
    return out;
}

/// m_gamma(x) = (e^{x/2gamma} - e^{-x/2gamma})^{2gamma}, extended evenly.
inline double m_gamma(double gamma, double x) {
    if (!detail::in_open_unit(gamma)) throw DomainError("gamma must lie in (0, 1)");
    const double a = std::abs(x);
    if (a == 0.0) return 0.0;
    return std::exp(2 * gamma * detail::log_two_sinh(a / (2 * gamma)));
}

/// n_gamma(x) = (e^{x/2gamma} + e^{-x/2gamma})^{2gamma}.
inline double n_gamma(double gamma, double x) {
    if (!detail::in_open_unit(gamma)) throw DomainError("gamma must lie in (0, 1)");
    return std::exp(2 * gamma * detail::log_two_cosh(x / (2 * gamma)));
}

namespace detail {

inline void require_second_kind_base(const ProcessSpec& p) {
    validate(p);
    if (std::holds_alternative<Hermite>(p)) {
        throw DomainError("second-kind noise is only defined here for fBm, subfBm and bifBm bases");
    }
}

/// (1 + e)^a + (1 - e)^a - 2 for 0 <= e <= 1, accurate for small e.
inline double even_binomial_defect(double a, double e) {
    if (e < 1e-2) {
        double coef = 1.0;
        double sum = 0.0;
        double power = 1.0;
        for (int j = 1; j <= 12; ++j) {
            coef *= (a - (j - 1)) / j;
            power *= e;
            if (j % 2 == 0) sum += 2.0 * coef * power;
        }
        return sum;
    }
    const double lo = e < 1.0 ? std::expm1(a * std::log1p(-e)) : -1.0;
    return std::expm1(a * std::log1p(e)) + lo;
}

}  // namespace detail

/// f_U(x) = gamma^{2gamma} R_U(e^{x/2gamma}, e^{-x/2gamma}), evaluated in a
/// form that stays accurate as the function decays exponentially.
inline double f_u(const ProcessSpec& p0, double x) {
    detail::require_second_kind_base(p0);
    const ProcessSpec p = canonical(p0);
    const double a = std::abs(x);
    const double g = holder_exponent(p);
    const double scale = detail::pow_nonneg(g, 2 * g);
    if (a == 0.0) {
        if (const auto* sf = std::get_if<SubFbm>(&p)) {
            return scale * (2.0 - std::exp2(2 * sf->hurst - 1));
        }
        return scale;
    }
    if (const auto* f = std::get_if<Fbm>(&p)) {
        const double h = f->hurst;
        // e^x - m_H(x) = e^x (1 - (1 - e^{-x/H})^{2H})
        const double head = -std::exp(a) * std::expm1(2 * h * std::log1p(-std::exp(-a / h)));
        return 0.5 * scale * (head + std::exp(-a));
    }
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double h = sf->hurst;
        const double d = detail::even_binomial_defect(2 * h, std::exp(-a / h));
        return scale * (std::exp(-a) - 0.5 * std::exp(a) * d);
    }
    const auto& b = std::get<BiFbm>(p);
    const double k = b.k;
    const double hk = b.hurst * b.k;
    // n_{K/2}(x) = e^x (1 + e^{-2x/K})^K, m_{HK}(x) = e^x (1 - e^{-x/HK})^{2HK}
    const double np = std::expm1(k * std::log1p(std::exp(-2 * a / k)));
    const double mp = std::expm1(2 * hk * std::log1p(-std::exp(-a / hk)));
    return scale * std::exp2(-k) * std::exp(a) * (np - mp);
}

/// f_U straight from its definition through the covariance of U.
inline double f_u_definition(const ProcessSpec& p, double x) {
    detail::require_second_kind_base(p);
    const double g = holder_exponent(p);
    return detail::pow_nonneg(g, 2 * g) * cov(p, std::exp(x / (2 * g)), std::exp(-x / (2 * g)));
}

/// h_U(t) = int_0^{|t|} (|t| - x) f_U(x) dx. Throws NumericError when the
/// quadrature misses its tolerance.
inline double h_u(const ProcessSpec& p, double t, const QuadConfig& q = {}) {
    detail::require_second_kind_base(p);
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    const QuadResult r =
        integrate_1d([&](double x) { return (a - x) * f_u(p, x); }, 0.0, a, EndpointSingularity::left, q);
    if (!r.converged) {
        std::ostringstream os;
        os << "h_U quadrature did not converge at t=" << t << " (achieved error " << r.est_error << ")";
        throw NumericError(os.str());
    }
    return r.value;
}

/// Second derivative of the covariance of Y(1) in the lag, f_U - f_U''.
inline double rho_dd_y1(const ProcessSpec& p0, double x) {
    detail::require_second_kind_base(p0);
    const ProcessSpec p = canonical(p0);
    const double a = std::abs(x);
    auto sinh_pow = [](double y, double e) { return std::exp(e * detail::log_two_sinh(y)); };
    auto cosh_pow = [](double y, double e) { return std::exp(e * detail::log_two_cosh(y)); };
    if (const auto* f = std::get_if<Fbm>(&p)) {
        const double h = f->hurst;
        if (h == 0.5) return 0.0;
        if (a == 0.0) throw SingularityError("rho'' of Y(1) is singular at lag 0");
        return (2 * h - 1) * std::pow(h, 2 * h - 1) * sinh_pow(a / (2 * h), 2 * h - 2);
    }
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double h = sf->hurst;
        if (h == 0.5) return 0.0;
        if (a == 0.0) throw SingularityError("rho'' of Y(1) is singular at lag 0");
        // (2 sinh y)^b - (2 cosh y)^b = e^{b y} [(1 - e)^b - (1 + e)^b], e = e^{-2y};
        // the bracket is formed without cancellation.
        const double y = a / (2 * h);
        const double b = 2 * h - 2;
        const double e = std::exp(-2 * y);
        const double bracket = std::expm1(b * std::log1p(-e)) - std::expm1(b * std::log1p(e));
        return (2 * h - 1) * std::pow(h, 2 * h - 1) * std::exp(b * y) * bracket;
    }
    const auto& b = std::get<BiFbm>(p);
    const double k = b.k;
    const double hk = b.hurst * k;
    double out = std::pow(hk, 2 * hk) * (k - 1) / (std::exp2(k - 2) * k) * cosh_pow(a / k, k - 2);
    if (hk != 0.5) {
        if (a == 0.0) throw SingularityError("rho'' of Y(1) is singular at lag 0");
        out += std::pow(hk, 2 * hk - 1) * (2 * hk - 1) / std::exp2(k - 1) * sinh_pow(a / (2 * hk), 2 * hk - 2);
    }
    return out;
}

/// rho_dd_y1(x) ~ amplitude * exp(-rate * x) as x -> infinity.
struct ExponentialTail {
    double amplitude;
    double rate;
};

inline ExponentialTail second_kind_tail(const ProcessSpec& p0) {
    detail::require_second_kind_base(p0);
    const ProcessSpec p = canonical(p0);
    if (const auto* f = std::get_if<Fbm>(&p)) {
        const double h = f->hurst;
        return {(2 * h - 1) * std::pow(h, 2 * h - 1), 1 / h - 1};
    }
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double h = sf->hurst;
        return {(2 * h - 1) * std::pow(h, 2 * h - 1) * (4 - 4 * h), 2 / h - 1};
    }
    const auto& b = std::get<BiFbm>(p);
    const double k = b.k;
    const double hk = b.hurst * k;
    const double a_cosh = std::pow(hk, 2 * hk) * (k - 1) / (std::exp2(k - 2) * k);
    const double a_sinh = hk == 0.5 ? 0.0 : std::pow(hk, 2 * hk - 1) * (2 * hk - 1) / std::exp2(k - 1);
    const double c_cosh = 2 / k - 1;
    const double c_sinh = 1 / hk - 1;
    if (hk == 0.5 || c_cosh < c_sinh) return {a_cosh, c_cosh};
    if (c_sinh < c_cosh) return {a_sinh, c_sinh};
    return {a_cosh + a_sinh, c_cosh};
}

/// Lag exponent beta of the singularity rho_dd_y1(x) ~ C x^beta at x -> 0.
inline double second_kind_small_lag_exponent(const ProcessSpec& p) {
    const double g = holder_exponent(canonical(p));
    if (g == 0.5) return 0.0;
    return 2 * g - 2;
}

/// Increment variance of Y(1): E[(Y_{t+x} - Y_t)^2] = 2 f_U(0) - 2 f_U(x) + 2 h_U(x).
inline double second_kind_increment_variance(const ProcessSpec& p, double x, const QuadConfig& q = {}) {
    return 2 * f_u(p, 0.0) - 2 * f_u(p, x) + 2 * h_u(p, x, q);
}

/// Covariance of the increments Y_{(j+k+1)d} - Y_{(j+k)d} and Y_{(j+1)d} - Y_{jd}:
/// half the second difference of the increment variance at lag k d,
///   int_{-d}^{d} (d - |z|) f_U(kd + z) dz - [f_U((k+1)d) + f_U((k-1)d) - 2 f_U(kd)],
/// formed locally so that it stays accurate for small d.
inline double second_kind_increment_cov(const ProcessSpec& p, double d, long k, const QuadConfig& q = {}) {
    if (!(d > 0.0)) throw DomainError("increment width must be positive");
    const double c = static_cast<double>(std::abs(k)) * d;
    auto weight = [&](double z) { return (d - std::abs(z)) * f_u(p, c + z); };
    const QuadResult lo = integrate_1d(weight, -d, 0.0, EndpointSingularity::both, q);
    const QuadResult hi = integrate_1d(weight, 0.0, d, EndpointSingularity::both, q);
    if (!lo.converged || !hi.converged) throw NumericError("increment covariance quadrature did not converge");
    const double fdiff = f_u(p, c + d) + f_u(p, c - d) - 2 * f_u(p, c);
    return lo.value + hi.value - fdiff;
}

/// Increment variances v(x) at sorted non-negative points, with h_U accumulated
/// segment by segment: h(x) = x F1(x) - F2(x), F1 = int_0^x f, F2 = int_0^x u f.
inline std::vector<double> second_kind_increment_variance_table(const ProcessSpec& p,
                                                                const std::vector<double>& xs,
                                                                const QuadConfig& q = {}) {
    detail::require_second_kind_base(p);
    std::vector<double> out(xs.size());
    const double f0 = f_u(p, 0.0);
    double f1 = 0.0;
    double f2 = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (!(x >= prev)) throw DomainError("increment variance table needs sorted non-negative points");
        if (x > prev) {
            const auto sing = prev == 0.0 ? EndpointSingularity::left : EndpointSingularity::none;
            const QuadResult a = integrate_1d([&](double u) { return f_u(p, u); }, prev, x, sing, q);
            const QuadResult b = integrate_1d([&](double u) { return u * f_u(p, u); }, prev, x, sing, q);
            if (!a.converged || !b.converged) throw NumericError("h_U accumulation did not converge");
            f1 += a.value;
            f2 += b.value;
            prev = x;
        }
        out[i] = x == 0.0 ? 0.0 : 2 * f0 - 2 * f_u(p, x) + 2 * (x * f1 - f2);
    }
    return out;
}

/// Covariance of Y(1) on t >= 0.
inline double second_kind_cov(const ProcessSpec& p, double s, double t, const QuadConfig& q = {}) {
    detail::require_nonneg_times(s, t);
    return 0.5 * (second_kind_increment_variance(p, s, q) + second_kind_increment_variance(p, t, q) -
                  second_kind_increment_variance(p, std::abs(t - s), q));
}

/// Split R_G = w * R_{fBm(h)} + g for the drivers with non-stationary
/// increments. For subfBm, w = 1, h = H and g = (s^{2H} + r^{2H} - (s+r)^{2H}) / 2.
/// For bifBm, w = 2^{1-K}, h = HK and g = 2^{-K}((s^{2H} + r^{2H})^K - s^{2HK} - r^{2HK}).
struct CovarianceSplit {
    double weight;
    double hurst;
};

inline CovarianceSplit covariance_split(const ProcessSpec& p) {
    validate(p);
    if (const auto* sf = std::get_if<SubFbm>(&p)) return {1.0, sf->hurst};
    if (const auto* b = std::get_if<BiFbm>(&p)) return {std::exp2(1 - b->k), b->hurst * b->k};
    return {1.0, hurst(p)};
}

inline double split_remainder(const ProcessSpec& p, double s, double r) {
    detail::require_nonneg_times(s, r);
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double e = 2 * sf->hurst;
        return 0.5 * (detail::pow_nonneg(s, e) + detail::pow_nonneg(r, e) - detail::pow_nonneg(s + r, e));
    }
    if (const auto* b = std::get_if<BiFbm>(&p)) {
        const double e = 2 * b->hurst;
        const double k = b->k;
        return std::exp2(-k) * (detail::pow_nonneg(detail::pow_nonneg(s, e) + detail::pow_nonneg(r, e), k) -
                                detail::pow_nonneg(s, e * k) - detail::pow_nonneg(r, e * k));
    }
    return 0.0;
}

/// d^2 g / ds dr for the remainder of covariance_split; s, r > 0.
inline double split_remainder_d2(const ProcessSpec& p, double s, double r) {
    if (!(s > 0.0) || !(r > 0.0)) throw DomainError("split_remainder_d2 needs s, r > 0");
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const double h = sf->hurst;
        if (h == 0.5) return 0.0;
        return -h * (2 * h - 1) * detail::pow_nonneg(s + r, 2 * h - 2);
    }
    if (const auto* b = std::get_if<BiFbm>(&p)) {
        const double h = b->hurst;
        const double k = b->k;
        if (k == 1.0) return 0.0;
        const double base = detail::pow_nonneg(s, 2 * h) + detail::pow_nonneg(r, 2 * h);
        return std::exp2(-k) * 4 * h * h * k * (k - 1) * detail::pow_nonneg(base, k - 2) *
               detail::pow_nonneg(s * r, 2 * h - 1);
    }
    return 0.0;
}

}  // namespace fou
