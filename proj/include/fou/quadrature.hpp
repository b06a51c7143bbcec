#pragma once

// Adaptive Gauss-Kronrod quadrature with endpoint-singularity grading, plus the
// covariance integrals used throughout the library: the Wiener-integral cross
// covariance over a rectangle, the stationary double integral with a
// semi-infinite inner range (reduced to one dimension), and the two forms of
// the Delta_g identity.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fou/errors.hpp"

namespace fou {

struct QuadConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    /// Width of the first panel on semi-infinite ranges. Panels double in width
    /// and stop once two consecutive panels fall below a tenth of the
    /// tolerance; the last panel is added to the error as the tail bound.
    /// Zero selects a unit panel.
    double tail_cut = 0.0;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1 || tail_cut < 0.0) {
            throw DomainError("QuadConfig: need rel_tol > 0, abs_tol > 0, max_subdivisions >= 1");
        }
    }

    [[nodiscard]] double tolerance(double value) const {
        return std::max(abs_tol, rel_tol * std::abs(value));
    }
};

struct QuadResult {
    double value = 0.0;
    double est_error = 0.0;
    int subdivisions_used = 0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        est_error += o.est_error;
        subdivisions_used += o.subdivisions_used;
        converged = converged && o.converged;
        return *this;
    }
};

enum class EndpointSingularity { none, left, right, both };

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478896, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

/// Power used by the endpoint grading map x = a + L w^p.
inline constexpr double kGradingPower = 4.0;
/// Geometric refinement levels toward a singular corner.
inline constexpr int kCornerLevels = 12;

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

template <class F>
Segment gauss_kronrod21(F& f, double a, double b) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double fc = f(centr);
    double resg = 0.0;
    double resk = kWgk[10] * fc;
    double resabs = std::abs(resk);
    std::array<double, 10> fv1{};
    std::array<double, 10> fv2{};
    for (int j = 0; j < 5; ++j) {
        const int jtw = 2 * j + 1;
        const double absc = hlgth * kXgk[jtw];
        const double f1 = f(centr - absc);
        const double f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 5; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = hlgth * kXgk[jtwm1];
        const double f1 = f(centr - absc);
        const double f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0) {
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * epmach)) {
        abserr = std::max(epmach * 50.0 * resabs, abserr);
    }
    return {a, b, result, abserr};
}

/// Globally adaptive bisection on a finite interval.
template <class F>
QuadResult adaptive(F& f, double a, double b, const QuadConfig& q) {
    auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };
    std::vector<Segment> heap;
    std::vector<Segment> frozen;
    heap.reserve(64);
    heap.push_back(gauss_kronrod21(f, a, b));
    double value = heap.front().value;
    double error = heap.front().error;
    int subdivisions = 0;
    const double scale = std::max(std::abs(a), std::abs(b));
    while (error > q.tolerance(value) && subdivisions < q.max_subdivisions && !heap.empty()) {
        if (!std::isfinite(value)) break;
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment s = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) ||
            (s.b - s.a) < 8.0 * std::numeric_limits<double>::epsilon() * scale) {
            frozen.push_back(s);
            continue;
        }
        const Segment l = gauss_kronrod21(f, s.a, mid);
        const Segment r = gauss_kronrod21(f, mid, s.b);
        value += l.value + r.value - s.value;
        error += l.error + r.error - s.error;
        heap.push_back(l);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(r);
        std::push_heap(heap.begin(), heap.end(), by_error);
        ++subdivisions;
    }
    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    for (const auto* list : {&heap, &frozen}) {
        for (const Segment& s : *list) {
            value += s.value;
            error += s.error;
        }
    }
    QuadResult out;
    out.value = value;
    out.est_error = error;
    out.subdivisions_used = subdivisions;
    out.converged = std::isfinite(value) && error <= q.tolerance(value);
    return out;
}

template <class F>
QuadResult integrate_finite(F& f, double a, double b, EndpointSingularity sing,
                            const QuadConfig& q) {
    const double len = b - a;
    constexpr double p = kGradingPower;
    switch (sing) {
        case EndpointSingularity::none:
            return adaptive(f, a, b, q);
        case EndpointSingularity::left: {
            auto g = [&](double w) {
                const double x = a + len * std::pow(w, p);
                if (x <= a) return 0.0;
                return f(x) * p * len * std::pow(w, p - 1.0);
            };
            return adaptive(g, 0.0, 1.0, q);
        }
        case EndpointSingularity::right: {
            auto g = [&](double w) {
                const double x = b - len * std::pow(w, p);
                if (x >= b) return 0.0;
                return f(x) * p * len * std::pow(w, p - 1.0);
            };
            return adaptive(g, 0.0, 1.0, q);
        }
        case EndpointSingularity::both: {
            auto g = [&](double w) {
                const double wp = std::pow(w, p);
                const double vp = std::pow(1.0 - w, p);
                const double den = wp + vp;
                const double x = a + len * (wp / den);
                if (x <= a || x >= b) return 0.0;
                const double jac = p * std::pow(w, p - 1.0) * std::pow(1.0 - w, p - 1.0) / (den * den);
                return f(x) * len * jac;
            };
            return adaptive(g, 0.0, 1.0, q);
        }
    }
    return {};
}

/// Integral over [a, inf) by doubling panels.
template <class F>
QuadResult integrate_tail(F& f, double a, bool left_singular, const QuadConfig& q) {
    QuadResult total;
    double x0 = a;
    double width = q.tail_cut > 0.0 ? q.tail_cut : 1.0;
    int small_run = 0;
    for (int panel = 0; panel < 80; ++panel) {
        QuadConfig pq = q;
        pq.abs_tol = std::max(q.abs_tol, 0.1 * q.rel_tol * std::abs(total.value));
        const auto sing = (panel == 0 && left_singular) ? EndpointSingularity::left
                                                        : EndpointSingularity::none;
        const QuadResult r = integrate_finite(f, x0, x0 + width, sing, pq);
        total += r;
        const double contribution = std::abs(r.value) + r.est_error;
        if (!std::isfinite(contribution)) {
            total.converged = false;
            return total;
        }
        if (contribution <= 0.1 * q.tolerance(total.value)) {
            if (++small_run >= 2) {
                total.est_error += contribution;
                total.converged = total.converged && total.est_error <= q.tolerance(total.value);
                return total;
            }
        } else {
            small_run = 0;
        }
        x0 += width;
        width *= 2.0;
    }
    total.converged = false;
    return total;
}

inline std::vector<std::pair<double, double>> graded_panels(double a, double b, bool toward_left,
                                                            int levels = kCornerLevels) {
    // Innermost panel first; it touches the singular end.
    std::vector<std::pair<double, double>> panels;
    const double len = b - a;
    double frac = std::ldexp(1.0, -levels);
    if (toward_left) {
        panels.emplace_back(a, a + len * frac);
        for (int k = levels; k > 0; --k) {
            panels.emplace_back(a + len * frac, k == 1 ? b : a + len * 2.0 * frac);
            frac *= 2.0;
        }
    } else {
        panels.emplace_back(b - len * frac, b);
        for (int k = levels; k > 0; --k) {
            panels.emplace_back(k == 1 ? a : b - len * 2.0 * frac, b - len * frac);
            frac *= 2.0;
        }
    }
    return panels;
}

inline QuadConfig inner_config(const QuadConfig& q, double outer_length) {
    QuadConfig inner = q;
    inner.rel_tol = std::max(q.rel_tol * 1e-2, 5e-15);
    inner.abs_tol = q.abs_tol * 1e-2 / std::max(outer_length, 1.0);
    return inner;
}

/// Nested integral of f(x, y) over y in [ya, yb] and x in [lo(y), hi(y)]. The
/// inner integral is recomputed adaptively at every outer node. Inner errors
/// are folded into the outer estimate through the worst ratio of achieved to
/// requested inner error, so that huge inner values next to a singular outer
/// end (which carry a vanishing outer weight) do not swamp the estimate.
template <class F, class Lo, class Hi>
QuadResult integrate_nested(F& f, double ya, double yb, EndpointSingularity ysing, bool grade_outer,
                            Lo lo, Hi hi, EndpointSingularity xsing, const QuadConfig& q) {
    const QuadConfig iq = inner_config(q, yb - ya);
    bool inner_ok = true;
    double worst_ratio = 0.0;
    long inner_calls = 0;
    auto outer = [&](double y) {
        const double xa = lo(y);
        const double xb = hi(y);
        if (!(xb > xa)) return 0.0;
        auto fx = [&](double x) { return f(x, y); };
        QuadResult r;
        if (std::isinf(xa)) {
            auto reflected = [&](double z) { return fx(xb - z); };
            const bool sing = xsing == EndpointSingularity::right || xsing == EndpointSingularity::both;
            r = integrate_tail(reflected, 0.0, sing, iq);
        } else {
            r = integrate_finite(fx, xa, xb, xsing, iq);
        }
        // An inner miss only matters through its error, which is folded in below.
        inner_ok = inner_ok && std::isfinite(r.value);
        worst_ratio = std::max(worst_ratio, r.est_error / iq.tolerance(r.value));
        ++inner_calls;
        return r.value;
    };
    QuadResult total;
    if (grade_outer) {
        const bool left = ysing == EndpointSingularity::left;
        const auto panels = graded_panels(ya, yb, left);
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const auto sing = i == 0 ? ysing : EndpointSingularity::none;
            total += integrate_finite(outer, panels[i].first, panels[i].second, sing, q);
        }
    } else {
        total = integrate_finite(outer, ya, yb, ysing, q);
    }
    if (inner_calls > 0) {
        // |inner error| <= ratio * (rel |inner| + abs) at every node.
        total.est_error += worst_ratio * (iq.rel_tol * std::abs(total.value) + iq.abs_tol * (yb - ya));
    }
    total.converged = total.converged && inner_ok && total.est_error <= q.tolerance(total.value);
    return total;
}

}  // namespace detail

/// Adaptive integral of f over [a, b]. Either bound may be infinite; power-type
/// endpoint singularities |x - a|^beta with beta > -1 are graded away by a
/// polynomial change of variables before bisection.
template <class F>
QuadResult integrate_1d(F&& f, double a, double b,
                        EndpointSingularity sing = EndpointSingularity::none,
                        const QuadConfig& q = {}) {
    q.validate();
    if (std::isnan(a) || std::isnan(b) || !(a < b)) {
        if (a == b) return {};
        throw DomainError("integrate_1d: need a < b");
    }
    const bool sing_left = sing == EndpointSingularity::left || sing == EndpointSingularity::both;
    const bool sing_right = sing == EndpointSingularity::right || sing == EndpointSingularity::both;
    if (std::isinf(a) && std::isinf(b)) {
        auto pos = [&](double x) { return f(x); };
        auto neg = [&](double z) { return f(-z); };
        QuadResult r = detail::integrate_tail(pos, 0.0, false, q);
        r += detail::integrate_tail(neg, 0.0, false, q);
        return r;
    }
    if (std::isinf(b)) {
        auto g = [&](double x) { return f(x); };
        return detail::integrate_tail(g, a, sing_left, q);
    }
    if (std::isinf(a)) {
        auto g = [&](double z) { return f(-z); };
        return detail::integrate_tail(g, -b, sing_right, q);
    }
    auto g = [&](double x) { return f(x); };
    return detail::integrate_finite(g, a, b, sing, q);
}

/// Cross covariance of two Wiener integrals against a driver with mixed
/// partial `kernel`:
///   int_u^v int_s^t exp(theta (x - x_offset)) exp(theta (y - y_offset)) kernel(x, y) dx dy.
/// Requires s < t <= u < v; s may be -inf when theta > 0. When t == u the
/// integrand is singular at the corner (t, t) and the outer range is graded
/// geometrically toward it. The offsets only rescale the exponential weights
/// so that long horizons do not overflow.
template <class Kernel>
QuadResult cross_cov(Kernel&& kernel, double theta, double s, double t, double u, double v,
                     const QuadConfig& q = {}, double x_offset = 0.0, double y_offset = 0.0) {
    q.validate();
    if (std::isinf(s) && !(theta > 0.0)) {
        throw DomainError("cross_cov: a semi-infinite lower limit needs theta > 0");
    }
    if (!(s < t) || !(t <= u) || !(u < v) || std::isinf(t) || std::isinf(v)) {
        throw DomainError("cross_cov: need s < t <= u < v with finite t, u, v");
    }
    auto integrand = [&](double x, double y) {
        if (!(x < y)) return 0.0;
        return std::exp(theta * (x - x_offset) + theta * (y - y_offset)) * kernel(x, y);
    };
    const bool corner = t == u;
    const auto ysing = corner ? EndpointSingularity::left : EndpointSingularity::none;
    const auto xsing = std::isinf(s) ? EndpointSingularity::right : EndpointSingularity::both;
    return detail::integrate_nested(
        integrand, u, v, ysing, corner, [s](double) { return s; }, [t](double) { return t; }, xsing,
        q);
}

enum class StationaryMethod { reduction, brute_force };

/// e^{-theta t} int_0^t int_{-inf}^0 e^{theta x} e^{theta y} k(y - x) dx dy.
///
/// The default route is the exact one-dimensional reduction
///   (1 / 2 theta) int_0^t (e^{-theta (t-u)} - e^{-theta (t+u)}) k(u) du
///   + ((1 - e^{-2 theta t}) / 2 theta) int_t^inf e^{-theta (u - t)} k(u) du,
/// written so that no exponential overflows at large t. The brute-force route
/// integrates the rectangle directly with x truncated at -40 / theta and
/// exists for cross-checking.
///
/// `small_lag_exponent` is the power beta with k(u) ~ u^beta as u -> 0; the
/// factor (1 - e^{-2 theta u}) ~ u makes the integral finite iff beta > -2.
template <class K>
QuadResult stationary_double(K&& k, double theta, double t, const QuadConfig& q = {},
                             double small_lag_exponent = 0.0,
                             StationaryMethod method = StationaryMethod::reduction) {
    q.validate();
    if (!(theta > 0.0)) throw DomainError("stationary_double: theta must be positive");
    if (!(t >= 0.0) || std::isinf(t)) throw DomainError("stationary_double: t must be finite and >= 0");
    if (!(small_lag_exponent > -2.0)) {
        throw DomainError("stationary_double: kernel ~ u^beta with beta <= -2 is not integrable at 0");
    }
    if (t == 0.0) return {};
    if (method == StationaryMethod::brute_force) {
        const double x_lo = -40.0 / theta;
        auto integrand = [&](double x, double y) {
            const double lag = y - x;
            if (!(lag > 0.0)) return 0.0;
            return std::exp(theta * (x + y - t)) * k(lag);
        };
        return detail::integrate_nested(
            integrand, 0.0, t, EndpointSingularity::left, true, [x_lo](double) { return x_lo; },
            [](double) { return 0.0; }, EndpointSingularity::right, q);
    }
    auto head = [&](double u) {
        if (!(u > 0.0)) return 0.0;
        return std::exp(-theta * (t - u)) * -std::expm1(-2.0 * theta * u) * k(u);
    };
    auto tail = [&](double u) { return std::exp(-theta * (u - t)) * k(u); };
    QuadResult b1 = integrate_1d(head, 0.0, t, EndpointSingularity::left, q);
    QuadResult b2 = integrate_1d(tail, t, std::numeric_limits<double>::infinity(),
                                 EndpointSingularity::none, q);
    const double c1 = 1.0 / (2.0 * theta);
    const double c2 = -std::expm1(-2.0 * theta * t) / (2.0 * theta);
    QuadResult out;
    out.value = c1 * b1.value + c2 * b2.value;
    out.est_error = c1 * b1.est_error + c2 * b2.est_error;
    out.subdivisions_used = b1.subdivisions_used + b2.subdivisions_used;
    out.converged = b1.converged && b2.converged;
    return out;
}

namespace detail {

/// g(t,t) - 2 theta e^{-theta t} int_0^t g(s,t) e^{theta s} ds
///        + theta^2 e^{-2 theta t} int_0^t int_0^t g(s,r) e^{theta (s + r)} dr ds
/// for symmetric g; the square is folded onto the triangle r < s.
template <class G>
QuadResult delta_g_three_term(G& g, double theta, double t, const QuadConfig& q) {
    auto line = [&](double s) { return g(s, t) * std::exp(theta * (s - t)); };
    const QuadResult i1 = integrate_1d(line, 0.0, t, EndpointSingularity::both, q);
    auto surface = [&](double r, double s) {
        return g(s, r) * std::exp(theta * (s - t) + theta * (r - t));
    };
    const QuadResult i2 = integrate_nested(
        surface, 0.0, t, EndpointSingularity::left, false, [](double) { return 0.0; },
        [](double s) { return s; }, EndpointSingularity::both, q);
    QuadResult out;
    out.value = g(t, t) - 2.0 * theta * i1.value + 2.0 * theta * theta * i2.value;
    out.est_error = 2.0 * std::abs(theta) * i1.est_error + 2.0 * theta * theta * i2.est_error;
    out.subdivisions_used = i1.subdivisions_used + i2.subdivisions_used;
    out.converged = i1.converged && i2.converged;
    return out;
}

/// 2 e^{-2 theta t} int_0^t e^{theta s} dg(s) ds
///   + 2 e^{-2 theta t} int_0^t e^{theta s} int_0^s d2g(s,r) e^{theta r} dr ds
template <class DG0, class D2G>
QuadResult delta_g_derivative_form(DG0& dg_ds_at0, D2G& d2g, double theta, double t,
                                   const QuadConfig& q) {
    auto line = [&](double s) { return dg_ds_at0(s) * std::exp(theta * (s - t)); };
    const QuadResult j1 = integrate_1d(line, 0.0, t, EndpointSingularity::left, q);
    auto surface = [&](double r, double s) {
        return d2g(s, r) * std::exp(theta * (s - t) + theta * (r - t));
    };
    const QuadResult j2 = integrate_nested(
        surface, 0.0, t, EndpointSingularity::left, false, [](double) { return 0.0; },
        [](double s) { return s; }, EndpointSingularity::both, q);
    const double w1 = 2.0 * std::exp(-theta * t);
    QuadResult out;
    out.value = w1 * j1.value + 2.0 * j2.value;
    out.est_error = w1 * j1.est_error + 2.0 * j2.est_error;
    out.subdivisions_used = j1.subdivisions_used + j2.subdivisions_used;
    out.converged = j1.converged && j2.converged;
    return out;
}

}  // namespace detail

struct DeltaG {
    QuadResult three_term;
    QuadResult derivative_form;
};

/// Both sides of the Delta_g identity for a symmetric g with integrable
/// derivatives. Callers compare the two values.
template <class G, class DG0, class D2G>
DeltaG delta_g(G&& g, DG0&& dg_ds_at0, D2G&& d2g, double theta, double t, const QuadConfig& q = {}) {
    q.validate();
    if (!(t > 0.0) || std::isinf(t)) throw DomainError("delta_g: t must be positive and finite");
    return {detail::delta_g_three_term(g, theta, t, q),
            detail::delta_g_derivative_form(dg_ds_at0, d2g, theta, t, q)};
}

}  // namespace fou
