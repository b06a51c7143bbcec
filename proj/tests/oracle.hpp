#pragma once

// Reference values computed without the library's own quadrature:
// Boost.Math double-exponential rules, finite differences and plain sums.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

/// Integral over [a, b], b possibly +inf, split at interior break points.
inline double quad(const Fn& f, double a, double b, std::vector<double> breaks = {}, double tol = 1e-13) {
    // One rule pair per nesting level: the rules refine their tables lazily and
    // are not meant to be re-entered mid-integration.
    struct Rules {
        boost::math::quadrature::tanh_sinh<double> ts{15};
        boost::math::quadrature::exp_sinh<double> es{9};
    };
    static std::deque<Rules> levels;
    static std::size_t depth = 0;
    if (levels.size() <= depth) levels.emplace_back();
    Rules& rules = levels[depth];
    auto& ts = rules.ts;
    auto& es = rules.es;
    struct Guard {
        std::size_t& d;
        explicit Guard(std::size_t& x) : d(x) { ++d; }
        ~Guard() { --d; }
    } guard(depth);
    std::vector<double> pts{a};
    for (double x : breaks) {
        if (x > a && x < b) pts.push_back(x);
    }
    double total = 0.0;
    const bool open = std::isinf(b);
    if (!open) pts.push_back(b);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] > pts[i]) total += ts.integrate(f, pts[i], pts[i + 1], tol);
    }
    if (open) total += es.integrate([&](double x) { return f(x); }, pts.back(), std::numeric_limits<double>::infinity(), tol);
    return total;
}

/// Second derivative by central differences with one Richardson step.
inline double d2(const Fn& f, double x, double h) {
    auto c = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
    return (4.0 * c(0.5 * h) - c(h)) / 3.0;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const Fn& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// E[X_s X_t] for X = e^{-theta t} int_0^t e^{theta r} dG_r written through the
/// covariance R of G by parts:
///   R(s,t) - theta e^{-theta t} int_0^t e^{theta r} R(s,r) dr
///          - theta e^{-theta s} int_0^s e^{theta r} R(r,t) dr
///          + theta^2 e^{-theta(s+t)} int_0^s int_0^t e^{theta(r+r')} R(r,r') dr' dr.
inline double ou_cov_by_parts(const std::function<double(double, double)>& r, double theta, double s, double t) {
    const double a = quad([&](double x) { return std::exp(theta * (x - t)) * r(s, x); }, 0.0, t, {s});
    const double b = quad([&](double x) { return std::exp(theta * (x - s)) * r(x, t); }, 0.0, s, {t});
    const double c = quad(
        [&](double x) {
            return quad([&](double y) { return std::exp(theta * (x - s) + theta * (y - t)) * r(x, y); }, 0.0, t,
                        {x});
        },
        0.0, s);
    return r(s, t) - theta * a - theta * b + theta * theta * c;
}

/// E[Z_t Z_0] for Z_t = theta int_0^inf e^{-theta r} (G_t - G_{t-r}) dr, G with
/// stationary increments and increment variance v(x) = E[(G_x - G_0)^2]:
///   theta^2 int int e^{-theta(r + r')} [v(t + r') + v(t - r) - v(t) - v(t - r + r')] / 2 dr dr'.
inline double stationary_autocov_by_increments(const Fn& v, double theta, double t, double tol = 1e-13) {
    auto ve = [&](double x) { return v(std::abs(x)); };
    const double inf = std::numeric_limits<double>::infinity();
    auto inner = [&](double r) {
        return quad(
            [&](double rp) {
                const double w = std::exp(-theta * (r + rp));
                if (w == 0.0) return 0.0;
                return w * 0.5 * (ve(t + rp) + ve(t - r) - ve(t) - ve(t - r + rp));
            },
            0.0, inf, {r - t}, tol);
    };
    return theta * theta * quad(inner, 0.0, inf, {t}, tol);
}

}  // namespace oracle
