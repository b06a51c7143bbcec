#pragma once

// Validation suites: numerical identities, quadrature consistency, closed
// forms, asymptotic laws and Monte-Carlo agreement. Each check records what
// was measured against what, so the CLI and the acceptance runner can report
// them the same way.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fou/analytics.hpp"
#include "fou/kernels.hpp"
#include "fou/montecarlo.hpp"
#include "fou/quadrature.hpp"
#include "fou/simulate.hpp"

namespace fou {

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double target = 0.0;
    /// Allowed deviation, in the units the check uses (relative, absolute or SE).
    double tolerance = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
    [[nodiscard]] int failures() const {
        int n = 0;
        for (const auto& c : checks) n += c.passed ? 0 : 1;
        return n;
    }
};

/// Scales the Monte-Carlo workload; 1 is the full configuration
/// (10^4 paths on a 4000-step grid over [0, 10]).
struct ValidationBudget {
    double scale = 1.0;
    int threads = 1;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"identities", "quadrature", "closed_form", "asymptotics",
                                                   "montecarlo"};
    return names;
}

namespace validation {

inline double rel_err(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

inline void add_rel(std::vector<Check>& out, const std::string& name, double measured, double target, double tol) {
    Check c;
    c.name = name;
    c.measured = measured;
    c.target = target;
    c.tolerance = tol;
    const double e = rel_err(measured, target);
    c.passed = std::isfinite(measured) && e <= tol;
    c.detail = "rel err " + fmt(e);
    out.push_back(c);
}

inline void add_band(std::vector<Check>& out, const std::string& name, double measured, double lo, double hi) {
    Check c;
    c.name = name;
    c.measured = measured;
    c.target = 0.5 * (lo + hi);
    c.tolerance = 0.5 * (hi - lo);
    c.passed = measured >= lo && measured <= hi;
    c.detail = "band [" + fmt(lo) + ", " + fmt(hi) + "]";
    out.push_back(c);
}

inline void add_se(std::vector<Check>& out, const std::string& name, const CovEstimate& est, double target,
                   double k = 3.0) {
    Check c;
    c.name = name;
    c.measured = est.value;
    c.target = target;
    c.tolerance = k * est.std_error;
    const double z = est.std_error > 0 ? (est.value - target) / est.std_error : 0.0;
    c.passed = std::abs(est.value - target) <= k * est.std_error;
    c.detail = "se " + fmt(est.std_error) + ", z " + fmt(z);
    out.push_back(c);
}

inline void add_flag(std::vector<Check>& out, const std::string& name, bool ok, double measured,
                     const std::string& detail) {
    Check c;
    c.name = name;
    c.passed = ok;
    c.measured = measured;
    c.detail = detail;
    out.push_back(c);
}

/// Second derivative by central differences with one Richardson step.
template <class F>
double second_derivative(F&& f, double x, double h) {
    auto d = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

using Wide = boost::multiprecision::cpp_bin_float_50;

/// Covariance of the base processes in 50-digit arithmetic.
inline Wide wide_cov(const ProcessSpec& p0, const Wide& s, const Wide& t) {
    using boost::multiprecision::abs;
    using boost::multiprecision::pow;
    const ProcessSpec p = canonical(p0);
    if (const auto* f = std::get_if<Fbm>(&p)) {
        const Wide e = 2 * Wide(f->hurst);
        return (pow(abs(s), e) + pow(abs(t), e) - pow(abs(t - s), e)) / 2;
    }
    if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const Wide e = 2 * Wide(sf->hurst);
        return pow(s, e) + pow(t, e) - (pow(s + t, e) + pow(abs(t - s), e)) / 2;
    }
    const auto& b = std::get<BiFbm>(p);
    const Wide e = 2 * Wide(b.hurst);
    const Wide k(b.k);
    return pow(Wide(2), -k) * (pow(pow(s, e) + pow(t, e), k) - pow(abs(t - s), e * k));
}

/// f_U from its definition gamma^{2gamma} R_U(e^{x/2gamma}, e^{-x/2gamma}) in 50 digits.
inline double wide_f_u_definition(const ProcessSpec& p, double x) {
    using boost::multiprecision::exp;
    using boost::multiprecision::pow;
    const Wide g(holder_exponent(p));
    const Wide wx(x);
    return static_cast<double>(pow(g, 2 * g) * wide_cov(p, exp(wx / (2 * g)), exp(-wx / (2 * g))));
}

inline std::vector<ProcessSpec> kernel_processes() {
    return {Fbm{0.3}, Fbm{0.5}, Fbm{0.7}, SubFbm{0.3}, SubFbm{0.7}, BiFbm{0.6, 0.5}, BiFbm{0.3, 0.7},
            BiFbm{0.7, 1.0}, Hermite{2, 0.7}};
}

}  // namespace validation

// ---------------------------------------------------------------------------

inline SuiteReport suite_identities() {
    using namespace validation;
    SuiteReport r;
    r.suite = "identities";

    // m'' - m = (2(2g-1)/g)(2 sinh(x/2g))^{2g-2} and n'' - n = -(2(2g-1)/g)(2 cosh(x/2g))^{2g-2}.
    for (double g : {0.3, 0.7}) {
        double worst_m = 0.0;
        double worst_n = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double x = 0.1 * std::pow(100.0, i / 20.0);
            const double h = 0.01 * std::min(1.0, x);
            auto m = [g](double y) { return m_gamma(g, y); };
            auto n = [g](double y) { return n_gamma(g, y); };
            const double c = 2 * (2 * g - 1) / g;
            const double rm = second_derivative(m, x, h) - m(x) -
                              c * std::exp((2 * g - 2) * detail::log_two_sinh(x / (2 * g)));
            const double rn = second_derivative(n, x, h) - n(x) +
                              c * std::exp((2 * g - 2) * detail::log_two_cosh(x / (2 * g)));
            worst_m = std::max(worst_m, std::abs(rm) / std::max(1.0, m(x)));
            worst_n = std::max(worst_n, std::abs(rn) / std::max(1.0, n(x)));
        }
        add_band(r.checks, "m_gamma second-order identity, gamma=" + fmt(g), worst_m, 0.0, 1e-6);
        add_band(r.checks, "n_gamma second-order identity, gamma=" + fmt(g), worst_n, 0.0, 1e-6);
    }

    // Stationary-increment decomposition of the covariance.
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unif(0.05, 8.0);
    for (const ProcessSpec& p : kernel_processes()) {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            double u = unif(rng);
            double v = unif(rng);
            if (u > v) std::swap(u, v);
            const double lhs = cov(p, u, v);
            const double rhs = 0.5 * (rho(p, u) + rho(p, v) - rho(p, v - u));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
        if (has_stationary_increments(p)) {
            add_band(r.checks, "increment decomposition holds, " + to_string(p), worst, 0.0, 1e-13);
        } else {
            add_flag(r.checks, "increment decomposition fails, " + to_string(p), worst > 1e-3, worst,
                     "largest deviation " + fmt(worst));
        }
    }

    // f_U closed forms against the definition in extended precision.
    for (const ProcessSpec& p : {ProcessSpec{Fbm{0.3}}, ProcessSpec{Fbm{0.5}}, ProcessSpec{Fbm{0.7}},
                                 ProcessSpec{SubFbm{0.3}}, ProcessSpec{SubFbm{0.7}}, ProcessSpec{BiFbm{0.6, 0.5}},
                                 ProcessSpec{BiFbm{0.3, 0.7}}, ProcessSpec{BiFbm{0.8, 0.4}}}) {
        double worst = 0.0;
        for (double x : {0.0, 0.1, 1.0, 5.0, -1.0}) {
            worst = std::max(worst, rel_err(f_u(p, x), wide_f_u_definition(p, x)));
        }
        add_band(r.checks, "f_U closed form vs definition, " + to_string(p), worst, 0.0, 1e-10);
    }
    {
        // The bifBm closed form carries a minus sign on m_{HK}; the plus sign
        // does not reproduce the definition.
        const BiFbm b{0.6, 0.5};
        const double g = b.hurst * b.k;
        const double x = 1.0;
        const double plus = std::pow(g, 2 * g) * std::exp2(-b.k) * (n_gamma(b.k / 2, x) + m_gamma(g, x));
        const double def = wide_f_u_definition(b, x);
        add_flag(r.checks, "bifBm f_U sign: plus variant rejected", rel_err(plus, def) > 1e-2,
                 rel_err(plus, def), "plus " + fmt(plus) + " vs definition " + fmt(def));
    }

    // Mixed partials against finite differences of the covariance.
    for (const ProcessSpec& p : kernel_processes()) {
        std::mt19937_64 prng(7);
        std::uniform_real_distribution<double> pu(0.2, 5.0);
        double worst = 0.0;
        int n = 0;
        while (n < 50) {
            const double u = pu(prng);
            const double v = pu(prng);
            if (std::abs(u - v) < 0.1 * std::max(u, v)) continue;
            ++n;
            const double h = 1e-4 * std::max(u, v);
            const double fd = (cov(p, u + h, v + h) - cov(p, u + h, v - h) - cov(p, u - h, v + h) +
                               cov(p, u - h, v - h)) /
                              (4 * h * h);
            const double exact = mixed_partial(p, u, v);
            const double err = std::abs(fd - exact) / std::max(std::abs(exact), 1e-3);
            worst = std::max(worst, err);
        }
        add_band(r.checks, "mixed partial vs finite differences, " + to_string(p), worst, 0.0, 1e-4);
    }
    return r;
}

inline SuiteReport suite_quadrature() {
    using namespace validation;
    SuiteReport r;
    r.suite = "quadrature";
    QuadConfig q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    q.max_subdivisions = 4000;

    for (const ProcessSpec& p : {ProcessSpec{SubFbm{0.7}}, ProcessSpec{BiFbm{0.6, 0.5}}}) {
        auto g = [&p](double s, double t) { return split_remainder(p, s, t); };
        auto dg0 = [](double) { return 0.0; };
        auto d2g = [&p](double s, double t) { return split_remainder_d2(p, s, t); };
        for (double t : {1.0, 2.0, 5.0}) {
            const DeltaG d = delta_g(g, dg0, d2g, 1.0, t, q);
            add_rel(r.checks, "Delta_g forms agree, " + to_string(p) + ", t=" + fmt(t), d.derivative_form.value,
                    d.three_term.value, 1e-6);
        }
    }

    for (double g : {0.3, 0.7}) {
        const std::vector<std::pair<std::string, std::function<double(double)>>> kernels = {
            {"u^(2g-2)", [g](double u) { return std::pow(u, 2 * g - 2); }},
            {"(2sinh)^(2g-2)",
             [g](double u) { return std::exp((2 * g - 2) * detail::log_two_sinh(u / (2 * g))); }},
            {"(2cosh)^(2g-2)",
             [g](double u) { return std::exp((2 * g - 2) * detail::log_two_cosh(u / (2 * g))); }},
        };
        for (const auto& [label, k] : kernels) {
            const double beta = label == "(2cosh)^(2g-2)" ? 0.0 : 2 * g - 2;
            for (double t : {1.0, 2.0, 5.0}) {
                const QuadResult red = stationary_double(k, 1.0, t, q, beta);
                const QuadResult brute = stationary_double(k, 1.0, t, q, beta, StationaryMethod::brute_force);
                add_rel(r.checks, "reduction vs 2-D, k=" + label + ", gamma=" + fmt(g) + ", t=" + fmt(t), red.value,
                        brute.value, 1e-6);
            }
        }
    }
    return r;
}

inline SuiteReport suite_closed_form() {
    using namespace validation;
    SuiteReport r;
    r.suite = "closed_form";
    QuadConfig q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-16;
    for (double h : {0.3, 0.5, 0.7}) {
        for (double th : {0.5, 1.0, 2.0}) {
            const OUSpec ou{NoiseKind::first, Fbm{h}, th};
            add_rel(r.checks, "stationary variance quadrature, H=" + fmt(h) + ", theta=" + fmt(th),
                    stationary_variance_quadrature(ou, q).value, h * std::tgamma(2 * h) / std::pow(th, 2 * h),
                    1e-8);
        }
    }
    for (double th : {0.5, 1.0, 2.0}) {
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            const double exact = std::exp(-th * t) / (2 * th);
            const OUSpec first{NoiseKind::first, Fbm{0.5}, th};
            add_rel(r.checks, "H=1/2 autocovariance, theta=" + fmt(th) + ", t=" + fmt(t),
                    stationary_autocov(first, t, q), exact, 1e-10);
            // Through the time change: second kind with a Brownian base has the same law.
            const OUSpec second{NoiseKind::second, Fbm{0.5}, th};
            add_rel(r.checks, "H=1/2 second-kind autocovariance, theta=" + fmt(th) + ", t=" + fmt(t),
                    stationary_autocov(second, t, q), exact, 1e-10);
        }
    }
    for (double h : {0.3, 0.5, 0.7}) {
        for (double th : {0.5, 2.0}) {
            const OUSpec ou{NoiseKind::first, Fbm{h}, th};
            const double sigma = std::sqrt(stationary_variance(ou, q));
            double dfact = 1.0;
            for (int p : {2, 4, 6}) {
                dfact *= (p - 1);
                add_rel(r.checks, "moment p=" + std::to_string(p) + ", H=" + fmt(h) + ", theta=" + fmt(th),
                        stationary_moment(ou, p, q), dfact * std::pow(sigma, p), 1e-12);
            }
            add_band(r.checks, "odd moment p=3, H=" + fmt(h) + ", theta=" + fmt(th), stationary_moment(ou, 3, q),
                     0.0, 0.0);
        }
    }
    return r;
}

namespace validation {

inline std::vector<std::pair<double, double>> autocov_series(const OUSpec& ou, double t0, double t1, int n,
                                                             const QuadConfig& q) {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        s.emplace_back(t, stationary_autocov(ou, t, q));
    }
    return s;
}

}  // namespace validation

inline SuiteReport suite_asymptotics() {
    using namespace validation;
    SuiteReport r;
    r.suite = "asymptotics";
    QuadConfig q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-300;
    q.max_subdivisions = 4000;
    const double inf = std::numeric_limits<double>::infinity();

    // Power kernel: e^{-theta t} int int e^{theta(x+y)} (y-x)^{2g-2} ~ t^{2g-2} / theta^2.
    for (double g : {0.3, 0.7}) {
        const double t = 50.0;
        const QuadResult v = stationary_double([g](double u) { return std::pow(u, 2 * g - 2); }, 1.0, t, q, 2 * g - 2);
        add_band(r.checks, "power kernel asymptote ratio, gamma=" + fmt(g), v.value / std::pow(t, 2 * g - 2), 0.95,
                 1.05);
    }

    // Exponential kernels (2 sinh(u/2g))^{2g-2} and (2 cosh(u/2g))^{2g-2}, tail e^{-c u}, c = 1/g - 1.
    for (int sign : {-1, 1}) {
        const std::string label = sign < 0 ? "sinh" : "cosh";
        auto make = [sign](double g) {
            return [g, sign](double u) {
                const double l = sign < 0 ? detail::log_two_sinh(u / (2 * g)) : detail::log_two_cosh(u / (2 * g));
                return std::exp((2 * g - 2) * l);
            };
        };
        const double t = 40.0;
        {
            // theta < c: e^{-theta t} (1/2theta) int_0^inf (e^{theta u} - e^{-theta u}) k(u) du
            const double g = 0.3;
            const double th = 0.5;
            auto k = make(g);
            const double beta = sign < 0 ? 2 * g - 2 : 0.0;
            const QuadResult v = stationary_double(k, th, t, q, beta);
            const QuadResult c = integrate_1d([&](double u) { return 2 * std::sinh(th * u) * k(u); }, 0.0, inf,
                                              EndpointSingularity::left, q);
            add_band(r.checks, "exponential kernel (" + label + "), theta < c: constant ratio",
                     v.value * std::exp(th * t) / (c.value / (2 * th)), 0.98, 1.02);
        }
        {
            // theta > c: e^{-c t} / (theta^2 - c^2)
            const double g = 0.7;
            const double th = 3.0;
            const double c = 1 / g - 1;
            const double beta = sign < 0 ? 2 * g - 2 : 0.0;
            const QuadResult v = stationary_double(make(g), th, t, q, beta);
            add_band(r.checks, "exponential kernel (" + label + "), theta > c: constant ratio",
                     v.value * std::exp(c * t) * (th * th - c * c), 0.98, 1.02);
        }
        {
            // theta = c: t e^{-theta t} / (2 theta); the factor t shows up as the
            // log t coefficient of an exponential-polynomial fit.
            const double g = 0.7;
            const double th = 1 / g - 1;
            const double beta = sign < 0 ? 2 * g - 2 : 0.0;
            std::vector<std::pair<double, double>> s;
            for (int i = 0; i < 21; ++i) {
                const double tt = 20.0 + 2.0 * i;
                s.emplace_back(tt, stationary_double(make(g), th, tt, q, beta).value);
            }
            const DecayFit f = fit_decay(s, DecayModel::exponential_poly);
            add_band(r.checks, "exponential kernel (" + label + "), theta = c: polynomial factor degree",
                     f.poly_power, 0.9, 1.1);
            add_band(r.checks, "exponential kernel (" + label + "), theta = c: rate / theta",
                     f.exponent_or_rate / th, 0.98, 1.02);
        }
    }
    {
        // Difference kernel (2cosh)^{2g-2} - (2sinh)^{2g-2}: tail (4g-4) e^{-c u}, c = 2/g - 1.
        const double g = 0.7;
        const double c = 2 / g - 1;
        auto k = [g](double u) {
            const double y = u / (2 * g);
            const double b = 2 * g - 2;
            const double e = std::exp(-2 * y);
            return std::exp(b * y) * (std::expm1(b * std::log1p(e)) - std::expm1(b * std::log1p(-e)));
        };
        const double t = 40.0;
        const double th = 3.0;
        const QuadResult v = stationary_double(k, th, t, q, 2 * g - 2);
        add_band(r.checks, "difference kernel, theta > c: constant ratio",
                 v.value * std::exp(c * t) * (th * th - c * c) / (4 * g - 4), 0.98, 1.02);
        const double th2 = 1.0;
        const QuadResult v2 = stationary_double(k, th2, t, q, 2 * g - 2);
        const QuadResult c2 = integrate_1d([&](double u) { return 2 * std::sinh(th2 * u) * k(u); }, 0.0, inf,
                                           EndpointSingularity::left, q);
        add_band(r.checks, "difference kernel, theta < c: constant ratio",
                 v2.value * std::exp(th2 * t) / (c2.value / (2 * th2)), 0.98, 1.02);
    }

    // First kind fBm: power-law exponent of the autocovariance.
    for (double h : {0.7, 0.3}) {
        const OUSpec ou{NoiseKind::first, Fbm{h}, 1.0};
        const DecayFit f = fit_decay(autocov_series(ou, 20.0, 100.0, 17, q), DecayModel::power);
        add_band(r.checks, "first kind fBm(H=" + fmt(h) + ") autocovariance exponent", f.exponent_or_rate,
                 2 * h - 2 - 0.05, 2 * h - 2 + 0.05);
    }

    // Second kind: exponential rate per regime branch.
    struct Point {
        ProcessSpec p;
        double theta;
    };
    const std::vector<Point> points = {
        {Fbm{0.3}, 1.0},        {Fbm{0.8}, 3.0},        {Fbm{0.8}, 0.25},         {SubFbm{0.7}, 1.0},
        {SubFbm{0.7}, 3.0},     {SubFbm{0.7}, 2 / 0.7 - 1}, {BiFbm{0.4, 0.6}, 1.0}, {BiFbm{0.4, 0.6}, 4.0},
        {BiFbm{0.7, 0.6}, 0.5}, {BiFbm{0.7, 0.6}, 3.0},
    };
    for (const Point& pt : points) {
        const OUSpec ou{NoiseKind::second, pt.p, pt.theta};
        const AsymptoticRegime reg = classify_regime(ou);
        const double scale = 1.0 / reg.rate;
        const std::string tag = to_string(pt.p) + ", theta=" + fmt(pt.theta);
        if (reg.poly_degree == 1) {
            // The 1/t correction to the t e^{-theta t} law biases the log t
            // coefficient, so the boundary fit reaches further out.
            const auto series = autocov_series(ou, 40.0 * scale, 200.0 * scale, 33, q);
            const DecayFit f = fit_decay(series, DecayModel::exponential_poly);
            add_band(r.checks, "second kind rate (boundary) " + tag, f.exponent_or_rate / reg.rate, 0.95, 1.05);
            add_band(r.checks, "second kind polynomial factor " + tag, f.poly_power, 0.8, 1.2);
        } else {
            const auto series = autocov_series(ou, 20.0 * scale, 60.0 * scale, 21, q);
            const DecayFit f = fit_decay(series, DecayModel::exponential);
            add_band(r.checks, "second kind rate " + tag, f.exponent_or_rate / reg.rate, 0.95, 1.05);
        }
    }

    // Non-stationary drivers: E[X_t^2] approaches its limit like t^{2H-2} (t^{2HK-2}).
    for (const ProcessSpec& p : {ProcessSpec{SubFbm{0.7}}, ProcessSpec{SubFbm{0.3}}, ProcessSpec{BiFbm{0.6, 0.5}},
                                 ProcessSpec{BiFbm{0.8, 0.8}}}) {
        const OUSpec ou{NoiseKind::first, p, 1.0};
        const VarianceLimit lim = nonstationary_variance_limit(ou);
        QuadConfig qv;
        qv.rel_tol = 1e-10;
        qv.abs_tol = 1e-15;
        qv.max_subdivisions = 4000;
        std::vector<std::pair<double, double>> s;
        for (double t = 10.0; t <= 80.0 + 1e-9; t += 10.0) s.emplace_back(t, ou_variance(ou, t, qv) - lim.limit);
        const DecayFit f = fit_decay(s, DecayModel::power);
        add_band(r.checks, "variance limit approach exponent, " + to_string(p), f.exponent_or_rate,
                 lim.rate_exponent - 0.15, lim.rate_exponent + 0.15);
    }
    return r;
}

inline SuiteReport suite_montecarlo(const ValidationBudget& budget = {}) {
    using namespace validation;
    SuiteReport r;
    r.suite = "montecarlo";
    const int n_paths = std::max(kMinPaths, static_cast<int>(std::lround(10000 * budget.scale)));
    SamplingOptions opt;
    opt.threads = budget.threads;
    QuadConfig q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;

    const Grid grid = Grid::uniform(0.0, 10.0, 4001);
    for (auto kind : {NoiseKind::first, NoiseKind::second}) {
        const OUSpec ou{kind, Fbm{0.7}, 1.0};
        const std::uint64_t seed = kind == NoiseKind::first ? 1001 : 2002;
        const PathEnsemble noise = sample_noise(ou, grid, n_paths, seed, opt);
        const PathEnsemble x = kind == NoiseKind::first ? ou_first_kind(noise, ou.theta)
                                                        : ou_second_kind(noise, ou.theta);
        const std::string tag = kind == NoiseKind::first ? "first kind fBm(0.7)" : "second kind fBm(0.7)";
        add_se(r.checks, tag + " E[X_T^2]", estimate_cov(x, 10.0, 10.0), ou_variance(ou, 10.0, q));
        for (double lag : {1.0, 2.0, 4.0}) {
            add_se(r.checks, tag + " E[X_{T-" + fmt(lag) + "} X_T]", estimate_cov(x, 10.0 - lag, 10.0),
                   ou_cov(ou, 10.0 - lag, 10.0, q));
        }
        if (kind == NoiseKind::second) {
            // Increment variance of Y(1) at fixed lag and three starting points.
            for (double lag : {0.5, 2.0}) {
                const double target = second_kind_increment_variance(ou.process, lag, q);
                for (double s : {0.0, 3.0, 6.0}) {
                    const int i = grid.index_of(s);
                    const int j = grid.index_of(s + lag);
                    std::vector<double> terms(static_cast<std::size_t>(noise.n_paths()));
                    for (int p = 0; p < noise.n_paths(); ++p) {
                        const double d = noise.paths(p, j) - noise.paths(p, i);
                        terms[static_cast<std::size_t>(p)] = d * d;
                    }
                    add_se(r.checks, "Y(1) increment variance, lag " + fmt(lag) + ", from s=" + fmt(s),
                           detail::mean_with_error(terms), target);
                }
            }
        }
    }

    // Ergodicity of stationary paths.
    const int erg_paths = std::max(kMinPaths, static_cast<int>(std::lround(1000 * budget.scale)));
    for (double h : {0.5, 0.7}) {
        const OUSpec ou{NoiseKind::first, Fbm{h}, 1.0};
        const Grid g = Grid::uniform(0.0, 50.0, 10001);
        const PathEnsemble z = stationary_path(ou, g, erg_paths, 3003 + static_cast<std::uint64_t>(h * 10), std::nullopt, opt);
        for (auto stat : {ErgodicStatistic::identity, ErgodicStatistic::square}) {
            const ErgodicityResult e = ergodicity_check(z, ou, stat, q);
            const std::string tag = std::string("ergodicity z-score, fBm(") + fmt(h) + "), " +
                                    (stat == ErgodicStatistic::identity ? "mean" : "square");
            add_band(r.checks, tag, e.z_score, -4.0, 4.0);
        }
    }

    // Standard-error calibration on a cheap configuration.
    {
        const OUSpec ou{NoiseKind::first, Fbm{0.7}, 1.0};
        const Grid g = Grid::uniform(0.0, 1.0, 17);
        const double target = rho(ou.process, 1.0);
        int inside = 0;
        for (int s = 0; s < 50; ++s) {
            const PathEnsemble e = sample_gaussian(ou.process, g, 400, 9000 + static_cast<std::uint64_t>(s), opt);
            const CovEstimate est = estimate_cov(e, 1.0, 1.0);
            if (std::abs(est.value - target) <= 2 * est.std_error) ++inside;
        }
        add_band(r.checks, "standard-error calibration: runs inside 2 SE (of 50)", inside, 40, 50);
    }
    return r;
}

inline SuiteReport run_suite(const std::string& name, const ValidationBudget& budget = {}) {
    const auto start = std::chrono::steady_clock::now();
    SuiteReport r;
    if (name == "identities") {
        r = suite_identities();
    } else if (name == "quadrature") {
        r = suite_quadrature();
    } else if (name == "closed_form") {
        r = suite_closed_form();
    } else if (name == "asymptotics") {
        r = suite_asymptotics();
    } else if (name == "montecarlo") {
        r = suite_montecarlo(budget);
    } else if (name.empty() || name == "none") {
        r.suite = "none";
    } else {
        throw DomainError("unknown suite: " + name);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace fou
