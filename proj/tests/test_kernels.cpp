#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

#include "fou/kernels.hpp"
#include "oracle.hpp"

using namespace fou;

namespace {

double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::vector<ProcessSpec> all_processes() {
    return {Fbm{0.3}, Fbm{0.5}, Fbm{0.7}, SubFbm{0.3}, SubFbm{0.7}, BiFbm{0.6, 0.5}, BiFbm{0.3, 0.7}, BiFbm{0.7, 1.0},
            Hermite{1, 0.7}, Hermite{2, 0.6}, Hermite{3, 0.8}};
}

std::vector<ProcessSpec> gaussian_bases() {
    return {Fbm{0.3}, Fbm{0.5}, Fbm{0.7}, SubFbm{0.3}, SubFbm{0.7}, BiFbm{0.6, 0.5}, BiFbm{0.3, 0.7}, BiFbm{0.8, 0.4}};
}

// Definitional f_U in 50-digit arithmetic, straight from the covariance formulas.
double f_u_wide(const ProcessSpec& p, double x) {
    using W = boost::multiprecision::cpp_bin_float_50;
    using boost::multiprecision::abs;
    using boost::multiprecision::exp;
    using boost::multiprecision::pow;
    const W g(holder_exponent(p));
    const W s = exp(W(x) / (2 * g));
    const W t = exp(-W(x) / (2 * g));
    W r;
    if (const auto* f = std::get_if<Fbm>(&p)) {
        const W e = 2 * W(f->hurst);
        r = (pow(s, e) + pow(t, e) - pow(abs(t - s), e)) / 2;
    } else if (const auto* sf = std::get_if<SubFbm>(&p)) {
        const W e = 2 * W(sf->hurst);
        r = pow(s, e) + pow(t, e) - (pow(s + t, e) + pow(abs(t - s), e)) / 2;
    } else {
        const auto& b = std::get<BiFbm>(p);
        const W e = 2 * W(b.hurst);
        const W k(b.k);
        r = pow(W(2), -k) * (pow(pow(s, e) + pow(t, e), k) - pow(abs(t - s), e * k));
    }
    return static_cast<double>(pow(g, 2 * g) * r);
}

}  // namespace

TEST(Process, ValidatesParameterRanges) {
    EXPECT_THROW(validate(Fbm{1.2}), DomainError);
    EXPECT_THROW(validate(Fbm{0.0}), DomainError);
    EXPECT_THROW(validate(SubFbm{1.0}), DomainError);
    EXPECT_THROW(validate(BiFbm{0.5, 1.5}), DomainError);
    EXPECT_THROW(validate(BiFbm{0.5, 0.0}), DomainError);
    EXPECT_THROW(validate(Hermite{0, 0.7}), DomainError);
    EXPECT_THROW(validate(Hermite{2, 0.4}), DomainError);
    EXPECT_NO_THROW(validate(BiFbm{0.5, 1.0}));
    EXPECT_THROW(cov(Fbm{1.2}, 1.0, 2.0), DomainError);
}

TEST(Process, HolderExponent) {
    EXPECT_EQ(holder_exponent(Fbm{0.7}), 0.7);
    EXPECT_EQ(holder_exponent(SubFbm{0.3}), 0.3);
    EXPECT_EQ(holder_exponent(Hermite{2, 0.8}), 0.8);
    EXPECT_DOUBLE_EQ(holder_exponent(BiFbm{0.6, 0.5}), 0.3);
}

TEST(Cov, Examples) {
    EXPECT_DOUBLE_EQ(cov(Fbm{0.7}, 2.0, 2.0), std::pow(2.0, 1.4));
    EXPECT_DOUBLE_EQ(cov(Fbm{0.5}, 1.0, 2.0), 1.0);
    for (double h : {0.3, 0.7}) {
        for (double t : {0.5, 2.0}) {
            EXPECT_NEAR(cov(SubFbm{h}, t, t), (2 - std::pow(2.0, 2 * h - 1)) * std::pow(t, 2 * h), 1e-14);
        }
    }
    // fBm is defined on the whole line.
    EXPECT_DOUBLE_EQ(cov(Fbm{0.5}, -1.0, -2.0), 1.0);
    EXPECT_THROW(cov(SubFbm{0.5}, -1.0, 1.0), DomainError);
}

TEST(Cov, BifbmWithUnitKIsFbm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 20; ++i) {
        const double s = u(rng);
        const double t = u(rng);
        for (double h : {0.3, 0.7}) {
            EXPECT_DOUBLE_EQ(cov(BiFbm{h, 1.0}, s, t), cov(Fbm{h}, s, t));
            EXPECT_DOUBLE_EQ(mixed_partial(BiFbm{h, 1.0}, s, t + 0.1), mixed_partial(Fbm{h}, s, t + 0.1));
        }
        EXPECT_DOUBLE_EQ(f_u(BiFbm{0.7, 1.0}, s - 5), f_u(Fbm{0.7}, s - 5));
    }
}

TEST(Cov, HermiteMatchesFbm) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int q : {1, 2, 3}) {
        for (int i = 0; i < 20; ++i) {
            const double s = u(rng);
            const double t = u(rng);
            EXPECT_EQ(cov(Hermite{q, 0.7}, s, t), cov(Fbm{0.7}, s, t));
        }
    }
}

TEST(Cov, Symmetric) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (const auto& p : all_processes()) {
        for (int i = 0; i < 50; ++i) {
            const double s = u(rng);
            const double t = u(rng);
            EXPECT_EQ(cov(p, s, t), cov(p, t, s)) << to_string(p);
        }
    }
}

TEST(Cov, GramMatricesArePositiveSemidefinite) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (const auto& p : all_processes()) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> ts(8);
            for (auto& t : ts) t = u(rng);
            Eigen::MatrixXd g(8, 8);
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 8; ++j) g(i, j) = cov(p, ts[i], ts[j]);
            }
            const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff();
            EXPECT_GE(min_eig, -1e-10 * g.trace()) << to_string(p);
        }
    }
}

TEST(Cov, IncrementBound) {
    // E[(G_t - G_s)^2] <= C |t - s|^{2 gamma}; C is fitted on one sweep and
    // must hold on a second sweep at other base points.
    for (const auto& p : all_processes()) {
        const double g = holder_exponent(p);
        auto ratio = [&](double s, double lag) {
            const double t = s + lag;
            return (cov(p, t, t) + cov(p, s, s) - 2 * cov(p, s, t)) / std::pow(lag, 2 * g);
        };
        double c = 0.0;
        for (double s : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
            for (int i = 0; i <= 30; ++i) c = std::max(c, ratio(s, std::pow(10.0, -3.0 + 5.0 * i / 30)));
        }
        for (double s : {0.25, 3.0, 6.0}) {
            for (int i = 0; i <= 17; ++i) {
                EXPECT_LE(ratio(s, std::pow(10.0, -2.9 + 4.7 * i / 17)), c * (1 + 1e-8)) << to_string(p);
            }
        }
    }
}

TEST(Cov, StationaryIncrementDecomposition) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 8.0);
    for (const auto& p : all_processes()) {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            double a = u(rng);
            double b = u(rng);
            if (a > b) std::swap(a, b);
            worst = std::max(worst, std::abs(cov(p, a, b) - 0.5 * (rho(p, a) + rho(p, b) - rho(p, b - a))));
        }
        if (has_stationary_increments(p)) {
            EXPECT_LT(worst, 1e-12) << to_string(p);
        } else {
            EXPECT_GT(worst, 1e-3) << to_string(p);
        }
    }
}

TEST(MixedPartial, Examples) {
    EXPECT_EQ(mixed_partial(Fbm{0.5}, 1.0, 2.0), 0.0);
    EXPECT_NEAR(mixed_partial(Fbm{0.7}, 1.0, 2.0), 0.28, 1e-15);
    EXPECT_THROW(mixed_partial(Fbm{0.7}, 1.0, 1.0), SingularityError);
    EXPECT_THROW(mixed_partial(SubFbm{0.7}, 2.0, 2.0), SingularityError);
}

TEST(MixedPartial, MatchesFiniteDifferences) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (const auto& p : all_processes()) {
        int n = 0;
        while (n < 50) {
            const double a = u(rng);
            const double b = u(rng);
            if (std::abs(a - b) < 0.1 * std::max(a, b)) continue;
            ++n;
            const double h = 1e-4 * std::max(a, b);
            const double fd =
                (cov(p, a + h, b + h) - cov(p, a + h, b - h) - cov(p, a - h, b + h) + cov(p, a - h, b - h)) /
                (4 * h * h);
            const double exact = mixed_partial(p, a, b);
            EXPECT_LT(std::abs(fd - exact) / std::max(std::abs(exact), 1e-3), 1e-4) << to_string(p) << " " << a << " " << b;
        }
    }
}

TEST(Rho, Examples) {
    for (double h : {0.3, 0.7}) EXPECT_DOUBLE_EQ(rho(Fbm{h}, 3.0), std::pow(3.0, 2 * h));
    for (const auto& p : all_processes()) EXPECT_EQ(rho(p, 0.0), 0.0) << to_string(p);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 10; ++i) {
        const double t = u(rng);
        const double e = 2 * 0.6;
        const double direct = std::pow(2.0, -0.5) * (std::pow(2 * std::pow(t, e), 0.5));
        EXPECT_NEAR(rho(BiFbm{0.6, 0.5}, t), direct, 1e-13 * std::max(1.0, direct));
    }
}

TEST(MnGamma, Examples) {
    EXPECT_EQ(m_gamma(0.3, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(n_gamma(0.5, 0.0), 2.0);
    for (double g : {0.3, 0.7}) {
        EXPECT_DOUBLE_EQ(n_gamma(g, 0.0), std::pow(2.0, 2 * g));
        for (double x : {0.5, 2.0}) {
            EXPECT_EQ(m_gamma(g, -x), m_gamma(g, x));
            EXPECT_EQ(n_gamma(g, -x), n_gamma(g, x));
            EXPECT_NEAR(m_gamma(g, x), std::pow(std::exp(x / (2 * g)) - std::exp(-x / (2 * g)), 2 * g), 1e-12);
        }
    }
    EXPECT_THROW(m_gamma(1.0, 1.0), DomainError);
}

TEST(MnGamma, SecondOrderIdentities) {
    for (double g : {0.3, 0.7}) {
        const double c = 2 * (2 * g - 1) / g;
        for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
            const double h = 0.01 * std::min(1.0, x);
            const double sh = std::exp(x / (2 * g)) - std::exp(-x / (2 * g));
            const double ch = std::exp(x / (2 * g)) + std::exp(-x / (2 * g));
            const double rm = oracle::d2([g](double y) { return m_gamma(g, y); }, x, h) - m_gamma(g, x) -
                              c * std::pow(sh, 2 * g - 2);
            const double rn = oracle::d2([g](double y) { return n_gamma(g, y); }, x, h) - n_gamma(g, x) +
                              c * std::pow(ch, 2 * g - 2);
            EXPECT_LT(std::abs(rm) / std::max(1.0, m_gamma(g, x)), 1e-6) << g << " " << x;
            EXPECT_LT(std::abs(rn) / std::max(1.0, n_gamma(g, x)), 1e-6) << g << " " << x;
        }
    }
}

TEST(FU, ValuesAtZero) {
    for (double h : {0.3, 0.5, 0.7}) {
        EXPECT_NEAR(f_u(Fbm{h}, 0.0), std::pow(h, 2 * h), 1e-15);
        EXPECT_NEAR(f_u(SubFbm{h}, 0.0), std::pow(h, 2 * h) * (2 - std::pow(2.0, 2 * h - 1)), 1e-15);
    }
}

TEST(FU, ClosedFormsMatchDefinition) {
    for (const auto& p : gaussian_bases()) {
        for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, -1.0}) {
            EXPECT_LT(rel(f_u(p, x), f_u_wide(p, x)), 1e-10) << to_string(p) << " x=" << x;
        }
        // The double-precision definition agrees at moderate lags.
        EXPECT_LT(rel(f_u_definition(p, 0.5), f_u_wide(p, 0.5)), 1e-12) << to_string(p);
    }
}

TEST(FU, BifbmClosedFormSubtractsTheMTerm) {
    const BiFbm b{0.6, 0.5};
    const double g = b.hurst * b.k;
    for (double x : {0.1, 1.0, 5.0}) {
        const double scale = std::pow(g, 2 * g) * std::exp2(-b.k);
        const double minus = scale * (n_gamma(b.k / 2, x) - m_gamma(g, x));
        const double plus = scale * (n_gamma(b.k / 2, x) + m_gamma(g, x));
        const double def = f_u_wide(b, x);
        EXPECT_LT(rel(minus, def), 1e-8) << x;
        EXPECT_GT(rel(plus, def), 1e-2) << x;
    }
}

TEST(FU, EvenAndRejectsHermite) {
    for (const auto& p : gaussian_bases()) {
        for (double x : {0.3, 2.0}) EXPECT_EQ(f_u(p, x), f_u(p, -x)) << to_string(p);
    }
    EXPECT_THROW(f_u(Hermite{2, 0.7}, 1.0), DomainError);
}

TEST(HU, BrownianClosedForm) {
    // f = e^{-x} / 2, so h(t) = (t - 1 + e^{-t}) / 2.
    for (double t : {0.1, 1.0, 3.0}) {
        EXPECT_NEAR(f_u(Fbm{0.5}, t), 0.5 * std::exp(-t), 1e-15);
        EXPECT_LT(rel(h_u(Fbm{0.5}, t), 0.5 * (t - 1 + std::exp(-t))), 1e-10);
    }
}

TEST(HU, ZeroEvenAndConvex) {
    for (const auto& p : gaussian_bases()) {
        EXPECT_EQ(h_u(p, 0.0), 0.0);
        EXPECT_EQ(h_u(p, 1.3), h_u(p, -1.3));
        for (double t : {1.0, 2.0}) {
            // Riemann-sum oracle for the accumulated integral.
            auto riemann = [&](double a) {
                const int n = 200000;
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double x = (i + 0.5) * a / n;
                    s += (a - x) * f_u(p, x);
                }
                return s * a / n;
            };
            EXPECT_LT(rel(h_u(p, t), riemann(t)), 1e-7) << to_string(p);
            EXPECT_GE(h_u(p, t) - 2 * h_u(p, t / 2), 0.0) << to_string(p);
        }
    }
}

TEST(HU, ReportsNonConvergence) {
    QuadConfig q;
    q.max_subdivisions = 1;
    q.rel_tol = 1e-15;
    q.abs_tol = 1e-300;
    EXPECT_THROW(h_u(SubFbm{0.3}, 30.0, q), NumericError);
}

TEST(RhoDdY1, Examples) {
    for (double x : {0.1, 1.0, 4.0}) EXPECT_EQ(rho_dd_y1(Fbm{0.5}, x), 0.0);
    const double expected = 0.4 * std::pow(0.7, 0.4) * std::pow(std::exp(1 / 1.4) - std::exp(-1 / 1.4), -0.6);
    EXPECT_NEAR(rho_dd_y1(Fbm{0.7}, 1.0), expected, 1e-14);
    EXPECT_THROW(rho_dd_y1(Fbm{0.7}, 0.0), SingularityError);
}

TEST(RhoDdY1, EqualsFMinusSecondDerivative) {
    for (const auto& p : gaussian_bases()) {
        for (double x : {0.5, 1.0, 2.0}) {
            const double fd = f_u(p, x) - oracle::d2([&p](double y) { return f_u(p, y); }, x, 1e-2);
            EXPECT_LT(std::abs(rho_dd_y1(p, x) - fd) / std::max(std::abs(fd), 1e-6), 1e-5) << to_string(p) << " " << x;
        }
    }
}

TEST(RhoDdY1, ExponentialTail) {
    for (const auto& p : gaussian_bases()) {
        const ExponentialTail tail = second_kind_tail(p);
        if (tail.amplitude == 0.0) continue;
        const double x = 40.0 / tail.rate;
        EXPECT_NEAR(rho_dd_y1(p, x) / (tail.amplitude * std::exp(-tail.rate * x)), 1.0, 1e-3) << to_string(p);
    }
    EXPECT_NEAR(second_kind_tail(Fbm{0.8}).rate, 0.25, 1e-15);
    EXPECT_NEAR(second_kind_tail(SubFbm{0.7}).rate, 2 / 0.7 - 1, 1e-15);
}

TEST(SecondKind, IncrementCovarianceIsSecondDifference) {
    const QuadConfig q{1e-12, 1e-15, 4000, 0.0};
    for (const ProcessSpec& p : {ProcessSpec{Fbm{0.7}}, ProcessSpec{SubFbm{0.3}}, ProcessSpec{BiFbm{0.6, 0.5}}}) {
        const double d = 0.25;
        auto v = [&](double x) { return x == 0.0 ? 0.0 : second_kind_increment_variance(p, x, q); };
        for (long k : {0L, 1L, 3L}) {
            const double kd = static_cast<double>(k) * d;
            const double expected = 0.5 * (v(kd + d) + v(std::abs(kd - d)) - 2 * v(kd));
            EXPECT_NEAR(second_kind_increment_cov(p, d, k, q), expected, 1e-9) << to_string(p) << " k=" << k;
        }
    }
}

TEST(SecondKind, VarianceTableMatchesPointwise) {
    const ProcessSpec p = SubFbm{0.7};
    const std::vector<double> xs{0.0, 0.1, 0.5, 1.0, 4.0};
    const auto table = second_kind_increment_variance_table(p, xs);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        EXPECT_LT(rel(table[i], second_kind_increment_variance(p, xs[i])), 1e-8);
    }
    EXPECT_EQ(table[0], 0.0);
    EXPECT_THROW(second_kind_increment_variance_table(p, {1.0, 0.5}), DomainError);
}

TEST(Split, ReassemblesCovariance) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (const ProcessSpec& p : {ProcessSpec{SubFbm{0.7}}, ProcessSpec{SubFbm{0.3}}, ProcessSpec{BiFbm{0.6, 0.5}},
                                 ProcessSpec{BiFbm{0.3, 0.7}}}) {
        const CovarianceSplit sp = covariance_split(p);
        for (int i = 0; i < 20; ++i) {
            const double s = u(rng);
            const double t = u(rng);
            EXPECT_NEAR(cov(p, s, t), sp.weight * cov(Fbm{sp.hurst}, s, t) + split_remainder(p, s, t), 1e-12);
        }
    }
}
