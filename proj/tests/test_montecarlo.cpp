#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fou/montecarlo.hpp"

using namespace fou;

namespace {

PathEnsemble constant_ensemble(int n_paths, const Grid& g, double value) {
    PathEnsemble e;
    e.grid = g;
    e.paths = PathMatrix::Constant(n_paths, g.size(), value);
    return e;
}

}  // namespace

TEST(EstimateCov, EdgeCases) {
    const Grid g = Grid::uniform(0.0, 1.0, 5);
    const CovEstimate empty = estimate_cov(constant_ensemble(0, g, 1.0), 0.5, 1.0);
    EXPECT_EQ(empty.n_paths, 0);
    EXPECT_EQ(empty.value, 0.0);
    EXPECT_THROW(estimate_cov(constant_ensemble(29, g, 1.0), 0.5, 1.0), DomainError);
    const CovEstimate c = estimate_cov(constant_ensemble(30, g, 2.0), 0.5, 1.0);
    EXPECT_EQ(c.value, 4.0);
    EXPECT_EQ(c.std_error, 0.0);
    EXPECT_EQ(c.n_paths, 30);
    EXPECT_THROW(estimate_cov(constant_ensemble(30, g, 2.0), 0.3, 1.0), DomainError);
}

TEST(EstimateCov, HandComputedMeanAndError) {
    // Products 1, 3 repeated: mean 2, sample sd sqrt(40/39), SE sd / sqrt(40).
    PathEnsemble e = constant_ensemble(40, Grid::uniform(0.0, 1.0, 2), 1.0);
    for (int r = 0; r < 40; ++r) e.paths(r, 1) = r % 2 ? 3.0 : 1.0;
    const CovEstimate c = estimate_cov(e, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(c.value, 2.0);
    EXPECT_NEAR(c.std_error, std::sqrt(40.0 / 39.0) / std::sqrt(40.0), 1e-15);
}

TEST(EstimateCov, FirstKindFbmMatchesAnalytic) {
    const OUSpec ou{NoiseKind::first, Fbm{0.7}, 1.0};
    const PathEnsemble x = sample_ou(ou, Grid::uniform(0.0, 8.0, 641), 5000, 51);
    const CovEstimate c = estimate_cov(x, 5.0, 8.0);
    EXPECT_LE(std::abs(c.value - ou_cov(ou, 5.0, 8.0)), 3 * c.std_error + 2e-3);
}

TEST(EstimateMoment, Gaussian) {
    const PathEnsemble b = sample_gaussian(Fbm{0.5}, Grid::uniform(0.0, 1.0, 3), 20000, 52);
    for (int p : {1, 2, 3, 4}) {
        const double target = p == 2 ? 1.0 : (p == 4 ? 3.0 : 0.0);
        const CovEstimate m = estimate_moment(b, 1.0, p);
        EXPECT_LE(std::abs(m.value - target), 3 * m.std_error) << "p=" << p;
    }
    EXPECT_THROW(estimate_moment(b, 1.0, 0), DomainError);
}

TEST(EstimateLagCov, AveragesOverOrigins) {
    PathEnsemble e = constant_ensemble(30, Grid::uniform(0.0, 3.0, 4), 0.0);
    for (int r = 0; r < 30; ++r) {
        for (int i = 0; i < 4; ++i) e.paths(r, i) = i + 1;
    }
    // lag 1: (1*2 + 2*3 + 3*4) / 3.
    EXPECT_DOUBLE_EQ(estimate_lag_cov(e, 1.0).value, 20.0 / 3.0);
    EXPECT_DOUBLE_EQ(estimate_lag_cov(e, 0.0).value, 30.0 / 4.0);
    EXPECT_THROW(estimate_lag_cov(e, 0.5), DomainError);
    EXPECT_THROW(estimate_lag_cov(e, 4.0), DomainError);
}

TEST(Ergodicity, TimeAveragesMatchStationaryMoments) {
    const OUSpec ou{NoiseKind::first, Fbm{0.7}, 1.0};
    const PathEnsemble z = stationary_path(ou, Grid::uniform(0.0, 50.0, 2001), 300, 61);
    const ErgodicityResult mean = ergodicity_check(z, ou, ErgodicStatistic::identity);
    EXPECT_FALSE(mean.degenerate);
    EXPECT_EQ(mean.expected, 0.0);
    EXPECT_LT(std::abs(mean.z_score), 3.0);
    const ErgodicityResult sq = ergodicity_check(z, ou, ErgodicStatistic::square);
    EXPECT_DOUBLE_EQ(sq.expected, stationary_variance(ou));
    EXPECT_LT(std::abs(sq.z_score), 3.0);
}

TEST(Ergodicity, DegenerateAndShortInputs) {
    const OUSpec ou{NoiseKind::first, Fbm{0.5}, 1.0};
    const Grid g = Grid::uniform(0.0, 50.0, 11);
    const ErgodicityResult d = ergodicity_check(constant_ensemble(30, g, 0.0), ou, ErgodicStatistic::square);
    EXPECT_TRUE(d.degenerate);
    EXPECT_EQ(d.z_score, 0.0);
    EXPECT_TRUE(ergodicity_check(constant_ensemble(0, g, 0.0), ou, ErgodicStatistic::identity).degenerate);
    EXPECT_THROW(ergodicity_check(constant_ensemble(30, Grid::uniform(0.0, 49.0, 11), 0.0), ou,
                                  ErgodicStatistic::identity),
                 DomainError);
    EXPECT_THROW(ergodicity_check(constant_ensemble(30, g, 0.0), {NoiseKind::first, Fbm{0.5}, 0.0},
                                  ErgodicStatistic::identity),
                 DomainError);
}

TEST(DecayStudy, RowsAgreeWithAnalytic) {
    const OUSpec ou{NoiseKind::second, Fbm{0.7}, 1.0};
    const std::vector<double> lags{0.0, 0.5, 1.0, 2.0};
    const auto rows = decay_study(ou, lags, 3000, 71, 1.0 / 16);
    ASSERT_EQ(rows.size(), lags.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].lag, lags[i]);
        EXPECT_EQ(rows[i].estimate.n_paths, 3000);
        EXPECT_DOUBLE_EQ(rows[i].analytic, stationary_autocov(ou, lags[i]));
        EXPECT_LE(std::abs(rows[i].estimate.value - rows[i].analytic),
                  3 * rows[i].estimate.std_error + 0.01 * rows[0].analytic)
            << "lag " << lags[i];
    }
    EXPECT_TRUE(decay_study(ou, {}, 10, 1).empty());
    EXPECT_THROW(decay_study(ou, {-1.0}, 30, 1), DomainError);
    EXPECT_THROW(decay_study(ou, {0.3}, 30, 1, 0.25), DomainError);
}

TEST(StandardError, ShrinksAsRootOfPaths) {
    const Grid g = Grid::uniform(0.0, 1.0, 17);
    const double a = estimate_cov(sample_gaussian(Fbm{0.7}, g, 1000, 81), 1.0, 1.0).std_error;
    const double b = estimate_cov(sample_gaussian(Fbm{0.7}, g, 4000, 81), 1.0, 1.0).std_error;
    EXPECT_NEAR(a / b, 2.0, 0.2);
}

TEST(StandardError, CoverageAcrossSeeds) {
    // E[B_1^2] = 1: about 95% of the 2-SE intervals must contain it.
    const Grid g = Grid::uniform(0.0, 1.0, 17);
    int inside = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CovEstimate c = estimate_cov(sample_gaussian(Fbm{0.7}, g, 400, 9000 + s), 1.0, 1.0);
        if (std::abs(c.value - 1.0) <= 2 * c.std_error) ++inside;
    }
    EXPECT_GE(inside, 40);
}

TEST(StandardError, SeedsGiveIndependentEstimates) {
    const Grid g = Grid::uniform(0.0, 1.0, 17);
    const CovEstimate a = estimate_cov(sample_gaussian(Fbm{0.3}, g, 2000, 1), 1.0, 1.0);
    const CovEstimate b = estimate_cov(sample_gaussian(Fbm{0.3}, g, 2000, 2), 1.0, 1.0);
    EXPECT_NE(a.value, b.value);
    // The difference of two independent estimates has SE sqrt(se_a^2 + se_b^2).
    EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.std_error, b.std_error));
}

TEST(StandardError, ThreadCountDoesNotChangeEstimates) {
    const OUSpec ou{NoiseKind::second, SubFbm{0.7}, 2.0};
    const Grid g = Grid::uniform(0.0, 2.0, 33);
    SamplingOptions four;
    four.threads = 4;
    const CovEstimate a = estimate_cov(sample_ou(ou, g, 60, 3), 1.0, 2.0);
    const CovEstimate b = estimate_cov(sample_ou(ou, g, 60, 3, four), 1.0, 2.0);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
}
