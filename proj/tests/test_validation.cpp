#include <gtest/gtest.h>

#include <set>

#include "fou/validation.hpp"

using namespace fou;

namespace {

void expect_all_pass(const SuiteReport& r) {
    EXPECT_FALSE(r.checks.empty()) << r.suite;
    for (const auto& c : r.checks) {
        EXPECT_TRUE(c.passed) << r.suite << "/" << c.name << ": measured " << c.measured << " target " << c.target
                              << " tol " << c.tolerance << " " << c.detail;
    }
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.failures(), 0);
}

}  // namespace

TEST(Validation, SuiteNames) {
    const auto& names = suite_names();
    EXPECT_EQ(names.size(), 5u);
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), 5u);
}

TEST(Validation, EmptyAndUnknownSuites) {
    const SuiteReport none = run_suite("none");
    EXPECT_TRUE(none.checks.empty());
    EXPECT_TRUE(none.passed());
    EXPECT_TRUE(run_suite("").passed());
    EXPECT_THROW(run_suite("bogus"), DomainError);
}

TEST(Validation, IdentitiesSuitePasses) { expect_all_pass(run_suite("identities")); }

TEST(Validation, QuadratureSuitePasses) { expect_all_pass(run_suite("quadrature")); }

TEST(Validation, ClosedFormSuitePasses) { expect_all_pass(run_suite("closed_form")); }

TEST(Validation, AsymptoticsSuitePasses) { expect_all_pass(run_suite("asymptotics")); }

TEST(Validation, ReportCountsFailures) {
    SuiteReport r;
    r.checks.push_back({"a", true, 1, 1, 0, ""});
    r.checks.push_back({"b", false, 2, 1, 0, ""});
    r.checks.push_back({"c", false, 3, 1, 0, ""});
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.failures(), 2);
}

TEST(Validation, SmallMonteCarloBudgetRuns) {
    ValidationBudget b;
    b.scale = 0.01;
    const SuiteReport r = run_suite("montecarlo", b);
    EXPECT_FALSE(r.checks.empty());
    for (const auto& c : r.checks) EXPECT_TRUE(std::isfinite(c.measured)) << c.name;
}
