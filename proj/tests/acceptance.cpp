// Runs the five validation suites at their full configuration and prints one
// PASS/FAIL line per criterion. Exit status is nonzero when any criterion fails.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "fou/validation.hpp"

namespace {

struct Criterion {
    int number;
    const char* suite;
    const char* title;
    double time_limit;  // seconds, 0 = none
};

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<Criterion> criteria = {
        {1, "identities", "identity suite", 60.0},
        {2, "quadrature", "quadrature consistency suite", 300.0},
        {3, "closed_form", "closed-form suite", 0.0},
        {4, "asymptotics", "asymptotics suite", 600.0},
        {5, "montecarlo", "Monte-Carlo suite", 1800.0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        bool ok = false;
        std::string why;
        double seconds = 0.0;
        try {
            const fou::SuiteReport r = fou::run_suite(c.suite);
            seconds = r.seconds;
            ok = r.passed();
            for (const auto& chk : r.checks) {
                if (!chk.passed) {
                    why += " [" + chk.name + ": measured " + fou::validation::fmt(chk.measured) + ", target " +
                           fou::validation::fmt(chk.target) + "]";
                }
            }
            if (c.time_limit > 0.0 && seconds > c.time_limit) {
                ok = false;
                why += " [time limit exceeded]";
            }
            std::printf("%s criterion %d: %s (%zu checks, %.1f s)%s\n", ok ? "PASS" : "FAIL", c.number, c.title,
                        r.checks.size(), seconds, why.c_str());
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %d: %s (error: %s)\n", c.number, c.title, e.what());
        }
        if (!ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
