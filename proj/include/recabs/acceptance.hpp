#pragma once

#include <string>
#include <vector>

namespace recabs {

/// Closed-form resonant Voigt peak sqrt(pi/2) (gamma/sigma) e^{y^2} erfc(y),
/// y = gamma/(sqrt(2) sigma); independent check for the ensemble average.
double voigt_peak_oracle(double sigma, double gamma);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> criteria;  // empty = all (1..10)
    std::string out_dir = "selftest_out";
    int workers = 0;   // 0 = default
    bool verbose = true;
};

/// Runs the self-test suite; one result per requested criterion, printed as
/// a PASS/FAIL line when verbose.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace recabs
