#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phom {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 20240601;
    int grid_n = 80;  // cell-problem suites
};

/// Property suites behind the `validate` subcommand: eigen reconstruction,
/// gradient against finite differences, quadratic domination, homogeneity and
/// isotropy of F_bar, sweep determinism and the comparison principle.
std::vector<SuiteResult> run_validation(const ValidationOptions &options = {});

SuiteResult validate_eigen_reconstruction(std::uint64_t seed, int samples = 10'000,
                                          double tol = 1e-10);
SuiteResult validate_gradient(std::uint64_t seed, int samples = 100, double tol = 1e-5);
SuiteResult validate_quadratic_domination(std::uint64_t seed, int samples = 1000);
SuiteResult validate_homogeneity(int grid_n, double tol = 1e-3);
SuiteResult validate_isotropy(std::uint64_t seed, int grid_n, double tol = 1e-3);
SuiteResult validate_determinism(std::uint64_t seed);
SuiteResult validate_comparison_principle(std::uint64_t seed, int pairs = 20);

}  // namespace phom
