#pragma once

#include <cstdint>
#include <string>

namespace aniso {

/// One CLI invocation. Empty paths mean "not provided"; run() validates
/// the combination for the chosen command.
struct RunConfig {
    std::string command;  // measure | perimeter | barycenter | symmetrize | iso-check |
                          // enlarge-check | counterexample | direction-audit | oracle
    std::string matrix_path;
    std::string set_path;
    std::string direction;  // comma-separated components
    double epsilon = 0.1;
    std::string alphas = "0.2,0.1,0.05,0.025";
    int grid = 257;
    double rel_tol = 1e-9;
    std::uint64_t seed = 1;
    std::int64_t samples = 1000000;
    std::string out_path;
    std::string csv_path;
    // counterexample family A = 2 [[a,b],[b,c]]
    double ce_a = 1.0, ce_b = 0.5, ce_c = 1.0;
};

/// Executes the command; writes the JSON report (stdout when out_path is
/// empty) and optional CSV. Exit status: 0 success, 1 usage/input error,
/// 2 when a verified inequality is numerically violated beyond tolerance.
int run(const RunConfig& cfg);

}  // namespace aniso
