#pragma once

#include <string>

namespace vortex::cli {

/// One run's configuration, filled from command-line flags.
struct RunConfig {
    std::string graph_path;
    std::string problem_path;

    bool has_lambda = false;
    double lambda = 0.0;

    bool has_range = false;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int steps = 1;
    bool log_spacing = false;

    double tol = 1e-9;
    int max_iter = 100000;

    std::string seed_strategy = "neg-u0";
    bool seed_explicit = false;

    std::string out_path;
    std::string format; // "json" or "csv"; empty picks the command default

    bool find_critical = false;
};

// Exit codes: 0 success/converged, 1 input error, 2 coupling at or below the
// necessary threshold, 3 non-convergence.
int run_solve(const RunConfig& cfg);
int run_sweep(const RunConfig& cfg);
int run_abelian(const RunConfig& cfg);
int run_validate(const RunConfig& cfg);
int run_lambda0(const RunConfig& cfg);

} // namespace vortex::cli
