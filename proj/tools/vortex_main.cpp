#include <iostream>

#include <CLI11.hpp>

#include "vortex/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vortex: constrained variational solver for coupled vortex systems on weighted "
                 "finite graphs"};
    app.require_subcommand(1);

    vortex::cli::RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "graph JSON file");
        sub->add_option("--problem", cfg.problem_path, "problem JSON file");
        sub->add_option("--tol", cfg.tol, "solver tolerance");
        sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
        sub->add_option("--out", cfg.out_path, "output path (default: stdout)");
        sub->add_option("--format", cfg.format, "output format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize the reduced functional at one lambda");
    add_common(solve);
    solve->add_option("--lambda", cfg.lambda, "coupling")->required();
    auto* seed_opt = solve->add_option("--seed-strategy", cfg.seed_strategy,
                                       "starting point: neg-u0, abelian or zero")
                         ->check(CLI::IsMember({"neg-u0", "abelian", "zero"}));

    CLI::App* sweep = app.add_subcommand("sweep", "independent solves over a lambda range");
    add_common(sweep);
    sweep->add_option("--lambda-min", cfg.lambda_min, "range start")->required();
    sweep->add_option("--lambda-max", cfg.lambda_max, "range end")->required();
    sweep->add_option("--steps", cfg.steps, "number of samples");
    sweep->add_flag("--log", cfg.log_spacing, "log-spaced samples");
    auto* sweep_seed_opt = sweep->add_option("--seed-strategy", cfg.seed_strategy,
                                             "starting point: neg-u0, abelian or zero")
                               ->check(CLI::IsMember({"neg-u0", "abelian", "zero"}));

    CLI::App* abelian =
        app.add_subcommand("abelian", "scalar vortex equation: maximal solution or critical bracket");
    add_common(abelian);
    abelian->add_option("--lambda", cfg.lambda, "coupling");
    abelian->add_flag("--find-critical", cfg.find_critical,
                      "bisect the critical coupling instead of solving");

    CLI::App* validate = app.add_subcommand("validate", "check the structure conditions of K, P");
    add_common(validate);
    validate->add_option("--lambda", cfg.lambda, "report seed admissibility margins at this coupling");

    CLI::App* lam0 = app.add_subcommand("lambda0", "necessary-condition threshold for the instance");
    add_common(lam0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        app.exit(e);
        return 1;
    }

    cfg.has_lambda = solve->count("--lambda") > 0 || abelian->count("--lambda") > 0 ||
                     validate->count("--lambda") > 0;
    cfg.lambda = cfg.has_lambda ? cfg.lambda : 0.0;
    cfg.has_range = sweep->count("--lambda-min") > 0 && sweep->count("--lambda-max") > 0;
    cfg.seed_explicit = seed_opt->count() > 0 || sweep_seed_opt->count() > 0;

    try {
        if (solve->parsed())
            return vortex::cli::run_solve(cfg);
        if (sweep->parsed())
            return vortex::cli::run_sweep(cfg);
        if (abelian->parsed())
            return vortex::cli::run_abelian(cfg);
        if (validate->parsed())
            return vortex::cli::run_validate(cfg);
        if (lam0->parsed())
            return vortex::cli::run_lambda0(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
