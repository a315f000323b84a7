#include "vortex/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "vortex/io.hpp"
#include "vortex/minimizer.hpp"

namespace vortex::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitBelowThreshold = 2;
constexpr int kExitNoConvergence = 3;

struct LoadedProblem {
    WeightedGraph g;
    CartanSystem sys;
    VortexData vort;
};

LoadedProblem load_instance(const RunConfig& cfg) {
    if (cfg.graph_path.empty())
        throw Error("a graph file is required (--graph)");
    if (cfg.problem_path.empty())
        throw Error("a problem file is required (--problem)");
    WeightedGraph g = io::load_graph(cfg.graph_path);
    const io::ProblemFile pf = io::load_problem(cfg.problem_path);
    const io::CartanInput in = io::cartan_input(pf);
    CartanSystem sys = in.has_P ? validate(in.K, in.P) : validate(in.K);
    VortexData vort = make_vortex(sys, g, io::resolve_points(pf, g, sys.rank()));
    return LoadedProblem{std::move(g), std::move(sys), std::move(vort)};
}

MinimizeOptions minimize_options(const RunConfig& cfg) {
    MinimizeOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.strategy = seed_strategy_from_string(cfg.seed_strategy);
    opts.strategy_explicit = cfg.seed_explicit;
    return opts;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty())
        std::cout << text;
    else
        io::write_file(cfg.out_path, text);
}

io::SweepRow row_from_report(double lambda, const SolveReport& rep) {
    io::SweepRow row;
    row.lambda = lambda;
    row.converged = rep.converged;
    row.J = rep.J_value;
    row.residual_inf = rep.residual_inf;
    row.min_t = rep.t.size() ? rep.t.minCoeff() : std::numeric_limits<double>::quiet_NaN();
    double umax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rep.u_orig.rank(); ++i)
        umax = std::max(umax, rep.u_orig[i].max());
    row.max_u_orig = umax;
    row.iterations = rep.iterations;
    return row;
}

int sweep_threads(int rows) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("VORTEX_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed >= 1)
            n = static_cast<unsigned>(parsed);
        else
            std::cerr << "warning: ignoring invalid VORTEX_THREADS value\n";
    }
    if (n < 1)
        n = 1;
    return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(rows)));
}

int map_input_error(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
}

} // namespace

int run_solve(const RunConfig& cfg) {
    try {
        if (!cfg.has_lambda)
            throw Error("solve needs --lambda");
        const LoadedProblem lp = load_instance(cfg);
        const ProblemInstance p = make_problem(lp.g, lp.sys, lp.vort, cfg.lambda);
        try {
            const SolveReport rep = minimize(p, minimize_options(cfg));
            if (cfg.format == "csv")
                emit(cfg, io::sweep_csv({row_from_report(cfg.lambda, rep)}));
            else
                emit(cfg, io::solve_report_json(rep, lp.g));
            if (!rep.converged) {
                std::cerr << "not converged: " << rep.message << "\n";
                return kExitNoConvergence;
            }
            return kExitOk;
        } catch (const LambdaBelowThresholdError& e) {
            std::cerr << "refused: " << e.what() << "\n";
            return kExitBelowThreshold;
        } catch (const SeedNotAdmissibleError& e) {
            std::cerr << "not converged: " << e.what() << "\n";
            return kExitNoConvergence;
        } catch (const SolverError& e) {
            std::cerr << "not converged: " << e.what() << "\n";
            return kExitNoConvergence;
        }
    } catch (const Error& e) {
        return map_input_error(e);
    }
}

int run_sweep(const RunConfig& cfg) {
    try {
        if (!cfg.has_range)
            throw Error("sweep needs --lambda-min and --lambda-max");
        if (cfg.steps < 1)
            throw Error("sweep needs steps >= 1");
        if (!(cfg.lambda_min > 0.0) || cfg.lambda_max < cfg.lambda_min)
            throw Error("sweep needs 0 < lambda-min <= lambda-max");
        const LoadedProblem lp = load_instance(cfg);

        std::vector<double> lambdas(cfg.steps);
        for (int k = 0; k < cfg.steps; ++k) {
            if (cfg.steps == 1) {
                lambdas[k] = cfg.lambda_min;
            } else if (cfg.log_spacing) {
                const double f = static_cast<double>(k) / (cfg.steps - 1);
                lambdas[k] = cfg.lambda_min * std::pow(cfg.lambda_max / cfg.lambda_min, f);
            } else {
                const double f = static_cast<double>(k) / (cfg.steps - 1);
                lambdas[k] = cfg.lambda_min + f * (cfg.lambda_max - cfg.lambda_min);
            }
        }

        std::vector<io::SweepRow> rows(cfg.steps);
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                const int k = next.fetch_add(1);
                if (k >= cfg.steps)
                    return;
                io::SweepRow row;
                row.lambda = lambdas[k];
                try {
                    const ProblemInstance p = make_problem(lp.g, lp.sys, lp.vort, lambdas[k]);
                    const SolveReport rep = minimize(p, minimize_options(cfg));
                    row = row_from_report(lambdas[k], rep);
                } catch (const Error&) {
                    // below threshold, inadmissible seed or solver failure: a non-converged row
                }
                rows[k] = row;
            }
        };

        const int n_threads = sweep_threads(cfg.steps);
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (std::thread& th : pool)
            th.join();

        emit(cfg, cfg.format == "json" ? io::sweep_json(rows) : io::sweep_csv(rows));

        for (const io::SweepRow& r : rows)
            if (r.converged)
                return kExitOk;
        return kExitNoConvergence;
    } catch (const Error& e) {
        return map_input_error(e);
    }
}

int run_abelian(const RunConfig& cfg) {
    try {
        if (cfg.graph_path.empty() || cfg.problem_path.empty())
            throw Error("abelian needs --graph and --problem");
        const WeightedGraph g = io::load_graph(cfg.graph_path);
        const io::ProblemFile pf = io::load_problem(cfg.problem_path);
        const std::vector<int> points = io::flatten_points(pf, g);

        if (cfg.find_critical) {
            if (points.empty())
                throw Error("--find-critical needs at least one vortex point (M >= 1)");
            const CriticalBracket br = critical_lambda(g, points, 1e-3, cfg.tol, cfg.max_iter);
            emit(cfg, io::critical_bracket_json(br));
            return kExitOk;
        }

        if (!cfg.has_lambda)
            throw Error("abelian solve needs --lambda (or --find-critical)");
        const AbelianProblem p = make_abelian_problem(g, points, cfg.lambda);
        const AbelianSolution sol = monotone_solve(p, cfg.tol, cfg.max_iter);
        emit(cfg, io::abelian_report_json(sol, p));
        if (!sol.converged) {
            std::cerr << "not converged after " << sol.iterations
                      << " iterations; lambda is likely below the critical coupling\n";
            return kExitNoConvergence;
        }
        return kExitOk;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const Error& e) {
        return map_input_error(e);
    }
}

int run_validate(const RunConfig& cfg) {
    try {
        if (cfg.problem_path.empty())
            throw Error("validate needs --problem");
        const io::ProblemFile pf = io::load_problem(cfg.problem_path);
        const io::CartanInput in = io::cartan_input(pf);

        CartanSystem sys;
        try {
            sys = in.has_P ? validate(in.K, in.P) : validate(in.K);
        } catch (const CartanError& e) {
            std::cout << "FAIL " << to_string(e.kind()) << ": " << e.what() << "\n";
            return kExitInputError;
        }

        std::ostringstream o;
        o << "PASS: K^T = PS with S symmetric positive definite, S^{-1} > 0 entrywise, R > 0\n";
        o << "rank n = " << sys.rank() << "\n";
        o << "P =";
        for (int i = 0; i < sys.rank(); ++i)
            o << " " << io::fmt_double(sys.P()[i]);
        o << "\nR =";
        for (int i = 0; i < sys.rank(); ++i)
            o << " " << io::fmt_double(sys.R()[i]);
        o << "\nA =\n" << sys.A() << "\nQ =\n" << sys.Q() << "\n";

        if (!cfg.graph_path.empty() && pf.has_vortices) {
            const WeightedGraph g = io::load_graph(cfg.graph_path);
            const VortexData vort = make_vortex(sys, g, io::resolve_points(pf, g, sys.rank()));
            o << "lambda0 = " << io::fmt_double(lambda0(sys, vort, g.volume())) << "\n";
            if (cfg.has_lambda) {
                // neg-u0 seed has constant-integrand moments: a_i^2 / a_ii = |V|
                o << "seed margins at lambda = " << io::fmt_double(cfg.lambda) << ":";
                for (int i = 0; i < sys.rank(); ++i) {
                    const double margin = g.volume() - 4.0 * sys.alpha(i, i) * sys.P()[i] *
                                                           sys.P()[i] * vort.b[i] / cfg.lambda;
                    o << " " << io::fmt_double(margin);
                }
                o << "\n";
            }
        }
        std::cout << o.str();
        if (!cfg.out_path.empty())
            io::write_file(cfg.out_path, o.str());
        return kExitOk;
    } catch (const Error& e) {
        return map_input_error(e);
    }
}

int run_lambda0(const RunConfig& cfg) {
    try {
        const LoadedProblem lp = load_instance(cfg);
        const double l0 = lambda0(lp.sys, lp.vort, lp.g.volume());
        std::ostringstream o;
        o << "{ \"lambda0\": " << io::fmt_double(l0) << " }\n";
        emit(cfg, o.str());
        return kExitOk;
    } catch (const Error& e) {
        return map_input_error(e);
    }
}

} // namespace vortex::cli
