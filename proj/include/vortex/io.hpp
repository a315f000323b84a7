#pragma once

#include <string>
#include <vector>

#include "vortex/abelian.hpp"
#include "vortex/cartan.hpp"
#include "vortex/graph.hpp"
#include "vortex/minimizer.hpp"

namespace vortex::io {

/// Graph file: {"vertices":[{"id":"a","mu":1.0},...],"edges":[{"u":"a","v":"b","w":1.0},...]}.
/// Missing "mu" defaults to 1, missing "w" defaults to 1. Duplicate edges and
/// self loops are rejected by the graph constructor.
WeightedGraph parse_graph(const std::string& json_text);
WeightedGraph load_graph(const std::string& path);

/// Problem file:
///   {"cartan": {"preset": "A2"} or {"K": [[...]], "P": [...]},
///    "vortices": {"points": [["a","a"], ["b"]]}}
/// N_i is inferred from the multiset sizes. Both sections are optional at
/// parse time; commands require what they need.
struct ProblemFile {
    bool has_cartan = false;
    std::string preset;  // nonempty when the cartan section named a preset
    Eigen::MatrixXd K;
    bool has_P = false;
    Eigen::VectorXd P;
    bool has_vortices = false;
    std::vector<std::vector<std::string>> point_ids;
};

ProblemFile parse_problem(const std::string& json_text);
ProblemFile load_problem(const std::string& path);

/// K and P with any preset resolved; throws if the file had no cartan section.
struct CartanInput {
    Eigen::MatrixXd K;
    bool has_P = false;
    Eigen::VectorXd P;
};
CartanInput cartan_input(const ProblemFile& pf);

/// Per-component vertex indices; missing vortices section yields `rank` empty lists.
std::vector<std::vector<int>> resolve_points(const ProblemFile& pf, const WeightedGraph& g,
                                             int rank);

/// All components' points as one multiset (for the scalar solver).
std::vector<int> flatten_points(const ProblemFile& pf, const WeightedGraph& g);

// --- serialization -----------------------------------------------------------

/// %.17g: enough digits that re-reading reproduces the double bit for bit.
std::string fmt_double(double x);

std::string solve_report_json(const SolveReport& rep, const WeightedGraph& g);
std::string abelian_report_json(const AbelianSolution& sol, const AbelianProblem& p);
std::string critical_bracket_json(const CriticalBracket& br);

struct SweepRow {
    double lambda = 0.0;
    bool converged = false;
    double J = std::numeric_limits<double>::quiet_NaN();
    double residual_inf = std::numeric_limits<double>::quiet_NaN();
    double min_t = std::numeric_limits<double>::quiet_NaN();
    double max_u_orig = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

/// Header: lambda,converged,J,residual_inf,min_t,max_u_orig,iterations
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

void write_file(const std::string& path, const std::string& text);

} // namespace vortex::io
