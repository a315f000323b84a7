#pragma once

#include <vector>

#include "vortex/graph.hpp"

namespace vortex {

/// Scalar vortex equation  Delta u = lambda e^u (e^u - 1) + 4 pi sum_j delta_{p_j}.
/// u0 is the zero-mean background absorbing the Dirac masses; the unknown is
/// the smooth remainder v with u = u0 + v.
struct AbelianProblem {
    WeightedGraph g;
    std::vector<int> points;
    int M;
    double lambda;
    VertexField u0;
};

AbelianProblem make_abelian_problem(const WeightedGraph& g, std::vector<int> points,
                                    double lambda);

enum class AbelianStatus {
    Converged,
    NoConvergence, // iteration cap or divergence; lambda likely below lambda_c
};

struct AbelianSolution {
    AbelianStatus status = AbelianStatus::NoConvergence;
    bool converged = false;
    VertexField v;
    VertexField u;              // u0 + v
    int iterations = 0;
    double residual_inf = 0.0;  // sup norm of the smooth-form equation residual
    double integral_check = 0.0; // | integral e^u (1 - e^u) d mu - 4 pi M / lambda |
};

/// Monotone iteration from the zero supersolution: with shift kappa >= 2 lambda,
///   (Delta - kappa) v_{k+1} = lambda e^{u0+v_k}(e^{u0+v_k} - 1) - kappa v_k + 4 pi M / |V|,
/// starting at v_0 = -u0. The iterates u_k = u0 + v_k decrease pointwise and,
/// when lambda is above the critical coupling, converge to the maximal solution.
AbelianSolution monotone_solve(const AbelianProblem& p, double tol = 1e-10,
                               int max_iter = 200000);

struct CriticalBracket {
    double lo = 0.0;           // monotone_solve fails here
    double hi = 0.0;           // monotone_solve succeeds here
    double lower_bound = 0.0;  // 16 pi M / |V|
};

/// Bisection on solver success. Returns lo/hi with hi - lo <= tol_bracket.
/// Throws SolverError if no success is found below the search cap 1e6.
CriticalBracket critical_lambda(const WeightedGraph& g, const std::vector<int>& points,
                                double tol_bracket = 1e-3, double solve_tol = 1e-10,
                                int max_iter = 200000);

} // namespace vortex
