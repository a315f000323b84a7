#pragma once

#include <string>
#include <utility>

#include "vortex/abelian.hpp"
#include "vortex/cartan.hpp"
#include "vortex/constraint.hpp"
#include "vortex/graph.hpp"
#include "vortex/poisson.hpp"

namespace vortex {

/// One configured vortex system: graph, validated coupling data, vortex data,
/// precomputed background fields and the coupling lambda.
struct ProblemInstance {
    WeightedGraph g;
    CartanSystem sys;
    VortexData vort;
    BackgroundField bg;
    double lambda = 0.0;
    double lambda0_value = 0.0;
};

ProblemInstance make_problem(const WeightedGraph& g, const CartanSystem& sys,
                             const VortexData& vort, double lambda);

enum class SeedStrategy { NegU0, Abelian, Zero };

SeedStrategy seed_strategy_from_string(const std::string& name);
const char* to_string(SeedStrategy s);

enum class MinimizeStatus {
    Converged,
    MaxIter,
    LineSearchFail,
    BoundaryStagnation, // line searches kept hitting the admissible boundary; lambda likely too small
};

const char* to_string(MinimizeStatus s);

struct SolveReport {
    bool converged = false;
    MinimizeStatus status = MinimizeStatus::MaxIter;
    std::string message;
    int iterations = 0;
    double lambda = 0.0;
    double lambda0 = 0.0;

    MultiField w;      // zero-mean minimizer of the reduced functional
    MultiField v;      // w + c(w)
    MultiField u_hat;  // u0 + v, solution of the translated system
    MultiField u_orig; // u_hat + ln R_i per component, solution in original variables
    Eigen::VectorXd t;
    Eigen::VectorXd c;
    Eigen::VectorXd admissible_margins;

    double J_value = 0.0;
    double grad_norm = 0.0;
    double residual_inf = 0.0;      // sup-norm residual of the reduced vector system
    double identity_310_err = 0.0;  // sup_i | integral (U Q (U - 1))_i d mu + b_i / lambda |
    double identity_313_err = 0.0;  // quadratic-moment identity error
};

struct MinimizeOptions {
    double tol = 1e-9;              // sup norm of the projected gradient
    double constraint_tol = 1e-10;  // quadratic constraint residual at convergence
    double solve_t_tol = 1e-12;
    int max_iter = 100000;
    SeedStrategy strategy = SeedStrategy::NegU0;
    bool strategy_explicit = false; // user-chosen: disable the abelian fallback
    double abelian_seed_r = 0.0;    // 0 -> 10 * lambda
    bool use_cg = true;             // nonlinear CG direction with periodic restart
    int armijo_max_halvings = 60;
};

/// Energy functional
///   I(v) = 1/2 sum_jk integral A_kj Gamma(v_k, v_j) d mu
///        + lambda/2 integral (U-1)^T Q (U-1) d mu + integral b^T v / |V| d mu,
/// with U_i = e^{u_i^0 + v_i}.
double energy_I(const ProblemInstance& p, const MultiField& v);

/// J(w) = I(w + c(w)) through the expanded form; w zero-mean and admissible.
double functional_J(const ProblemInstance& p, const MultiField& w);

/// Envelope gradient of J: the partial gradient of I at v = w + c(w),
/// zero-mean projected per component. Exact because the constraint is
/// stationarity of I in the constant directions.
MultiField grad_J(const ProblemInstance& p, const MultiField& w);

/// Starting points: NegU0 gives w = -u^0; Abelian runs the scalar solver per
/// component at coupling r and mean-projects; Zero gives w = 0.
MultiField seed(const ProblemInstance& p, SeedStrategy strategy, double abelian_r = 0.0);

/// Gradient descent with Armijo backtracking on J over zero-mean fields,
/// rejecting steps that leave the admissible set. Throws
/// LambdaBelowThresholdError when lambda <= lambda0 and SeedNotAdmissibleError
/// when no admissible start is found.
SolveReport minimize(const ProblemInstance& p, const MinimizeOptions& opts = {});

/// (err_310, err_313) of the integral identities at v.
std::pair<double, double> check_identities(const ProblemInstance& p, const MultiField& v);

/// Sup-norm residual of the reduced system
///   Delta v = lambda Ktilde U Ktilde (U - 1) + 4 pi N / |V|.
double system_residual(const ProblemInstance& p, const MultiField& v);

} // namespace vortex
