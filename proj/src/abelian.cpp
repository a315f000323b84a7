#include "vortex/abelian.hpp"

#include <cmath>
#include <numbers>

#include "vortex/poisson.hpp"

namespace vortex {

namespace {
constexpr double kPi = std::numbers::pi;

// residual of the smooth reduced equation Delta v = lambda e^{u0+v}(e^{u0+v}-1) + 4 pi M/|V|
double equation_residual(const AbelianProblem& p, const VertexField& v) {
    const VertexField lap = laplacian(p.g, v);
    const double source = 4.0 * kPi * p.M / p.g.volume();
    double res = 0.0;
    for (int x = 0; x < p.g.size(); ++x) {
        const double eu = std::exp(p.u0(x) + v(x));
        res = std::max(res, std::abs(lap(x) - p.lambda * eu * (eu - 1.0) - source));
    }
    return res;
}
} // namespace

AbelianProblem make_abelian_problem(const WeightedGraph& g, std::vector<int> points,
                                    double lambda) {
    if (!(lambda > 0.0))
        throw Error("abelian problem requires lambda > 0");
    for (int p : points)
        if (p < 0 || p >= g.size())
            throw UnknownVertexError("abelian vortex point index out of range");
    const int M = static_cast<int>(points.size());
    VertexField rhs(g, -4.0 * kPi * M / g.volume());
    for (int p : points)
        rhs(p) += 4.0 * kPi / g.measure(p);
    VertexField u0 = solve_zero_mean(g, rhs);
    return AbelianProblem{g, std::move(points), M, lambda, std::move(u0)};
}

AbelianSolution monotone_solve(const AbelianProblem& p, double tol, int max_iter) {
    if (!(tol > 0.0))
        throw Error("monotone_solve requires tol > 0");
    const WeightedGraph& g = p.g;
    const int n = g.size();
    const double vol = g.volume();
    const double source = 4.0 * kPi * p.M / vol;
    const Eigen::VectorXd& mu = g.measures();

    // kappa large enough that the iteration map is order preserving on u <= 0
    const double kappa = 2.0 * p.lambda * std::max(1.0, std::exp(p.u0.max()));
    Eigen::LDLT<Eigen::MatrixXd> shifted(
        g.weight_laplacian() + (kappa * mu.asDiagonal()).toDenseMatrix());

    // iterates only ever decrease; anything this far below u = 0 cannot come back
    const double floor = -(50.0 + 8.0 * (1.0 + p.u0.sup_norm()) + 10.0 * std::log(2.0 + p.lambda));

    AbelianSolution sol;
    sol.v = VertexField(g, -p.u0.values());
    sol.u = VertexField(g);

    Eigen::VectorXd v = sol.v.values();
    auto nonlinearity = [&](const Eigen::VectorXd& vv) {
        Eigen::VectorXd out(n);
        for (int x = 0; x < n; ++x) {
            const double eu = std::exp(p.u0(x) + vv[x]);
            out[x] = p.lambda * eu * (eu - 1.0);
        }
        return out;
    };

    Eigen::VectorXd gv = nonlinearity(v);
    {
        // v_0 already solves the equation only in the vortex-free case
        VertexField v0(g, v);
        const double res0 = equation_residual(p, v0);
        if (res0 <= tol) {
            sol.status = AbelianStatus::Converged;
            sol.converged = true;
            sol.v = std::move(v0);
            sol.u = VertexField(g, p.u0.values() + v);
            sol.iterations = 0;
            sol.residual_inf = res0;
        }
    }

    int k = 0;
    while (!sol.converged && k < max_iter) {
        ++k;
        // (Delta - kappa) v_new = g(v) - kappa v + source  <=>  (L + kappa M) v_new = -M rhs
        const Eigen::VectorXd rhs = gv - kappa * v + Eigen::VectorXd::Constant(n, source);
        Eigen::VectorXd v_new = shifted.solve(-(mu.array() * rhs.array()).matrix());

        const double up_move = (v_new - v).maxCoeff();
        if (up_move > 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff()))
            throw SolverError("monotone iteration moved upward; shift kappa too small");

        const Eigen::VectorXd g_new = nonlinearity(v_new);
        // exact residual of v_new given the linear solve: kappa (v_new - v) + g(v) - g(v_new)
        const double step = (v_new - v).cwiseAbs().maxCoeff();
        const double res = (kappa * (v_new - v) + gv - g_new).cwiseAbs().maxCoeff();

        v = std::move(v_new);
        gv = g_new;

        if (step <= tol / kappa && res <= tol) {
            VertexField vf(g, v);
            const double true_res = equation_residual(p, vf);
            if (true_res <= tol) {
                sol.status = AbelianStatus::Converged;
                sol.converged = true;
                break;
            }
        }
        if ((p.u0.values() + v).minCoeff() < floor)
            break; // diverging: no solution above the floor is reachable any more
    }

    sol.iterations = std::max(sol.iterations, k);
    sol.v = VertexField(g, v);
    sol.u = VertexField(g, p.u0.values() + v);
    sol.residual_inf = equation_residual(p, sol.v);

    double quad = 0.0;
    for (int x = 0; x < n; ++x) {
        const double eu = std::exp(sol.u(x));
        quad += mu[x] * eu * (1.0 - eu);
    }
    sol.integral_check = std::abs(quad - 4.0 * kPi * p.M / p.lambda);
    return sol;
}

CriticalBracket critical_lambda(const WeightedGraph& g, const std::vector<int>& points,
                                double tol_bracket, double solve_tol, int max_iter) {
    if (points.empty())
        throw Error("critical_lambda requires at least one vortex point");
    if (!(tol_bracket > 0.0))
        throw Error("critical_lambda requires tol_bracket > 0");

    const double lower = 16.0 * kPi * points.size() / g.volume();
    auto solves = [&](double lambda) {
        return monotone_solve(make_abelian_problem(g, points, lambda), solve_tol, max_iter)
            .converged;
    };

    double lo = lower;
    if (solves(lo))
        throw SolverError("solver converged at the theoretical lower bound 16 pi M / |V|; "
                          "no failing endpoint for the bisection");

    constexpr double kCap = 1e6;
    double hi = std::max(2.0 * lower, 1.0);
    while (!solves(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kCap)
            throw SolverError("no converging coupling found below the search cap 1e6");
    }
    while (hi - lo > tol_bracket) {
        const double mid = 0.5 * (lo + hi);
        if (solves(mid))
            hi = mid;
        else
            lo = mid;
    }
    return CriticalBracket{lo, hi, lower};
}

} // namespace vortex
