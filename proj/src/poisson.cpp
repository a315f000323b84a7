#include "vortex/poisson.hpp"

#include <cmath>
#include <numbers>

namespace vortex {

VertexField dirac(const WeightedGraph& g, int p) {
    if (p < 0 || p >= g.size())
        throw UnknownVertexError("dirac: vertex index out of range");
    VertexField d(g);
    d(p) = 1.0 / g.measure(p);
    return d;
}

VertexField solve_zero_mean(const WeightedGraph& g, const VertexField& f) {
    if (!f.graph().same_graph(g))
        throw FieldMismatchError("solve_zero_mean: field was built on a different graph");
    const double mean_mass = integrate(g, f);
    if (std::abs(mean_mass) > 1e-10 * f.sup_norm() * g.volume())
        throw NonzeroMeanError("solve_zero_mean: right-hand side has nonzero mean, no solution");

    // Delta u = f  <=>  L u = -M f; the pinned factorization absorbs the kernel.
    const Eigen::VectorXd rhs = -(g.measures().array() * f.values().array()).matrix();
    Eigen::VectorXd u = g.pinned_laplacian_factorization().solve(rhs);
    return project_zero_mean(g, VertexField(g, std::move(u)));
}

BackgroundField background(const WeightedGraph& g, const VortexData& vort) {
    const int n = static_cast<int>(vort.N.size());
    const double vol = g.volume();
    MultiField u0(g, n);
    Eigen::VectorXd energy(n);
    for (int i = 0; i < n; ++i) {
        VertexField rhs(g, -4.0 * std::numbers::pi * vort.N[i] / vol);
        for (int p : vort.points[i])
            rhs(p) += 4.0 * std::numbers::pi / g.measure(p);
        u0[i] = solve_zero_mean(g, rhs);
        energy[i] = dirichlet_form(g, u0[i], u0[i]);
    }
    return BackgroundField{std::move(u0), std::move(energy)};
}

} // namespace vortex
