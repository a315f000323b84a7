#pragma once

#include <Eigen/Dense>

#include "vortex/cartan.hpp"
#include "vortex/graph.hpp"

namespace vortex {

/// Zero-mean solutions u_i^0 of  Delta u_i^0 = 4 pi sum_s delta_{p_is} - 4 pi N_i / |V|,
/// one per component, with their Dirichlet energies integral Gamma(u_i^0, u_i^0) d mu.
struct BackgroundField {
    MultiField u0;
    Eigen::VectorXd grad_energy;
};

/// Discrete Dirac mass: value 1/mu(p) at p, zero elsewhere, so integral delta_p d mu = 1.
VertexField dirac(const WeightedGraph& g, int p);

/// Unique zero-mean u with Delta u = f. Requires integral f d mu = 0 within
/// 1e-10 * ||f||_inf * |V|; throws NonzeroMeanError otherwise.
VertexField solve_zero_mean(const WeightedGraph& g, const VertexField& f);

BackgroundField background(const WeightedGraph& g, const VortexData& vort);

} // namespace vortex
