#pragma once

#include <Eigen/Dense>

#include "vortex/cartan.hpp"
#include "vortex/poisson.hpp"

namespace vortex {

/// Exponential moments of the shifted fields:
///   a_i  = integral e^{u_i^0 + w_i} d mu,
///   a_ij = integral e^{u_i^0 + u_j^0 + w_i + w_j} d mu.
struct Moments {
    Eigen::VectorXd a;
    Eigen::MatrixXd aij;
    double volume = 0.0; // |V| of the graph the quadrature ran on
};

/// Constants t = e^c solving the per-component quadratic constraint, plus the
/// residual of that quadratic at the returned t.
struct ConstraintSolution {
    Eigen::VectorXd t;
    Eigen::VectorXd c;
    double quad_residual = 0.0;
    int iterations = 0;
};

struct AdmissibilityReport {
    Eigen::VectorXd margins; // m_i = a_i^2 / a_ii - 4 alpha_ii P_i^2 b_i / lambda
    bool admissible = false;
};

/// Quadrature of the moments. w must be zero-mean per component (within 1e-9);
/// exponents beyond +-700 raise NumericRangeError.
Moments moments(const BackgroundField& bg, const MultiField& w);

/// Qtilde = R Stilde R with Stilde_ii = alpha_ii a_ii, Stilde_ij = -alpha_ij a_ij.
/// Throws CartanError{NotPositiveDefinite} if the moment invariants are violated.
Eigen::MatrixXd qtilde(const CartanSystem& sys, const Moments& m);

AdmissibilityReport admissible(const CartanSystem& sys, const VortexData& vort,
                               const Moments& m, double lambda);

/// Fixed point of the plus-root map
///   f_i(t) = (B_i(t) + sqrt(B_i(t)^2 - 4 eps b_i R_i^2 alpha_ii a_ii / lambda))
///            / (2 R_i^2 alpha_ii a_ii),
///   B_i(t) = R_i a_i / P_i + sum_{j != i} t_j R_i R_j alpha_ij a_ij.
/// Monotone Picard iteration from t = 0 reaches the minimal fixed point; a
/// damped Newton pass polishes (and rescues stalls). eps = 0 reduces to the
/// linear system Qtilde t = P^{-1} R a, kept for testing against that oracle.
ConstraintSolution solve_t(const CartanSystem& sys, const VortexData& vort, const Moments& m,
                           double lambda, double tol = 1e-12, int max_iter = 100000,
                           double epsilon = 1.0);

} // namespace vortex
