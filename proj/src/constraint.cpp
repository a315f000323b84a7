#include "vortex/constraint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vortex {

Moments moments(const BackgroundField& bg, const MultiField& w) {
    const WeightedGraph& g = bg.u0.graph();
    if (!w.graph().same_graph(g))
        throw FieldMismatchError("moments: fields live on a different graph");
    const int n = bg.u0.rank();
    if (w.rank() != n)
        throw FieldMismatchError("moments: component count differs from the background");

    for (int i = 0; i < n; ++i) {
        const double mean = integrate(g, w[i]);
        if (std::abs(mean) > 1e-9 * std::max(1.0, w[i].sup_norm()) * g.volume())
            throw Error("moments: w must be zero-mean per component");
    }

    // shifted exponents, with the overflow guard on u0 + w
    Eigen::MatrixXd shifted(n, g.size());
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < g.size(); ++x) {
            const double e = bg.u0[i](x) + w[i](x);
            if (std::abs(e) > 700.0) {
                std::ostringstream msg;
                msg << "moments: exponent u0+w = " << e << " out of numeric range in component "
                    << i;
                throw NumericRangeError(msg.str());
            }
            shifted(i, x) = e;
        }

    Moments m;
    m.volume = g.volume();
    m.a.resize(n);
    m.aij.resize(n, n);
    const Eigen::VectorXd& mu = g.measures();
    for (int i = 0; i < n; ++i) {
        double ai = 0.0;
        for (int x = 0; x < g.size(); ++x)
            ai += mu[x] * std::exp(shifted(i, x));
        m.a[i] = ai;
        for (int j = i; j < n; ++j) {
            double aij = 0.0;
            for (int x = 0; x < g.size(); ++x)
                aij += mu[x] * std::exp(shifted(i, x) + shifted(j, x));
            if (!std::isfinite(aij))
                throw NumericRangeError("moments: a_ij overflowed");
            m.aij(i, j) = aij;
            m.aij(j, i) = aij;
        }
    }
    return m;
}

Eigen::MatrixXd qtilde(const CartanSystem& sys, const Moments& m) {
    const int n = sys.rank();
    if (m.a.size() != n || m.aij.rows() != n)
        throw Error("qtilde: moment dimensions differ from the system rank");
    // Stilde_ij = S_ij * a_ij covers both the diagonal and the -alpha_ij a_ij off-diagonals
    const Eigen::MatrixXd Stilde = sys.S().cwiseProduct(m.aij);
    Eigen::MatrixXd Qt = sys.R().asDiagonal() * Stilde * sys.R().asDiagonal();
    Qt = 0.5 * (Qt + Qt.transpose().eval());

    Eigen::LDLT<Eigen::MatrixXd> ldlt(Qt);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * Qt.trace() / n)
        throw CartanError(CartanError::Kind::NotPositiveDefinite,
                          "Qtilde is not positive definite; moment invariants violated");
    return Qt;
}

AdmissibilityReport admissible(const CartanSystem& sys, const VortexData& vort,
                               const Moments& m, double lambda) {
    if (!(lambda > 0.0))
        throw Error("admissible: lambda must be positive");
    const int n = sys.rank();
    AdmissibilityReport rep;
    rep.margins.resize(n);
    for (int i = 0; i < n; ++i) {
        rep.margins[i] = m.a[i] * m.a[i] / m.aij(i, i) -
                         4.0 * sys.alpha(i, i) * sys.P()[i] * sys.P()[i] * vort.b[i] / lambda;
    }
    rep.admissible = rep.margins.minCoeff() >= 0.0;
    return rep;
}

namespace {

// Data of the plus-root map f and the quadratic it solves.
struct FixedPointMap {
    Eigen::VectorXd base;   // R_i a_i / P_i
    Eigen::MatrixXd couple; // R_i R_j alpha_ij a_ij for j != i, zero diagonal
    Eigen::VectorXd quad;   // R_i^2 alpha_ii a_ii
    Eigen::VectorXd d;      // 4 eps b_i R_i^2 alpha_ii a_ii / lambda
    Eigen::VectorXd tail;   // eps b_i / lambda

    Eigen::VectorXd B(const Eigen::VectorXd& t) const { return base + couple * t; }

    Eigen::VectorXd apply(const Eigen::VectorXd& t) const {
        const Eigen::VectorXd b = B(t);
        Eigen::VectorXd out(t.size());
        for (int i = 0; i < t.size(); ++i) {
            const double disc = b[i] * b[i] - d[i];
            if (disc < -1e-12 * std::max(1.0, b[i] * b[i]))
                throw SolverError("constraint discriminant went negative along the iteration");
            out[i] = (b[i] + std::sqrt(std::max(disc, 0.0))) / (2.0 * quad[i]);
        }
        return out;
    }

    bool discriminants_ok(const Eigen::VectorXd& t) const {
        const Eigen::VectorXd b = B(t);
        return (b.array().square() - d.array()).minCoeff() >= 0.0;
    }

    // residual of quad_i t_i^2 - t_i B_i(t) + eps b_i / lambda = 0
    Eigen::VectorXd residual(const Eigen::VectorXd& t) const {
        const Eigen::VectorXd b = B(t);
        return (quad.array() * t.array().square() - t.array() * b.array()).matrix() + tail;
    }
};

} // namespace

ConstraintSolution solve_t(const CartanSystem& sys, const VortexData& vort, const Moments& m,
                           double lambda, double tol, int max_iter, double epsilon) {
    const int n = sys.rank();
    if (!(lambda > 0.0) || !(tol > 0.0))
        throw Error("solve_t: lambda and tol must be positive");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw Error("solve_t: epsilon must lie in [0, 1]");

    // admissibility at the homotopy level eps
    {
        Eigen::VectorXd margins(n);
        for (int i = 0; i < n; ++i)
            margins[i] = m.a[i] * m.a[i] / m.aij(i, i) -
                         4.0 * epsilon * sys.alpha(i, i) * sys.P()[i] * sys.P()[i] * vort.b[i] /
                             lambda;
        if (margins.minCoeff() < -1e-12 * std::max(1.0, margins.cwiseAbs().maxCoeff())) {
            std::ostringstream msg;
            msg << "solve_t: state not admissible (worst margin " << margins.minCoeff() << ")";
            throw NotAdmissibleError(msg.str());
        }
    }

    FixedPointMap f;
    f.base.resize(n);
    f.quad.resize(n);
    f.d.resize(n);
    f.tail.resize(n);
    f.couple = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        f.base[i] = sys.R()[i] * m.a[i] / sys.P()[i];
        f.quad[i] = sys.R()[i] * sys.R()[i] * sys.alpha(i, i) * m.aij(i, i);
        f.d[i] = 4.0 * epsilon * vort.b[i] * f.quad[i] / lambda;
        f.tail[i] = epsilon * vort.b[i] / lambda;
        for (int j = 0; j < n; ++j)
            if (j != i)
                f.couple(i, j) = sys.R()[i] * sys.R()[j] * sys.alpha(i, j) * m.aij(i, j);
    }

    const double divergence_bound = 10.0 * m.volume / m.a.minCoeff();

    // Phase 1: monotone Picard from t = 0 towards the minimal fixed point.
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    int iters = 0;
    int stall = 0;
    double prev_step = std::numeric_limits<double>::infinity();
    while (iters < max_iter) {
        ++iters;
        Eigen::VectorXd t_next = f.apply(t);
        if ((t_next - t).minCoeff() < -1e-14)
            throw SolverError("solve_t: Picard iterate decreased; monotonicity violated");
        const double step = (t_next - t).cwiseAbs().maxCoeff();
        t = std::move(t_next);
        if (t.maxCoeff() > divergence_bound)
            throw SolverError("solve_t: iterates left the a-priori bound 10 |V| / min a_i");
        if (step <= tol)
            break;
        if (step >= prev_step * (1.0 - 1e-15))
            ++stall;
        else
            stall = 0;
        if (stall >= 50)
            break; // hand over to Newton
        prev_step = step;
    }
    if (iters >= max_iter)
        throw SolverError("solve_t: iteration cap reached");

    // Phase 2: damped Newton polish of F(t) = t - f(t). Skipped at zero-margin
    // roots where the sqrt derivative is singular.
    for (int round = 0; round < 40; ++round) {
        const Eigen::VectorXd b = f.B(t);
        const Eigen::VectorXd F = t - f.apply(t);
        if (F.cwiseAbs().maxCoeff() <= 1e-16 * std::max(1.0, t.cwiseAbs().maxCoeff()))
            break;
        bool singular = false;
        Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n && !singular; ++i) {
            const double disc = b[i] * b[i] - f.d[i];
            if (disc <= 1e-24 * b[i] * b[i]) {
                singular = true;
                break;
            }
            const double dfdB = (1.0 + b[i] / std::sqrt(disc)) / (2.0 * f.quad[i]);
            for (int j = 0; j < n; ++j)
                if (j != i)
                    jac(i, j) -= dfdB * f.couple(i, j);
        }
        if (singular)
            break;

        const Eigen::VectorXd step = jac.partialPivLu().solve(F);
        const double f0 = F.cwiseAbs().maxCoeff();
        bool accepted = false;
        for (double damping = 1.0; damping >= 1.0 / 1024.0; damping *= 0.5) {
            Eigen::VectorXd trial = t - damping * step;
            if (trial.minCoeff() <= 0.0 || !f.discriminants_ok(trial))
                continue;
            if ((trial - f.apply(trial)).cwiseAbs().maxCoeff() < f0) {
                t = std::move(trial);
                accepted = true;
                ++iters;
                break;
            }
        }
        if (!accepted)
            break;
    }

    ConstraintSolution cs;
    cs.t = t;
    cs.c = t.array().log();
    cs.iterations = iters;
    cs.quad_residual = f.residual(t).cwiseAbs().maxCoeff();

    // a-priori bounds: 0 < t_i <= 1 and 0 < a_i t_i <= |V|
    for (int i = 0; i < n; ++i)
        if (!(t[i] > 0.0) || t[i] > 1.0 + 1e-12 || m.a[i] * t[i] > m.volume + 1e-9)
            throw SolverError("solve_t: returned t violates the a-priori bounds");
    return cs;
}

} // namespace vortex
