#include "vortex/minimizer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kArmijoC1 = 1e-4;

void check_exponent(double e, const char* where) {
    if (std::abs(e) > 700.0)
        throw NumericRangeError(std::string(where) + ": exponent out of numeric range");
}

// U_i(x) = exp(u_i^0(x) + v_i(x)) for all components at once
Eigen::MatrixXd exponentials(const ProblemInstance& p, const MultiField& v, const char* where) {
    const int n = p.sys.rank();
    Eigen::MatrixXd U(n, p.g.size());
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < p.g.size(); ++x) {
            const double e = p.bg.u0[i](x) + v[i](x);
            check_exponent(e, where);
            U(i, x) = std::exp(e);
        }
    return U;
}

double mu_inner(const WeightedGraph& g, const MultiField& a, const MultiField& b) {
    double acc = 0.0;
    for (int i = 0; i < a.rank(); ++i)
        acc += integrate(g, VertexField(g, a[i].values().cwiseProduct(b[i].values())));
    return acc;
}

struct EvalState {
    MultiField w;
    Moments m;
    Eigen::VectorXd margins;
    ConstraintSolution cs;
    double J = 0.0;
};

EvalState eval_state(const ProblemInstance& p, const MultiField& w, double solve_t_tol) {
    EvalState st{w, {}, {}, {}, 0.0};
    st.m = moments(p.bg, w);
    const AdmissibilityReport rep = admissible(p.sys, p.vort, st.m, p.lambda);
    st.margins = rep.margins;
    if (!rep.admissible) {
        std::ostringstream msg;
        msg << "state not admissible (worst margin " << rep.margins.minCoeff() << ")";
        throw NotAdmissibleError(msg.str());
    }
    st.cs = solve_t(p.sys, p.vort, st.m, p.lambda, solve_t_tol);

    // expanded form of J(w) = I(w + c(w))
    const int n = p.sys.rank();
    double term_grad = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            term_grad += p.sys.A()(k, j) * dirichlet_form(p.g, w[k], w[j]);
    double term_mass = 0.0;
    double term_c = 0.0;
    for (int i = 0; i < n; ++i) {
        term_mass += p.sys.R()[i] / p.sys.P()[i] * (p.g.volume() - st.cs.t[i] * st.m.a[i]);
        term_c += p.vort.b[i] * st.cs.c[i];
    }
    st.J = 0.5 * term_grad + 0.5 * p.lambda * term_mass + term_c - 0.5 * p.vort.b.sum();
    return st;
}

MultiField grad_from_state(const ProblemInstance& p, const EvalState& st) {
    const int n = p.sys.rank();
    const WeightedGraph& g = p.g;

    MultiField v = st.w;
    for (int i = 0; i < n; ++i)
        v[i].values().array() += st.cs.c[i];
    const Eigen::MatrixXd U = exponentials(p, v, "grad_J");

    // Delta v = Delta w: the constants drop out of the Laplacian
    std::vector<VertexField> lap;
    lap.reserve(n);
    for (int i = 0; i < n; ++i)
        lap.push_back(laplacian(g, st.w[i]));

    MultiField grad(g, n);
    for (int x = 0; x < g.size(); ++x) {
        for (int i = 0; i < n; ++i) {
            double a_lap = 0.0;
            double qu = 0.0;
            for (int j = 0; j < n; ++j) {
                a_lap += p.sys.A()(i, j) * lap[j](x);
                qu += p.sys.Q()(i, j) * (U(j, x) - 1.0);
            }
            grad[i](x) = -a_lap + p.lambda * U(i, x) * qu + p.vort.b[i] / g.volume();
        }
    }
    for (int i = 0; i < n; ++i)
        grad[i] = project_zero_mean(g, grad[i]);
    return grad;
}

MultiField project_all(const WeightedGraph& g, const MultiField& w) {
    MultiField out = w;
    for (int i = 0; i < out.rank(); ++i)
        out[i] = project_zero_mean(g, out[i]);
    return out;
}

} // namespace

ProblemInstance make_problem(const WeightedGraph& g, const CartanSystem& sys,
                             const VortexData& vort, double lambda) {
    if (!(lambda > 0.0))
        throw Error("make_problem: lambda must be positive");
    if (vort.N.size() != sys.rank())
        throw CartanError(CartanError::Kind::InconsistentInput,
                          "vortex data rank differs from the system rank");
    ProblemInstance p{g, sys, vort, background(g, vort), lambda, 0.0};
    p.lambda0_value = lambda0(sys, vort, g.volume());
    return p;
}

SeedStrategy seed_strategy_from_string(const std::string& name) {
    if (name == "neg-u0") return SeedStrategy::NegU0;
    if (name == "abelian") return SeedStrategy::Abelian;
    if (name == "zero") return SeedStrategy::Zero;
    throw Error("unknown seed strategy: " + name + " (expected neg-u0, abelian or zero)");
}

const char* to_string(SeedStrategy s) {
    switch (s) {
        case SeedStrategy::NegU0: return "neg-u0";
        case SeedStrategy::Abelian: return "abelian";
        case SeedStrategy::Zero: return "zero";
    }
    return "unknown";
}

const char* to_string(MinimizeStatus s) {
    switch (s) {
        case MinimizeStatus::Converged: return "Converged";
        case MinimizeStatus::MaxIter: return "MaxIter";
        case MinimizeStatus::LineSearchFail: return "LineSearchFail";
        case MinimizeStatus::BoundaryStagnation: return "BoundaryStagnation";
    }
    return "unknown";
}

double energy_I(const ProblemInstance& p, const MultiField& v) {
    const int n = p.sys.rank();
    double term_grad = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            term_grad += p.sys.A()(k, j) * dirichlet_form(p.g, v[k], v[j]);

    const Eigen::MatrixXd U = exponentials(p, v, "energy_I");
    double term_quad = 0.0;
    for (int x = 0; x < p.g.size(); ++x) {
        double qf = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                qf += (U(j, x) - 1.0) * p.sys.Q()(j, k) * (U(k, x) - 1.0);
        term_quad += p.g.measure(x) * qf;
    }

    double term_lin = 0.0;
    for (int i = 0; i < n; ++i)
        term_lin += p.vort.b[i] * integrate(p.g, v[i]) / p.g.volume();

    return 0.5 * term_grad + 0.5 * p.lambda * term_quad + term_lin;
}

double functional_J(const ProblemInstance& p, const MultiField& w) {
    return eval_state(p, w, 1e-12).J;
}

MultiField grad_J(const ProblemInstance& p, const MultiField& w) {
    return grad_from_state(p, eval_state(p, w, 1e-12));
}

MultiField seed(const ProblemInstance& p, SeedStrategy strategy, double abelian_r) {
    const int n = p.sys.rank();
    switch (strategy) {
        case SeedStrategy::Zero:
            return MultiField(p.g, n);
        case SeedStrategy::NegU0: {
            MultiField w(p.g, n);
            for (int i = 0; i < n; ++i)
                w[i] = VertexField(p.g, -p.bg.u0[i].values());
            return w;
        }
        case SeedStrategy::Abelian: {
            const double r = abelian_r > 0.0 ? abelian_r : 10.0 * p.lambda;
            MultiField w(p.g, n);
            for (int i = 0; i < n; ++i) {
                if (p.vort.N[i] == 0)
                    continue; // scalar equation is solved by v = 0
                AbelianProblem ap = make_abelian_problem(p.g, p.vort.points[i], r);
                AbelianSolution sol = monotone_solve(ap);
                if (!sol.converged) {
                    std::ostringstream msg;
                    msg << "abelian seed solver failed at coupling r = " << r << " in component "
                        << i;
                    throw SolverError(msg.str());
                }
                w[i] = project_zero_mean(p.g, sol.v);
            }
            return w;
        }
    }
    throw Error("unreachable seed strategy");
}

std::pair<double, double> check_identities(const ProblemInstance& p, const MultiField& v) {
    const int n = p.sys.rank();
    const Eigen::MatrixXd U = exponentials(p, v, "check_identities");
    const Eigen::VectorXd& mu = p.g.measures();

    Eigen::VectorXd integral_uq = Eigen::VectorXd::Zero(n);
    double quad_half = 0.0;
    for (int x = 0; x < p.g.size(); ++x) {
        for (int i = 0; i < n; ++i) {
            double qu = 0.0;
            double qh = 0.0;
            for (int j = 0; j < n; ++j) {
                qu += p.sys.Q()(i, j) * (U(j, x) - 1.0);
                qh += p.sys.Q()(i, j) * (U(j, x) - 0.5);
            }
            integral_uq[i] += mu[x] * U(i, x) * qu;
            quad_half += mu[x] * (U(i, x) - 0.5) * qh;
        }
    }

    const double err_310 =
        (integral_uq + p.vort.b / p.lambda).cwiseAbs().maxCoeff();

    const Eigen::VectorXd Pinv = p.sys.P().cwiseInverse();
    const double rhs_313 = 0.25 * p.g.volume() * Pinv.dot(p.sys.R()) -
                           4.0 * kPi / p.lambda *
                               Pinv.dot(p.sys.KT_inverse() * p.vort.N.cast<double>());
    const double err_313 = std::abs(quad_half - rhs_313);
    return {err_310, err_313};
}

double system_residual(const ProblemInstance& p, const MultiField& v) {
    const int n = p.sys.rank();
    const Eigen::MatrixXd U = exponentials(p, v, "system_residual");
    const Eigen::MatrixXd Ktilde = p.sys.K().transpose() * p.sys.R().asDiagonal();

    std::vector<VertexField> lap;
    lap.reserve(n);
    for (int i = 0; i < n; ++i)
        lap.push_back(laplacian(p.g, v[i]));

    double res = 0.0;
    for (int x = 0; x < p.g.size(); ++x) {
        const Eigen::VectorXd e = U.col(x);
        const Eigen::VectorXd rhs = Ktilde * (e.cwiseProduct(Ktilde * e) - e);
        for (int i = 0; i < n; ++i) {
            const double r =
                lap[i](x) - p.lambda * rhs[i] - 4.0 * kPi * p.vort.N[i] / p.g.volume();
            res = std::max(res, std::abs(r));
        }
    }
    return res;
}

SolveReport minimize(const ProblemInstance& p, const MinimizeOptions& opts) {
    const int n = p.sys.rank();
    const WeightedGraph& g = p.g;

    if (!(p.lambda > p.lambda0_value)) {
        std::ostringstream msg;
        msg << "lambda = " << p.lambda << " is at or below the necessary existence threshold "
            << "lambda0 = " << p.lambda0_value << "; the system has no solution there";
        throw LambdaBelowThresholdError(p.lambda, p.lambda0_value, msg.str());
    }

    auto required_lambda = [&](const Moments& m) {
        double req = 0.0;
        for (int i = 0; i < n; ++i)
            req = std::max(req, 4.0 * p.sys.alpha(i, i) * p.sys.P()[i] * p.sys.P()[i] *
                                    p.vort.b[i] * m.aij(i, i) / (m.a[i] * m.a[i]));
        return req;
    };

    // seed: requested strategy, with the abelian fallback on the default path
    MultiField w(g, n);
    EvalState st{w, {}, {}, {}, 0.0};
    {
        bool seeded = false;
        std::vector<SeedStrategy> plan{opts.strategy};
        if (!opts.strategy_explicit && opts.strategy == SeedStrategy::NegU0)
            plan.push_back(SeedStrategy::Abelian);
        std::string last_error;
        double req = 0.0;
        for (SeedStrategy s : plan) {
            try {
                w = seed(p, s, opts.abelian_seed_r);
                st = eval_state(p, w, opts.solve_t_tol);
                seeded = true;
                break;
            } catch (const NotAdmissibleError& e) {
                last_error = e.what();
                req = std::max(req, required_lambda(moments(p.bg, w)));
            } catch (const SolverError& e) {
                last_error = e.what();
            }
        }
        if (!seeded) {
            std::ostringstream msg;
            msg << "no admissible seed found (" << last_error << ")";
            if (req > 0.0)
                msg << "; the tried seed becomes admissible for lambda >= " << req;
            throw SeedNotAdmissibleError(req, msg.str());
        }
    }

    MultiField grad = grad_from_state(p, st);
    MultiField direction(g, n);
    MultiField prev_grad(g, n);
    MultiField prev_w(g, n);
    bool have_prev = false;
    bool have_direction = false;
    double step_size = 1.0 / (1.0 + p.lambda);
    const int restart_period = 10 * n * g.size();
    int since_restart = 0;
    int boundary_rejections = 0;

    SolveReport rep;
    rep.lambda = p.lambda;
    rep.lambda0 = p.lambda0_value;
    rep.status = MinimizeStatus::MaxIter;

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const double gnorm = grad.sup_norm();
        if (gnorm <= opts.tol && st.cs.quad_residual <= opts.constraint_tol) {
            rep.status = MinimizeStatus::Converged;
            rep.converged = true;
            break;
        }

        // direction: steepest descent, optionally bent by Polak-Ribiere CG
        double beta = 0.0;
        if (opts.use_cg && have_direction && since_restart < restart_period) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i) {
                num += integrate(g, VertexField(g, grad[i].values().cwiseProduct(
                                                       grad[i].values() - prev_grad[i].values())));
                den += integrate(g, VertexField(g, prev_grad[i].values().cwiseProduct(
                                                       prev_grad[i].values())));
            }
            beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
        }
        MultiField d(g, n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd dir = -grad[i].values();
            if (beta != 0.0)
                dir += beta * direction[i].values();
            d[i] = VertexField(g, std::move(dir));
        }
        double slope = mu_inner(g, grad, d);
        if (!(slope < 0.0)) { // not a descent direction: reset to steepest descent
            for (int i = 0; i < n; ++i)
                d[i] = VertexField(g, -grad[i].values());
            slope = -mu_inner(g, grad, grad);
            since_restart = 0;
        }

        // Barzilai-Borwein initial step
        if (have_prev) {
            double sy = 0.0, ss = 0.0;
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd dw = st.w[i].values() - prev_w[i].values();
                const Eigen::VectorXd dg = grad[i].values() - prev_grad[i].values();
                sy += (g.measures().array() * dw.array() * dg.array()).sum();
                ss += (g.measures().array() * dw.array() * dw.array()).sum();
            }
            if (sy > 0.0 && ss > 0.0)
                step_size = std::min(std::max(ss / sy, 1e-14), 1e6);
            else
                step_size = std::min(step_size * 2.0, 1e6);
        }

        prev_w = st.w;
        prev_grad = grad;

        bool accepted = false;
        bool saw_boundary = false;
        double s = step_size;
        for (int h = 0; h <= opts.armijo_max_halvings; ++h, s *= 0.5) {
            MultiField w_trial(g, n);
            for (int i = 0; i < n; ++i)
                w_trial[i] = VertexField(g, st.w[i].values() + s * d[i].values());
            w_trial = project_all(g, w_trial);
            EvalState st_trial{w_trial, {}, {}, {}, 0.0};
            try {
                st_trial = eval_state(p, w_trial, opts.solve_t_tol);
            } catch (const NotAdmissibleError&) {
                saw_boundary = true;
                ++boundary_rejections;
                continue;
            } catch (const NumericRangeError&) {
                continue;
            }
            if (st_trial.J <= st.J + kArmijoC1 * s * slope + 1e-15 * (1.0 + std::abs(st.J))) {
                st = std::move(st_trial);
                accepted = true;
                step_size = s;
                break;
            }
        }

        if (!accepted) {
            rep.status = (saw_boundary && boundary_rejections >= 100)
                             ? MinimizeStatus::BoundaryStagnation
                             : MinimizeStatus::LineSearchFail;
            break;
        }

        grad = grad_from_state(p, st);
        direction = std::move(d);
        have_direction = true;
        have_prev = true;
        ++since_restart;
        if (since_restart >= restart_period)
            since_restart = 0, have_direction = false;
    }
    if (iter >= opts.max_iter)
        rep.status = MinimizeStatus::MaxIter;

    // assemble the report from the last state
    rep.iterations = iter;
    rep.w = st.w;
    rep.t = st.cs.t;
    rep.c = st.cs.c;
    rep.admissible_margins = st.margins;
    rep.J_value = st.J;
    rep.grad_norm = grad.sup_norm();

    MultiField v = st.w;
    for (int i = 0; i < n; ++i)
        v[i].values().array() += st.cs.c[i];
    rep.v = v;
    MultiField u_hat = v;
    for (int i = 0; i < n; ++i)
        u_hat[i] = VertexField(g, p.bg.u0[i].values() + v[i].values());
    rep.u_hat = u_hat;
    MultiField u_orig = u_hat;
    for (int i = 0; i < n; ++i)
        u_orig[i].values().array() += std::log(p.sys.R()[i]);
    rep.u_orig = u_orig;

    rep.residual_inf = system_residual(p, v);
    const auto ids = check_identities(p, v);
    rep.identity_310_err = ids.first;
    rep.identity_313_err = ids.second;

    switch (rep.status) {
        case MinimizeStatus::Converged:
            rep.message = "converged";
            break;
        case MinimizeStatus::MaxIter:
            rep.message = "iteration cap reached before the gradient tolerance";
            break;
        case MinimizeStatus::LineSearchFail:
            rep.message = "line search could not make progress";
            break;
        case MinimizeStatus::BoundaryStagnation:
            rep.message = "steps kept leaving the admissible set; lambda is likely too small";
            break;
    }
    return rep;
}

} // namespace vortex
