#include "vortex/cartan.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace vortex {

const char* to_string(CartanError::Kind k) {
    switch (k) {
        case CartanError::Kind::NotSymmetric: return "NotSymmetric";
        case CartanError::Kind::BadSignPattern: return "BadSignPattern";
        case CartanError::Kind::NotPositiveDefinite: return "NotPositiveDefinite";
        case CartanError::Kind::InverseNotPositive: return "InverseNotPositive";
        case CartanError::Kind::NonpositiveR: return "NonpositiveR";
        case CartanError::Kind::PatternInconsistent: return "PatternInconsistent";
        case CartanError::Kind::ReduciblePattern: return "ReduciblePattern";
        case CartanError::Kind::InconsistentInput: return "InconsistentInput";
    }
    return "Unknown";
}

namespace {

void require_square(const Eigen::MatrixXd& K) {
    if (K.rows() == 0 || K.rows() != K.cols())
        throw CartanError(CartanError::Kind::InconsistentInput, "K must be square and nonempty");
}

constexpr double kStrictPositive = 1e-14; // strict threshold for entrywise inverse positivity

} // namespace

Eigen::VectorXd symmetrize_P(const Eigen::MatrixXd& K) {
    require_square(K);
    const int n = static_cast<int>(K.rows());

    // Symmetry of S = P^{-1} K^T means K_ji / P_i = K_ij / P_j, i.e.
    // P_j / P_i = K_ij / K_ji across every off-diagonal pair. Propagate log P
    // over a spanning tree of the nonzero pattern, then check the rest.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const bool zi = K(i, j) == 0.0, zj = K(j, i) == 0.0;
            if (zi != zj)
                throw CartanError(CartanError::Kind::PatternInconsistent,
                                  "zero pattern of K is not symmetric");
            if (!zi && K(i, j) * K(j, i) <= 0.0)
                throw CartanError(CartanError::Kind::PatternInconsistent,
                                  "K_ij and K_ji differ in sign; no positive P symmetrizes K^T");
        }

    Eigen::VectorXd logP = Eigen::VectorXd::Zero(n);
    std::vector<char> visited(n, 0);
    std::vector<int> stack{0};
    visited[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (j == i || K(i, j) == 0.0 || visited[j])
                continue;
            logP[j] = logP[i] + std::log(K(i, j) / K(j, i));
            visited[j] = 1;
            ++count;
            stack.push_back(j);
        }
    }
    if (count != n) {
        if (n == 1) {
            return Eigen::VectorXd::Ones(1);
        }
        throw CartanError(CartanError::Kind::ReduciblePattern,
                          "off-diagonal pattern of K is reducible; P is ambiguous, supply it");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i || K(i, j) == 0.0)
                continue;
            const double lhs = logP[j] - logP[i];
            const double rhs = std::log(K(i, j) / K(j, i));
            if (std::abs(lhs - rhs) > 1e-12 * (1.0 + std::abs(rhs)))
                throw CartanError(CartanError::Kind::PatternInconsistent,
                                  "ratio conditions K_ij/K_ji are mutually inconsistent");
        }

    Eigen::VectorXd P = (logP.array() - logP.minCoeff()).exp(); // min_i P_i = 1
    return P;
}

CartanSystem validate(const Eigen::MatrixXd& K, const Eigen::VectorXd& P) {
    require_square(K);
    const int n = static_cast<int>(K.rows());
    if (P.size() != n)
        throw CartanError(CartanError::Kind::InconsistentInput, "P has wrong length");
    for (int i = 0; i < n; ++i)
        if (!(P[i] > 0.0) || !std::isfinite(P[i]))
            throw CartanError(CartanError::Kind::InconsistentInput, "P must be positive diagonal");

    const double kscale = std::max(K.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXd S = P.cwiseInverse().asDiagonal() * K.transpose();

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(S(i, j) - S(j, i)) > 1e-12 * kscale)
                throw CartanError(CartanError::Kind::NotSymmetric,
                                  "K^T = P S fails: S = P^{-1} K^T is not symmetric");
    S = 0.5 * (S + S.transpose().eval()); // kill rounding asymmetry

    for (int i = 0; i < n; ++i) {
        if (!(S(i, i) > 0.0))
            throw CartanError(CartanError::Kind::BadSignPattern,
                              "diagonal entry alpha_ii of S must be positive");
        for (int j = 0; j < n; ++j)
            if (j != i && S(i, j) > kStrictPositive)
                throw CartanError(CartanError::Kind::BadSignPattern,
                                  "off-diagonal entries of S must be -alpha_ij <= 0");
    }

    // positive definiteness by symmetric factorization, pivot tolerance scaled by trace
    {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
        const double pivot_tol = 1e-12 * S.trace() / n;
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= pivot_tol)
            throw CartanError(CartanError::Kind::NotPositiveDefinite, "S is not positive definite");
    }

    CartanSystem sys;
    sys.n_ = n;
    sys.K_ = K;
    sys.P_ = P;
    sys.S_ = S;

    const Eigen::MatrixXd S_inv = S.inverse();
    if (S_inv.minCoeff() <= kStrictPositive)
        throw CartanError(CartanError::Kind::InverseNotPositive,
                          "an entry of S^{-1} is not strictly positive");

    sys.KT_inv_ = S_inv * P.cwiseInverse().asDiagonal(); // (K^T)^{-1} = S^{-1} P^{-1}
    sys.R_ = sys.KT_inv_.rowwise().sum();
    if (sys.R_.minCoeff() <= 0.0)
        throw CartanError(CartanError::Kind::NonpositiveR,
                          "a row sum R_i of (K^T)^{-1} is not positive");

    sys.A_ = P.cwiseInverse().asDiagonal() * S_inv * P.cwiseInverse().asDiagonal();
    sys.Q_ = sys.R_.asDiagonal() * S * sys.R_.asDiagonal();

    const Eigen::MatrixXd Q_inv = sys.Q_.inverse();
    if (Q_inv.minCoeff() <= kStrictPositive)
        throw CartanError(CartanError::Kind::InverseNotPositive,
                          "an entry of Q^{-1} is not strictly positive");

    return sys;
}

CartanSystem validate(const Eigen::MatrixXd& K) { return validate(K, symmetrize_P(K)); }

double lambda0(const CartanSystem& sys, const VortexData& vort, double volume) {
    if (!(volume > 0.0))
        throw Error("lambda0 requires volume > 0");
    const Eigen::VectorXd Pinv = sys.P().cwiseInverse();
    const double num = Pinv.dot(sys.KT_inverse() * vort.N.cast<double>());
    const double den = Pinv.dot(sys.R());
    return 16.0 * std::numbers::pi / volume * num / den;
}

VortexData make_vortex(const CartanSystem& sys, const WeightedGraph& g,
                       const Eigen::VectorXi& N, std::vector<std::vector<int>> points) {
    const int n = sys.rank();
    if (N.size() != n || static_cast<int>(points.size()) != n)
        throw CartanError(CartanError::Kind::InconsistentInput,
                          "vortex data must have one entry per component");
    for (int i = 0; i < n; ++i) {
        if (N[i] < 0)
            throw CartanError(CartanError::Kind::InconsistentInput, "N_i must be nonnegative");
        if (static_cast<int>(points[i].size()) != N[i]) {
            std::ostringstream msg;
            msg << "component " << i << ": " << points[i].size() << " vortex points but N_i = "
                << N[i];
            throw CartanError(CartanError::Kind::InconsistentInput, msg.str());
        }
        for (int p : points[i])
            if (p < 0 || p >= g.size())
                throw UnknownVertexError("vortex point index out of range");
    }
    VortexData vort;
    vort.N = N;
    vort.points = std::move(points);
    vort.b = 4.0 * std::numbers::pi * sys.A() * N.cast<double>();
    return vort;
}

VortexData make_vortex(const CartanSystem& sys, const WeightedGraph& g,
                       std::vector<std::vector<int>> points) {
    Eigen::VectorXi N(static_cast<int>(points.size()));
    for (int i = 0; i < N.size(); ++i)
        N[i] = static_cast<int>(points[i].size());
    return make_vortex(sys, g, N, std::move(points));
}

CartanPreset cartan_preset(const std::string& name) {
    CartanPreset p;
    if (name == "A1") {
        p.K = Eigen::MatrixXd::Constant(1, 1, 2.0);
        p.P = Eigen::VectorXd::Constant(1, 2.0);
    } else if (name == "A2") {
        p.K.resize(2, 2);
        p.K << 2, -1, -1, 2;
        p.P = Eigen::VectorXd::Ones(2);
    } else if (name == "B2") {
        p.K.resize(2, 2);
        p.K << 2, -1, -2, 2;
        p.P.resize(2);
        p.P << 2, 1;
    } else if (name == "G2") {
        p.K.resize(2, 2);
        p.K << 2, -1, -3, 2;
        p.P.resize(2);
        p.P << 3, 1;
    } else {
        throw Error("unknown preset: " + name + " (expected A1, A2, B2 or G2)");
    }
    return p;
}

} // namespace vortex
