#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/errors.hpp"
#include "vortex/graph.hpp"

namespace vortex {

/// Coupling-matrix data: the decomposition K^T = P S with its sign and
/// positivity structure, and the derived matrices
///   R_i = sum_j ((K^T)^{-1})_ij,   A = P^{-1} S^{-1} P^{-1},   Q = R S R.
/// Built by validate(); immutable afterwards.
class CartanSystem {
public:
    int rank() const { return n_; }
    const Eigen::MatrixXd& K() const { return K_; }
    const Eigen::VectorXd& P() const { return P_; }
    const Eigen::MatrixXd& S() const { return S_; }
    const Eigen::VectorXd& R() const { return R_; }
    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& Q() const { return Q_; }
    const Eigen::MatrixXd& KT_inverse() const { return KT_inv_; }

    /// alpha_ii = S_ii, alpha_ij = -S_ij for i != j; all >= 0.
    double alpha(int i, int j) const { return i == j ? S_(i, i) : -S_(i, j); }

private:
    friend CartanSystem validate(const Eigen::MatrixXd&, const Eigen::VectorXd&);
    int n_ = 0;
    Eigen::MatrixXd K_, S_, A_, Q_, KT_inv_;
    Eigen::VectorXd P_, R_;
};

/// Vortex multiplicities N_i, per-component vertex multisets, and b = 4 pi A N.
struct VortexData {
    Eigen::VectorXi N;
    std::vector<std::vector<int>> points; // vertex indices, repeats allowed
    Eigen::VectorXd b;

    int total() const { return N.sum(); }
};

/// Recover the positive diagonal P (normalized to min_i P_i = 1) that makes
/// S = P^{-1} K^T symmetric. Requires a symmetric zero pattern and an
/// irreducible (connected) off-diagonal pattern; throws CartanError otherwise.
Eigen::VectorXd symmetrize_P(const Eigen::MatrixXd& K);

/// Build S = P^{-1} K^T and check every structure condition:
/// symmetry, sign pattern, positive definiteness, entrywise positivity of
/// S^{-1} and Q^{-1}, positivity of R. Throws CartanError naming the
/// violated condition. On success returns the fully derived system.
CartanSystem validate(const Eigen::MatrixXd& K, const Eigen::VectorXd& P);

/// validate() with P recovered by symmetrize_P.
CartanSystem validate(const Eigen::MatrixXd& K);

/// Necessary-condition threshold
///   lambda0 = (16 pi / |V|) * (sum_ij P_i^{-1} (K^{-1})_ji N_j) / (sum_ij P_i^{-1} (K^{-1})_ji).
double lambda0(const CartanSystem& sys, const VortexData& vort, double volume);

/// Validate counts and vertices, attach b = 4 pi A N.
VortexData make_vortex(const CartanSystem& sys, const WeightedGraph& g,
                       const Eigen::VectorXi& N, std::vector<std::vector<int>> points);

/// N inferred from the multiset sizes.
VortexData make_vortex(const CartanSystem& sys, const WeightedGraph& g,
                       std::vector<std::vector<int>> points);

struct CartanPreset {
    Eigen::MatrixXd K;
    Eigen::VectorXd P;
};

/// Built-in presets: "A1", "A2", "B2", "G2". Throws on unknown name.
CartanPreset cartan_preset(const std::string& name);

} // namespace vortex
