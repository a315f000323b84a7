#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "vortex/errors.hpp"

namespace vortex {

struct EdgeSpec {
    std::string u;
    std::string v;
    double w = 1.0;
};

struct Neighbor {
    int vertex;
    double weight;
};

namespace detail {
struct GraphData;
}

/// Connected finite graph with positive symmetric edge weights and a positive
/// vertex measure. Immutable after construction; cheap to copy (shared state).
/// Vertices are identified by opaque strings and indexed densely in insertion order.
class WeightedGraph {
public:
    /// Empty handle; only valid as a placeholder to assign over.
    WeightedGraph() = default;

    /// Validates everything: positive mu and w, no self loops, no duplicate
    /// edges or vertex ids, known endpoints, connectivity.
    WeightedGraph(std::vector<std::string> vertex_ids,
                  std::vector<double> mu,
                  const std::vector<EdgeSpec>& edges);

    int size() const;
    double volume() const;                 // |V| = sum_x mu(x)
    double total_edge_weight() const;      // sum over stored edges of w_xy
    double measure(int v) const;
    const Eigen::VectorXd& measures() const;
    const std::vector<std::string>& vertex_ids() const;
    const std::string& vertex_id(int v) const;

    bool has_vertex(std::string_view id) const;
    int index_of(std::string_view id) const;  // throws UnknownVertexError

    const std::vector<Neighbor>& neighbors(int v) const;

    /// Weight Laplacian matrix L = D - W (positive semidefinite, kernel = constants).
    /// The calculus operator is  (Delta u)(x) = -(L u)(x) / mu(x).
    const Eigen::MatrixXd& weight_laplacian() const;

    /// Dense factorization of L + (mu mu^T)/|V|, the Laplacian with its kernel
    /// pinned by the mean-zero constraint. Computed once per graph, safe to
    /// reuse concurrently afterwards.
    const Eigen::LDLT<Eigen::MatrixXd>& pinned_laplacian_factorization() const;

    /// Identity of the underlying storage; fields check this to detect mismatched graphs.
    const void* id() const;

    bool same_graph(const WeightedGraph& other) const { return id() == other.id(); }

private:
    std::shared_ptr<const detail::GraphData> data_;
};

/// Real-valued function on every vertex of one graph. Dense storage in vertex order.
class VertexField {
public:
    /// Empty placeholder tied to no graph.
    VertexField() = default;

    explicit VertexField(const WeightedGraph& g, double fill = 0.0);
    VertexField(const WeightedGraph& g, Eigen::VectorXd values);

    const WeightedGraph& graph() const { return graph_; }
    int size() const { return static_cast<int>(values_.size()); }

    double operator()(int v) const { return values_[v]; }
    double& operator()(int v) { return values_[v]; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }

    double max() const { return values_.maxCoeff(); }
    double min() const { return values_.minCoeff(); }
    double sup_norm() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

private:
    WeightedGraph graph_;
    Eigen::VectorXd values_;
};

/// n-component stack of fields over one shared graph, n >= 1.
class MultiField {
public:
    /// Empty placeholder with no components.
    MultiField() = default;

    MultiField(const WeightedGraph& g, int n, double fill = 0.0);
    explicit MultiField(std::vector<VertexField> components);

    const WeightedGraph& graph() const { return components_.front().graph(); }
    int rank() const { return static_cast<int>(components_.size()); }

    VertexField& operator[](int i) { return components_[i]; }
    const VertexField& operator[](int i) const { return components_[i]; }

    double sup_norm() const;

private:
    std::vector<VertexField> components_;
};

// --- discrete calculus -------------------------------------------------------

/// (Delta u)(x) = (1/mu(x)) sum_{y~x} w_yx (u(y) - u(x)).
VertexField laplacian(const WeightedGraph& g, const VertexField& u);

/// Gamma(u,v)(x) = (1/2 mu(x)) sum_{y~x} w_xy (u(y)-u(x)) (v(y)-v(x)).
VertexField gradient_form(const WeightedGraph& g, const VertexField& u, const VertexField& v);

/// integral of u over V: sum_x mu(x) u(x).
double integrate(const WeightedGraph& g, const VertexField& u);

/// Dirichlet form: integral of Gamma(u,v) d mu, accumulated per edge.
double dirichlet_form(const WeightedGraph& g, const VertexField& u, const VertexField& v);

/// (integral of |u|^p d mu)^{1/p}, p > 0.
double lp_norm(const WeightedGraph& g, const VertexField& u, double p);

/// u minus its mean value (integral u / |V|); integrates to zero.
VertexField project_zero_mean(const WeightedGraph& g, const VertexField& u);

/// Smallest nonzero eigenvalue of -Delta in the mu-weighted inner product,
/// computed on the symmetrized matrix M^{-1/2} L M^{-1/2}. The constant in the
/// Poincare inequality for zero-mean fields is 1/spectral_gap.
double spectral_gap(const WeightedGraph& g);

} // namespace vortex
