#include "vortex/graph.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include <Eigen/Eigenvalues>

namespace vortex {

namespace detail {

struct GraphData {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> index;
    Eigen::VectorXd mu;
    double volume = 0.0;
    double total_edge_weight = 0.0;
    std::vector<std::vector<Neighbor>> adj;

    mutable std::once_flag laplacian_once;
    mutable Eigen::MatrixXd laplacian_matrix;
    mutable std::once_flag pinned_once;
    mutable Eigen::LDLT<Eigen::MatrixXd> pinned_ldlt;

    const Eigen::MatrixXd& weight_laplacian() const {
        std::call_once(laplacian_once, [this] {
            const int n = static_cast<int>(ids.size());
            Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
            for (int x = 0; x < n; ++x) {
                for (const Neighbor& nb : adj[x]) {
                    L(x, x) += nb.weight;
                    L(x, nb.vertex) -= nb.weight;
                }
            }
            laplacian_matrix = std::move(L);
        });
        return laplacian_matrix;
    }

    const Eigen::LDLT<Eigen::MatrixXd>& pinned_laplacian() const {
        std::call_once(pinned_once, [this] {
            // rank-one term removes the constant kernel; the sum is SPD on a connected graph
            Eigen::MatrixXd B = weight_laplacian() + (mu * mu.transpose()) / volume;
            pinned_ldlt.compute(B);
        });
        return pinned_ldlt;
    }
};

} // namespace detail

WeightedGraph::WeightedGraph(std::vector<std::string> vertex_ids,
                             std::vector<double> mu,
                             const std::vector<EdgeSpec>& edges) {
    if (vertex_ids.empty())
        throw GraphError("graph must have at least one vertex");
    if (vertex_ids.size() != mu.size())
        throw GraphError("vertex id list and measure list differ in length");

    auto data = std::make_shared<detail::GraphData>();
    const int n = static_cast<int>(vertex_ids.size());
    data->ids = std::move(vertex_ids);
    data->mu.resize(n);
    data->adj.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!data->index.emplace(data->ids[i], i).second)
            throw GraphError("duplicate vertex id: " + data->ids[i]);
        if (!(mu[i] > 0.0) || !std::isfinite(mu[i]))
            throw GraphError("measure mu must be positive and finite at vertex " + data->ids[i]);
        data->mu[i] = mu[i];
    }
    data->volume = data->mu.sum();

    std::set<std::pair<int, int>> seen;
    for (const EdgeSpec& e : edges) {
        auto iu = data->index.find(e.u);
        auto iv = data->index.find(e.v);
        if (iu == data->index.end())
            throw UnknownVertexError("edge endpoint not a vertex: " + e.u);
        if (iv == data->index.end())
            throw UnknownVertexError("edge endpoint not a vertex: " + e.v);
        const int a = iu->second, b = iv->second;
        if (a == b)
            throw GraphError("self loop at vertex " + e.u);
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw GraphError("edge weight must be positive and finite: " + e.u + "-" + e.v);
        if (!seen.emplace(std::min(a, b), std::max(a, b)).second)
            throw GraphError("duplicate edge: " + e.u + "-" + e.v);
        data->adj[a].push_back({b, e.w});
        data->adj[b].push_back({a, e.w});
        data->total_edge_weight += e.w;
    }

    // connectivity (single component under edges with w > 0)
    std::vector<char> visited(n, 0);
    std::vector<int> stack{0};
    visited[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (const Neighbor& nb : data->adj[x]) {
            if (!visited[nb.vertex]) {
                visited[nb.vertex] = 1;
                ++count;
                stack.push_back(nb.vertex);
            }
        }
    }
    if (count != n)
        throw GraphError("graph is disconnected");

    data_ = std::move(data);
}

int WeightedGraph::size() const { return static_cast<int>(data_->ids.size()); }
double WeightedGraph::volume() const { return data_->volume; }
double WeightedGraph::total_edge_weight() const { return data_->total_edge_weight; }
double WeightedGraph::measure(int v) const { return data_->mu[v]; }
const Eigen::VectorXd& WeightedGraph::measures() const { return data_->mu; }
const std::vector<std::string>& WeightedGraph::vertex_ids() const { return data_->ids; }
const std::string& WeightedGraph::vertex_id(int v) const { return data_->ids[v]; }

bool WeightedGraph::has_vertex(std::string_view id) const {
    return data_->index.find(std::string(id)) != data_->index.end();
}

int WeightedGraph::index_of(std::string_view id) const {
    auto it = data_->index.find(std::string(id));
    if (it == data_->index.end())
        throw UnknownVertexError("unknown vertex: " + std::string(id));
    return it->second;
}

const std::vector<Neighbor>& WeightedGraph::neighbors(int v) const { return data_->adj[v]; }
const Eigen::MatrixXd& WeightedGraph::weight_laplacian() const { return data_->weight_laplacian(); }
const Eigen::LDLT<Eigen::MatrixXd>& WeightedGraph::pinned_laplacian_factorization() const {
    return data_->pinned_laplacian();
}
const void* WeightedGraph::id() const { return data_.get(); }

VertexField::VertexField(const WeightedGraph& g, double fill)
    : graph_(g), values_(Eigen::VectorXd::Constant(g.size(), fill)) {}

VertexField::VertexField(const WeightedGraph& g, Eigen::VectorXd values)
    : graph_(g), values_(std::move(values)) {
    if (values_.size() != graph_.size())
        throw FieldMismatchError("field length does not match the graph's vertex count");
}

MultiField::MultiField(const WeightedGraph& g, int n, double fill) {
    if (n < 1)
        throw Error("a multi-component field needs n >= 1 components");
    components_.reserve(n);
    for (int i = 0; i < n; ++i)
        components_.emplace_back(g, fill);
}

MultiField::MultiField(std::vector<VertexField> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw Error("a multi-component field needs n >= 1 components");
    for (const VertexField& f : components_)
        if (!f.graph().same_graph(components_.front().graph()))
            throw FieldMismatchError("all components of a MultiField must share one graph");
}

double MultiField::sup_norm() const {
    double m = 0.0;
    for (const VertexField& f : components_)
        m = std::max(m, f.sup_norm());
    return m;
}

namespace {
void require_on(const WeightedGraph& g, const VertexField& u, const char* op) {
    if (!u.graph().same_graph(g))
        throw FieldMismatchError(std::string(op) + ": field was built on a different graph");
}
} // namespace

VertexField laplacian(const WeightedGraph& g, const VertexField& u) {
    require_on(g, u, "laplacian");
    VertexField out(g);
    for (int x = 0; x < g.size(); ++x) {
        double acc = 0.0;
        for (const Neighbor& nb : g.neighbors(x))
            acc += nb.weight * (u(nb.vertex) - u(x));
        out(x) = acc / g.measure(x);
    }
    return out;
}

VertexField gradient_form(const WeightedGraph& g, const VertexField& u, const VertexField& v) {
    require_on(g, u, "gradient_form");
    require_on(g, v, "gradient_form");
    VertexField out(g);
    for (int x = 0; x < g.size(); ++x) {
        double acc = 0.0;
        for (const Neighbor& nb : g.neighbors(x))
            acc += nb.weight * (u(nb.vertex) - u(x)) * (v(nb.vertex) - v(x));
        out(x) = acc / (2.0 * g.measure(x));
    }
    return out;
}

double integrate(const WeightedGraph& g, const VertexField& u) {
    require_on(g, u, "integrate");
    return g.measures().dot(u.values());
}

double dirichlet_form(const WeightedGraph& g, const VertexField& u, const VertexField& v) {
    require_on(g, u, "dirichlet_form");
    require_on(g, v, "dirichlet_form");
    // integral of Gamma(u,v) d mu collapses to one term per edge
    double acc = 0.0;
    for (int x = 0; x < g.size(); ++x)
        for (const Neighbor& nb : g.neighbors(x))
            if (nb.vertex > x)
                acc += nb.weight * (u(nb.vertex) - u(x)) * (v(nb.vertex) - v(x));
    return acc;
}

double lp_norm(const WeightedGraph& g, const VertexField& u, double p) {
    require_on(g, u, "lp_norm");
    if (!(p > 0.0))
        throw Error("lp_norm requires p > 0");
    double acc = 0.0;
    for (int x = 0; x < g.size(); ++x)
        acc += g.measure(x) * std::pow(std::abs(u(x)), p);
    return std::pow(acc, 1.0 / p);
}

VertexField project_zero_mean(const WeightedGraph& g, const VertexField& u) {
    require_on(g, u, "project_zero_mean");
    const double mean = integrate(g, u) / g.volume();
    return VertexField(g, u.values().array() - mean);
}

double spectral_gap(const WeightedGraph& g) {
    const int n = g.size();
    if (n < 2)
        throw GraphError("spectral_gap needs at least two vertices");
    const Eigen::VectorXd inv_sqrt_mu = g.measures().array().rsqrt();
    const Eigen::MatrixXd sym =
        inv_sqrt_mu.asDiagonal() * g.weight_laplacian() * inv_sqrt_mu.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error("eigenvalue computation failed");
    return es.eigenvalues()[1]; // eigenvalues ascending; [0] is the constant mode
}

} // namespace vortex
