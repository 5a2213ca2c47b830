#include "hypnet/netgraph.hpp"

namespace hypnet {

MetricGraph MetricGraph::build(const GraphSpec& spec) {
    MetricGraph g;
    for (const auto& v : spec.vertices) {
        if (g.vindex_.count(v)) throw Error(ErrorCode::InvalidParameter, "duplicate vertex id '" + v + "'");
        g.vindex_[v] = static_cast<int>(g.vertices_.size());
        g.vertices_.push_back(v);
    }
    for (const auto& es : spec.edges) {
        if (g.eindex_.count(es.id)) throw Error(ErrorCode::InvalidParameter, "duplicate edge id '" + es.id + "'");
        if (!(es.length > 0.0))
            throw Error(ErrorCode::NonPositiveLength, "edge '" + es.id + "': length must be positive");
        if (es.dim < 1)
            throw Error(ErrorCode::ZeroFiberDimension, "edge '" + es.id + "': fiber dimension must be >= 1");
        auto t = g.vindex_.find(es.tail);
        auto h = g.vindex_.find(es.head);
        if (t == g.vindex_.end() || h == g.vindex_.end())
            throw Error(ErrorCode::DanglingEndpoint, "edge '" + es.id + "': endpoint '" +
                                                         (t == g.vindex_.end() ? es.tail : es.head) +
                                                         "' is not a vertex");
        if (t->second == h->second)
            throw Error(ErrorCode::SelfLoop, "edge '" + es.id + "': self-loop at '" + es.tail +
                                                 "' (subdivide with an extra vertex)");
        Edge e{es.id, t->second, h->second, es.length, es.dim};
        g.eindex_[es.id] = static_cast<int>(g.edges_.size());
        g.edge_offset_.push_back(g.k_);
        g.k_ += es.dim;
        g.edges_.push_back(e);
    }
    return g;
}

int MetricGraph::vertex_index(const std::string& id) const {
    auto it = vindex_.find(id);
    if (it == vindex_.end()) throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + id + "'");
    return it->second;
}

int MetricGraph::edge_index(const std::string& id) const {
    auto it = eindex_.find(id);
    if (it == eindex_.end()) throw Error(ErrorCode::InvalidParameter, "unknown edge '" + id + "'");
    return it->second;
}

int MetricGraph::kv(int v) const {
    int s = 0;
    for (const auto& sl : trace_layout(v)) s += edges_[sl.edge].dim;
    return s;
}

std::vector<Slot> MetricGraph::trace_layout(int v) const {
    if (v < 0 || v >= num_vertices()) throw Error(ErrorCode::UnknownVertex, "vertex index out of range");
    std::vector<Slot> out;
    int off = 0;
    for (int e = 0; e < num_edges(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.tail == v || ed.head == v) {
            out.push_back({e, off, ed.head == v ? End::Terminal : End::Initial});
            off += ed.dim;
        }
    }
    return out;
}

GraphSpec MetricGraph::spec() const {
    GraphSpec s;
    s.vertices = vertices_;
    for (const auto& e : edges_) s.edges.push_back({e.id, vertices_[e.tail], vertices_[e.head], e.length, e.dim});
    return s;
}

IncidenceMatrices incidence(const MetricGraph& g) {
    IncidenceMatrices m;
    m.plus = Eigen::MatrixXi::Zero(g.num_vertices(), g.num_edges());
    m.minus = Eigen::MatrixXi::Zero(g.num_vertices(), g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        m.plus(g.edge(e).head, e) = 1;
        m.minus(g.edge(e).tail, e) = 1;
    }
    return m;
}

}  // namespace hypnet
