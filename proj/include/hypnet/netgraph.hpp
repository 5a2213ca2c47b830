#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypnet/core.hpp"

namespace hypnet {

enum class End { Initial, Terminal };

inline int iota_sign(End e) { return e == End::Terminal ? 1 : -1; }
inline const char* end_name(End e) { return e == End::Terminal ? "terminal" : "initial"; }

struct EdgeSpec {
    std::string id;
    std::string tail;
    std::string head;
    double length = 1.0;
    int dim = 1;
};

struct GraphSpec {
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
};

struct Edge {
    std::string id;
    int tail = 0;
    int head = 0;
    double length = 1.0;
    int dim = 1;
};

// One block of a trace vector: which edge, where it starts, and which endpoint.
struct Slot {
    int edge = 0;
    int offset = 0;
    End end = End::Initial;
};

struct IncidenceMatrices {
    Eigen::MatrixXi plus;   // |V| x |E|, 1 where v is the terminal endpoint
    Eigen::MatrixXi minus;  // 1 where v is the initial endpoint
    Eigen::MatrixXi signed_() const { return plus - minus; }
};

class MetricGraph {
public:
    static MetricGraph build(const GraphSpec& spec);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(e); }
    const std::string& vertex_id(int v) const { return vertices_.at(v); }
    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    // Total fiber dimension k and per-vertex k_v.
    int k() const { return k_; }
    int kv(int v) const;
    // Offset of edge e inside C^k (edges ascending).
    int edge_offset(int e) const { return edge_offset_.at(e); }

    // Incident edges in ascending edge order with the endpoint at v.
    std::vector<Slot> trace_layout(int v) const;
    std::vector<Slot> trace_layout(const std::string& v) const { return trace_layout(vertex_index(v)); }

    GraphSpec spec() const;

private:
    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;
    std::map<std::string, int> vindex_;
    std::map<std::string, int> eindex_;
    std::vector<int> edge_offset_;
    int k_ = 0;
};

IncidenceMatrices incidence(const MetricGraph& g);

}  // namespace hypnet
