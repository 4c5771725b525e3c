#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "graphlag/chain.hpp"
#include "graphlag/errors.hpp"

namespace graphlag {

// Semi-infinite ray of unit edges attached at a core vertex. Site 0 is the
// attach vertex itself; the ray is oriented outward. `coupling` is the
// mixed second derivative of the nearest-neighbor potential along the ray
// (the free difference form (x_{n+1}-x_n)^2/2 gives -1).
struct TailSpec {
    std::string name;
    int attach = -1;
    double coupling = -1.0;
};

// Finite graph with optional tails. Vertex and edge insertion order is the
// canonical order for every deterministic tie-break downstream (BFS visit
// order, spanning trees, cycle bases).
class Graph {
public:
    int add_vertex(std::string name);
    int add_edge(int u, int v);
    int add_edge(std::string_view u, std::string_view v);
    int add_tail(std::string name, int attach, double coupling = -1.0);
    int add_tail(std::string name, std::string_view attach, double coupling = -1.0);

    int vertex_count() const { return static_cast<int>(names_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int tail_count() const { return static_cast<int>(tails_.size()); }

    int vertex(std::string_view name) const;  // throws UnknownVertexError
    std::optional<int> find_vertex(std::string_view name) const;
    const std::string& vertex_name(int v) const { return names_.at(v); }

    std::pair<int, int> edge(int e) const { return edges_.at(e); }
    const TailSpec& tail(int t) const { return tails_.at(t); }

    // Oriented lookup: returns (edge index, +1) if stored as (u,v) and
    // (edge index, -1) if stored as (v,u).
    std::optional<std::pair<int, int>> find_edge(int u, int v) const;

    // (neighbor, edge index) in canonical order.
    const std::vector<std::pair<int, int>>& adjacency(int v) const { return adj_.at(v); }

    int core_degree(int v) const { return static_cast<int>(adj_.at(v).size()); }
    int degree(int v) const { return core_degree(v) + tail_degree_.at(v); }
    std::vector<int> tails_at(int v) const;

    bool connected() const;
    // Vertices with total degree < 2 ("ends" in the no-ends validation).
    std::vector<int> end_vertices() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<TailSpec> tails_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::vector<int> tail_degree_;
};

// Breadth-first geodesic distance; all edges have length 1.
int distance(const Graph& g, int u, int v);

// Max pairwise distance of a nonempty vertex set.
int set_diameter(const Graph& g, const std::vector<int>& s);

// Linear boundary operator: an oriented edge (P -> Q) with coefficient a
// contributes a*Q - a*P; a tail with coefficient a contributes -a*(attach).
Chain0 boundary(const Graph& g, const Chain1& c);

// Basis of the locally finite 1-cycles: fundamental cycles of a BFS spanning
// tree plus one tail-pair cycle per tail beyond the first. A graph has no
// 2-cells, so this space is the open homology H1 of the graph.
std::vector<Chain1> cycle_basis(const Graph& g);

// Coordinates of a cycle in a basis from cycle_basis, by least squares over
// the (edge + tail) support. Throws NotACycleError / NotInSpanError.
Eigen::VectorXd cycle_coordinates(const Graph& g, const std::vector<Chain1>& basis,
                                  const Chain1& c, double tol = 1e-9);

// BFS from `root` in canonical order. parent_vertex/parent_edge are -1 at the
// root and at unreachable vertices; dist is -1 when unreachable.
struct BfsTree {
    int root = -1;
    std::vector<int> parent_vertex;
    std::vector<int> parent_edge;
    std::vector<int> dist;
    std::vector<int> order;  // visit order, reachable vertices only
};
BfsTree bfs_tree(const Graph& g, int root);

// Chain of the tree path u -> v inside a BFS tree (both must be reachable).
Chain1 bfs_tree_path(const Graph& g, const BfsTree& t, int u, int v);

}  // namespace graphlag
