#include "graphlag/graph.hpp"

#include <algorithm>
#include <deque>

#include <Eigen/Dense>

namespace graphlag {

int Graph::add_vertex(std::string name) {
    if (name.empty()) throw Error("vertex name must be nonempty");
    if (index_.count(name)) throw Error("duplicate vertex name '" + name + "'");
    int id = vertex_count();
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    adj_.emplace_back();
    tail_degree_.push_back(0);
    return id;
}

int Graph::add_edge(int u, int v) {
    if (u < 0 || u >= vertex_count() || v < 0 || v >= vertex_count())
        throw UnknownVertexError("edge endpoint out of range");
    if (u == v) throw Error("self-loop at vertex '" + names_[u] + "' rejected");
    if (find_edge(u, v))
        throw Error("duplicate edge between '" + names_[u] + "' and '" + names_[v] + "'");
    int id = edge_count();
    edges_.emplace_back(u, v);
    adj_[u].emplace_back(v, id);
    adj_[v].emplace_back(u, id);
    return id;
}

int Graph::add_edge(std::string_view u, std::string_view v) {
    return add_edge(vertex(u), vertex(v));
}

int Graph::add_tail(std::string name, int attach, double coupling) {
    if (attach < 0 || attach >= vertex_count())
        throw UnknownVertexError("tail attach vertex out of range");
    for (const auto& t : tails_)
        if (t.name == name) throw Error("duplicate tail name '" + name + "'");
    int id = tail_count();
    tails_.push_back(TailSpec{std::move(name), attach, coupling});
    ++tail_degree_[attach];
    return id;
}

int Graph::add_tail(std::string name, std::string_view attach, double coupling) {
    return add_tail(std::move(name), vertex(attach), coupling);
}

int Graph::vertex(std::string_view name) const {
    auto opt = find_vertex(name);
    if (!opt) throw UnknownVertexError("unknown vertex '" + std::string(name) + "'");
    return *opt;
}

std::optional<int> Graph::find_vertex(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::pair<int, int>> Graph::find_edge(int u, int v) const {
    for (const auto& [nbr, e] : adj_.at(u)) {
        if (nbr != v) continue;
        return std::make_pair(e, edges_[e].first == u ? +1 : -1);
    }
    return std::nullopt;
}

std::vector<int> Graph::tails_at(int v) const {
    std::vector<int> out;
    for (int t = 0; t < tail_count(); ++t)
        if (tails_[t].attach == v) out.push_back(t);
    return out;
}

bool Graph::connected() const {
    if (vertex_count() == 0) return true;
    auto t = bfs_tree(*this, 0);
    return std::none_of(t.dist.begin(), t.dist.end(), [](int d) { return d < 0; });
}

std::vector<int> Graph::end_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
        if (degree(v) < 2) out.push_back(v);
    return out;
}

BfsTree bfs_tree(const Graph& g, int root) {
    int n = g.vertex_count();
    BfsTree t;
    t.root = root;
    t.parent_vertex.assign(n, -1);
    t.parent_edge.assign(n, -1);
    t.dist.assign(n, -1);
    t.dist[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        t.order.push_back(v);
        for (const auto& [nbr, e] : g.adjacency(v)) {
            if (t.dist[nbr] >= 0) continue;
            t.dist[nbr] = t.dist[v] + 1;
            t.parent_vertex[nbr] = v;
            t.parent_edge[nbr] = e;
            queue.push_back(nbr);
        }
    }
    return t;
}

int distance(const Graph& g, int u, int v) {
    auto t = bfs_tree(g, u);
    if (t.dist[v] < 0)
        throw NoPathError("no path between '" + g.vertex_name(u) + "' and '" +
                          g.vertex_name(v) + "'");
    return t.dist[v];
}

int set_diameter(const Graph& g, const std::vector<int>& s) {
    if (s.empty()) throw Error("set_diameter of empty set");
    int d = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto t = bfs_tree(g, s[i]);
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (t.dist[s[j]] < 0)
                throw NoPathError("vertex set spans several components");
            d = std::max(d, t.dist[s[j]]);
        }
    }
    return d;
}

Chain0 boundary(const Graph& g, const Chain1& c) {
    Chain0 out;
    for (const auto& [e, a] : c.core()) {
        auto [p, q] = g.edge(e);
        out.add(q, a);
        out.add(p, -a);
    }
    for (const auto& [t, a] : c.tails()) out.add(g.tail(t).attach, -a);
    return out;
}

Chain1 bfs_tree_path(const Graph& g, const BfsTree& t, int u, int v) {
    // Walk both endpoints up to their common ancestor; signs follow the
    // stored edge orientation.
    Chain1 up_from_u;  // chain of u -> ancestor
    Chain1 up_from_v;
    int a = u, b = v;
    auto step_up = [&](int w, Chain1& acc) {
        int e = t.parent_edge[w];
        // traversal w -> parent(w)
        acc.add_core(e, g.edge(e).first == w ? +1.0 : -1.0);
        return t.parent_vertex[w];
    };
    while (a != b) {
        if (t.dist[a] >= t.dist[b])
            a = step_up(a, up_from_u);
        else
            b = step_up(b, up_from_v);
    }
    // u -> ancestor, then reverse of (v -> ancestor)
    return up_from_u - up_from_v;
}

std::vector<Chain1> cycle_basis(const Graph& g) {
    if (!g.connected()) throw DisconnectedError("cycle_basis requires a connected graph");
    std::vector<Chain1> basis;
    if (g.vertex_count() == 0) return basis;
    auto t = bfs_tree(g, 0);
    std::vector<bool> in_tree(g.edge_count(), false);
    for (int v = 0; v < g.vertex_count(); ++v)
        if (t.parent_edge[v] >= 0) in_tree[t.parent_edge[v]] = true;
    // Fundamental cycle per non-tree edge: the edge plus the tree path back.
    for (int e = 0; e < g.edge_count(); ++e) {
        if (in_tree[e]) continue;
        auto [p, q] = g.edge(e);
        Chain1 cyc = Chain1::edge(e, 1.0) + bfs_tree_path(g, t, q, p);
        basis.push_back(std::move(cyc));
    }
    // One cycle per tail beyond the first: out along tail t, back along tail 0.
    for (int tl = 1; tl < g.tail_count(); ++tl) {
        Chain1 cyc;
        cyc.add_tail(tl, 1.0);
        cyc.add_tail(0, -1.0);
        cyc += bfs_tree_path(g, t, g.tail(0).attach, g.tail(tl).attach);
        basis.push_back(std::move(cyc));
    }
    return basis;
}

Eigen::VectorXd cycle_coordinates(const Graph& g, const std::vector<Chain1>& basis,
                                  const Chain1& c, double tol) {
    double bnorm = boundary(g, c).max_abs();
    if (bnorm > tol)
        throw NotACycleError("chain has boundary of norm " + std::to_string(bnorm));
    int rows = g.edge_count() + g.tail_count();
    int cols = static_cast<int>(basis.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    auto fill = [&](const Chain1& ch, auto&& sink) {
        for (const auto& [e, x] : ch.core()) sink(e, x);
        for (const auto& [t, x] : ch.tails()) sink(g.edge_count() + t, x);
    };
    for (int j = 0; j < cols; ++j)
        fill(basis[j], [&](int r, double x) { a(r, j) = x; });
    fill(c, [&](int r, double x) { b(r) = x; });
    Eigen::VectorXd x = cols == 0 ? Eigen::VectorXd() : a.colPivHouseholderQr().solve(b).eval();
    Eigen::VectorXd residual = cols == 0 ? b : (b - a * x).eval();
    double r = residual.size() == 0 ? 0.0 : residual.cwiseAbs().maxCoeff();
    if (r > tol)
        throw NotInSpanError("residual " + std::to_string(r) + " outside basis span");
    return x;
}

}  // namespace graphlag
