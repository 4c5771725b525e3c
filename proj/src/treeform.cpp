#include "graphlag/treeform.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace graphlag {

bool TreeLikeTerm::contains(int v) const {
    return std::binary_search(alpha_ext_.begin(), alpha_ext_.end(), v);
}

Chain1 tree_path(const TreeLikeTerm& t, int j, int k) {
    if (!t.contains(j) || !t.contains(k))
        throw VertexNotInTermError("path endpoint not in the term's vertex set");
    Chain1 up_from_j, up_from_k;
    int a = j, b = k;
    auto step_up = [&t](int w, Chain1& acc) {
        acc.add_core(t.parent_edge_.at(w), t.parent_sign_.at(w));
        return t.parent_vertex_.at(w);
    };
    while (a != b) {
        if (t.depth_.at(a) >= t.depth_.at(b))
            a = step_up(a, up_from_j);
        else
            b = step_up(b, up_from_k);
    }
    return up_from_j - up_from_k;
}

Chain1 TreeLikeTerm::path(int j, int k) const {
    if (j == k) return Chain1{};
    auto it = overrides_.find({std::min(j, k), std::max(j, k)});
    if (it != overrides_.end()) return j < k ? it->second : -it->second;
    return tree_path(*this, j, k);
}

bool TreeLikeTerm::has_override(int j, int k) const {
    return overrides_.count({std::min(j, k), std::max(j, k)}) > 0;
}

void TreeLikeTerm::set_path_override(const Graph& g, int j, int k, Chain1 l) {
    if (!contains(j) || !contains(k))
        throw VertexNotInTermError("override endpoints must lie in the term's vertex set");
    if (j == k) throw Error("path override needs two distinct vertices");
    Chain0 expected;
    expected.add(k, 1.0);
    expected.add(j, -1.0);
    if (!(boundary(g, l) == expected))
        throw Error("path override does not run from the first vertex to the second");
    if (j < k)
        overrides_[{j, k}] = std::move(l);
    else
        overrides_[{k, j}] = -std::move(l);
}

std::vector<int> connect_set(const Graph& g, std::vector<int> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    std::set<int> result(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto t = bfs_tree(g, s[i]);
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (t.dist[s[j]] < 0)
                throw NoPathError("vertex set spans several components");
            for (int w = s[j]; w != s[i]; w = t.parent_vertex[w]) result.insert(w);
        }
    }
    return {result.begin(), result.end()};
}

std::vector<int> induced_subtree(const Graph& g, const std::vector<int>& s) {
    if (s.empty()) throw Error("induced_subtree of empty set");
    std::set<int> members(s.begin(), s.end());
    int root = *members.begin();
    std::vector<int> tree;
    std::set<int> seen{root};
    std::deque<int> queue{root};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (const auto& [nbr, e] : g.adjacency(v)) {
            if (!members.count(nbr) || seen.count(nbr)) continue;
            seen.insert(nbr);
            tree.push_back(e);
            queue.push_back(nbr);
        }
    }
    if (seen.size() != members.size())
        throw DisconnectedError("induced subgraph is not connected");
    std::sort(tree.begin(), tree.end());
    return tree;
}

TreeLikeSystem normalize(const LagrangianSystem& sys) {
    const Graph& g = sys.graph();
    TreeLikeSystem out{sys, {}};
    out.terms.reserve(sys.terms().size());
    for (int ti = 0; ti < static_cast<int>(sys.terms().size()); ++ti) {
        const InteractionTerm& term = sys.terms()[ti];
        TreeLikeTerm t;
        t.term_ = ti;
        t.alpha_ = term.vertices;
        t.alpha_ext_ = connect_set(g, term.vertices);
        t.tree_edges_ = induced_subtree(g, t.alpha_ext_);
        t.root_ = t.alpha_ext_.front();

        // parent structure over the tree edges only
        std::map<int, std::vector<std::pair<int, int>>> adj;
        for (int e : t.tree_edges_) {
            auto [p, q] = g.edge(e);
            adj[p].emplace_back(q, e);
            adj[q].emplace_back(p, e);
        }
        t.depth_[t.root_] = 0;
        std::deque<int> queue{t.root_};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (const auto& [nbr, e] : adj[v]) {
                if (t.depth_.count(nbr)) continue;
                t.depth_[nbr] = t.depth_[v] + 1;
                t.parent_vertex_[nbr] = v;
                t.parent_edge_[nbr] = e;
                t.parent_sign_[nbr] = g.edge(e).first == nbr ? +1.0 : -1.0;
                queue.push_back(nbr);
            }
        }

        for (const PathOverride& po : term.path_overrides) {
            Chain1 l;
            for (std::size_t i = 0; i + 1 < po.walk.size(); ++i) {
                auto hit = g.find_edge(po.walk[i], po.walk[i + 1]);
                if (!hit) throw Error("path override walks a non-edge");
                l.add_core(hit->first, static_cast<double>(hit->second));
            }
            t.set_path_override(g, po.j, po.k, std::move(l));
        }
        out.terms.push_back(std::move(t));
    }
    return out;
}

}  // namespace graphlag
