#pragma once

#include <map>
#include <vector>

#include "graphlag/chain.hpp"
#include "graphlag/model.hpp"

namespace graphlag {

struct TreeLikeSystem;

// One interaction term in tree-like form: the augmented vertex set alpha'
// spanned by a tree subgraph, with a unique oriented path between every
// pair. Path overrides replace individual tree paths; they are the hook for
// exploring what breaks when the paths are not tree-consistent.
class TreeLikeTerm {
public:
    int term_index() const { return term_; }
    const std::vector<int>& alpha() const { return alpha_; }
    const std::vector<int>& alpha_ext() const { return alpha_ext_; }
    const std::vector<int>& tree_edges() const { return tree_edges_; }
    int root() const { return root_; }

    bool contains(int v) const;

    // Path used by the 2-form assembly: an override when present, otherwise
    // the unique tree path. Antisymmetric in (j, k) by construction.
    Chain1 path(int j, int k) const;
    bool has_override(int j, int k) const;

    // Installs l_{jk} (and -l_{jk} for the reverse pair). The chain must
    // satisfy boundary(l) = k - j.
    void set_path_override(const Graph& g, int j, int k, Chain1 l);

private:
    int term_ = -1;
    std::vector<int> alpha_;
    std::vector<int> alpha_ext_;
    std::vector<int> tree_edges_;
    int root_ = -1;
    std::map<int, int> parent_vertex_;
    std::map<int, int> parent_edge_;
    std::map<int, double> parent_sign_;  // +1 when edge is stored (v, parent)
    std::map<int, int> depth_;
    std::map<std::pair<int, int>, Chain1> overrides_;  // keyed j < k, chain j -> k

    friend TreeLikeSystem normalize(const LagrangianSystem& sys);
    friend Chain1 tree_path(const TreeLikeTerm& t, int j, int k);
};

struct TreeLikeSystem {
    LagrangianSystem system;
    std::vector<TreeLikeTerm> terms;  // one per system term, same order
};

// s plus, pair by pair in canonical order, the vertices of one breadth-first
// shortest path; the induced subgraph on the result is connected.
std::vector<int> connect_set(const Graph& g, std::vector<int> s);

// BFS spanning tree (edge ids, ascending) of the subgraph induced on s,
// rooted at the lowest-index vertex of s.
std::vector<int> induced_subtree(const Graph& g, const std::vector<int>& s);

// Tree-like form of every term: vertex sets completed by connect_set, cycles
// broken by induced_subtree, potentials extended trivially. File-level path
// overrides are installed afterwards.
TreeLikeSystem normalize(const LagrangianSystem& sys);

// The unique oriented path j -> k inside the term's tree (ignores overrides).
Chain1 tree_path(const TreeLikeTerm& t, int j, int k);

}  // namespace graphlag
