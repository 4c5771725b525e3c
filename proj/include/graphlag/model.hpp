#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphlag/expr.hpp"
#include "graphlag/graph.hpp"

namespace graphlag {

enum class FiberKind { Euclidean, Circle };

// Target space at a vertex: R^m, or the circle in its angle chart (m = 1).
struct Fiber {
    FiberKind kind = FiberKind::Euclidean;
    int dim = 1;
};

// Explicit path assignment for one ordered vertex pair of a term, written as
// a vertex walk. normalize() installs these in place of the tree paths; they
// exist to reproduce what goes wrong when the paths are not tree-consistent.
struct PathOverride {
    int j = -1, k = -1;
    std::vector<int> walk;  // walk.front() == j, walk.back() == k
};

struct InteractionTerm {
    std::string name;
    std::vector<int> vertices;  // sorted ascending, distinct
    Expr potential;             // every variable references a vertex of the term
    std::vector<PathOverride> path_overrides;
};

// The Lagrangian data: a graph, a fiber per vertex, and a family of
// interaction terms. Configurations are flat vectors over all fiber
// coordinates, vertex by vertex in index order. Immutable after
// construction; first and second derivatives of every term are compiled
// against the flat layout up front.
class LagrangianSystem {
public:
    LagrangianSystem(Graph graph, std::vector<Fiber> fibers,
                     std::vector<InteractionTerm> terms,
                     std::map<std::string, Eigen::VectorXd> configs = {},
                     bool allow_ends = false);

    const Graph& graph() const { return graph_; }
    const Fiber& fiber(int v) const { return fibers_.at(v); }
    const std::vector<InteractionTerm>& terms() const { return terms_; }

    int total_dim() const { return total_dim_; }
    int coord_offset(int v) const { return offsets_.at(v); }
    int coord_index(int v, int i) const;
    // (vertex, local coordinate) of a flat coordinate index.
    std::pair<int, int> coord_vertex(int coord) const;

    const std::map<std::string, Eigen::VectorXd>& configs() const { return configs_; }
    Eigen::VectorXd zero_config() const { return Eigen::VectorXd::Zero(total_dim_); }
    Eigen::VectorXd named_config(const std::string& name) const;

    // Flat coordinates that actually occur in term t's potential, ascending.
    const std::vector<int>& term_coords(int t) const { return calc_.at(t).coords; }
    const CompiledExpr& term_value(int t) const { return calc_.at(t).value; }
    // d Lambda / dx_a; the zero program when the variable is absent.
    const CompiledExpr& term_deriv1(int t, int a) const;
    // d^2 Lambda / dx_a dx_b, differentiated in ascending coordinate order so
    // that every permutation of (a, b) returns the identical program.
    const CompiledExpr& term_deriv2(int t, int a, int b) const;
    Expr term_deriv2_expr(int t, int a, int b) const;
    // Third derivative in ascending canonical order (never cached here; the
    // closedness checker memoizes per run).
    Expr term_deriv3_expr(int t, int a, int b, int c) const;
    // True if some mixed second derivative between coords of p and q is not
    // structurally zero.
    bool term_couples(int t, int p, int q) const;

private:
    struct TermCalc {
        std::vector<int> coords;
        CompiledExpr value;
        std::map<int, std::pair<Expr, CompiledExpr>> d1;
        std::map<std::pair<int, int>, std::pair<Expr, CompiledExpr>> d2;
    };

    Graph graph_;
    std::vector<Fiber> fibers_;
    std::vector<InteractionTerm> terms_;
    std::map<std::string, Eigen::VectorXd> configs_;
    std::vector<int> offsets_;
    std::vector<std::pair<int, int>> coord_vertex_;
    int total_dim_ = 0;
    std::vector<TermCalc> calc_;
};

// Line-oriented system file: sections [graph], [term NAME], [config NAME];
// see README for the full grammar. allow_ends suppresses the degree >= 2
// validation so finite open fixtures load.
LagrangianSystem load_system(std::istream& in, bool allow_ends = false);
LagrangianSystem load_system(const std::filesystem::path& path, bool allow_ends = false);

// L(config) = sum of term potentials.
double total_lagrangian(const LagrangianSystem& sys, const Eigen::VectorXd& config);

// Max interaction-set diameter; the system is local with any M > this.
int locality_bound(const LagrangianSystem& sys);

// Central finite differences of the total Lagrangian; the independent oracle
// for the symbolic derivative paths.
Eigen::VectorXd fd_gradient(const LagrangianSystem& sys, const Eigen::VectorXd& config,
                            double step = 1e-5);
Eigen::MatrixXd fd_hessian(const LagrangianSystem& sys, const Eigen::VectorXd& config,
                           double step = 1e-4);

}  // namespace graphlag
