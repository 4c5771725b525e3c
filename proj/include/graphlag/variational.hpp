#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

#include "graphlag/model.hpp"

namespace graphlag {

// Tangent direction to configuration space, flat like a config. Tails carry
// an optional value at the first tail site; a tangent without one extends
// constantly along the ray.
struct TangentField {
    Eigen::VectorXd values;
    std::map<int, double> tail_next;  // tail index -> value at tail site 1

    double site1(int tail, double attach_value) const {
        auto it = tail_next.find(tail);
        return it == tail_next.end() ? attach_value : it->second;
    }
};

// Gradient of the total Lagrangian: component at P is the sum over terms
// containing P of the symbolic gradient of the potential in x_P.
Eigen::VectorXd el_residual(const LagrangianSystem& sys, const Eigen::VectorXd& config);

// Symmetric second-derivative operator L_psi, assembled blockwise from the
// symbolic Hessians of the terms. Exactly symmetric by construction.
Eigen::MatrixXd hessian(const LagrangianSystem& sys, const Eigen::VectorXd& config);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double ridge = 0.0;  // Tikhonov shift for singular directions
    // Pivots below this fraction of the largest pivot flag a singular solve.
    double pivot_threshold = 1e-12;
};

struct NewtonResult {
    Eigen::VectorXd solution;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;  // residual norm per iterate, including init
};

// Plain full-step Newton on the Euler-Lagrange residual. Throws
// SingularJacobianError on rank-deficient Hessians (unless ridged) and
// NoConvergenceError (carrying the best iterate) after max_iter.
NewtonResult solve_newton(const LagrangianSystem& sys, const Eigen::VectorXd& init,
                          const NewtonOptions& opts = {});

// Orthonormal basis of the near-kernel: eigenvectors with |eigenvalue| <=
// tol * max|eigenvalue|. Empty when the operator is definite.
std::vector<TangentField> kernel_basis(const Eigen::MatrixXd& op, double tol = 1e-8);

}  // namespace graphlag
