#include "graphlag/variational.hpp"

#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace graphlag {

Eigen::VectorXd el_residual(const LagrangianSystem& sys, const Eigen::VectorXd& config) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sys.total_dim());
    for (int t = 0; t < static_cast<int>(sys.terms().size()); ++t)
        for (int a : sys.term_coords(t)) r[a] += sys.term_deriv1(t, a).eval(config);
    return r;
}

Eigen::MatrixXd hessian(const LagrangianSystem& sys, const Eigen::VectorXd& config) {
    int n = sys.total_dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < static_cast<int>(sys.terms().size()); ++t) {
        const auto& coords = sys.term_coords(t);
        for (std::size_t i = 0; i < coords.size(); ++i) {
            for (std::size_t j = i; j < coords.size(); ++j) {
                const CompiledExpr& d2 = sys.term_deriv2(t, coords[i], coords[j]);
                if (d2.is_zero()) continue;
                double v = d2.eval(config);
                h(coords[i], coords[j]) += v;
                if (i != j) h(coords[j], coords[i]) += v;
            }
        }
    }
    return h;
}

NewtonResult solve_newton(const LagrangianSystem& sys, const Eigen::VectorXd& init,
                          const NewtonOptions& opts) {
    if (opts.tol <= 0.0) throw Error("newton tolerance must be positive");
    int n = sys.total_dim();
    if (init.size() != n) throw FiberMismatchError("initial config dimension mismatch");

    NewtonResult res;
    Eigen::VectorXd x = init;
    Eigen::VectorXd best = x;
    double best_norm = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        Eigen::VectorXd r = el_residual(sys, x);
        double rn = r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
        res.history.push_back(rn);
        if (rn < best_norm) {
            best_norm = rn;
            best = x;
        }
        if (rn <= opts.tol) {
            res.solution = x;
            res.iterations = iter;
            res.residual = rn;
            return res;
        }
        if (iter == opts.max_iter) break;

        Eigen::MatrixXd h = hessian(sys, x);
        if (opts.ridge != 0.0) h.diagonal().array() += opts.ridge;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
        lu.setThreshold(opts.pivot_threshold);
        if (lu.rank() < n)
            throw SingularJacobianError(
                "Hessian is rank-deficient at iteration " + std::to_string(iter) +
                " (rank " + std::to_string(lu.rank()) + " of " + std::to_string(n) +
                "); a --ridge shift regularizes zero modes");
        x += lu.solve(-r);
    }
    throw NoConvergenceError("no convergence after " + std::to_string(opts.max_iter) +
                                 " iterations (best residual " + std::to_string(best_norm) +
                                 ")",
                             best, best_norm, opts.max_iter);
}

std::vector<TangentField> kernel_basis(const Eigen::MatrixXd& op, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
    if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
    const auto& vals = eig.eigenvalues();
    double scale = vals.size() == 0 ? 0.0 : vals.cwiseAbs().maxCoeff();
    std::vector<TangentField> basis;
    for (int i = 0; i < vals.size(); ++i) {
        if (std::abs(vals[i]) <= tol * scale)
            basis.push_back(TangentField{eig.eigenvectors().col(i), {}});
    }
    return basis;
}

}  // namespace graphlag
