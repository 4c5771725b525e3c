#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace graphlag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// graph
struct NoPathError : Error {
    using Error::Error;
};
struct DisconnectedError : Error {
    using Error::Error;
};
struct NotACycleError : Error {
    using Error::Error;
};
struct NotInSpanError : Error {
    using Error::Error;
};

// expr
struct SyntaxError : Error {
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + what),
          offset(offset) {}
    std::size_t offset;
};
struct UnboundVariableError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};

// model
struct ParseError : Error {
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};
struct UnknownVertexError : Error {
    using Error::Error;
};
struct FiberMismatchError : Error {
    using Error::Error;
};
struct DegreeViolationError : Error {
    using Error::Error;
};

// treeform / symform
struct VertexNotInTermError : Error {
    using Error::Error;
};
struct NotNormalizedError : Error {
    using Error::Error;
};
struct MismatchedSystemError : Error {
    using Error::Error;
};

// variational
struct SingularJacobianError : Error {
    using Error::Error;
};
struct NoConvergenceError : Error {
    NoConvergenceError(const std::string& what, Eigen::VectorXd best, double residual,
                       int iterations)
        : Error(what), best(std::move(best)), residual(residual), iterations(iterations) {}
    Eigen::VectorXd best;  // best iterate seen before giving up
    double residual;
    int iterations;
};

// scattering
struct NotNearestNeighborError : Error {
    using Error::Error;
};
struct SingularSystemError : Error {
    using Error::Error;
};

}  // namespace graphlag
