#pragma once

#include <stdexcept>
#include <string>

namespace dsm {

// Numeric values line up with the status codes of the public C API and,
// where applicable, with the CLI exit codes (0 ok, 1 verification failure,
// 2 gate failure, 3 solver failure, 64 usage).
enum class ErrorCode : int {
    Ok = 0,
    VerifyFailed = 1,
    GateFailed = 2,
    SolverFailed = 3,
    ResolventSingular = 10,
    NoConvergence = 11,
    Evaluation = 12,
    Io = 13,
    DegenerateSample = 14,
    NondifferentiablePoint = 15,
    Usage = 64,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorCode::Usage, what) {}
};

class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& what) : Error(ErrorCode::Evaluation, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class DegenerateSampleError : public Error {
public:
    explicit DegenerateSampleError(const std::string& what)
        : Error(ErrorCode::DegenerateSample, what) {}
};

class NondifferentiablePointError : public Error {
public:
    explicit NondifferentiablePointError(const std::string& what)
        : Error(ErrorCode::NondifferentiablePoint, what) {}
};

// Shifted factorization hit a (numerically) singular matrix.
class ResolventSingularError : public Error {
public:
    ResolventSingularError(double a_abs, double cond_estimate, const std::string& what)
        : Error(ErrorCode::ResolventSingular, what), a_abs_(a_abs), cond_estimate_(cond_estimate) {}
    double a_abs() const noexcept { return a_abs_; }
    double cond_estimate() const noexcept { return cond_estimate_; }

private:
    double a_abs_;
    double cond_estimate_;
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(double last_residual, int iterations, const std::string& what)
        : Error(ErrorCode::NoConvergence, what),
          last_residual_(last_residual),
          iterations_(iterations) {}
    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

} // namespace dsm
