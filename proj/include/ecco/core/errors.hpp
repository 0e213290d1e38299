#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace ecco {

enum class ErrorKind { usage, evaluation, unsupported, io, step_failure };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& what) : Error(ErrorKind::unsupported, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Raised when an objective or control produces a non-finite value. Carries
/// the point at which evaluation failed.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, Eigen::VectorXd at)
        : Error(ErrorKind::evaluation, what), at_(std::move(at)) {}
    [[nodiscard]] const Eigen::VectorXd& at() const noexcept { return at_; }

private:
    Eigen::VectorXd at_;
};

/// EATSS could not find an admissible step.
class StepFailure : public Error {
public:
    StepFailure(const std::string& what, double last_dt, double last_lte)
        : Error(ErrorKind::step_failure, what), last_dt_(last_dt), last_lte_(last_lte) {}
    [[nodiscard]] double last_dt() const noexcept { return last_dt_; }
    [[nodiscard]] double last_lte() const noexcept { return last_lte_; }

private:
    double last_dt_;
    double last_lte_;
};

}  // namespace ecco
