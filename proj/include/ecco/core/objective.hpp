#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "ecco/core/errors.hpp"
#include "ecco/core/types.hpp"

namespace ecco {

struct EvalCounts {
    std::uint64_t f = 0;
    std::uint64_t grad = 0;
    std::uint64_t hess = 0;
};

/// A twice-differentiable n-dimensional objective.
///
/// Copies share the underlying (immutable) functions and the evaluation
/// counters. `with_fresh_counters()` yields a handle that shares the functions
/// but counts independently, which is how a solve gets per-run counts while
/// other solves use the same objective concurrently.
class Objective {
public:
    using ValueFn = std::function<double(const Vector&)>;
    using GradFn = std::function<Vector(const Vector&)>;
    using HessFn = std::function<Matrix(const Vector&)>;

    Objective(std::string name, Index dim, ValueFn value, GradFn grad, HessFn hess = {});

    [[nodiscard]] const std::string& name() const noexcept;
    [[nodiscard]] Index dim() const noexcept;
    [[nodiscard]] bool has_hessian() const noexcept;

    /// Throws UsageError on dimension mismatch, EvaluationError on non-finite output.
    [[nodiscard]] double value(const Vector& x) const;
    [[nodiscard]] Vector gradient(const Vector& x) const;
    /// Throws UnsupportedError when the objective has no Hessian.
    [[nodiscard]] Matrix hessian(const Vector& x) const;

    [[nodiscard]] EvalCounts counts() const noexcept;
    void reset_counts() const noexcept;
    [[nodiscard]] Objective with_fresh_counters() const;

private:
    struct Impl;
    struct Counters {
        std::atomic<std::uint64_t> f{0};
        std::atomic<std::uint64_t> grad{0};
        std::atomic<std::uint64_t> hess{0};
    };

    void check_dim(const Vector& x) const;

    std::shared_ptr<const Impl> impl_;
    std::shared_ptr<Counters> counters_;
};

[[nodiscard]] inline double eval_f(const Objective& obj, const Vector& x) { return obj.value(x); }
[[nodiscard]] inline Vector eval_grad(const Objective& obj, const Vector& x) { return obj.gradient(x); }
[[nodiscard]] inline Matrix eval_hess(const Objective& obj, const Vector& x) { return obj.hessian(x); }

inline constexpr double kFdGradientStep = 1e-6;
inline constexpr double kFdHessianStep = 1e-5;

/// Central-difference gradient of the objective value.
[[nodiscard]] Vector fd_gradient(const Objective& obj, const Vector& x, double h = kFdGradientStep);

/// Central differences of the analytic gradient, symmetrized.
[[nodiscard]] Matrix fd_hessian(const Objective& obj, const Vector& x, double h = kFdHessianStep);

}  // namespace ecco
