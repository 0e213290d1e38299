#pragma once

#include <optional>

#include "ecco/core/objective.hpp"
#include "ecco/core/types.hpp"

namespace ecco {

enum class ControlKind { identity, full_hessian, approximate };

struct ControlSpec {
    ControlKind kind = ControlKind::approximate;
    double delta = 1.0;
    bool normalize = true;
};

/// Gradient at the previous accepted point and the step that left it.
struct GradientAnchor {
    Vector grad;
    double dt = 0.0;
};

/// History needed by the first-order control. Empty before the first step.
struct ControlState {
    std::optional<GradientAnchor> anchor;

    [[nodiscard]] bool empty() const noexcept { return !anchor.has_value(); }
};

/// Diagonal of Z^{-1}. `raw_max` is the largest entry before normalization.
struct ZDiag {
    Vector z_inv;
    double raw_max = 1.0;
};

[[nodiscard]] ZDiag z_identity(Index n);

/// Second-order control: z_i = max(grad_i (H grad)_i / delta, 1), then optional
/// max-normalization. Costs O(n^2) for a dense Hessian.
[[nodiscard]] ZDiag z_full_hessian(const Vector& grad, const Matrix& hess, const ControlSpec& spec,
                                   FlopCounter* flops = nullptr);

/// First-order control from the finite-difference gradient rate
/// a_i = (grad_i - prev_grad_i) / prev_dt: z_i = sqrt(max(-grad_i a_i / delta, 1)).
/// Returns the identity control while the state is empty.
[[nodiscard]] ZDiag z_approximate(const Vector& grad_now, const ControlState& state,
                                  const ControlSpec& spec, FlopCounter* flops = nullptr);

/// grad^T H Z^{-1} grad, i.e. -1/2 d/dt ||grad f||^2 along the scaled flow.
[[nodiscard]] double charge_dissipation_rate(const Vector& grad, const Matrix& hess, const ZDiag& z);

/// 1/2 ||grad||^2, the energy stored in the adjoint capacitors.
[[nodiscard]] double lyapunov_energy(const Vector& grad);

/// Binds a control rule to an objective and evaluates Z^{-1} at the points an
/// integrator visits during one step.
///
/// The step-start state supplies the first-order anchor. At a candidate end
/// point the anchor becomes (gradient at step start, trial dt), which is what
/// the next iteration would see if the step were accepted. RK4 stage points
/// keep the step-start anchor.
class ControlEvaluator {
public:
    ControlEvaluator(const Objective& obj, ControlSpec spec, ControlState state);

    [[nodiscard]] const ControlSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const ControlState& state() const noexcept { return state_; }

    [[nodiscard]] ZDiag at_start(const Vector& x, const Vector& grad) const;
    [[nodiscard]] ZDiag at_stage(const Vector& x, const Vector& grad) const;
    [[nodiscard]] ZDiag at_candidate(const Vector& x, const Vector& grad, const Vector& grad_start,
                                     double dt) const;

    /// Hessian evaluations consumed so far through this evaluator.
    [[nodiscard]] int hessian_calls() const noexcept { return hess_calls_; }

private:
    [[nodiscard]] ZDiag evaluate(const Vector& x, const Vector& grad, const ControlState& state) const;

    const Objective& obj_;
    ControlSpec spec_;
    ControlState state_;
    mutable int hess_calls_ = 0;
};

}  // namespace ecco
