#pragma once

#include <deque>
#include <optional>

#include "ecco/core/control.hpp"
#include "ecco/core/objective.hpp"

namespace ecco {

enum class Rk4Weights {
    classical,  // (k1 + 2k2 + 2k3 + k4) / 6
    uniform,    // (k1 + k2 + k3 + k4) / 6, kept for comparison runs
};

struct StepEvals {
    int f = 0;
    int grad = 0;
    int hess = 0;
    int control = 0;
};

/// Result of one trial step from x with step dt.
///
/// `direction` is the combined search direction d with x_next = x + dt d; the
/// Armijo test uses grad^T d. When `overflow` is set the step produced a
/// non-finite value and every other field except `evals` is meaningless.
struct StepOutcome {
    Vector x_next;
    Vector lte;
    Vector direction;
    double f_next = 0.0;
    Vector grad_next;
    ZDiag z_next;
    StepEvals evals;
    bool overflow = false;
    bool used_rk4_lte = false;
};

/// One accepted trajectory point. `dt` is the step that arrived here (0 for
/// the initial point).
struct HistoryRecord {
    Vector x;
    Vector z_inv;
    Vector grad;
    double dt = 0.0;
};

/// Up to four most recent trajectory points, oldest first. By convention the
/// last record is the current point of the step being taken.
class History {
public:
    static constexpr std::size_t kCapacity = 4;

    void push(HistoryRecord rec);
    void clear() noexcept { records_.clear(); }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const HistoryRecord& operator[](std::size_t i) const { return records_[i]; }
    [[nodiscard]] const HistoryRecord& back() const { return records_.back(); }
    /// Replaces the control stored with the current point.
    void set_current_z(const Vector& z_inv);

private:
    std::deque<HistoryRecord> records_;
};

inline constexpr double kHistoryUniformityTol = 0.10;

/// 0.5 dt |(Z^{-1} grad)(t) - (Z^{-1} grad)(t + dt)| per coordinate.
[[nodiscard]] Vector fe_lte(const Vector& zg_now, const Vector& zg_next, double dt);

/// Forward Euler: x_next = x - dt z grad.
///
/// With a control evaluator the LTE uses Z^{-1} re-evaluated at x_next;
/// without one, `z` is held fixed across the step.
[[nodiscard]] StepOutcome fe_step(const Objective& obj, const ZDiag& z, const Vector& x,
                                  const Vector& grad, double dt,
                                  const ControlEvaluator* control = nullptr);
[[nodiscard]] StepOutcome fe_step(const Objective& obj, const ZDiag& z, const Vector& x, double dt);

/// History-based RK4 error estimate over a window of four equally spaced
/// points (oldest first, newest = the step end):
///   |(10 x0 + 9 x1 - 18 x2 - x3) / 30 + dt/10 (v0 + 6 v1 + 3 v2)|
/// with v = -Z^{-1} grad the flow velocity at each point. Returns nullopt when
/// the window is short or its spacing deviates from dt by more than 10%.
[[nodiscard]] std::optional<Vector> rk4_lte(const History& window, double dt);

/// Classical four-stage Runge-Kutta step of x' = -Z(x)^{-1} grad f(x).
/// `hist` must end with the current point; its older records feed rk4_lte.
[[nodiscard]] StepOutcome rk4_step(const Objective& obj, const ControlEvaluator& control,
                                   const ZDiag& z, const Vector& x, const Vector& grad,
                                   const History& hist, double dt,
                                   Rk4Weights weights = Rk4Weights::classical);

/// Two-step Adams-Bashforth:
///   x_next = x - dt (k1 (Z^{-1} grad)(t) + k2 (Z^{-1} grad)(t - dt)).
/// `hist` must end with the current point and hold the previous one before
/// it. Throws UsageError otherwise.
[[nodiscard]] StepOutcome ab2_step(const Objective& obj, const ZDiag& z, const Vector& x,
                                   const Vector& grad, const History& hist, double dt, double k1,
                                   double k2, const ControlEvaluator* control = nullptr);

}  // namespace ecco
