#pragma once

#include <functional>

#include "ecco/core/control.hpp"
#include "ecco/core/integrator.hpp"

namespace ecco {

struct EatssConfig {
    double alpha = 0.9;   // shrink factor, (0, 1)
    double beta = 1.1;    // grow factor, > 1
    double eta = 0.1;     // max-norm LTE bound
    double c = 1e-4;      // Armijo constant, [0, 1)
    double dt_min = 1e-14;
    double dt_max = 1e3;
    double dt_default = 1e-2;
    int max_trials = 60;

    void validate() const;
};

/// Passivity-based FE step 2 x^T grad / sum_i z_i grad_i^2, where the
/// capacitor current of each sub-circuit equals the gradient component.
/// Falls back to dt_default when the ratio is not a positive finite number;
/// the result is clamped to [dt_min, dt_max].
[[nodiscard]] double initial_dt_fe(const Vector& x, const Vector& grad, const ZDiag& z,
                                   const EatssConfig& cfg);

/// f1 < f0 + c dt grad^T direction (strict).
[[nodiscard]] bool armijo_ok(double f0, double f1, const Vector& grad, const Vector& direction,
                             double dt, double c);

/// Both acceptance conditions of one trial step.
[[nodiscard]] bool step_admissible(const StepOutcome& outcome, double f0, const Vector& grad0,
                                   double dt, const EatssConfig& cfg);

struct EatssResult {
    double dt = 0.0;
    StepOutcome outcome;
    int trials = 0;
};

using StepFn = std::function<StepOutcome(double dt)>;

/// Error-aware time step search. Grows dt by beta while the trial step is
/// admissible, otherwise shrinks by alpha until it is. Returns the largest
/// admissible trial and its outcome. Throws StepFailure if dt falls below
/// dt_min or max_trials is exhausted without an admissible step.
[[nodiscard]] EatssResult eatss_search(const StepFn& step, double f0, const Vector& grad0,
                                       double dt0, const EatssConfig& cfg);

}  // namespace ecco
