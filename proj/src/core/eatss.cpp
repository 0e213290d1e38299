#include "ecco/core/eatss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecco/core/errors.hpp"

namespace ecco {

void EatssConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("EATSS alpha must lie in (0, 1)");
    }
    if (!(beta > 1.0)) {
        throw UsageError("EATSS beta must exceed 1");
    }
    if (!(eta > 0.0)) {
        throw UsageError("EATSS eta must be positive");
    }
    if (!(c >= 0.0 && c < 1.0)) {
        throw UsageError("Armijo constant must lie in [0, 1)");
    }
    if (!(dt_min > 0.0 && dt_min < dt_max)) {
        throw UsageError("EATSS needs 0 < dt_min < dt_max");
    }
    if (!(dt_default > 0.0)) {
        throw UsageError("default step must be positive");
    }
    if (max_trials < 1) {
        throw UsageError("EATSS max_trials must be positive");
    }
}

double initial_dt_fe(const Vector& x, const Vector& grad, const ZDiag& z, const EatssConfig& cfg) {
    const double numerator = 2.0 * x.dot(grad);
    const double denominator = z.z_inv.dot(grad.cwiseProduct(grad));
    double dt = cfg.dt_default;
    if (numerator > 0.0 && denominator > 0.0) {
        const double candidate = numerator / denominator;
        if (std::isfinite(candidate)) {
            dt = candidate;
        }
    }
    return std::clamp(dt, cfg.dt_min, cfg.dt_max);
}

bool armijo_ok(double f0, double f1, const Vector& grad, const Vector& direction, double dt,
               double c) {
    return f1 < f0 + c * dt * grad.dot(direction);
}

bool step_admissible(const StepOutcome& outcome, double f0, const Vector& grad0, double dt,
                     const EatssConfig& cfg) {
    if (outcome.overflow || !std::isfinite(outcome.f_next)) {
        return false;
    }
    if (!(outcome.lte.maxCoeff() <= cfg.eta)) {
        return false;
    }
    return armijo_ok(f0, outcome.f_next, grad0, outcome.direction, dt, cfg.c);
}

EatssResult eatss_search(const StepFn& step, double f0, const Vector& grad0, double dt0,
                         const EatssConfig& cfg) {
    double dt = std::clamp(dt0, cfg.dt_min, cfg.dt_max);
    int trials = 0;
    double last_lte = std::numeric_limits<double>::infinity();

    const auto trial = [&](double h) {
        ++trials;
        StepOutcome o = step(h);
        if (!o.overflow && o.lte.size() > 0) {
            last_lte = o.lte.maxCoeff();
        }
        return o;
    };

    StepOutcome outcome = trial(dt);
    if (step_admissible(outcome, f0, grad0, dt, cfg)) {
        // Grow while admissible; keep the last admissible trial.
        while (trials < cfg.max_trials) {
            const double bigger = dt * cfg.beta;
            if (bigger > cfg.dt_max) {
                break;
            }
            StepOutcome next = trial(bigger);
            if (!step_admissible(next, f0, grad0, bigger, cfg)) {
                break;
            }
            dt = bigger;
            outcome = std::move(next);
        }
        return {dt, std::move(outcome), trials};
    }

    while (true) {
        if (trials >= cfg.max_trials) {
            std::ostringstream os;
            os << "time step search exhausted " << cfg.max_trials << " trials (dt=" << dt << ")";
            throw StepFailure(os.str(), dt, last_lte);
        }
        dt *= cfg.alpha;
        if (dt < cfg.dt_min) {
            std::ostringstream os;
            os << "time step fell below dt_min=" << cfg.dt_min;
            throw StepFailure(os.str(), dt, last_lte);
        }
        outcome = trial(dt);
        if (step_admissible(outcome, f0, grad0, dt, cfg)) {
            return {dt, std::move(outcome), trials};
        }
    }
}

}  // namespace ecco
