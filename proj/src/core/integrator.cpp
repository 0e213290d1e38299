#include "ecco/core/integrator.hpp"

#include <cmath>

#include "ecco/core/errors.hpp"

namespace ecco {

void History::push(HistoryRecord rec) {
    if (!records_.empty() && !(rec.dt > 0.0)) {
        throw UsageError("history records after the first need a positive dt");
    }
    records_.push_back(std::move(rec));
    while (records_.size() > kCapacity) {
        records_.pop_front();
    }
}

void History::set_current_z(const Vector& z_inv) {
    if (records_.empty()) {
        throw UsageError("history is empty");
    }
    records_.back().z_inv = z_inv;
}

Vector fe_lte(const Vector& zg_now, const Vector& zg_next, double dt) {
    return (0.5 * dt) * (zg_now - zg_next).cwiseAbs();
}

namespace {

StepOutcome overflowed(StepEvals evals) {
    StepOutcome out;
    out.overflow = true;
    out.evals = evals;
    return out;
}

// Evaluates f, grad and Z^{-1} at the step end and fills the FE-style LTE.
// Returns false when anything is non-finite.
bool finish_step(const Objective& obj, const ZDiag& z, const Vector& grad, double dt,
                 const ControlEvaluator* control, StepOutcome& out) {
    if (!out.x_next.allFinite() || !out.direction.allFinite()) {
        return false;
    }
    try {
        out.f_next = obj.value(out.x_next);
        ++out.evals.f;
        out.grad_next = obj.gradient(out.x_next);
        ++out.evals.grad;
        if (control) {
            out.z_next = control->at_candidate(out.x_next, out.grad_next, grad, dt);
            ++out.evals.control;
            if (control->spec().kind == ControlKind::full_hessian) {
                ++out.evals.hess;
            }
        } else {
            out.z_next = z;
        }
    } catch (const EvaluationError&) {
        return false;
    }
    out.lte = fe_lte(z.z_inv.cwiseProduct(grad), out.z_next.z_inv.cwiseProduct(out.grad_next), dt);
    return out.lte.allFinite();
}

}  // namespace

StepOutcome fe_step(const Objective& obj, const ZDiag& z, const Vector& x, const Vector& grad,
                    double dt, const ControlEvaluator* control) {
    if (!(dt > 0.0)) {
        throw UsageError("step size must be positive");
    }
    StepOutcome out;
    out.direction = -z.z_inv.cwiseProduct(grad);
    out.x_next = x - dt * z.z_inv.cwiseProduct(grad);
    if (!finish_step(obj, z, grad, dt, control, out)) {
        return overflowed(out.evals);
    }
    return out;
}

StepOutcome fe_step(const Objective& obj, const ZDiag& z, const Vector& x, double dt) {
    return fe_step(obj, z, x, obj.gradient(x), dt, nullptr);
}

std::optional<Vector> rk4_lte(const History& window, double dt) {
    if (window.size() != History::kCapacity || !(dt > 0.0)) {
        return std::nullopt;
    }
    for (std::size_t i = 1; i < window.size(); ++i) {
        if (std::abs(window[i].dt - dt) > kHistoryUniformityTol * dt) {
            return std::nullopt;
        }
    }
    const auto velocity = [&](std::size_t i) -> Vector {
        return -window[i].z_inv.cwiseProduct(window[i].grad);
    };
    const Vector state_part =
        (10.0 * window[0].x + 9.0 * window[1].x - 18.0 * window[2].x - window[3].x) / 30.0;
    const Vector slope_part = (dt / 10.0) * (velocity(0) + 6.0 * velocity(1) + 3.0 * velocity(2));
    return (state_part + slope_part).cwiseAbs();
}

StepOutcome rk4_step(const Objective& obj, const ControlEvaluator& control, const ZDiag& z,
                     const Vector& x, const Vector& grad, const History& hist, double dt,
                     Rk4Weights weights) {
    if (!(dt > 0.0)) {
        throw UsageError("step size must be positive");
    }
    StepOutcome out;
    const auto stage = [&](const Vector& at) -> Vector {
        const Vector g = obj.gradient(at);
        ++out.evals.grad;
        const ZDiag zs = control.at_stage(at, g);
        ++out.evals.control;
        if (control.spec().kind == ControlKind::full_hessian) {
            ++out.evals.hess;
        }
        return -zs.z_inv.cwiseProduct(g);
    };

    Vector k1 = -z.z_inv.cwiseProduct(grad);
    Vector k2, k3, k4;
    try {
        const Vector p2 = x + 0.5 * dt * k1;
        if (!p2.allFinite()) {
            return overflowed(out.evals);
        }
        k2 = stage(p2);
        const Vector p3 = x + 0.5 * dt * k2;
        if (!p3.allFinite()) {
            return overflowed(out.evals);
        }
        k3 = stage(p3);
        const Vector p4 = x + dt * k3;
        if (!p4.allFinite()) {
            return overflowed(out.evals);
        }
        k4 = stage(p4);
    } catch (const EvaluationError&) {
        return overflowed(out.evals);
    }

    out.direction = weights == Rk4Weights::classical ? Vector((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
                                                     : Vector((k1 + k2 + k3 + k4) / 6.0);
    out.x_next = x + dt * out.direction;
    if (!finish_step(obj, z, grad, dt, &control, out)) {
        return overflowed(out.evals);
    }

    // Window: the two points before x, x itself, and the candidate end point.
    if (hist.size() >= 3) {
        History window;
        for (std::size_t i = hist.size() - 3; i < hist.size(); ++i) {
            window.push(hist[i]);
        }
        window.push(HistoryRecord{out.x_next, out.z_next.z_inv, out.grad_next, dt});
        if (auto lte = rk4_lte(window, dt); lte && lte->allFinite()) {
            out.lte = std::move(*lte);
            out.used_rk4_lte = true;
        }
    }
    return out;
}

StepOutcome ab2_step(const Objective& obj, const ZDiag& z, const Vector& x, const Vector& grad,
                     const History& hist, double dt, double k1, double k2,
                     const ControlEvaluator* control) {
    if (!(dt > 0.0)) {
        throw UsageError("step size must be positive");
    }
    if (hist.size() < 2) {
        throw UsageError("Adams-Bashforth step needs a previous gradient record");
    }
    const HistoryRecord& prev = hist[hist.size() - 2];
    if (prev.grad.size() != grad.size() || prev.z_inv.size() != grad.size()) {
        throw UsageError("previous history record has the wrong dimension");
    }
    StepOutcome out;
    out.direction = -(k1 * z.z_inv.cwiseProduct(grad) + k2 * prev.z_inv.cwiseProduct(prev.grad));
    out.x_next = x + dt * out.direction;
    if (!finish_step(obj, z, grad, dt, control, out)) {
        return overflowed(out.evals);
    }
    return out;
}

}  // namespace ecco
