#include "ecco/core/control.hpp"

#include <algorithm>
#include <cmath>

#include "ecco/core/errors.hpp"

namespace ecco {

namespace {

void require_delta(const ControlSpec& spec) {
    if (!(spec.delta > 0.0)) {
        throw UsageError("control delta must be positive");
    }
}

// Truncated entries arrive here; records the pre-normalization max and
// optionally rescales so the largest entry is exactly 1.
ZDiag finish(Vector z, const ControlSpec& spec, FlopCounter* flops) {
    const double raw_max = z.maxCoeff();
    if (spec.normalize) {
        z /= raw_max;
        if (flops) {
            flops->add(static_cast<std::uint64_t>(z.size()));
        }
    }
    return {std::move(z), raw_max};
}

}  // namespace

ZDiag z_identity(Index n) {
    if (n < 1) {
        throw UsageError("control dimension must be positive");
    }
    return {Vector::Ones(n), 1.0};
}

ZDiag z_full_hessian(const Vector& grad, const Matrix& hess, const ControlSpec& spec,
                     FlopCounter* flops) {
    require_delta(spec);
    const Index n = grad.size();
    if (hess.rows() != n || hess.cols() != n) {
        throw UsageError("Hessian shape does not match gradient length");
    }
    Vector z(n);
    for (Index i = 0; i < n; ++i) {
        // Row i of H times grad: n multiply-adds.
        double hg = 0.0;
        for (Index j = 0; j < n; ++j) {
            hg += hess(i, j) * grad[j];
        }
        const double raw = grad[i] * hg / spec.delta;
        if (!std::isfinite(raw)) {
            throw EvaluationError("non-finite full-Hessian control entry", grad);
        }
        z[i] = std::max(raw, 1.0);
    }
    if (flops) {
        flops->add(static_cast<std::uint64_t>(2 * n * n + 3 * n));
    }
    return finish(std::move(z), spec, flops);
}

ZDiag z_approximate(const Vector& grad_now, const ControlState& state, const ControlSpec& spec,
                    FlopCounter* flops) {
    require_delta(spec);
    const Index n = grad_now.size();
    if (state.empty()) {
        ZDiag out = z_identity(n);
        return out;
    }
    const GradientAnchor& anchor = *state.anchor;
    if (!(anchor.dt > 0.0)) {
        throw UsageError("first-order control needs a positive previous step");
    }
    if (anchor.grad.size() != n) {
        throw UsageError("previous gradient length does not match");
    }
    Vector z(n);
    for (Index i = 0; i < n; ++i) {
        const double rate = (grad_now[i] - anchor.grad[i]) / anchor.dt;
        const double raw = -grad_now[i] * rate / spec.delta;
        if (!std::isfinite(raw)) {
            throw EvaluationError("non-finite first-order control entry", grad_now);
        }
        z[i] = std::sqrt(std::max(raw, 1.0));
    }
    if (flops) {
        flops->add(static_cast<std::uint64_t>(6 * n));
    }
    return finish(std::move(z), spec, flops);
}

double charge_dissipation_rate(const Vector& grad, const Matrix& hess, const ZDiag& z) {
    return grad.dot(hess * z.z_inv.cwiseProduct(grad));
}

double lyapunov_energy(const Vector& grad) { return 0.5 * grad.squaredNorm(); }

ControlEvaluator::ControlEvaluator(const Objective& obj, ControlSpec spec, ControlState state)
    : obj_(obj), spec_(spec), state_(std::move(state)) {
    require_delta(spec_);
}

ZDiag ControlEvaluator::evaluate(const Vector& x, const Vector& grad, const ControlState& state) const {
    switch (spec_.kind) {
        case ControlKind::identity:
            return z_identity(grad.size());
        case ControlKind::full_hessian: {
            ++hess_calls_;
            return z_full_hessian(grad, obj_.hessian(x), spec_);
        }
        case ControlKind::approximate:
            return z_approximate(grad, state, spec_);
    }
    throw UsageError("unknown control kind");
}

ZDiag ControlEvaluator::at_start(const Vector& x, const Vector& grad) const {
    return evaluate(x, grad, state_);
}

ZDiag ControlEvaluator::at_stage(const Vector& x, const Vector& grad) const {
    return evaluate(x, grad, state_);
}

ZDiag ControlEvaluator::at_candidate(const Vector& x, const Vector& grad, const Vector& grad_start,
                                     double dt) const {
    ControlState next;
    next.anchor = GradientAnchor{grad_start, dt};
    return evaluate(x, grad, next);
}

}  // namespace ecco
