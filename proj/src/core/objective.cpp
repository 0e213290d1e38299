#include "ecco/core/objective.hpp"

#include <cmath>
#include <sstream>

namespace ecco {

struct Objective::Impl {
    std::string name;
    Index dim;
    ValueFn value;
    GradFn grad;
    HessFn hess;
};

Objective::Objective(std::string name, Index dim, ValueFn value, GradFn grad, HessFn hess)
    : counters_(std::make_shared<Counters>()) {
    if (dim < 1) {
        throw UsageError("objective dimension must be positive");
    }
    if (!value || !grad) {
        throw UsageError("objective requires value and gradient functions");
    }
    impl_ = std::make_shared<const Impl>(
        Impl{std::move(name), dim, std::move(value), std::move(grad), std::move(hess)});
}

const std::string& Objective::name() const noexcept { return impl_->name; }
Index Objective::dim() const noexcept { return impl_->dim; }
bool Objective::has_hessian() const noexcept { return static_cast<bool>(impl_->hess); }

void Objective::check_dim(const Vector& x) const {
    if (x.size() != impl_->dim) {
        std::ostringstream os;
        os << impl_->name << ": expected a point of dimension " << impl_->dim << ", got "
           << x.size();
        throw UsageError(os.str());
    }
}

double Objective::value(const Vector& x) const {
    check_dim(x);
    counters_->f.fetch_add(1, std::memory_order_relaxed);
    const double v = impl_->value(x);
    if (!std::isfinite(v)) {
        throw EvaluationError(impl_->name + ": non-finite objective value", x);
    }
    return v;
}

Vector Objective::gradient(const Vector& x) const {
    check_dim(x);
    counters_->grad.fetch_add(1, std::memory_order_relaxed);
    Vector g = impl_->grad(x);
    if (g.size() != impl_->dim) {
        throw UsageError(impl_->name + ": gradient has wrong length");
    }
    if (!g.allFinite()) {
        throw EvaluationError(impl_->name + ": non-finite gradient", x);
    }
    return g;
}

Matrix Objective::hessian(const Vector& x) const {
    if (!impl_->hess) {
        throw UnsupportedError(impl_->name + ": Hessian not available");
    }
    check_dim(x);
    counters_->hess.fetch_add(1, std::memory_order_relaxed);
    Matrix h = impl_->hess(x);
    if (h.rows() != impl_->dim || h.cols() != impl_->dim) {
        throw UsageError(impl_->name + ": Hessian has wrong shape");
    }
    if (!h.allFinite()) {
        throw EvaluationError(impl_->name + ": non-finite Hessian", x);
    }
    return h;
}

EvalCounts Objective::counts() const noexcept {
    return {counters_->f.load(std::memory_order_relaxed),
            counters_->grad.load(std::memory_order_relaxed),
            counters_->hess.load(std::memory_order_relaxed)};
}

void Objective::reset_counts() const noexcept {
    counters_->f.store(0, std::memory_order_relaxed);
    counters_->grad.store(0, std::memory_order_relaxed);
    counters_->hess.store(0, std::memory_order_relaxed);
}

Objective Objective::with_fresh_counters() const {
    Objective copy = *this;
    copy.counters_ = std::make_shared<Counters>();
    return copy;
}

Vector fd_gradient(const Objective& obj, const Vector& x, double h) {
    if (!(h > 0.0)) {
        throw UsageError("finite-difference step must be positive");
    }
    Vector g(x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fp = obj.value(probe);
        probe[i] = x[i] - h;
        const double fm = obj.value(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Matrix fd_hessian(const Objective& obj, const Vector& x, double h) {
    if (!(h > 0.0)) {
        throw UsageError("finite-difference step must be positive");
    }
    const Index n = x.size();
    Matrix hess(n, n);
    Vector probe = x;
    for (Index j = 0; j < n; ++j) {
        probe[j] = x[j] + h;
        const Vector gp = obj.gradient(probe);
        probe[j] = x[j] - h;
        const Vector gm = obj.gradient(probe);
        probe[j] = x[j];
        hess.col(j) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (hess + hess.transpose());
}

}  // namespace ecco
