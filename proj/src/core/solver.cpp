#include "ecco/core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecco/core/errors.hpp"

namespace ecco {

void SolveConfig::validate() const {
    eatss.validate();
    if (!(control.delta > 0.0)) {
        throw UsageError("control delta must be positive");
    }
    if (!(epsilon > 0.0)) {
        throw UsageError("epsilon must be positive");
    }
    if (!(grad_tol >= 0.0)) {
        throw UsageError("grad_tol must be non-negative");
    }
    if (max_iters < 1) {
        throw UsageError("max_iters must be positive");
    }
    if (!(dt_fixed > 0.0)) {
        throw UsageError("fixed step must be positive");
    }
    if (homotopy && !(homotopy->dgamma > 0.0 && homotopy->dgamma <= 1.0)) {
        throw UsageError("homotopy dgamma must lie in (0, 1]");
    }
    if (!(baseline.lr > 0.0)) {
        throw UsageError("baseline learning rate must be positive");
    }
    if (!(baseline.backtrack > 0.0 && baseline.backtrack < 1.0)) {
        throw UsageError("backtracking factor must lie in (0, 1)");
    }
    if (!(baseline.beta1 >= 0.0 && baseline.beta1 < 1.0 && baseline.beta2 >= 0.0 &&
          baseline.beta2 < 1.0)) {
        throw UsageError("Adam moment decays must lie in [0, 1)");
    }
}

const char* to_string(Status s) noexcept {
    switch (s) {
        case Status::converged:
            return "converged";
        case Status::max_iters:
            return "max_iters";
        case Status::step_failure:
            return "step_failure";
        case Status::evaluation_error:
            return "evaluation_error";
    }
    return "unknown";
}

namespace {

void check_start(const Objective& obj, const Vector& x0) {
    if (x0.size() != obj.dim()) {
        throw UsageError("initial point has the wrong dimension");
    }
    if (!x0.allFinite()) {
        throw UsageError("initial point must be finite");
    }
}

bool stationary(const Vector& g, const SolveConfig& cfg) {
    if (g.norm() < kStationaryGradNorm) {
        return true;
    }
    return cfg.grad_tol > 0.0 && g.lpNorm<Eigen::Infinity>() < cfg.grad_tol;
}

IterRecord make_record(int iter, double t, double dt, double f, const Vector& g, const Vector& x,
                       const Objective& obj) {
    IterRecord r;
    r.iter = iter;
    r.t = t;
    r.dt = dt;
    r.f = f;
    r.grad_norm = g.norm();
    r.lyap = lyapunov_energy(g);
    r.evals = obj.counts();
    r.x = x;
    return r;
}

double initial_step(const SolveConfig& cfg, const std::optional<double>& last_dt, const Vector& x,
                    const Vector& g, const ZDiag& z) {
    double dt = cfg.eatss.dt_default;
    switch (cfg.dt_init) {
        case DtInit::fixed:
            dt = cfg.dt_fixed;
            break;
        case DtInit::circuit:
            if (last_dt) {
                dt = *last_dt;
            } else if (cfg.integrator == IntegratorKind::fe) {
                dt = initial_dt_fe(x, g, z, cfg.eatss);
            }
            break;
        case DtInit::last:
            if (last_dt) {
                dt = *last_dt;
            }
            break;
    }
    if (!cfg.eatss_enabled) {
        return dt;
    }
    return std::clamp(dt, cfg.eatss.dt_min, cfg.eatss.dt_max);
}

bool close_relative(const Vector& a, const Vector& b, double tol) {
    for (Index i = 0; i < a.size(); ++i) {
        const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
        if (std::abs(a[i] - b[i]) > tol * scale) {
            return false;
        }
    }
    return true;
}

}  // namespace

Trace ecco_solve(const Objective& obj_in, const Vector& x0, const SolveConfig& cfg) {
    cfg.validate();
    check_start(obj_in, x0);
    const Objective obj = obj_in.with_fresh_counters();

    Trace trace;
    trace.x_initial = x0;
    trace.x_final = x0;

    Vector x = x0;
    double f = 0.0;
    Vector g;
    try {
        f = obj.value(x);
        g = obj.gradient(x);
    } catch (const EvaluationError& e) {
        trace.status = Status::evaluation_error;
        trace.message = e.what();
        return trace;
    }

    ControlState state;
    History hist;
    hist.push(HistoryRecord{x, Vector::Ones(x.size()), g, 0.0});
    std::optional<double> last_dt;
    double t = 0.0;

    for (int iter = 1;; ++iter) {
        if (stationary(g, cfg)) {
            trace.status = Status::converged;
            break;
        }
        if (iter > cfg.max_iters) {
            trace.status = Status::max_iters;
            break;
        }

        const ControlEvaluator control(obj, cfg.control, state);
        ZDiag z;
        try {
            z = control.at_start(x, g);
        } catch (const EvaluationError& e) {
            trace.status = Status::evaluation_error;
            trace.message = e.what();
            break;
        }
        hist.set_current_z(z.z_inv);

        const StepFn step = [&](double dt) -> StepOutcome {
            switch (cfg.integrator) {
                case IntegratorKind::fe:
                    return fe_step(obj, z, x, g, dt, &control);
                case IntegratorKind::rk4:
                    return rk4_step(obj, control, z, x, g, hist, dt, cfg.rk4_weights);
                case IntegratorKind::ab2: {
                    if (hist.size() < 2) {
                        return fe_step(obj, z, x, g, dt, &control);
                    }
                    StepOutcome o = ab2_step(obj, z, x, g, hist, dt, cfg.ab2_k1, cfg.ab2_k2, &control);
                    // Momentum can point uphill; fall back to the FE direction then.
                    if (!o.overflow && !(g.dot(o.direction) < 0.0)) {
                        return fe_step(obj, z, x, g, dt, &control);
                    }
                    return o;
                }
            }
            throw UsageError("unknown integrator");
        };

        const double dt0 = initial_step(cfg, last_dt, x, g, z);
        EatssResult accepted;
        if (cfg.eatss_enabled) {
            try {
                accepted = eatss_search(step, f, g, dt0, cfg.eatss);
            } catch (const StepFailure& e) {
                trace.status = Status::step_failure;
                trace.message = e.what();
                break;
            }
        } else {
            accepted = EatssResult{dt0, step(dt0), 1};
            if (accepted.outcome.overflow) {
                trace.status = Status::evaluation_error;
                trace.message = "non-finite value during fixed-step integration";
                break;
            }
        }

        StepOutcome& out = accepted.outcome;
        t += accepted.dt;
        IterRecord rec = make_record(iter, t, accepted.dt, out.f_next, out.grad_next, out.x_next, obj);
        rec.z_min = z.z_inv.minCoeff();
        rec.z_max = z.z_inv.maxCoeff();
        rec.eatss_trials = accepted.trials;
        rec.lte_max = out.lte.maxCoeff();
        trace.records.push_back(std::move(rec));

        state.anchor = GradientAnchor{g, accepted.dt};
        hist.push(HistoryRecord{out.x_next, out.z_next.z_inv, out.grad_next, accepted.dt});
        last_dt = accepted.dt;

        const double df = std::abs(f - out.f_next);
        x = std::move(out.x_next);
        f = out.f_next;
        g = std::move(out.grad_next);
        if (df < cfg.epsilon) {
            trace.status = Status::converged;
            break;
        }
    }
    trace.x_final = x;
    return trace;
}

Trace source_stepping_solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg) {
    cfg.validate();
    check_start(obj, x0);
    if (!cfg.homotopy) {
        throw UsageError("source stepping requires a homotopy configuration");
    }
    const HomotopyConfig& hc = *cfg.homotopy;

    Trace trace;
    trace.x_initial = x0;
    trace.x_final = x0;

    Vector g0;
    try {
        g0 = obj.gradient(x0);
    } catch (const EvaluationError& e) {
        trace.status = Status::evaluation_error;
        trace.message = e.what();
        return trace;
    }

    std::vector<double> gammas;
    const int steps = static_cast<int>(std::ceil(1.0 / hc.dgamma - 1e-12));
    if (steps > 1) {
        gammas.push_back(0.0);
    }
    for (int k = 1; k < steps; ++k) {
        gammas.push_back(k * hc.dgamma);
    }
    gammas.push_back(1.0);

    SolveConfig inner = cfg;
    inner.method = Method::ecco;
    inner.homotopy.reset();
    if (hc.inner_epsilon) {
        inner.epsilon = *hc.inner_epsilon;
    }
    if (hc.inner_max_iters) {
        inner.max_iters = *hc.inner_max_iters;
    }

    Vector x = x0;
    double t_offset = 0.0;
    int iter_offset = 0;
    EvalCounts eval_offset;
    for (const double gamma : gammas) {
        const double w = 1.0 - gamma;
        const Objective base = obj;
        Objective::HessFn hess;
        if (obj.has_hessian()) {
            hess = [base](const Vector& p) { return base.hessian(p); };
        }
        const Objective stage(
            obj.name() + "@gamma", obj.dim(),
            [base, g0, w](const Vector& p) { return base.value(p) - w * g0.dot(p); },
            [base, g0, w](const Vector& p) -> Vector { return base.gradient(p) - w * g0; },
            std::move(hess));

        Trace st = ecco_solve(stage, x, inner);
        trace.homotopy_boundaries.emplace_back(gamma, iter_offset + 1);
        for (IterRecord& r : st.records) {
            r.iter += iter_offset;
            r.t += t_offset;
            r.evals.f += eval_offset.f;
            r.evals.grad += eval_offset.grad;
            r.evals.hess += eval_offset.hess;
            trace.records.push_back(std::move(r));
        }
        if (!trace.records.empty()) {
            t_offset = trace.records.back().t;
            iter_offset = trace.records.back().iter;
            eval_offset = trace.records.back().evals;
        }
        x = st.x_final;
        trace.status = st.status;
        trace.message = st.message;
        if (st.status == Status::step_failure || st.status == Status::evaluation_error) {
            break;
        }
    }
    trace.x_final = x;
    return trace;
}

Trace gd_armijo_solve(const Objective& obj_in, const Vector& x0, const SolveConfig& cfg) {
    cfg.validate();
    check_start(obj_in, x0);
    const Objective obj = obj_in.with_fresh_counters();
    const BaselineConfig& b = cfg.baseline;

    Trace trace;
    trace.x_initial = x0;
    trace.x_final = x0;
    Vector x = x0;
    double f = 0.0;
    Vector g;
    try {
        f = obj.value(x);
        g = obj.gradient(x);
    } catch (const EvaluationError& e) {
        trace.status = Status::evaluation_error;
        trace.message = e.what();
        return trace;
    }

    double t = 0.0;
    for (int iter = 1;; ++iter) {
        if (stationary(g, cfg)) {
            trace.status = Status::converged;
            break;
        }
        if (iter > cfg.max_iters) {
            trace.status = Status::max_iters;
            break;
        }
        const double slope = g.squaredNorm();
        double step = b.lr;
        int trials = 0;
        bool accepted = false;
        Vector x_new;
        double f_new = 0.0;
        while (trials < b.max_backtracks) {
            ++trials;
            x_new = x - step * g;
            try {
                f_new = obj.value(x_new);
                if (f_new < f - b.armijo_c * step * slope) {
                    accepted = true;
                    break;
                }
            } catch (const EvaluationError&) {
            }
            step *= b.backtrack;
        }
        if (!accepted) {
            trace.status = Status::step_failure;
            trace.message = "Armijo backtracking exhausted";
            break;
        }
        Vector g_new;
        try {
            g_new = obj.gradient(x_new);
        } catch (const EvaluationError& e) {
            trace.status = Status::evaluation_error;
            trace.message = e.what();
            break;
        }
        t += step;
        IterRecord rec = make_record(iter, t, step, f_new, g_new, x_new, obj);
        rec.eatss_trials = trials;
        trace.records.push_back(std::move(rec));
        const double df = std::abs(f - f_new);
        x = std::move(x_new);
        f = f_new;
        g = std::move(g_new);
        if (df < cfg.epsilon) {
            trace.status = Status::converged;
            break;
        }
    }
    trace.x_final = x;
    return trace;
}

Trace adam_solve(const Objective& obj_in, const Vector& x0, const SolveConfig& cfg, double lr,
                 double beta1, double beta2) {
    cfg.validate();
    check_start(obj_in, x0);
    if (!(lr > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw UsageError("Adam needs lr > 0 and moment decays in [0, 1)");
    }
    const Objective obj = obj_in.with_fresh_counters();

    Trace trace;
    trace.x_initial = x0;
    trace.x_final = x0;
    Vector x = x0;
    double f = 0.0;
    Vector g;
    try {
        f = obj.value(x);
        g = obj.gradient(x);
    } catch (const EvaluationError& e) {
        trace.status = Status::evaluation_error;
        trace.message = e.what();
        return trace;
    }

    Vector m = Vector::Zero(x.size());
    Vector v = Vector::Zero(x.size());
    double b1_pow = 1.0;
    double b2_pow = 1.0;
    double t = 0.0;
    for (int iter = 1;; ++iter) {
        if (stationary(g, cfg)) {
            trace.status = Status::converged;
            break;
        }
        if (iter > cfg.max_iters) {
            trace.status = Status::max_iters;
            break;
        }
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        b1_pow *= beta1;
        b2_pow *= beta2;
        const Vector m_hat = m / (1.0 - b1_pow);
        const Vector v_hat = v / (1.0 - b2_pow);
        Vector x_new =
            x - lr * m_hat.cwiseQuotient((v_hat.cwiseSqrt().array() + cfg.baseline.adam_eps).matrix());
        double f_new = 0.0;
        Vector g_new;
        try {
            if (!x_new.allFinite()) {
                throw EvaluationError("Adam iterate diverged", x_new);
            }
            f_new = obj.value(x_new);
            g_new = obj.gradient(x_new);
        } catch (const EvaluationError& e) {
            trace.status = Status::evaluation_error;
            trace.message = e.what();
            break;
        }
        t += lr;
        IterRecord rec = make_record(iter, t, lr, f_new, g_new, x_new, obj);
        rec.eatss_trials = 1;
        trace.records.push_back(std::move(rec));
        const double df = std::abs(f - f_new);
        x = std::move(x_new);
        f = f_new;
        g = std::move(g_new);
        if (df < cfg.epsilon) {
            trace.status = Status::converged;
            break;
        }
    }
    trace.x_final = x;
    return trace;
}

Trace solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg) {
    switch (cfg.method) {
        case Method::ecco:
            return ecco_solve(obj, x0, cfg);
        case Method::source_stepping: {
            if (cfg.homotopy) {
                return source_stepping_solve(obj, x0, cfg);
            }
            SolveConfig with = cfg;
            with.homotopy = HomotopyConfig{};
            return source_stepping_solve(obj, x0, with);
        }
        case Method::gd_armijo:
            return gd_armijo_solve(obj, x0, cfg);
        case Method::adam:
            return adam_solve(obj, x0, cfg, cfg.baseline.lr, cfg.baseline.beta1, cfg.baseline.beta2);
    }
    throw UsageError("unknown method");
}

bool equivalence_gd(const Objective& obj, const Vector& x0, double alpha, int n_steps) {
    if (n_steps < 1 || alpha < 0.0) {
        throw UsageError("equivalence_gd needs n_steps >= 1 and alpha >= 0");
    }
    // Textbook recursion. An iterate whose value or gradient is not finite
    // ends the sequence, which is the same test the ECCO step applies.
    std::vector<Vector> gd{x0};
    bool diverged = false;
    Vector g = obj.gradient(x0);
    for (int k = 0; k < n_steps; ++k) {
        Vector next = gd.back() - alpha * g;
        try {
            if (!next.allFinite()) {
                throw EvaluationError("iterate overflow", next);
            }
            (void)obj.value(next);
            g = obj.gradient(next);
        } catch (const EvaluationError&) {
            diverged = true;
            break;
        }
        gd.push_back(std::move(next));
    }

    if (alpha == 0.0) {
        // A zero step makes the FE map the identity.
        return std::all_of(gd.begin(), gd.end(),
                           [&](const Vector& v) { return close_relative(v, x0, 1e-12); });
    }

    SolveConfig cfg;
    cfg.control.kind = ControlKind::identity;
    cfg.integrator = IntegratorKind::fe;
    cfg.eatss_enabled = false;
    cfg.dt_init = DtInit::fixed;
    cfg.dt_fixed = alpha;
    cfg.epsilon = std::numeric_limits<double>::denorm_min();
    const std::size_t steps = gd.size() - 1;

    // Floating-point flat spots end a run with dF == 0 while x still moves.
    // The fixed-step identity-control FE map is memoryless, so resume.
    std::vector<Vector> ecco_x;
    Status last = Status::converged;
    Vector start = x0;
    while (ecco_x.size() < static_cast<std::size_t>(n_steps)) {
        cfg.max_iters = n_steps - static_cast<int>(ecco_x.size());
        const Trace tr = ecco_solve(obj, start, cfg);
        last = tr.status;
        for (const IterRecord& r : tr.records) ecco_x.push_back(r.x);
        if (tr.status != Status::converged || tr.records.empty()) {
            break;
        }
        start = tr.x_final;
    }

    if (diverged != (last == Status::evaluation_error)) {
        return false;
    }
    if (ecco_x.size() > steps) {
        return false;
    }
    // A stationary iterate ends both sequences' motion.
    if (ecco_x.size() < steps && last != Status::converged) {
        return false;
    }
    for (std::size_t k = 1; k <= steps; ++k) {
        const Vector& e = k <= ecco_x.size() ? ecco_x[k - 1] : (ecco_x.empty() ? x0 : ecco_x.back());
        if (!close_relative(gd[k], e, 1e-12)) {
            return false;
        }
    }
    return true;
}

bool equivalence_heavy_ball(const Objective& obj, const Vector& x0, double alpha, double beta,
                            int n_steps) {
    if (n_steps < 1 || alpha < 0.0) {
        throw UsageError("equivalence_heavy_ball needs n_steps >= 1 and alpha >= 0");
    }
    // Shared first two iterates.
    const Vector x1 = x0 - alpha * obj.gradient(x0);

    std::vector<Vector> hb{x0, x1};
    for (int k = 1; k < n_steps; ++k) {
        const Vector& cur = hb[static_cast<std::size_t>(k)];
        const Vector& prev = hb[static_cast<std::size_t>(k - 1)];
        hb.push_back(cur - alpha * obj.gradient(cur) + beta * (cur - prev));
    }

    const double dt = alpha > 0.0 ? alpha : 1.0;
    const double k1 = alpha / dt;
    const ZDiag unit = z_identity(x0.size());
    std::vector<Vector> ab{x0, x1};
    for (int k = 1; k < n_steps; ++k) {
        const Vector& cur = ab[static_cast<std::size_t>(k)];
        const Vector& prev = ab[static_cast<std::size_t>(k - 1)];
        History hist;
        // grad f(x(t - dt)) is replaced by -(x(t) - x(t - dt)) / dt.
        hist.push(HistoryRecord{prev, unit.z_inv, Vector(-(cur - prev) / dt), 0.0});
        const Vector g = obj.gradient(cur);
        hist.push(HistoryRecord{cur, unit.z_inv, g, dt});
        const StepOutcome o = ab2_step(obj, unit, cur, g, hist, dt, k1, beta);
        if (o.overflow) {
            return false;
        }
        ab.push_back(o.x_next);
    }

    for (std::size_t i = 0; i < hb.size(); ++i) {
        const Vector diff = hb[i] - ab[i];
        const double scale = std::max(1.0, hb[i].lpNorm<Eigen::Infinity>());
        if (diff.lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
            return false;
        }
    }
    return true;
}

}  // namespace ecco
