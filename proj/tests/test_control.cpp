#include <doctest.h>

#include <cmath>
#include <random>

#include "ecco/core/control.hpp"
#include "ecco/core/test_functions.hpp"

using namespace ecco;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v) out[i++] = e;
    return out;
}

Matrix mat1(double v) { return Matrix::Constant(1, 1, v); }

ControlSpec spec_of(ControlKind kind, double delta, bool normalize) {
    ControlSpec s;
    s.kind = kind;
    s.delta = delta;
    s.normalize = normalize;
    return s;
}

ControlState anchored(const Vector& prev_grad, double prev_dt) {
    ControlState st;
    st.anchor = GradientAnchor{prev_grad, prev_dt};
    return st;
}

// Symmetric matrix with eigenvalues drawn from [-lambda, lambda].
Matrix random_symmetric(Index n, double lambda, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> eig(-lambda, lambda);
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
    const Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    Vector d(n);
    for (Index i = 0; i < n; ++i) d[i] = eig(rng);
    return q * d.asDiagonal() * q.transpose();
}

}  // namespace

TEST_CASE("identity control") {
    CHECK((z_identity(3).z_inv.array() == 1.0).all());
    CHECK(z_identity(3).z_inv.size() == 3);
    CHECK(z_identity(1).z_inv[0] == 1.0);
    CHECK_THROWS_AS((void)z_identity(0), UsageError);
}

TEST_CASE("full-Hessian control examples") {
    const auto raw = spec_of(ControlKind::full_hessian, 1.0, false);
    CHECK(z_full_hessian(vec({6}), mat1(5), raw).z_inv[0] == 180.0);
    CHECK(z_full_hessian(vec({6}), mat1(5), raw).raw_max == 180.0);
    const auto norm = spec_of(ControlKind::full_hessian, 1.0, true);
    CHECK(z_full_hessian(vec({6}), mat1(5), norm).z_inv[0] == 1.0);
    Matrix h(2, 2);
    h << 3, -7, -7, 1;
    CHECK((z_full_hessian(Vector::Zero(2), h, raw).z_inv.array() == 1.0).all());
    CHECK(z_full_hessian(vec({6}), mat1(5), spec_of(ControlKind::full_hessian, 4.0, false))
              .z_inv[0] == 45.0);
}

TEST_CASE("full-Hessian control rejects bad input") {
    const auto raw = spec_of(ControlKind::full_hessian, 1.0, false);
    CHECK_THROWS_AS((void)z_full_hessian(vec({1, 2}), mat1(1), raw), UsageError);
    CHECK_THROWS_AS((void)z_full_hessian(vec({1}), mat1(1), spec_of(ControlKind::full_hessian, 0.0, false)),
                    UsageError);
    CHECK_THROWS_AS((void)z_full_hessian(vec({1e200}), mat1(1e200), raw), EvaluationError);
}

TEST_CASE("first-order control examples") {
    const auto raw = spec_of(ControlKind::approximate, 1.0, false);
    CHECK(z_approximate(vec({2}), anchored(vec({3}), 0.5), raw).z_inv[0] == 2.0);
    const ZDiag stalled = z_approximate(vec({2, -4}), anchored(vec({2, -4}), 0.1), raw);
    CHECK((stalled.z_inv.array() == 1.0).all());
    const ZDiag boot = z_approximate(vec({2, 9}), ControlState{}, raw);
    CHECK(boot.z_inv.size() == 2);
    CHECK((boot.z_inv.array() == 1.0).all());
    CHECK_THROWS_AS((void)z_approximate(vec({2}), anchored(vec({3}), 0.0), raw), UsageError);
    CHECK_THROWS_AS((void)z_approximate(vec({2}), anchored(vec({3}), -1.0), raw), UsageError);
    CHECK_THROWS_AS((void)z_approximate(vec({2}), anchored(vec({3, 1}), 1.0), raw), UsageError);
}

TEST_CASE("energy diagnostics") {
    CHECK(charge_dissipation_rate(vec({6}), mat1(5), z_identity(1)) == 180.0);
    CHECK(charge_dissipation_rate(Vector::Zero(2), Matrix::Identity(2, 2), z_identity(2)) == 0.0);
    CHECK(lyapunov_energy(vec({6})) == 18.0);
    CHECK(lyapunov_energy(Vector::Zero(3)) == 0.0);
}

TEST_CASE("randomized boundedness of the full-Hessian control") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> gdist(-1.0, 1.0);
    std::uniform_int_distribution<int> ndist(1, 6);
    const double lambda = 10.0;
    const double b = 3.0;
    for (double delta : {0.1, 1.0, 10.0}) {
        const auto raw = spec_of(ControlKind::full_hessian, delta, false);
        const auto norm = spec_of(ControlKind::full_hessian, delta, true);
        bool ok = true;
        for (int k = 0; k < 10000 / 3 + 1; ++k) {
            const Index n = ndist(rng);
            Vector g(n);
            for (Index i = 0; i < n; ++i) g[i] = b * gdist(rng);
            const Matrix h = random_symmetric(n, lambda, rng);
            const ZDiag z = z_full_hessian(g, h, raw);
            const double upper = 1.0 + lambda * b * b * std::sqrt(static_cast<double>(n)) / delta;
            ok = ok && z.z_inv.allFinite() && (z.z_inv.array() >= 1.0).all() &&
                 (z.z_inv.array() <= upper * (1 + 1e-12)).all();
            const ZDiag zn = z_full_hessian(g, h, norm);
            ok = ok && (zn.z_inv.array() > 0.0).all() && (zn.z_inv.array() <= 1.0).all() &&
                 zn.z_inv.maxCoeff() == 1.0;
        }
        CHECK(ok);
    }
}

TEST_CASE("randomized boundedness of the first-order control") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> gdist(-5.0, 5.0);
    std::uniform_real_distribution<double> dtdist(1e-3, 1.0);
    const auto raw = spec_of(ControlKind::approximate, 1.0, false);
    const auto norm = spec_of(ControlKind::approximate, 1.0, true);
    bool ok = true;
    for (int k = 0; k < 10000; ++k) {
        const Index n = 1 + k % 5;
        Vector g(n), gp(n);
        for (Index i = 0; i < n; ++i) {
            g[i] = gdist(rng);
            gp[i] = gdist(rng);
        }
        const double dt = dtdist(rng);
        const ZDiag z = z_approximate(g, anchored(gp, dt), raw);
        // |g (g - gp) / dt| <= 5 * 10 / 1e-3
        ok = ok && z.z_inv.allFinite() && (z.z_inv.array() >= 1.0).all() &&
             (z.z_inv.array() <= std::sqrt(1.0 + 5e4)).all();
        const ZDiag zn = z_approximate(g, anchored(gp, dt), norm);
        ok = ok && (zn.z_inv.array() > 0.0).all() && (zn.z_inv.array() <= 1.0).all() &&
             zn.z_inv.maxCoeff() == 1.0;
    }
    CHECK(ok);
}

TEST_CASE("entries with raw value at most one are truncated to exactly one") {
    const auto raw = spec_of(ControlKind::full_hessian, 1.0, false);
    Matrix h(3, 3);
    h << -2, 0, 0, 0, 0.5, 0, 0, 0, 4;
    const ZDiag z = z_full_hessian(vec({1, 1, 1}), h, raw);
    CHECK(z.z_inv[0] == 1.0);  // raw -2
    CHECK(z.z_inv[1] == 1.0);  // raw 0.5
    CHECK(z.z_inv[2] == 4.0);

    const auto ar = spec_of(ControlKind::approximate, 1.0, false);
    // raw = -g (g - gp)/dt: coordinate 0 gives -1 * 1 * (1 - 0) = -1, coordinate 1 gives exactly 1.
    const ZDiag za = z_approximate(vec({1, 1}), anchored(vec({0, 2}), 1.0), ar);
    CHECK(za.z_inv[0] == 1.0);
    CHECK(za.z_inv[1] == 1.0);
}

TEST_CASE("normalization keeps the argmax and entry ratios") {
    Matrix h(3, 3);
    h << 9, 1, 0, 1, 2, 0, 0, 0, 30;
    const Vector g = vec({2, 1.5, -1});
    const ZDiag raw = z_full_hessian(g, h, spec_of(ControlKind::full_hessian, 0.5, false));
    const ZDiag nz = z_full_hessian(g, h, spec_of(ControlKind::full_hessian, 0.5, true));
    Index ra = 0, na = 0;
    raw.z_inv.maxCoeff(&ra);
    nz.z_inv.maxCoeff(&na);
    CHECK(ra == na);
    CHECK(nz.raw_max == raw.z_inv.maxCoeff());
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            CHECK(nz.z_inv[i] / nz.z_inv[j] == doctest::Approx(raw.z_inv[i] / raw.z_inv[j]).epsilon(1e-14));
}

TEST_CASE("flop counts follow the O(n) and O(n^2) cost models") {
    for (Index n : {1, 7, 40}) {
        const Vector g = Vector::LinSpaced(n, -1.0, 2.0);
        FlopCounter fa, fh;
        (void)z_approximate(g, anchored(Vector::Zero(n), 0.5), spec_of(ControlKind::approximate, 1.0, true), &fa);
        (void)z_full_hessian(g, Matrix::Identity(n, n), spec_of(ControlKind::full_hessian, 1.0, true), &fh);
        CHECK(fa.flops == static_cast<std::uint64_t>(7 * n));
        CHECK(fh.flops == static_cast<std::uint64_t>(2 * n * n + 4 * n));
    }
}

TEST_CASE("control evaluator anchors") {
    const auto sq = make_test_function("scalar_quadratic", 1);
    const auto raw = spec_of(ControlKind::approximate, 1.0, false);

    const ControlEvaluator empty(sq.objective, raw, ControlState{});
    CHECK(empty.at_start(vec({1}), vec({6})).z_inv[0] == 1.0);
    // Candidate x = 0.4 reached with dt = 0.1 from gradient 6: a = (3 - 6)/0.1 = -30, raw = 90.
    CHECK(empty.at_candidate(vec({0.4}), vec({3}), vec({6}), 0.1).z_inv[0] ==
          doctest::Approx(std::sqrt(90.0)).epsilon(1e-15));

    const ControlEvaluator anch(sq.objective, raw, anchored(vec({3}), 0.5));
    CHECK(anch.at_start(vec({0.2}), vec({2})).z_inv[0] == 2.0);
    CHECK(anch.at_stage(vec({0.2}), vec({2})).z_inv[0] == 2.0);

    const ControlEvaluator hess(sq.objective, spec_of(ControlKind::full_hessian, 1.0, false), ControlState{});
    CHECK(hess.at_start(vec({1}), vec({6})).z_inv[0] == 180.0);
    CHECK(hess.hessian_calls() == 1);
    (void)hess.at_candidate(vec({0.4}), vec({3}), vec({6}), 0.1);
    CHECK(hess.hessian_calls() == 2);

    const ControlEvaluator ident(sq.objective, spec_of(ControlKind::identity, 1.0, true), ControlState{});
    CHECK(ident.at_candidate(vec({0.4}), vec({3}), vec({6}), 0.1).z_inv[0] == 1.0);
}
