#include "ecco/core/test_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ecco {

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v) {
        out[i++] = e;
    }
    return out;
}

DomainBox cube(Index n, double half_width) {
    return {Vector::Constant(n, -half_width), Vector::Constant(n, half_width)};
}

void require_dim(std::string_view name, Index dim, Index expected) {
    if (dim != expected) {
        std::ostringstream os;
        os << name << " requires dim=" << expected << ", got " << dim;
        throw UsageError(os.str());
    }
}

// f(x) = 5/2 x^2 + x
TestFunction scalar_quadratic() {
    Objective obj(
        "scalar_quadratic", 1, [](const Vector& x) { return 2.5 * x[0] * x[0] + x[0]; },
        [](const Vector& x) { return vec({5.0 * x[0] + 1.0}); },
        [](const Vector&) { return Matrix::Constant(1, 1, 5.0); });
    TestFunctionSpec spec{"scalar_quadratic", 1, {vec({-0.2})}, cube(1, 5.0), {vec({1.0})}};
    return {std::move(obj), std::move(spec)};
}

// (x + 2y - 7)^2 + (2x + y - 5)^2
TestFunction booth() {
    Objective obj(
        "booth", 2,
        [](const Vector& v) {
            const double a = v[0] + 2.0 * v[1] - 7.0;
            const double b = 2.0 * v[0] + v[1] - 5.0;
            return a * a + b * b;
        },
        [](const Vector& v) {
            const double a = v[0] + 2.0 * v[1] - 7.0;
            const double b = 2.0 * v[0] + v[1] - 5.0;
            return vec({2.0 * a + 4.0 * b, 4.0 * a + 2.0 * b});
        },
        [](const Vector&) {
            Matrix h(2, 2);
            h << 10.0, 8.0, 8.0, 10.0;
            return h;
        });
    TestFunctionSpec spec{"booth",
                          2,
                          {vec({1.0, 3.0})},
                          cube(2, 5.0),
                          {vec({5.0, 5.0}), vec({5.0, -5.0}), vec({-2.0, -2.0})}};
    return {std::move(obj), std::move(spec)};
}

// Chained form sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2; equals the
// classical two-variable function for n = 2.
TestFunction rosenbrock(Index n) {
    if (n < 2) {
        throw UsageError("rosenbrock requires dim >= 2");
    }
    Objective obj(
        "rosenbrock", n,
        [](const Vector& x) {
            double f = 0.0;
            for (Index i = 0; i + 1 < x.size(); ++i) {
                const double a = x[i + 1] - x[i] * x[i];
                const double b = 1.0 - x[i];
                f += 100.0 * a * a + b * b;
            }
            return f;
        },
        [](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            for (Index i = 0; i + 1 < x.size(); ++i) {
                const double a = x[i + 1] - x[i] * x[i];
                g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
                g[i + 1] += 200.0 * a;
            }
            return g;
        },
        [](const Vector& x) {
            const Index m = x.size();
            Matrix h = Matrix::Zero(m, m);
            for (Index i = 0; i + 1 < m; ++i) {
                h(i, i) += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
                h(i, i + 1) += -400.0 * x[i];
                h(i + 1, i) += -400.0 * x[i];
                h(i + 1, i + 1) += 200.0;
            }
            return h;
        });
    TestFunctionSpec spec{"rosenbrock", n, {Vector::Ones(n)}, cube(n, 5.0), {}};
    spec.default_inits = {Vector::Constant(n, -2.0), Vector::Zero(n), Vector::Constant(n, -5.0)};
    return {std::move(obj), std::move(spec)};
}

// (x^2 + y - 11)^2 + (x + y^2 - 7)^2
TestFunction himmelblau() {
    Objective obj(
        "himmelblau", 2,
        [](const Vector& v) {
            const double a = v[0] * v[0] + v[1] - 11.0;
            const double b = v[0] + v[1] * v[1] - 7.0;
            return a * a + b * b;
        },
        [](const Vector& v) {
            const double a = v[0] * v[0] + v[1] - 11.0;
            const double b = v[0] + v[1] * v[1] - 7.0;
            return vec({4.0 * v[0] * a + 2.0 * b, 2.0 * a + 4.0 * v[1] * b});
        },
        [](const Vector& v) {
            const double x = v[0];
            const double y = v[1];
            Matrix h(2, 2);
            h(0, 0) = 12.0 * x * x + 4.0 * y - 42.0;
            h(0, 1) = 4.0 * (x + y);
            h(1, 0) = h(0, 1);
            h(1, 1) = 4.0 * x + 12.0 * y * y - 26.0;
            return h;
        });
    // The three irrational minima are stored to full double precision.
    TestFunctionSpec spec{"himmelblau",
                          2,
                          {vec({3.0, 2.0}), vec({-2.8051180869527449, 3.131312518250573}),
                           vec({-3.7793102533777469, -3.2831859912861694}),
                           vec({3.5844283403304917, -1.8481265269644036})},
                          cube(2, 5.0),
                          {vec({1.0, 1.0}), vec({20.0, 20.0}), vec({-5.0, -5.0})}};
    return {std::move(obj), std::move(spec)};
}

// 2x^2 - 1.05x^4 + x^6/6 + xy + y^2
TestFunction three_hump() {
    Objective obj(
        "three_hump", 2,
        [](const Vector& v) {
            const double x = v[0];
            const double y = v[1];
            const double x2 = x * x;
            return 2.0 * x2 - 1.05 * x2 * x2 + x2 * x2 * x2 / 6.0 + x * y + y * y;
        },
        [](const Vector& v) {
            const double x = v[0];
            const double y = v[1];
            const double x2 = x * x;
            return vec({4.0 * x - 4.2 * x2 * x + x2 * x2 * x + y, x + 2.0 * y});
        },
        [](const Vector& v) {
            const double x2 = v[0] * v[0];
            Matrix h(2, 2);
            h << 4.0 - 12.6 * x2 + 5.0 * x2 * x2, 1.0, 1.0, 2.0;
            return h;
        });
    TestFunctionSpec spec{"three_hump",
                          2,
                          {vec({0.0, 0.0})},
                          cube(2, 5.0),
                          {vec({1.0, 1.0}), vec({0.0, -1.0}), vec({-1.0, -1.0})}};
    return {std::move(obj), std::move(spec)};
}

// Per block of four:
//   100(x1^2 - x2)^2 + (x1 - 1)^2 + 90(x3^2 - x4)^2 + (x3 - 1)^2
//   + 10.1((x2 - 1)^2 + (x4 - 1)^2) + 19.8(x2 - 1)(x4 - 1)
TestFunction extended_wood(Index n) {
    if (n < 4 || n % 4 != 0) {
        throw UsageError("extended_wood requires dim to be a positive multiple of 4");
    }
    Objective obj(
        "extended_wood", n,
        [](const Vector& x) {
            double f = 0.0;
            for (Index k = 0; k < x.size(); k += 4) {
                const double x1 = x[k], x2 = x[k + 1], x3 = x[k + 2], x4 = x[k + 3];
                const double a = x1 * x1 - x2;
                const double c = x3 * x3 - x4;
                f += 100.0 * a * a + (x1 - 1.0) * (x1 - 1.0) + 90.0 * c * c +
                     (x3 - 1.0) * (x3 - 1.0) +
                     10.1 * ((x2 - 1.0) * (x2 - 1.0) + (x4 - 1.0) * (x4 - 1.0)) +
                     19.8 * (x2 - 1.0) * (x4 - 1.0);
            }
            return f;
        },
        [](const Vector& x) {
            Vector g(x.size());
            for (Index k = 0; k < x.size(); k += 4) {
                const double x1 = x[k], x2 = x[k + 1], x3 = x[k + 2], x4 = x[k + 3];
                const double a = x1 * x1 - x2;
                const double c = x3 * x3 - x4;
                g[k] = 400.0 * x1 * a + 2.0 * (x1 - 1.0);
                g[k + 1] = -200.0 * a + 20.2 * (x2 - 1.0) + 19.8 * (x4 - 1.0);
                g[k + 2] = 360.0 * x3 * c + 2.0 * (x3 - 1.0);
                g[k + 3] = -180.0 * c + 20.2 * (x4 - 1.0) + 19.8 * (x2 - 1.0);
            }
            return g;
        },
        [](const Vector& x) {
            const Index m = x.size();
            Matrix h = Matrix::Zero(m, m);
            for (Index k = 0; k < m; k += 4) {
                const double x1 = x[k], x2 = x[k + 1], x3 = x[k + 2], x4 = x[k + 3];
                h(k, k) = 1200.0 * x1 * x1 - 400.0 * x2 + 2.0;
                h(k, k + 1) = h(k + 1, k) = -400.0 * x1;
                h(k + 1, k + 1) = 220.2;
                h(k + 1, k + 3) = h(k + 3, k + 1) = 19.8;
                h(k + 2, k + 2) = 1080.0 * x3 * x3 - 360.0 * x4 + 2.0;
                h(k + 2, k + 3) = h(k + 3, k + 2) = -360.0 * x3;
                h(k + 3, k + 3) = 200.2;
            }
            return h;
        });
    TestFunctionSpec spec{"extended_wood", n, {Vector::Ones(n)}, cube(n, 5.0), {}};
    spec.default_inits = {Vector::Constant(n, 2.0), Vector::Constant(n, 10.0)};
    return {std::move(obj), std::move(spec)};
}

// 10n + sum_i (x_i^2 - 10 cos(2 pi x_i))
TestFunction rastrigin(Index n) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Objective obj(
        "rastrigin", n,
        [](const Vector& x) {
            double f = 10.0 * static_cast<double>(x.size());
            for (Index i = 0; i < x.size(); ++i) {
                f += x[i] * x[i] - 10.0 * std::cos(two_pi * x[i]);
            }
            return f;
        },
        [](const Vector& x) {
            Vector g(x.size());
            for (Index i = 0; i < x.size(); ++i) {
                g[i] = 2.0 * x[i] + 10.0 * two_pi * std::sin(two_pi * x[i]);
            }
            return g;
        },
        [](const Vector& x) {
            Matrix h = Matrix::Zero(x.size(), x.size());
            for (Index i = 0; i < x.size(); ++i) {
                h(i, i) = 2.0 + 10.0 * two_pi * two_pi * std::cos(two_pi * x[i]);
            }
            return h;
        });
    TestFunctionSpec spec{"rastrigin", n, {Vector::Zero(n)}, cube(n, 5.12), {}};
    spec.default_inits = {Vector::Constant(n, 0.5)};
    return {std::move(obj), std::move(spec)};
}

}  // namespace

const std::vector<std::string>& test_function_names() {
    static const std::vector<std::string> names = {"scalar_quadratic", "booth",         "rosenbrock",
                                                   "himmelblau",       "three_hump",    "extended_wood",
                                                   "rastrigin"};
    return names;
}

Index default_dim(std::string_view name) {
    if (name == "scalar_quadratic") {
        return 1;
    }
    if (name == "extended_wood") {
        return 4;
    }
    return 2;
}

TestFunction make_test_function(std::string_view name, Index dim) {
    if (name == "scalar_quadratic") {
        require_dim(name, dim, 1);
        return scalar_quadratic();
    }
    if (name == "booth") {
        require_dim(name, dim, 2);
        return booth();
    }
    if (name == "rosenbrock") {
        return rosenbrock(dim);
    }
    if (name == "himmelblau") {
        require_dim(name, dim, 2);
        return himmelblau();
    }
    if (name == "three_hump") {
        require_dim(name, dim, 2);
        return three_hump();
    }
    if (name == "extended_wood") {
        return extended_wood(dim);
    }
    if (name == "rastrigin") {
        if (dim < 1) {
            throw UsageError("rastrigin requires dim >= 1");
        }
        return rastrigin(dim);
    }
    throw UsageError("unknown test function '" + std::string(name) + "'");
}

}  // namespace ecco
