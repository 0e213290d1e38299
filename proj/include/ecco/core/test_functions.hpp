#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecco/core/objective.hpp"

namespace ecco {

struct DomainBox {
    Vector lower;
    Vector upper;
};

struct TestFunctionSpec {
    std::string name;
    Index dim = 0;
    std::vector<Vector> known_minimizers;
    DomainBox domain_box;
    std::vector<Vector> default_inits;
};

struct TestFunction {
    Objective objective;
    TestFunctionSpec spec;
};

/// Names accepted by make_test_function, in roster order.
[[nodiscard]] const std::vector<std::string>& test_function_names();

/// Dimension used when a caller does not specify one.
[[nodiscard]] Index default_dim(std::string_view name);

/// Builds one of the benchmark objectives with analytic derivatives.
/// Throws UsageError for an unknown name or an unsupported dimension.
[[nodiscard]] TestFunction make_test_function(std::string_view name, Index dim);

}  // namespace ecco
