#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace ecco {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Floating-point operation tally used for cost-scaling measurements.
struct FlopCounter {
    std::uint64_t flops = 0;
    void add(std::uint64_t n) noexcept { flops += n; }
};

[[nodiscard]] inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace ecco
