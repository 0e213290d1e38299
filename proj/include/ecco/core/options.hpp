#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ecco/core/solver.hpp"

namespace ecco {

/// Sets one named knob on a configuration. Keys may use '-' or '_'
/// ("armijo-c" == "armijo_c"). Throws UsageError on an unknown key or a
/// malformed value. Does not validate cross-field invariants.
void apply_option(SolveConfig& cfg, std::string_view key, std::string_view value);

/// Named method presets such as "ecco-approx-fe", "gd-armijo", "adam".
[[nodiscard]] SolveConfig preset_config(std::string_view preset);
[[nodiscard]] bool is_preset(std::string_view preset);
[[nodiscard]] const std::vector<std::string>& preset_names();

[[nodiscard]] const char* to_string(Method m) noexcept;
[[nodiscard]] const char* to_string(ControlKind k) noexcept;
[[nodiscard]] const char* to_string(IntegratorKind k) noexcept;

}  // namespace ecco
