#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ecco/core/solver.hpp"

namespace ecco {

inline constexpr const char* kTraceCsvHeader =
    "iter,t,dt,f,grad_norm,lyap,z_min,z_max,eatss_trials,grad_evals,hess_evals";

/// One parsed CSV row.
struct TraceRow {
    int iter = 0;
    double t = 0.0;
    double dt = 0.0;
    double f = 0.0;
    double grad_norm = 0.0;
    double lyap = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    int eatss_trials = 0;
    std::uint64_t grad_evals = 0;
    std::uint64_t hess_evals = 0;
};

/// Formats a double with 17 significant digits.
[[nodiscard]] std::string format_real(double v);

[[nodiscard]] std::string trace_csv(const Trace& trace);
void emit_trace_csv(const Trace& trace, const std::filesystem::path& path);
[[nodiscard]] std::vector<TraceRow> parse_trace_csv(const std::string& text);

using LabeledTrace = std::pair<std::string, Trace>;

/// Single-panel plot of log10(f - f_best) against iteration, one polyline per
/// trace (a circle marker for single-record traces).
[[nodiscard]] std::string convergence_svg(const std::vector<LabeledTrace>& traces);
void emit_convergence_svg(const std::vector<LabeledTrace>& traces, const std::filesystem::path& path);

[[nodiscard]] std::string escape_xml(const std::string& s);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ecco
