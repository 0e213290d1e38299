#include "ecco/core/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ecco/core/errors.hpp"

namespace ecco {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trace_csv(const Trace& trace) {
    std::string out = kTraceCsvHeader;
    out += '\n';
    for (const IterRecord& r : trace.records) {
        out += std::to_string(r.iter);
        for (double v : {r.t, r.dt, r.f, r.grad_norm, r.lyap, r.z_min, r.z_max}) {
            out += ',';
            out += format_real(v);
        }
        out += ',' + std::to_string(r.eatss_trials);
        out += ',' + std::to_string(r.evals.grad);
        out += ',' + std::to_string(r.evals.hess);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
        }
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os << content;
    os.flush();
    if (!os) {
        throw IoError("write failed for " + path.string());
    }
}

void emit_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    write_text_file(path, trace_csv(trace));
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kTraceCsvHeader) {
        throw UsageError("trace CSV has an unexpected header");
    }
    std::vector<TraceRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 11) {
            throw UsageError("trace CSV row has " + std::to_string(cells.size()) + " fields");
        }
        TraceRow r;
        r.iter = std::stoi(cells[0]);
        r.t = std::strtod(cells[1].c_str(), nullptr);
        r.dt = std::strtod(cells[2].c_str(), nullptr);
        r.f = std::strtod(cells[3].c_str(), nullptr);
        r.grad_norm = std::strtod(cells[4].c_str(), nullptr);
        r.lyap = std::strtod(cells[5].c_str(), nullptr);
        r.z_min = std::strtod(cells[6].c_str(), nullptr);
        r.z_max = std::strtod(cells[7].c_str(), nullptr);
        r.eatss_trials = std::stoi(cells[8]);
        r.grad_evals = std::stoull(cells[9]);
        r.hess_evals = std::stoull(cells[10]);
        rows.push_back(r);
    }
    return rows;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            case '\'':
                out += "&apos;";
                break;
            default:
                out += ch;
        }
    }
    return out;
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string convergence_svg(const std::vector<LabeledTrace>& traces) {
    if (traces.empty()) {
        throw UsageError("convergence plot needs at least one trace");
    }
    double f_best = std::numeric_limits<double>::infinity();
    int max_iter = 1;
    for (const auto& [label, tr] : traces) {
        for (const IterRecord& r : tr.records) {
            f_best = std::min(f_best, r.f);
            max_iter = std::max(max_iter, r.iter);
        }
    }
    const double floor = std::isfinite(f_best) ? 1e-16 * std::max(1.0, std::abs(f_best)) : 1e-16;
    const auto gap = [&](double f) { return std::log10(std::max(f - f_best, floor)); };

    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();
    for (const auto& [label, tr] : traces) {
        for (const IterRecord& r : tr.records) {
            y_lo = std::min(y_lo, gap(r.f));
            y_hi = std::max(y_hi, gap(r.f));
        }
    }
    if (!std::isfinite(y_lo)) {
        y_lo = -1.0;
        y_hi = 1.0;
    }
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
    if (y_hi <= y_lo) {
        y_hi = y_lo + 1.0;
    }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double iter) {
        return kLeft + (max_iter > 1 ? (iter - 1.0) / (max_iter - 1.0) : 0.5) * plot_w;
    };
    const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n"
       << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w)
       << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const int decades = static_cast<int>(y_hi - y_lo);
    const int tick_every = std::max(1, decades / 8);
    for (int d = static_cast<int>(y_lo); d <= static_cast<int>(y_hi); d += tick_every) {
        os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(d)) << "\" x2=\""
           << num(kLeft) << "\" y2=\"" << num(py(d)) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(d) + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 12)
       << "\" font-size=\"12\" text-anchor=\"middle\">iteration (1.." << max_iter << ")</text>\n"
       << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2)
       << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(kTop + plot_h / 2) << ")\">f - f_best</text>\n";

    std::size_t k = 0;
    for (const auto& [label, tr] : traces) {
        const char* color = kPalette[k % std::size(kPalette)];
        if (tr.records.size() >= 2) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < tr.records.size(); ++i) {
                const IterRecord& r = tr.records[i];
                os << (i ? " " : "") << num(px(r.iter)) << ',' << num(py(gap(r.f)));
            }
            os << "\"/>\n";
        } else if (tr.records.size() == 1) {
            const IterRecord& r = tr.records.front();
            os << "<circle cx=\"" << num(px(r.iter)) << "\" cy=\"" << num(py(gap(r.f)))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
        const double lx = kWidth - kRight + 12.0;
        os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 20)
           << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\" font-size=\"11\">"
           << escape_xml(label) << "</text>\n";
        ++k;
    }
    os << "</svg>\n";
    return os.str();
}

void emit_convergence_svg(const std::vector<LabeledTrace>& traces,
                          const std::filesystem::path& path) {
    write_text_file(path, convergence_svg(traces));
}

}  // namespace ecco
