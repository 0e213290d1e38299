#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ecco/core/report.hpp"
#include "ecco/core/test_functions.hpp"

using namespace ecco;

namespace {

std::filesystem::path scratch(const std::string& leaf) {
    const char* env = std::getenv("ECCO_TEST_TMP");
    const std::filesystem::path base =
        env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "ecco_report_tests";
    return base / leaf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int count_of(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

Trace synthetic(int n_records) {
    Trace tr;
    tr.x_initial = Vector::Zero(1);
    double t = 0.0;
    for (int i = 1; i <= n_records; ++i) {
        IterRecord r;
        r.iter = i;
        r.dt = 0.1 / 3.0 * i;
        t += r.dt;
        r.t = t;
        r.f = 1.0 / (7.0 * i);
        r.grad_norm = std::sqrt(2.0) / i;
        r.lyap = 0.5 * r.grad_norm * r.grad_norm;
        r.z_min = 1.0 / 3.0;
        r.z_max = 1.0;
        r.eatss_trials = i + 2;
        r.evals.grad = 10u * i;
        r.evals.hess = i;
        r.x = Vector::Constant(1, -0.1 * i);
        tr.records.push_back(r);
    }
    tr.x_final = tr.records.empty() ? tr.x_initial : tr.records.back().x;
    tr.status = Status::converged;
    return tr;
}

}  // namespace

TEST_CASE("trace CSV schema") {
    const std::filesystem::path p = scratch("three.csv");
    emit_trace_csv(synthetic(3), p);
    const std::string text = slurp(p);
    CHECK(count_of(text, "\n") == 4);
    CHECK(text.rfind(std::string(kTraceCsvHeader) + "\n", 0) == 0);
    CHECK(std::string(kTraceCsvHeader) == "iter,t,dt,f,grad_norm,lyap,z_min,z_max,eatss_trials,grad_evals,hess_evals");

    const std::filesystem::path e = scratch("empty.csv");
    emit_trace_csv(synthetic(0), e);
    CHECK(slurp(e) == std::string(kTraceCsvHeader) + "\n");
}

TEST_CASE("trace CSV round trip is exact") {
    const Trace tr = synthetic(25);
    const std::vector<TraceRow> rows = parse_trace_csv(trace_csv(tr));
    REQUIRE(rows.size() == tr.records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const IterRecord& r = tr.records[i];
        CHECK(rows[i].iter == r.iter);
        CHECK(rows[i].t == r.t);
        CHECK(rows[i].dt == r.dt);
        CHECK(rows[i].f == r.f);
        CHECK(rows[i].grad_norm == r.grad_norm);
        CHECK(rows[i].lyap == r.lyap);
        CHECK(rows[i].z_min == r.z_min);
        CHECK(rows[i].z_max == r.z_max);
        CHECK(rows[i].eatss_trials == r.eatss_trials);
        CHECK(rows[i].grad_evals == r.evals.grad);
        CHECK(rows[i].hess_evals == r.evals.hess);
    }
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK_THROWS_AS((void)parse_trace_csv("wrong,header\n1,2\n"), UsageError);
}

TEST_CASE("CSV of a real solve round-trips") {
    const auto rb = make_test_function("rosenbrock", 2);
    const Trace tr = ecco_solve(rb.objective, rb.spec.default_inits.front(), SolveConfig{});
    const auto rows = parse_trace_csv(trace_csv(tr));
    REQUIRE(rows.size() == tr.records.size());
    CHECK(rows.back().f == tr.records.back().f);
    CHECK(rows.back().t == tr.records.back().t);
}

TEST_CASE("convergence SVG structure") {
    const std::string two = convergence_svg({{"a", synthetic(5)}, {"b", synthetic(8)}});
    CHECK(two.rfind("<?xml", 0) == 0);
    CHECK(count_of(two, "<polyline") == 2);
    CHECK(two.find("</svg>") != std::string::npos);

    const std::string one = convergence_svg({{"single", synthetic(1)}});
    CHECK(count_of(one, "<polyline") == 0);
    CHECK(count_of(one, "<circle") == 1);
    CHECK(one.find("</svg>") != std::string::npos);

    const std::string esc = convergence_svg({{"a<b & \"c\"", synthetic(3)}});
    CHECK(esc.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
    CHECK(esc.find("a<b") == std::string::npos);

    CHECK(escape_xml("<>&'\"") == "&lt;&gt;&amp;&apos;&quot;");
    CHECK_THROWS_AS((void)convergence_svg({}), UsageError);

    const std::filesystem::path p = scratch("nested/dir/plot.svg");
    emit_convergence_svg({{"a", synthetic(4)}}, p);
    CHECK(std::filesystem::exists(p));
}

TEST_CASE("unwritable output is an I/O error") {
    const std::filesystem::path blocker = scratch("blocker");
    write_text_file(blocker, "x");
    CHECK_THROWS_AS(write_text_file(blocker / "child.csv", "y"), IoError);
    CHECK_THROWS_AS(emit_trace_csv(synthetic(1), blocker / "t.csv"), IoError);
}
