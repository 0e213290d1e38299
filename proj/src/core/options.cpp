#include "ecco/core/options.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>

#include "ecco/core/errors.hpp"

namespace ecco {

namespace {

std::string normalize_key(std::string_view key) {
    std::string k(key);
    while (!k.empty() && k.front() == '-') {
        k.erase(k.begin());
    }
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string s(value);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw UsageError("option '" + std::string(key) + "' expects a number, got '" + s + "'");
    }
    return v;
}

long long parse_int(std::string_view key, std::string_view value) {
    const std::string s(value);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw UsageError("option '" + std::string(key) + "' expects an integer, got '" + s + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "off" || value == "no") {
        return false;
    }
    throw UsageError("option '" + std::string(key) + "' expects a boolean, got '" +
                     std::string(value) + "'");
}

HomotopyConfig& homotopy(SolveConfig& cfg) {
    if (!cfg.homotopy) {
        cfg.homotopy = HomotopyConfig{};
    }
    return *cfg.homotopy;
}

}  // namespace

void apply_option(SolveConfig& cfg, std::string_view raw_key, std::string_view value) {
    const std::string key = normalize_key(raw_key);
    if (key == "method") {
        if (value == "ecco") {
            cfg.method = Method::ecco;
        } else if (value == "source_stepping" || value == "source-stepping") {
            cfg.method = Method::source_stepping;
            homotopy(cfg);
        } else if (value == "gd_armijo" || value == "gd-armijo") {
            cfg.method = Method::gd_armijo;
        } else if (value == "adam") {
            cfg.method = Method::adam;
        } else {
            throw UsageError("unknown method '" + std::string(value) + "'");
        }
    } else if (key == "control") {
        if (value == "identity") {
            cfg.control.kind = ControlKind::identity;
        } else if (value == "hessian" || value == "full_hessian") {
            cfg.control.kind = ControlKind::full_hessian;
        } else if (value == "approx" || value == "approximate") {
            cfg.control.kind = ControlKind::approximate;
        } else {
            throw UsageError("unknown control '" + std::string(value) + "'");
        }
    } else if (key == "delta") {
        cfg.control.delta = parse_double(key, value);
    } else if (key == "normalize") {
        cfg.control.normalize = parse_bool(key, value);
    } else if (key == "no_normalize") {
        cfg.control.normalize = !parse_bool(key, value.empty() ? "true" : value);
    } else if (key == "integrator") {
        if (value == "fe") {
            cfg.integrator = IntegratorKind::fe;
        } else if (value == "rk4") {
            cfg.integrator = IntegratorKind::rk4;
        } else if (value == "ab2") {
            cfg.integrator = IntegratorKind::ab2;
        } else {
            throw UsageError("unknown integrator '" + std::string(value) + "'");
        }
    } else if (key == "eta") {
        cfg.eatss.eta = parse_double(key, value);
    } else if (key == "alpha") {
        cfg.eatss.alpha = parse_double(key, value);
    } else if (key == "beta") {
        cfg.eatss.beta = parse_double(key, value);
    } else if (key == "armijo_c" || key == "c") {
        cfg.eatss.c = parse_double(key, value);
        cfg.baseline.armijo_c = cfg.eatss.c;
    } else if (key == "dt_min") {
        cfg.eatss.dt_min = parse_double(key, value);
    } else if (key == "dt_max") {
        cfg.eatss.dt_max = parse_double(key, value);
    } else if (key == "dt_default") {
        cfg.eatss.dt_default = parse_double(key, value);
    } else if (key == "max_trials") {
        cfg.eatss.max_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "eatss") {
        cfg.eatss_enabled = parse_bool(key, value);
    } else if (key == "dt_init") {
        if (value == "circuit") {
            cfg.dt_init = DtInit::circuit;
        } else if (value == "last") {
            cfg.dt_init = DtInit::last;
        } else if (value.starts_with("fixed:")) {
            cfg.dt_init = DtInit::fixed;
            cfg.dt_fixed = parse_double(key, value.substr(6));
        } else {
            throw UsageError("dt-init expects circuit, last or fixed:<v>");
        }
    } else if (key == "rk4_weights") {
        if (value == "classical") {
            cfg.rk4_weights = Rk4Weights::classical;
        } else if (value == "uniform") {
            cfg.rk4_weights = Rk4Weights::uniform;
        } else {
            throw UsageError("rk4-weights expects classical or uniform");
        }
    } else if (key == "ab2_k1") {
        cfg.ab2_k1 = parse_double(key, value);
    } else if (key == "ab2_k2") {
        cfg.ab2_k2 = parse_double(key, value);
    } else if (key == "epsilon") {
        cfg.epsilon = parse_double(key, value);
    } else if (key == "grad_tol") {
        cfg.grad_tol = parse_double(key, value);
    } else if (key == "max_iters") {
        cfg.max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "dgamma") {
        homotopy(cfg).dgamma = parse_double(key, value);
    } else if (key == "inner_epsilon") {
        homotopy(cfg).inner_epsilon = parse_double(key, value);
    } else if (key == "inner_max_iters") {
        homotopy(cfg).inner_max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "lr") {
        cfg.baseline.lr = parse_double(key, value);
    } else if (key == "backtrack") {
        cfg.baseline.backtrack = parse_double(key, value);
    } else if (key == "beta1") {
        cfg.baseline.beta1 = parse_double(key, value);
    } else if (key == "beta2") {
        cfg.baseline.beta2 = parse_double(key, value);
    } else if (key == "adam_eps") {
        cfg.baseline.adam_eps = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else {
        throw UsageError("unknown option '" + std::string(raw_key) + "'");
    }
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const char* control : {"identity", "hessian", "approx"}) {
            for (const char* integrator : {"fe", "rk4", "ab2"}) {
                out.push_back(std::string("ecco-") + control + "-" + integrator);
            }
        }
        out.insert(out.end(), {"source-stepping", "gd-armijo", "adam"});
        return out;
    }();
    return names;
}

bool is_preset(std::string_view preset) {
    const auto& names = preset_names();
    return std::find(names.begin(), names.end(), preset) != names.end();
}

SolveConfig preset_config(std::string_view preset) {
    SolveConfig cfg;
    if (preset.starts_with("ecco-")) {
        const std::string_view rest = preset.substr(5);
        const auto dash = rest.find('-');
        if (dash == std::string_view::npos) {
            throw UsageError("unknown preset '" + std::string(preset) + "'");
        }
        apply_option(cfg, "control", rest.substr(0, dash));
        apply_option(cfg, "integrator", rest.substr(dash + 1));
        return cfg;
    }
    if (preset == "source-stepping") {
        apply_option(cfg, "method", "source-stepping");
        cfg.control.kind = ControlKind::identity;
        return cfg;
    }
    if (preset == "gd-armijo") {
        apply_option(cfg, "method", "gd-armijo");
        cfg.baseline.lr = 1.0;
        return cfg;
    }
    if (preset == "adam") {
        apply_option(cfg, "method", "adam");
        return cfg;
    }
    throw UsageError("unknown preset '" + std::string(preset) + "'");
}

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::ecco:
            return "ecco";
        case Method::source_stepping:
            return "source-stepping";
        case Method::gd_armijo:
            return "gd-armijo";
        case Method::adam:
            return "adam";
    }
    return "unknown";
}

const char* to_string(ControlKind k) noexcept {
    switch (k) {
        case ControlKind::identity:
            return "identity";
        case ControlKind::full_hessian:
            return "hessian";
        case ControlKind::approximate:
            return "approx";
    }
    return "unknown";
}

const char* to_string(IntegratorKind k) noexcept {
    switch (k) {
        case IntegratorKind::fe:
            return "fe";
        case IntegratorKind::rk4:
            return "rk4";
        case IntegratorKind::ab2:
            return "ab2";
    }
    return "unknown";
}

}  // namespace ecco
