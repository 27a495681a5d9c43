#pragma once

// Run configuration: a sectioned plain-text key-value format with a strict
// schema (unknown keys are fatal, with a nearest-key suggestion), typed
// conversion with defaults, and override application. Precedence, lowest to
// highest: file value, GPWAVE_OUT (out_dir only), --set overrides.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpwave/core.hpp"
#include "gpwave/field.hpp"
#include "gpwave/variational.hpp"

namespace gpwave::harness {

/// Exit-code-2 class: anything wrong with the configuration itself.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { variational, spectral, compare, residuals, converge, sweep };

inline const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::variational: return "variational";
        case RunMode::spectral: return "spectral";
        case RunMode::compare: return "compare";
        case RunMode::residuals: return "residuals";
        case RunMode::converge: return "converge";
        case RunMode::sweep: return "sweep";
    }
    return "?";
}

inline std::optional<RunMode> parse_mode(const std::string& name) {
    for (RunMode m : {RunMode::variational, RunMode::spectral, RunMode::compare,
                      RunMode::residuals, RunMode::converge, RunMode::sweep})
        if (name == to_string(m)) return m;
    return std::nullopt;
}

struct InitialConditions {
    double x0 = 0.0;
    double v0 = 0.0;
    double sigma0 = 1.0;
    double sigma_dot0 = 0.0;
};

struct GridSpec {
    double x_min = -16.0;
    double x_max = 16.0;
    int n = 512;

    Grid grid() const { return Grid(x_min, x_max, n); }
};

struct SweepSpec {
    std::string key;                  // "section.key" to vary
    std::vector<std::string> values;  // raw value per sweep point
    RunMode mode = RunMode::compare;  // mode executed at each point
};

/// Section -> key -> raw string, after all overrides.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

struct RunConfig {
    PhysicsParams physics;
    InitialConditions initial;
    GridSpec grid;
    RunMode mode = RunMode::variational;
    double t_final = 10.0;
    double dt = 1e-3;
    long output_every = 10;
    std::string out_dir = "out";
    InteractionVariant variant;
    IntegratorMethod method = IntegratorMethod::rk4();
    double eps_mask = 1e-6;
    SweepSpec sweep;
    int workers = 1;     // CLI flag, not a config key
    std::string origin;  // config path, for messages
    RawConfig raw;       // resolved raw values; sweep derives point configs from it
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& config_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"physics",
         {"mass", "hbar", "g", "trap", "omega2", "epsilon", "big_omega",
          "breakpoints", "values", "times", "omega2_values"}},
        {"initial", {"x0", "v0", "sigma0", "sigma_dot0"}},
        {"grid", {"x_min", "x_max", "n"}},
        {"run",
         {"mode", "t_final", "dt", "output_every", "out_dir", "c_int", "method",
          "tol", "eps_mask"}},
        {"sweep", {"key", "values", "mode"}},
    };
    return schema;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1,
                               diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

inline std::string suggest(const std::string& name,
                           const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& c : candidates) {
        const std::size_t d = edit_distance(name, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (best_d <= std::max<std::size_t>(2, name.size() / 3))
        return " (did you mean '" + best + "'?)";
    return "";
}

inline std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r\n");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r\n");
    return s.substr(from, to - from + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
}

inline void check_key_known(const std::string& section, const std::string& key,
                            const std::string& origin) {
    const auto& schema = config_schema();
    const auto it = schema.find(section);
    if (it == schema.end()) {
        std::vector<std::string> names;
        for (const auto& [s, _] : schema) names.push_back(s);
        throw ConfigError(origin + ": unknown section [" + section + "]" +
                          suggest(section, names));
    }
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError(origin + ": [" + section + "]." + key + ": unknown key" +
                          suggest(key, it->second));
}

/// Typed view over a RawConfig with error messages naming origin/section/key.
struct RawReader {
    const RawConfig& raw;
    const std::string& origin;

    std::string where(const std::string& s, const std::string& k) const {
        return origin + ": [" + s + "]." + k;
    }
    const std::string* find(const std::string& s, const std::string& k) const {
        const auto sec = raw.find(s);
        if (sec == raw.end()) return nullptr;
        const auto val = sec->second.find(k);
        return val == sec->second.end() ? nullptr : &val->second;
    }
    bool has(const std::string& s, const std::string& k) const {
        return find(s, k) != nullptr;
    }
    double to_double(const std::string& text, const std::string& ctx) const {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
            throw ConfigError(ctx + ": expected a finite number, got '" + text + "'");
        return v;
    }
    double get_double(const std::string& s, const std::string& k, double dflt) const {
        const std::string* v = find(s, k);
        return v ? to_double(*v, where(s, k)) : dflt;
    }
    long get_long(const std::string& s, const std::string& k, long dflt) const {
        const std::string* v = find(s, k);
        if (!v) return dflt;
        char* end = nullptr;
        const long r = std::strtol(v->c_str(), &end, 10);
        if (end == v->c_str() || *end != '\0')
            throw ConfigError(where(s, k) + ": expected an integer, got '" + *v + "'");
        return r;
    }
    std::string get_string(const std::string& s, const std::string& k,
                           const std::string& dflt) const {
        const std::string* v = find(s, k);
        return v ? *v : dflt;
    }
    std::vector<double> get_double_list(const std::string& s,
                                        const std::string& k) const {
        const std::string* v = find(s, k);
        if (!v) throw ConfigError(where(s, k) + ": required key missing");
        std::vector<double> out;
        for (const auto& item : split_list(*v))
            out.push_back(to_double(item, where(s, k)));
        return out;
    }
};

/// Reject trap-family keys that do not belong to the selected trap kind, so a
/// stray 'epsilon' under trap=constant cannot be silently ignored.
inline void check_trap_keys(const RawReader& r, const std::string& kind,
                            const std::vector<std::string>& allowed) {
    static const std::vector<std::string> family = {
        "omega2", "epsilon", "big_omega", "breakpoints", "values",
        "times",  "omega2_values"};
    for (const auto& key : family) {
        if (!r.has("physics", key)) continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(r.where("physics", key) +
                              ": not meaningful for trap = " + kind);
    }
}

inline OmegaSquaredSchedule trap_from_raw(const RawReader& r) {
    const std::string kind = r.get_string("physics", "trap", "constant");
    if (kind == "constant") {
        check_trap_keys(r, kind, {"omega2"});
        return ConstantTrap{r.get_double("physics", "omega2", 1.0)};
    }
    if (kind == "modulated") {
        check_trap_keys(r, kind, {"omega2", "epsilon", "big_omega"});
        ModulatedTrap trap;
        trap.omega0_sq = r.get_double("physics", "omega2", 1.0);
        trap.epsilon = r.get_double("physics", "epsilon", 0.0);
        trap.big_omega = r.get_double("physics", "big_omega", 0.0);
        return trap;
    }
    if (kind == "piecewise") {
        check_trap_keys(r, kind, {"breakpoints", "values"});
        PiecewiseConstantTrap trap;
        trap.breakpoints = r.get_double_list("physics", "breakpoints");
        trap.values = r.get_double_list("physics", "values");
        return trap;
    }
    if (kind == "tabulated") {
        check_trap_keys(r, kind, {"times", "omega2_values"});
        TabulatedTrap trap;
        trap.t = r.get_double_list("physics", "times");
        trap.omega2 = r.get_double_list("physics", "omega2_values");
        return trap;
    }
    throw ConfigError(r.where("physics", "trap") + ": unknown trap kind '" + kind +
                      "' (valid: constant, modulated, piecewise, tabulated)");
}

}  // namespace detail

/// Parse one "section.key=value" override into the raw map.
inline void apply_override(RawConfig& raw, const std::string& spec,
                           const std::string& origin) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError(origin + ": override '" + spec +
                          "' must look like section.key=value");
    const std::string lhs = detail::trim(spec.substr(0, eq));
    const std::string value = detail::trim(spec.substr(eq + 1));
    const auto dot = lhs.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
        throw ConfigError(origin + ": override '" + spec +
                          "' must look like section.key=value");
    const std::string section = lhs.substr(0, dot);
    const std::string key = lhs.substr(dot + 1);
    detail::check_key_known(section, key, origin);
    raw[section][key] = value;
}

/// Parse the sectioned key-value file into a raw map, enforcing the schema.
/// Full lines starting with '#' or ';' are comments; no inline comments.
inline RawConfig parse_config_text(std::istream& in, const std::string& origin) {
    RawConfig raw;
    std::string section;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = detail::trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const std::string at = origin + ":" + std::to_string(line_no);
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(at + ": malformed section header '" + text + "'");
            section = detail::trim(text.substr(1, text.size() - 2));
            if (detail::config_schema().find(section) ==
                detail::config_schema().end()) {
                std::vector<std::string> names;
                for (const auto& [s, _] : detail::config_schema())
                    names.push_back(s);
                throw ConfigError(at + ": unknown section [" + section + "]" +
                                  detail::suggest(section, names));
            }
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(at + ": expected 'key = value', got '" + text + "'");
        if (section.empty())
            throw ConfigError(at + ": key outside any [section]");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        detail::check_key_known(section, key, at);
        if (raw[section].count(key))
            throw ConfigError(at + ": duplicate key [" + section + "]." + key);
        raw[section][key] = value;
    }
    return raw;
}

/// Build and fully validate a RunConfig from resolved raw values. Every
/// precondition of the modules the run will touch is checked here.
inline RunConfig config_from_raw(const RawConfig& raw, const std::string& origin) {
    const detail::RawReader r{raw, origin};
    RunConfig cfg;
    cfg.origin = origin;
    cfg.raw = raw;

    cfg.physics.mass = r.get_double("physics", "mass", 1.0);
    cfg.physics.hbar = r.get_double("physics", "hbar", 1.0);
    cfg.physics.g = r.get_double("physics", "g", 0.0);
    cfg.physics.trap = detail::trap_from_raw(r);
    try {
        validate_params(cfg.physics);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": [physics]: " + e.what());
    }

    cfg.initial.x0 = r.get_double("initial", "x0", 0.0);
    cfg.initial.v0 = r.get_double("initial", "v0", 0.0);
    cfg.initial.sigma0 = r.get_double("initial", "sigma0", 1.0);
    cfg.initial.sigma_dot0 = r.get_double("initial", "sigma_dot0", 0.0);
    if (!(cfg.initial.sigma0 > 0.0))
        throw ConfigError(r.where("initial", "sigma0") + ": must be > 0");

    cfg.grid.x_min = r.get_double("grid", "x_min", -16.0);
    cfg.grid.x_max = r.get_double("grid", "x_max", 16.0);
    cfg.grid.n = int(r.get_long("grid", "n", 512));
    try {
        (void)cfg.grid.grid();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": [grid]: " + e.what());
    }

    const std::string mode_name = r.get_string("run", "mode", "variational");
    const auto mode = parse_mode(mode_name);
    if (!mode)
        throw ConfigError(r.where("run", "mode") + ": unknown mode '" + mode_name +
                          "' (valid: variational, spectral, compare, residuals, "
                          "converge, sweep)");
    cfg.mode = *mode;

    cfg.t_final = r.get_double("run", "t_final", 10.0);
    if (!(cfg.t_final > 0.0))
        throw ConfigError(r.where("run", "t_final") + ": must be > 0");
    cfg.dt = r.get_double("run", "dt", 1e-3);
    if (!(cfg.dt > 0.0)) throw ConfigError(r.where("run", "dt") + ": must be > 0");
    cfg.output_every = r.get_long("run", "output_every", 10);
    if (cfg.output_every < 1)
        throw ConfigError(r.where("run", "output_every") + ": must be >= 1");
    cfg.out_dir = r.get_string("run", "out_dir", "out");
    if (cfg.out_dir.empty())
        throw ConfigError(r.where("run", "out_dir") + ": must be non-empty");
    cfg.variant.c_int = r.get_double("run", "c_int", 2.0);

    const std::string method = r.get_string("run", "method", "rk4");
    const double tol = r.get_double("run", "tol", 1e-10);
    if (!(tol > 0.0)) throw ConfigError(r.where("run", "tol") + ": must be > 0");
    if (method == "rk4")
        cfg.method = IntegratorMethod::rk4();
    else if (method == "rk45")
        cfg.method = IntegratorMethod::rk45(tol);
    else
        throw ConfigError(r.where("run", "method") + ": unknown method '" + method +
                          "' (valid: rk4, rk45)");

    cfg.eps_mask = r.get_double("run", "eps_mask", 1e-6);
    if (!(cfg.eps_mask > 0.0 && cfg.eps_mask < 1.0))
        throw ConfigError(r.where("run", "eps_mask") + ": must lie in (0, 1)");

    // field-based modes synthesize the initial packet; require the grid to
    // cover at least 4 standard deviations on each side of the start point
    if (cfg.mode == RunMode::spectral || cfg.mode == RunMode::compare ||
        cfg.mode == RunMode::residuals || cfg.mode == RunMode::converge) {
        const double spread = 4.0 * std::sqrt(cfg.initial.sigma0 / 2.0);
        const double left = cfg.initial.x0 - cfg.grid.x_min;
        const double right = cfg.grid.x_max - cfg.initial.x0;
        if (std::min(left, right) < spread)
            throw ConfigError(origin +
                              ": [grid]: domain does not cover 8 standard "
                              "deviations around [initial].x0");
    }

    if (cfg.mode == RunMode::sweep) {
        cfg.sweep.key = r.get_string("sweep", "key", "");
        if (cfg.sweep.key.empty())
            throw ConfigError(r.where("sweep", "key") + ": required for mode=sweep");
        const auto dot = cfg.sweep.key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == cfg.sweep.key.size())
            throw ConfigError(r.where("sweep", "key") +
                              ": must look like section.key");
        detail::check_key_known(cfg.sweep.key.substr(0, dot),
                                cfg.sweep.key.substr(dot + 1),
                                r.where("sweep", "key"));
        if (cfg.sweep.key == "run.mode" || cfg.sweep.key == "run.out_dir" ||
            cfg.sweep.key.rfind("sweep.", 0) == 0)
            throw ConfigError(r.where("sweep", "key") + ": cannot sweep over '" +
                              cfg.sweep.key + "'");
        const std::string* values = r.find("sweep", "values");
        if (!values || detail::trim(*values).empty())
            throw ConfigError(r.where("sweep", "values") +
                              ": required for mode=sweep");
        cfg.sweep.values = detail::split_list(*values);
        for (const auto& v : cfg.sweep.values)
            if (v.empty())
                throw ConfigError(r.where("sweep", "values") +
                                  ": empty element in list");
        const std::string sweep_mode = r.get_string("sweep", "mode", "compare");
        const auto parsed = parse_mode(sweep_mode);
        if (!parsed || *parsed == RunMode::sweep)
            throw ConfigError(r.where("sweep", "mode") + ": invalid point mode '" +
                              sweep_mode + "'");
        cfg.sweep.mode = *parsed;
    }

    return cfg;
}

/// Load a config file and apply, in order: GPWAVE_OUT (if given), then --set
/// overrides. Later entries win.
inline RunConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {},
                             const std::optional<std::string>& env_out_dir =
                                 std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    RawConfig raw = parse_config_text(in, path);
    if (env_out_dir) raw["run"]["out_dir"] = *env_out_dir;
    for (const auto& spec : overrides) apply_override(raw, spec, path);
    return config_from_raw(raw, path);
}

}  // namespace gpwave::harness
