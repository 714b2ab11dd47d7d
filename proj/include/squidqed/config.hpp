#pragma once

// Run configuration: a flat key-value document
//
//   # comment
//   scenario = transfer
//   [model]
//   v2 = 0.001
//
// Section headers are optional. A key under a header must belong to that
// section; unknown keys and repeated keys are errors.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "squidqed/errors.hpp"
#include "squidqed/scenarios.hpp"
#include "squidqed/xi_ladder.hpp"

namespace squidqed {

enum class RunKind { pair_generation, transfer, ladder_compare, custom };

inline const char* to_string(RunKind k) {
    switch (k) {
        case RunKind::pair_generation: return "pair-generation";
        case RunKind::transfer: return "transfer";
        case RunKind::ladder_compare: return "ladder-compare";
        case RunKind::custom: return "custom";
    }
    return "?";
}

inline std::optional<RunKind> parse_run_kind(std::string_view s) {
    for (RunKind k : {RunKind::pair_generation, RunKind::transfer, RunKind::ladder_compare,
                      RunKind::custom})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

struct RunConfig {
    RunKind scenario = RunKind::pair_generation;
    ModelParams params = pair_generation_defaults().params;
    ScenarioOptions options = pair_generation_defaults().options;
    Amplitudes initial = photon_initial_state();  // custom runs only
    LadderParams ladder{};
    double ladder_t_end = 0.0;  // 0: one effective Rabi period
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    std::uint64_t seed = 20240601;
};

// One `key = value` assignment and where it came from (line 0: --set).
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_real(const ConfigEntry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    if (!e.value.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw config_error(e.key + ": '" + e.value + "' is not a finite number", e.line);
    return v;
}

inline std::uint64_t parse_unsigned(const ConfigEntry& e) {
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || e.value.empty())
        throw config_error(e.key + ": '" + e.value + "' is not a non-negative integer", e.line);
    return v;
}

inline bool parse_bool(const ConfigEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw config_error(e.key + ": '" + e.value + "' is not a boolean", e.line);
}

// "re" or "re,im"
inline complex parse_complex(const ConfigEntry& e) {
    const auto comma = e.value.find(',');
    if (comma == std::string::npos) return {parse_real(e), 0.0};
    ConfigEntry re = e, im = e;
    re.value = std::string(trim(std::string_view(e.value).substr(0, comma)));
    im.value = std::string(trim(std::string_view(e.value).substr(comma + 1)));
    return {parse_real(re), parse_real(im)};
}

[[noreturn]] inline void out_of_range(const ConfigEntry& e, const std::string& bound) {
    throw config_error(e.key + " = " + e.value + " is out of range (must be " + bound + ")", e.line);
}

inline double positive(const ConfigEntry& e) {
    const double v = parse_real(e);
    if (!(v > 0.0)) out_of_range(e, "> 0");
    return v;
}

inline double non_negative(const ConfigEntry& e) {
    const double v = parse_real(e);
    if (!(v >= 0.0)) out_of_range(e, ">= 0");
    return v;
}

inline double probability(const ConfigEntry& e) {
    const double v = parse_real(e);
    if (!(v >= 0.0 && v <= 1.0)) out_of_range(e, "in [0, 1]");
    return v;
}

struct KeySpec {
    const char* section;
    std::function<void(RunConfig&, const ConfigEntry&)> apply;
};

inline const std::map<std::string, KeySpec, std::less<>>& key_table() {
    static const std::map<std::string, KeySpec, std::less<>> table = [] {
        std::map<std::string, KeySpec, std::less<>> t;
        auto add = [&t](const char* sec, const char* key, auto fn) { t.emplace(key, KeySpec{sec, fn}); };

        add("run", "scenario", [](RunConfig&, const ConfigEntry&) {});  // resolved first
        add("run", "t_end", [](RunConfig& c, const ConfigEntry& e) {
            c.options.t_end = positive(e);
            c.ladder_t_end = c.options.t_end;
        });
        add("run", "out", [](RunConfig& c, const ConfigEntry& e) {
            if (e.value.empty()) out_of_range(e, "a non-empty path");
            c.out_dir = e.value;
        });
        add("run", "format", [](RunConfig& c, const ConfigEntry& e) {
            c.write_csv = c.write_json = false;
            std::stringstream ss(e.value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto f = trim(item);
                if (f == "csv") c.write_csv = true;
                else if (f == "json") c.write_json = true;
                else out_of_range(e, "a list drawn from {csv, json}");
            }
            if (!c.write_csv && !c.write_json) out_of_range(e, "a list drawn from {csv, json}");
        });
        add("run", "seed", [](RunConfig& c, const ConfigEntry& e) { c.seed = parse_unsigned(e); });

        add("model", "Omega", [](RunConfig& c, const ConfigEntry& e) { c.params.Omega = non_negative(e); });
        add("model", "Omega_a", [](RunConfig& c, const ConfigEntry& e) { c.params.Omega_a = parse_real(e); });
        add("model", "Omega_b", [](RunConfig& c, const ConfigEntry& e) { c.params.Omega_b = parse_real(e); });
        add("model", "omega_a", [](RunConfig& c, const ConfigEntry& e) { c.params.omega_a = parse_real(e); });
        add("model", "omega_b", [](RunConfig& c, const ConfigEntry& e) { c.params.omega_b = parse_real(e); });
        add("model", "omega01_0", [](RunConfig& c, const ConfigEntry& e) { c.params.omega01_0 = parse_real(e); });
        add("model", "omega20_0", [](RunConfig& c, const ConfigEntry& e) { c.params.omega20_0 = parse_real(e); });
        add("model", "omega00", [](RunConfig& c, const ConfigEntry& e) { c.params.omega00 = parse_real(e); });
        add("model", "v1", [](RunConfig& c, const ConfigEntry& e) { c.params.v1 = non_negative(e); });
        add("model", "v2", [](RunConfig& c, const ConfigEntry& e) { c.params.v2 = non_negative(e); });
        add("model", "c1", [](RunConfig& c, const ConfigEntry& e) { c.initial[0] = parse_complex(e); });
        add("model", "c2", [](RunConfig& c, const ConfigEntry& e) { c.initial[1] = parse_complex(e); });
        add("model", "c3", [](RunConfig& c, const ConfigEntry& e) { c.initial[2] = parse_complex(e); });
        add("model", "c4", [](RunConfig& c, const ConfigEntry& e) { c.initial[3] = parse_complex(e); });

        add("integrator", "rel_tol", [](RunConfig& c, const ConfigEntry& e) {
            const double v = positive(e);
            if (v > 1e-2) out_of_range(e, "<= 0.01");
            c.options.integrator.ode.rel_tol = v;
        });
        add("integrator", "abs_tol", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.ode.abs_tol = positive(e);
        });
        add("integrator", "initial_step", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.ode.initial_step = positive(e);
        });
        add("integrator", "max_step", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.ode.max_step = positive(e);
        });
        add("integrator", "max_steps", [](RunConfig& c, const ConfigEntry& e) {
            const auto v = parse_unsigned(e);
            if (v == 0) out_of_range(e, ">= 1");
            c.options.integrator.ode.max_steps = v;
        });
        add("integrator", "sample_interval", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.sample_interval = positive(e);
        });
        add("integrator", "max_sample_drift", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.max_sample_drift = positive(e);
        });
        add("integrator", "max_final_drift", [](RunConfig& c, const ConfigEntry& e) {
            c.options.integrator.max_final_drift = positive(e);
        });

        add("analysis", "crossing_min_population", [](RunConfig& c, const ConfigEntry& e) {
            c.options.crossing_min_population = probability(e);
        });
        add("analysis", "peak_prominence", [](RunConfig& c, const ConfigEntry& e) {
            c.options.peak_prominence = non_negative(e);
        });

        add("ladder", "g", [](RunConfig& c, const ConfigEntry& e) { c.ladder.g = non_negative(e); });
        add("ladder", "Delta", [](RunConfig& c, const ConfigEntry& e) {
            const double v = parse_real(e);
            if (v == 0.0) out_of_range(e, "nonzero");
            c.ladder.Delta = v;
        });
        add("ladder", "omega", [](RunConfig& c, const ConfigEntry& e) { c.ladder.omega = parse_real(e); });
        add("ladder", "compensate_stark_shift", [](RunConfig& c, const ConfigEntry& e) {
            c.ladder.compensate_stark_shift = parse_bool(e);
        });
        return t;
    }();
    return table;
}

}  // namespace detail

// Split a document into entries; syntax errors carry the line number.
inline std::vector<ConfigEntry> parse_entries(std::string_view text) {
    std::vector<ConfigEntry> out;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw config_error("malformed section header '" + std::string(line) + "'", line_no);
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "run" && section != "model" && section != "integrator" &&
                section != "analysis" && section != "ladder")
                throw config_error("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("expected 'key = value', got '" + std::string(line) + "'", line_no);
        ConfigEntry e;
        e.section = section;
        e.key = std::string(detail::trim(line.substr(0, eq)));
        e.value = std::string(detail::trim(line.substr(eq + 1)));
        e.line = line_no;
        if (e.key.empty()) throw config_error("missing key before '='", line_no);
        if (e.value.empty()) throw config_error("missing value for " + e.key, line_no);
        out.push_back(std::move(e));
    }
    return out;
}

// "key=value" from the command line.
inline ConfigEntry parse_override(std::string_view s) {
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
        throw config_error("--set expects key=value, got '" + std::string(s) + "'");
    ConfigEntry e;
    e.key = std::string(detail::trim(s.substr(0, eq)));
    e.value = std::string(detail::trim(s.substr(eq + 1)));
    if (e.key.empty() || e.value.empty())
        throw config_error("--set expects key=value, got '" + std::string(s) + "'");
    return e;
}

// Resolve entries (file first, then overrides, which may replace file
// values) into a validated RunConfig.
inline RunConfig resolve_config(const std::vector<ConfigEntry>& file,
                                const std::vector<ConfigEntry>& overrides = {}) {
    const auto& table = detail::key_table();
    std::map<std::string, ConfigEntry> merged;
    for (const auto& e : file) {
        const auto it = table.find(e.key);
        if (it == table.end()) throw config_error("unknown key '" + e.key + "'", e.line);
        if (!e.section.empty() && e.section != it->second.section)
            throw config_error("key '" + e.key + "' belongs to section [" + it->second.section +
                                   "], not [" + e.section + "]",
                               e.line);
        if (merged.count(e.key)) throw config_error("duplicate key '" + e.key + "'", e.line);
        merged[e.key] = e;
    }
    for (const auto& e : overrides) {
        if (!table.count(e.key)) throw config_error("unknown key '" + e.key + "' in --set");
        merged[e.key] = e;
    }

    RunConfig cfg;
    if (const auto it = merged.find("scenario"); it != merged.end()) {
        const auto kind = parse_run_kind(it->second.value);
        if (!kind)
            detail::out_of_range(it->second,
                                 "one of pair-generation, transfer, ladder-compare, custom");
        cfg.scenario = *kind;
    }
    const auto base = cfg.scenario == RunKind::transfer ? transfer_defaults() : pair_generation_defaults();
    cfg.params = base.params;
    cfg.options = base.options;
    cfg.initial = cfg.scenario == RunKind::transfer ? squid_bell_state() : photon_initial_state();
    const bool custom_state = merged.count("c1") || merged.count("c2") || merged.count("c3") ||
                              merged.count("c4");
    if (custom_state) cfg.initial = Amplitudes{};

    for (const auto& [key, e] : merged) table.at(key).apply(cfg, e);

    // Chirp-rate relation of the two protocols; a lone rate fixes the other.
    const bool has_v1 = merged.count("v1") > 0, has_v2 = merged.count("v2") > 0;
    auto relate = [&](double ratio, const char* rule) {
        if (has_v2 && !has_v1) cfg.params.v1 = ratio * cfg.params.v2;
        else if (has_v1 && !has_v2) cfg.params.v2 = cfg.params.v1 / ratio;
        else if (has_v1 && has_v2 &&
                 std::abs(cfg.params.v1 - ratio * cfg.params.v2) > 1e-12 * cfg.params.v1)
            throw config_error(std::string("chirp rates violate ") + rule + " for scenario " +
                               to_string(cfg.scenario));
        if (!(cfg.params.v1 > 0.0))
            throw config_error(std::string("v1 = ") + format_double(cfg.params.v1) +
                               " is out of range (must be > 0 for scenario " +
                               to_string(cfg.scenario) + ")");
    };
    if (cfg.scenario == RunKind::pair_generation) relate(1.0, "v1 = v2");
    if (cfg.scenario == RunKind::transfer) relate(2.0, "v1 = 2 v2");

    if (cfg.scenario != RunKind::custom && custom_state)
        throw config_error("initial amplitudes c1..c4 are only accepted with scenario = custom");
    if (std::abs(norm(cfg.initial) - 1.0) > default_norm_tolerance)
        throw config_error("initial amplitudes c1..c4 have |c|^2 = " +
                           format_double(norm(cfg.initial)) + " (must be 1)");

    if (cfg.scenario == RunKind::ladder_compare) {
        const auto& L = cfg.ladder;
        cfg.ladder.delta_a = L.omega - L.Delta;
        cfg.ladder.delta_b = L.omega + L.Delta;
        if (cfg.ladder.g == 0.0 && !(cfg.ladder_t_end > 0.0))
            throw config_error("t_end is required for a ladder run with g = 0");
        LadderParams::validate(cfg.ladder);
        if (!(cfg.ladder_t_end > 0.0)) cfg.ladder_t_end = effective_rabi_period(cfg.ladder);
        cfg.options.t_end = cfg.ladder_t_end;
    }

    validate(cfg.params);
    validate(cfg.options.integrator);
    return cfg;
}

inline RunConfig parse_config(std::string_view text, const std::vector<ConfigEntry>& overrides = {}) {
    return resolve_config(parse_entries(text), overrides);
}

}  // namespace squidqed
