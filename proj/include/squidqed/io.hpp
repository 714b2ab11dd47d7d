#pragma once

// Deterministic artifacts: the per-sample measure table as CSV and the run
// report as JSON. Nothing here depends on the wall clock or the locale.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "squidqed/config.hpp"
#include "squidqed/errors.hpp"
#include "squidqed/scenarios.hpp"
#include "squidqed/xi_ladder.hpp"

namespace squidqed {

inline constexpr const char* artifact_version = "squidqed 1.0.0";

inline constexpr const char* timeseries_header =
    "t,P1,P2,P3,P4,EF1,EF2,EF3,EF_squid,EF_ab,Cl1_squid,Cl1_ab,norm_drift";

// 12 significant digits; -0 is written as 0.
inline std::string format12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x + 0.0);
    return buf;
}

inline std::string timeseries_csv(const std::vector<MeasureRow>& rows) {
    std::string out = timeseries_header;
    out += '\n';
    for (const auto& r : rows) {
        const double sum = r.P[0] + r.P[1] + r.P[2] + r.P[3];
        if (std::abs(sum - 1.0) > 1e-8)
            throw numerical_error("population sum " + format12(sum) + " at t = " + format12(r.t) +
                                  " is not 1 within 1e-8");
        const double cols[] = {r.t,   r.P[0], r.P[1],     r.P[2],  r.P[3],     r.EF1,     r.EF2,
                               r.EF3, r.EF_squid, r.EF_ab, r.Cl1_squid, r.Cl1_ab, r.norm_drift};
        bool first = true;
        for (double v : cols) {
            if (!first) out += ',';
            out += format12(v);
            first = false;
        }
        out += '\n';
    }
    return out;
}

using json = nlohmann::ordered_json;

inline json to_json(const complex& z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

// Nested rows of [re, im] pairs in the documented product-basis order.
inline json to_json(const PairDensityMatrix& rho) {
    json m = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < 4; ++j) row.push_back(to_json(rho(i, j)));
        m.push_back(std::move(row));
    }
    return m;
}

inline json to_json(const ModelParams& p) {
    return json{{"Omega", p.Omega},         {"Omega_a", p.Omega_a},     {"Omega_b", p.Omega_b},
                {"omega_a", p.omega_a},     {"omega_b", p.omega_b},     {"omega01_0", p.omega01_0},
                {"omega20_0", p.omega20_0}, {"omega00", p.omega00},     {"v1", p.v1},
                {"v2", p.v2}};
}

inline json to_json(const IntegratorConfig& c) {
    return json{{"rel_tol", c.ode.rel_tol},
                {"abs_tol", c.ode.abs_tol},
                {"initial_step", c.ode.initial_step},
                {"max_step", c.ode.max_step},
                {"max_steps", c.ode.max_steps},
                {"sample_interval", c.sample_interval},
                {"max_sample_drift", c.max_sample_drift},
                {"max_final_drift", c.max_final_drift}};
}

inline json to_json(const LadderParams& p) {
    return json{{"g", p.g},
                {"Delta", p.Delta},
                {"delta_a", p.delta_a},
                {"delta_b", p.delta_b},
                {"omega", p.omega},
                {"compensate_stark_shift", p.compensate_stark_shift}};
}

inline json to_json(const ode::Stats& s) {
    return json{{"accepted", s.accepted}, {"rejected", s.rejected}, {"evaluations", s.evaluations}};
}

inline json to_json(const RunConfig& c) {
    json j{{"scenario", to_string(c.scenario)}};
    if (c.scenario == RunKind::ladder_compare) {
        j["ladder"] = to_json(c.ladder);
        j["t_end"] = c.ladder_t_end;
    } else {
        j["model"] = to_json(c.params);
        j["t_end"] = c.options.t_end;
        j["crossing_min_population"] = c.options.crossing_min_population;
        j["peak_prominence"] = c.options.peak_prominence;
        if (c.scenario == RunKind::custom) {
            json init = json::array();
            for (std::size_t k = 0; k < 4; ++k) init.push_back(to_json(c.initial[k]));
            j["initial"] = std::move(init);
        }
    }
    j["integrator"] = to_json(c.options.integrator);
    json formats = json::array();
    if (c.write_csv) formats.push_back("csv");
    if (c.write_json) formats.push_back("json");
    j["format"] = std::move(formats);
    return j;
}

namespace detail {

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json optional_json(const std::optional<Peak>& p) {
    return p ? json{{"time", p->time}, {"value", p->value}} : json(nullptr);
}

}  // namespace detail

inline json to_json(const ScenarioResult& res) {
    const ScenarioReport& r = res.report;
    json j;
    j["scenario"] = to_string(r.scenario);
    j["complete"] = r.complete;
    j["failed_stages"] = r.failed_stages;
    j["t12"] = detail::optional_json(r.t12);
    j["t23"] = detail::optional_json(r.t23);
    j["t34"] = detail::optional_json(r.t34);
    j["ef1_peak"] = detail::optional_json(r.ef1_peak);
    j["ef2_peak"] = detail::optional_json(r.ef2_peak);
    j["ef3_peak"] = detail::optional_json(r.ef3_peak);
    j["eof_crossings"] = r.eof_crossings;
    j["final_populations"] = r.final_populations;
    j["initial_eof_squid"] = r.initial_eof_squid + 0.0;
    j["final_eof_squid"] = r.final_eof_squid + 0.0;
    j["initial_eof_ab"] = r.initial_eof_ab + 0.0;
    j["final_eof_ab"] = r.final_eof_ab + 0.0;
    j["initial_cl1_squid"] = r.initial_cl1_squid;
    j["final_cl1_squid"] = r.final_cl1_squid;
    j["initial_cl1_ab"] = r.initial_cl1_ab;
    j["final_cl1_ab"] = r.final_cl1_ab;
    j["residual_squid_photon_eof"] = r.residual_squid_photon_eof + 0.0;
    j["target_fidelity"] = detail::optional_json(r.target_fidelity);
    j["max_population_sum_error"] = r.max_population_sum_error;
    j["max_concurrence_coherence_gap"] = r.max_concurrence_coherence_gap;
    j["max_norm_drift"] = r.max_norm_drift;
    j["integrator_stats"] = to_json(r.stats);
    if (!res.trajectory.states.empty()) {
        const Amplitudes& c = res.trajectory.final_state();
        json amps = json::array();
        for (std::size_t k = 0; k < 4; ++k) amps.push_back(to_json(c[k]));
        j["final_amplitudes"] = std::move(amps);
        const double tol = std::max(res.options.integrator.max_sample_drift, default_norm_tolerance);
        j["final_rho_squid"] = to_json(partial_trace(c, squid_pair, tol));
        j["final_rho_ab"] = to_json(partial_trace(c, modes_pair, tol));
    }
    return j;
}

inline json to_json(const LadderComparison& c) {
    return json{{"g_over_delta", c.g_over_delta},
                {"t_end", c.t_end},
                {"max_outer_discrepancy", c.max_outer_discrepancy},
                {"max_intermediate_population", c.max_intermediate_population},
                {"intermediate_bound", 10.0 * c.g_over_delta * c.g_over_delta},
                {"nominal_rabi_rate", c.nominal_rabi_rate},
                {"measured_rabi_rate", c.measured_rabi_rate},
                {"max_lower_population", c.max_lower_population},
                {"max_norm_drift", c.max_norm_drift},
                {"integrator_stats", to_json(c.stats)}};
}

inline json error_json(const std::string& kind, const std::string& message) {
    return json{{"error", json{{"kind", kind}, {"message", message}}}};
}

// Write every file or none: contents go to temporaries in `dir` first and
// are renamed into place only once all of them are on disk.
inline void write_files_atomically(const std::filesystem::path& dir,
                                   const std::map<std::string, std::string>& files) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const bool existed = fs::exists(dir, ec);
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw error("io", "cannot create output directory " + dir.string() +
                              (ec ? ": " + ec.message() : ""));

    std::vector<fs::path> temps;
    auto cleanup = [&] {
        std::error_code ignore;
        for (const auto& t : temps) fs::remove(t, ignore);
        if (!existed) fs::remove(dir, ignore);
    };
    for (const auto& [name, content] : files) {
        const fs::path tmp = dir / ("." + name + ".tmp");
        temps.push_back(tmp);
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.close();
        if (!os) {
            cleanup();
            throw error("io", "cannot write " + (dir / name).string());
        }
    }
    std::size_t k = 0;
    for (const auto& [name, content] : files) {
        fs::rename(temps[k], dir / name, ec);
        if (ec) {
            for (std::size_t i = 0; i < k; ++i) fs::remove(dir / std::next(files.begin(), i)->first, ec);
            cleanup();
            throw error("io", "cannot write " + (dir / name).string());
        }
        ++k;
    }
}

}  // namespace squidqed
