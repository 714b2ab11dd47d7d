#pragma once

// Dispatch a RunConfig to its scenario and turn the result into files on
// disk plus a process exit status.

#include <filesystem>
#include <map>
#include <string>

#include "squidqed/config.hpp"
#include "squidqed/errors.hpp"
#include "squidqed/io.hpp"
#include "squidqed/scenarios.hpp"
#include "squidqed/xi_ladder.hpp"

namespace squidqed {

enum exit_status : int {
    exit_ok = 0,
    exit_usage = 1,       // bad command line or config
    exit_incomplete = 2,  // scenario ran but a stage is missing
    exit_numerical = 3,   // integration, stability or measure failure
};

struct RunOutcome {
    int status = exit_ok;
    json error;                                // null on success
    std::map<std::string, std::string> files;  // name -> content
};

inline int exit_status_for(const error& e) {
    const auto& k = e.kind();
    // An unwritable output directory is a bad --out value.
    if (k == "config" || k == "argument" || k == "normalization" || k == "io") return exit_usage;
    if (k == "scenario_incomplete") return exit_incomplete;
    return exit_numerical;
}

inline json error_json(const error& e) {
    json j = error_json(e.kind(), e.what());
    if (const auto* s = dynamic_cast<const stability_error*>(&e)) j["error"]["time"] = s->time();
    if (const auto* c = dynamic_cast<const config_error*>(&e); c && c->line() > 0)
        j["error"]["line"] = c->line();
    return j;
}

namespace detail {

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void add_scenario_files(RunOutcome& out, const RunConfig& cfg, const ScenarioResult& res) {
    if (cfg.write_csv) out.files["timeseries.csv"] = timeseries_csv(res.rows);
    if (cfg.write_json) {
        json j{{"artifact_version", artifact_version}};
        j["complete"] = res.report.complete;
        j["config"] = to_json(cfg);
        j["report"] = to_json(res);
        out.files["report.json"] = dump(j);
    }
}

}  // namespace detail

// Run without touching the disk.
inline RunOutcome compute(const RunConfig& cfg) {
    RunOutcome out;
    try {
        if (cfg.scenario == RunKind::ladder_compare) {
            const auto cmp = compare_effective_vs_full(cfg.ladder, cfg.ladder_t_end, cfg.options.integrator);
            json j{{"artifact_version", artifact_version}};
            j["complete"] = true;
            j["config"] = to_json(cfg);
            j["dispersive"] = cfg.ladder.dispersive();
            j["report"] = to_json(cmp);
            out.files["report.json"] = detail::dump(j);
            return out;
        }
        ScenarioResult res;
        try {
            switch (cfg.scenario) {
                case RunKind::pair_generation: res = run_pair_generation(cfg.params, cfg.options); break;
                case RunKind::transfer: res = run_entanglement_transfer(cfg.params, cfg.options); break;
                default: res = run_custom(cfg.params, cfg.options, cfg.initial); break;
            }
        } catch (const scenario_incomplete_error& e) {
            detail::add_scenario_files(out, cfg, e.partial());
            out.status = exit_incomplete;
            out.error = error_json(e);
            return out;
        }
        detail::add_scenario_files(out, cfg, res);
    } catch (const error& e) {
        out.files.clear();
        out.status = exit_status_for(e);
        out.error = error_json(e);
    }
    return out;
}

// Run and write the artifacts into cfg.out_dir (all or nothing).
inline RunOutcome run(const RunConfig& cfg) {
    RunOutcome out = compute(cfg);
    if (out.files.empty()) return out;
    try {
        write_files_atomically(cfg.out_dir, out.files);
    } catch (const error& e) {
        out.status = exit_usage;
        out.error = error_json(e);
        out.files.clear();
    }
    return out;
}

}  // namespace squidqed
