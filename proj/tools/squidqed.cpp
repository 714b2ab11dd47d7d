// squidqed command-line front end.
//
//   squidqed simulate       --config run.cfg --out dir [--format csv,json] [--set key=value]...
//   squidqed ladder-compare --out dir [--set g=0.01]...
//   squidqed sweep          --config run.cfg --out dir --vary key=a,b,c [--vary ...] [--jobs N]
//   squidqed validate       [--seed N] [--draws N] [--t-end T] [--out dir]
//
// Exit codes: 0 ok, 1 usage/config, 2 scenario incomplete, 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "squidqed/config.hpp"
#include "squidqed/io.hpp"
#include "squidqed/properties.hpp"
#include "squidqed/runner.hpp"

namespace fs = std::filesystem;
using namespace squidqed;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::string format;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key = value configuration file");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "comma-separated output formats (csv, json)");
    cmd->add_option("--set", o.sets, "override one configuration key (key=value), repeatable")
        ->take_all();
}

void print_error(const json& e) { std::cerr << e.dump() << std::endl; }

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// File entries, then --set, then --format and --out.
RunConfig load_config(const CommonOptions& o, const std::vector<ConfigEntry>& extra = {}) {
    const auto file = o.config_path.empty() ? std::vector<ConfigEntry>{}
                                            : parse_entries(read_file(o.config_path));
    std::vector<ConfigEntry> overrides;
    for (const auto& s : o.sets) overrides.push_back(parse_override(s));
    overrides.insert(overrides.end(), extra.begin(), extra.end());
    if (!o.format.empty()) overrides.push_back(parse_override("format=" + o.format));
    if (!o.out.empty()) overrides.push_back(parse_override("out=" + o.out));
    try {
        return resolve_config(file, overrides);
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        throw config_error(e.what());
    }
}

int report(const RunOutcome& r, const RunConfig& cfg) {
    if (r.status != exit_ok) print_error(r.error);
    if (!r.files.empty()) {
        for (const auto& [name, content] : r.files)
            std::cout << (fs::path(cfg.out_dir) / name).string() << "\n";
    }
    return r.status;
}

int cmd_simulate(const CommonOptions& o, bool ladder) {
    RunConfig cfg;
    try {
        std::vector<ConfigEntry> extra;
        if (ladder) extra.push_back(parse_override("scenario=ladder-compare"));
        cfg = load_config(o, extra);
    } catch (const error& e) {
        print_error(error_json(e));
        return exit_usage;
    }
    if (cfg.scenario == RunKind::ladder_compare && !cfg.ladder.dispersive())
        std::cerr << "warning: g/Delta = " << format_double(cfg.ladder.coupling_ratio())
                  << " is outside the dispersive regime (> 0.1)" << std::endl;
    return report(run(cfg), cfg);
}

struct Axis {
    std::string key;
    std::vector<std::string> values;
};

Axis parse_axis(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw config_error("--vary expects key=v1,v2,..., got '" + s + "'");
    Axis a;
    a.key = s.substr(0, eq);
    std::stringstream ss(s.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ','))
        if (!v.empty()) a.values.push_back(v);
    if (a.values.empty()) throw config_error("--vary " + a.key + " has no values");
    return a;
}

int cmd_sweep(const CommonOptions& o, const std::vector<std::string>& vary, unsigned jobs) {
    if (o.out.empty()) {
        print_error(error_json("config", "sweep needs --out"));
        return exit_usage;
    }
    struct Job {
        std::string key;
        RunConfig cfg;
        RunOutcome outcome;
    };
    std::vector<Job> plan;
    try {
        std::vector<Axis> axes;
        for (const auto& v : vary) axes.push_back(parse_axis(v));
        if (axes.empty()) throw config_error("sweep needs at least one --vary key=v1,v2,...");
        std::vector<std::size_t> idx(axes.size(), 0);
        for (;;) {
            std::vector<ConfigEntry> extra;
            std::string key;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const auto& kv = axes[a].key + "=" + axes[a].values[idx[a]];
                extra.push_back(parse_override(kv));
                key += (a ? "_" : "") + kv;
            }
            CommonOptions jo = o;
            jo.out = (fs::path(o.out) / key).string();
            plan.push_back({key, load_config(jo, extra), {}});
            std::size_t a = 0;
            while (a < axes.size() && ++idx[a] == axes[a].values.size()) idx[a++] = 0;
            if (a == axes.size()) break;
        }
    } catch (const error& e) {
        print_error(error_json(e));
        return exit_usage;
    }
    std::sort(plan.begin(), plan.end(), [](const Job& x, const Job& y) { return x.key < y.key; });

    // Jobs are independent; each writes only into its own directory.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < plan.size();) plan[i].outcome = run(plan[i].cfg);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json summary{{"artifact_version", artifact_version}, {"jobs", json::array()}};
    int status = exit_ok;
    for (const auto& j : plan) {
        json entry{{"key", j.key}, {"directory", j.key}, {"status", j.outcome.status}};
        if (!j.outcome.error.is_null()) entry["error"] = j.outcome.error["error"];
        summary["jobs"].push_back(std::move(entry));
        status = std::max(status, j.outcome.status);
    }
    try {
        write_files_atomically(o.out, {{"sweep.json", summary.dump(2) + "\n"}});
    } catch (const error& e) {
        print_error(error_json(e));
        return exit_usage;
    }
    std::cout << (fs::path(o.out) / "sweep.json").string() << "\n";
    return status;
}

int cmd_validate(std::uint64_t seed, std::size_t draws, double t_end, const std::string& out) {
    if (draws == 0 || !(t_end > 0.0)) {
        print_error(error_json("config", "--draws must be >= 1 and --t-end > 0"));
        return exit_usage;
    }
    std::vector<PropertyResult> results;
    try {
        results = run_property_suite(seed, draws, t_end);
    } catch (const error& e) {
        print_error(error_json(e));
        return exit_numerical;
    }
    json j{{"artifact_version", artifact_version}, {"seed", seed}, {"properties", json::array()}};
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%-4s %-52s worst %.3e  bound %.1e  n = %zu\n", r.passed ? "ok" : "FAIL",
                    r.name.c_str(), r.worst, r.bound, r.samples);
        j["properties"].push_back({{"name", r.name},
                                   {"passed", r.passed},
                                   {"worst", r.worst},
                                   {"bound", r.bound},
                                   {"samples", r.samples}});
        ok = ok && r.passed;
    }
    j["passed"] = ok;
    if (!out.empty()) {
        try {
            write_files_atomically(out, {{"validate.json", j.dump(2) + "\n"}});
        } catch (const error& e) {
            print_error(error_json(e));
            return exit_usage;
        }
    }
    return ok ? exit_ok : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dc SQUID + radiation simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts, ladder_opts, sweep_opts;
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    add_common(sim, sim_opts);

    auto* ladder = app.add_subcommand("ladder-compare", "full three-level ladder vs effective two-level model");
    add_common(ladder, ladder_opts);

    auto* sweep = app.add_subcommand("sweep", "run a grid of scenarios concurrently");
    add_common(sweep, sweep_opts);
    std::vector<std::string> vary;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable, Cartesian product)")->take_all();
    sweep->add_option("--jobs", jobs, "concurrent jobs")->check(CLI::PositiveNumber);

    auto* val = app.add_subcommand("validate", "run the randomized property suite");
    std::uint64_t seed = RunConfig{}.seed;
    std::size_t draws = 100;
    double t_end = 1000.0;
    std::string val_out;
    val->add_option("--seed", seed, "random seed");
    val->add_option("--draws", draws, "random parameter draws for the norm check");
    val->add_option("--t-end", t_end, "integration time for the norm check");
    val->add_option("--out", val_out, "write validate.json here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(error_json("usage", e.what()));
        return exit_usage;
    }

    if (*sim) return cmd_simulate(sim_opts, false);
    if (*ladder) return cmd_simulate(ladder_opts, true);
    if (*sweep) return cmd_sweep(sweep_opts, vary, jobs);
    return cmd_validate(seed, draws, t_end, val_out);
}
