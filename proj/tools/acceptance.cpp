// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "squidqed/dynamics.hpp"
#include "squidqed/measures.hpp"
#include "squidqed/properties.hpp"
#include "squidqed/scenarios.hpp"
#include "squidqed/xi_ladder.hpp"

using namespace squidqed;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const ScenarioResult& pair_run() {
    static const ScenarioResult r = [] {
        const auto s = pair_generation_defaults();
        try {
            return run_pair_generation(s.params, s.options);
        } catch (const scenario_incomplete_error& e) {
            return e.partial();
        }
    }();
    return r;
}

const ScenarioResult& transfer_run() {
    static const ScenarioResult r = [] {
        const auto s = transfer_defaults();
        try {
            return run_entanglement_transfer(s.params, s.options);
        } catch (const scenario_incomplete_error& e) {
            return e.partial();
        }
    }();
    return r;
}

Verdict unitarity() {
    const auto r = check_norm_conservation(101, 100, 1000.0);
    return {r.passed, fmt("max final |norm - 1| = %.3g over 100 draws to t = 1000 (bound 1e-8)", r.worst)};
}

Verdict measure_oracles() {
    // closed form 2|c_i c_j| for the four reductions with a single coherence
    const auto& tr = pair_run().trajectory;
    const std::array<std::pair<FactorPair, std::pair<int, int>>, 4> pairs{{
        {ef1_pair, {0, 1}}, {ef2_pair, {1, 2}}, {ef3_pair, {2, 3}}, {modes_pair, {0, 3}}}};
    double worst = 0.0;
    const std::size_t n = 1000;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = s * (tr.size() - 1) / (n - 1);
        const Amplitudes& c = tr.states[i];
        for (const auto& [kp, ij] : pairs) {
            const double closed = 2.0 * std::abs(c[ij.first] * c[ij.second]);
            worst = std::max(worst, std::abs(concurrence(partial_trace(c, kp, 1e-6)) - closed));
        }
    }
    // 40-digit value 0.94268318925549224509...
    const double e = eof_from_concurrence(0.96);
    const long double r = std::sqrt(1.0L - 0.96L * 0.96L);
    const long double p = (1.0L + r) / 2.0L, m = (1.0L - r) / 2.0L;
    const double ext = static_cast<double>(-p * std::log2(p) - m * std::log2(m));
    const bool ok = worst <= 1e-10 && std::abs(e - 0.94268) <= 1e-5 &&
                    std::abs(e - 0.9426831892554922) <= 1e-12 && std::abs(e - ext) <= 1e-12;
    return {ok, fmt("max |C - 2|c_i c_j|| = %.3g on 1000 samples; EoF(0.96) = %.8f (extended %.8f)",
                    worst, e, ext)};
}

Verdict partial_trace_oracle() {
    const auto r = check_partial_trace_oracle(303, 1000);
    // zero pattern and coherence position of the modes and SQUID matrices
    std::mt19937_64 g(304);
    bool structure = true;
    for (int s = 0; s < 1000; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        const auto ab = partial_trace(c, modes_pair);
        const auto sq = partial_trace(c, squid_pair);
        const std::array<std::pair<const PairDensityMatrix*, complex>, 2> checks{
            {{&ab, c[0] * std::conj(c[3])}, {&sq, c[1] * std::conj(c[2])}}};
        for (const auto& [rho, coh] : checks)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const complex v = (*rho)(i, j);
                    if (i == 1 && j == 2) structure = structure && v == coh;
                    else if (i == 2 && j == 1) structure = structure && v == std::conj(coh);
                    else if (i != j || i == 3) structure = structure && v == 0.0;
                }
        structure = structure && ab(0, 0) == std::norm(c[1]) + std::norm(c[2]) &&
                    ab(1, 1) == std::norm(c[0]) && ab(2, 2) == std::norm(c[3]) &&
                    sq(0, 0) == std::norm(c[0]) + std::norm(c[3]) && sq(1, 1) == std::norm(c[1]) &&
                    sq(2, 2) == std::norm(c[2]);
    }
    return {r.passed && structure,
            fmt("max entry gap vs 16-dim embedding = %.3g (bound 1e-12); modes/SQUID structure ", r.worst) +
                (structure ? "exact" : "BROKEN")};
}

Verdict integrator_oracles() {
    ModelParams rabi;
    rabi.Omega = rabi.Omega_b = 0.0;
    rabi.Omega_a = 1.0;
    rabi.omega_a = rabi.omega01_0;
    rabi.v1 = rabi.v2 = 0.0;
    Amplitudes c0;
    c0[0] = 1.0;
    const auto tr = integrate(c0, rabi, std::numbers::pi / 2.0);
    const double rabi_err = std::max(std::abs(std::norm(tr.final_state()[1]) - 1.0), std::abs(tr.final_state()[0]));

    IntegratorConfig tight;
    tight.ode.rel_tol = 1e-12;
    tight.ode.abs_tol = 1e-14;
    double lz_worst = 0.0;
    for (double alpha : {4.0, 8.0}) {
        ModelParams p;
        p.Omega_a = p.Omega_b = 0.0;
        p.Omega = 1.0;
        p.omega01_0 = 100.0;
        p.omega20_0 = 300.0;
        p.v1 = p.v2 = alpha / 400.0;
        Amplitudes s0;
        s0[1] = 1.0;
        const double survival = std::norm(integrate(s0, p, 100.0, tight).final_state()[1]);
        const double expected = std::exp(-2.0 * std::numbers::pi / alpha);
        lz_worst = std::max(lz_worst, std::abs(survival - expected) / expected);
    }
    return {rabi_err <= 1e-8 && lz_worst <= 0.02,
            fmt("Rabi error at pi/2 = %.3g (bound 1e-8); Landau-Zener worst relative error %.3g%% (bound 2%%)",
                rabi_err, 100.0 * lz_worst)};
}

Verdict ladder() {
    const auto p = LadderParams::from_detuning(0.01, 1.0, 10.0);
    IntegratorConfig cfg;
    cfg.ode.rel_tol = 1e-12;
    cfg.ode.abs_tol = 1e-14;
    const auto c = compare_effective_vs_full(p, effective_rabi_period(p), cfg);
    const double bound = 10.0 * c.g_over_delta * c.g_over_delta;
    return {c.max_intermediate_population <= bound && c.max_outer_discrepancy <= 0.05,
            fmt("g/Delta = 0.01: max intermediate %.3g (bound %.3g), max outer discrepancy %.3g (bound 0.05)",
                c.max_intermediate_population, bound, c.max_outer_discrepancy)};
}

Verdict pair_populations() {
    const auto& r = pair_run().report;
    const bool ok = r.t12 && r.t23 && r.t34 && *r.t12 < *r.t23 && *r.t23 < *r.t34 &&
                    r.final_populations[3] >= 0.95;
    return {ok, fmt("t12 = %.2f, t23 = %.2f, t34 = %.2f, final P4 = %.4f", r.t12.value_or(NAN),
                    r.t23.value_or(NAN), r.t34.value_or(NAN), r.final_populations[3])};
}

Verdict pair_entanglement() {
    const auto& r = pair_run().report;
    if (!(r.ef1_peak && r.ef2_peak && r.ef3_peak && r.t12 && r.t23 && r.t34))
        return {false, "missing peak or crossing"};
    const double d1 = std::abs(r.ef1_peak->time - *r.t12), d2 = std::abs(r.ef2_peak->time - *r.t23),
                 d3 = std::abs(r.ef3_peak->time - *r.t34);
    const bool ordered = r.ef1_peak->time <= r.ef2_peak->time && r.ef2_peak->time <= r.ef3_peak->time;
    return {std::max({d1, d2, d3}) <= 5.0 && ordered,
            fmt("peak-to-crossing offsets %.3f, %.3f, %.3f (bound 5); ", d1, d2, d3) +
                (ordered ? "peaks ordered" : "peaks OUT OF ORDER")};
}

Verdict transfer() {
    const auto& res = transfer_run();
    const auto& r = res.report;
    double gap = 0.0;
    for (const auto& row : res.rows)
        gap = std::max({gap, std::abs(row.C_ab - row.Cl1_ab), std::abs(row.C_squid - row.Cl1_squid)});
    const double fid = r.target_fidelity.value_or(0.0);
    const bool ok = std::abs(r.initial_eof_squid - 1.0) <= 1e-9 && r.final_eof_ab >= 0.95 &&
                    r.final_eof_squid <= 0.05 && gap <= 1e-10 && fid >= 0.95;
    return {ok, fmt("EoF_squid %.10f -> %.4f, EoF_ab -> %.4f, fidelity %.4f; ", r.initial_eof_squid,
                    r.final_eof_squid, r.final_eof_ab, fid) +
                    fmt("max |C - Cl1| = %.3g", gap)};
}

int run_cli(const std::string& args) {
    const int raw = std::system((std::string(SQUIDQED_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / "squidqed_acceptance_determinism";
    fs::remove_all(root);
    bool ok = true;
    std::size_t bytes = 0;
    for (const char* scenario : {"pair-generation", "transfer"}) {
        const fs::path a = root / scenario / "a", b = root / scenario / "b";
        const std::string args = std::string("simulate --set scenario=") + scenario + " --out ";
        ok = ok && run_cli(args + a.string()) == 0 && run_cli(args + b.string()) == 0;
        for (const char* f : {"timeseries.csv", "report.json"}) {
            const std::string x = slurp(a / f), y = slurp(b / f);
            ok = ok && !x.empty() && x == y;
            bytes += x.size();
        }
    }
    fs::remove_all(root);
    return {ok, fmt("two CLI runs per scenario, %.0f bytes compared", static_cast<double>(bytes))};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"unitarity", unitarity},
        {"measure oracles", measure_oracles},
        {"partial-trace oracle", partial_trace_oracle},
        {"integrator oracles", integrator_oracles},
        {"ladder vs effective model", ladder},
        {"pair generation populations", pair_populations},
        {"pair generation entanglement peaks", pair_entanglement},
        {"entanglement transfer", transfer},
        {"determinism", determinism},
    };
    int failed = 0, k = 0;
    for (const auto& [name, check] : criteria) {
        ++k;
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("criterion %d %-36s %s  %s\n", k, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", k - failed, k);
    return failed;
}
