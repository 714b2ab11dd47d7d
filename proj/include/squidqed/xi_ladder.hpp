#pragma once

// Three-level cascade |2par 0perp, 0_b> -> |1par 0perp, 1_b> -> |0par 0perp, 2_b>
// and its two-photon effective model. The intermediate level sits Delta away
// from the single-photon resonance; eliminating it leaves a direct coupling
// sqrt(2) g^2 / Delta between the outer levels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "squidqed/cvector.hpp"
#include "squidqed/dynamics.hpp"
#include "squidqed/errors.hpp"

namespace squidqed {

struct LadderParams {
    double g = 0.01;       // single-photon coupling
    double Delta = 1.0;    // omega - delta_a = delta_b - omega
    double delta_a = 9.0;  // |0par 0perp> -> |1par 0perp>
    double delta_b = 11.0; // |1par 0perp> -> |2par 0perp>
    double omega = 10.0;   // photon in mode b
    // Cancel the differential ac Stark shift (g^2/Delta on the upper level,
    // 2 g^2/Delta on the lower one) with a two-photon detuning of the lower
    // level, so that the outer levels stay degenerate after elimination.
    bool compensate_stark_shift = true;

    static LadderParams from_detuning(double g, double Delta, double omega,
                                      bool compensate = true) {
        LadderParams p;
        p.g = g;
        p.Delta = Delta;
        p.omega = omega;
        p.delta_a = omega - Delta;
        p.delta_b = omega + Delta;
        p.compensate_stark_shift = compensate;
        validate(p);
        return p;
    }

    double coupling_ratio() const { return g / std::abs(Delta); }
    double effective_coupling() const { return g * g / Delta; }  // Omega_b
    // g / Delta well above 0.1 leaves the dispersive regime.
    bool dispersive() const { return coupling_ratio() <= 0.1; }

    static void validate(const LadderParams& p) {
        for (double v : {p.g, p.Delta, p.delta_a, p.delta_b, p.omega})
            if (!std::isfinite(v)) throw argument_error("ladder parameters must be finite");
        if (p.g < 0.0) throw argument_error("ladder coupling g must be >= 0");
        if (p.Delta == 0.0) throw argument_error("ladder detuning Delta must be nonzero");
        const double scale = std::max({1.0, std::abs(p.omega), std::abs(p.delta_a), std::abs(p.delta_b)});
        if (std::abs(p.Delta - (p.omega - p.delta_a)) > 1e-12 * scale ||
            std::abs(p.Delta - (p.delta_b - p.omega)) > 1e-12 * scale)
            throw argument_error("ladder detuning must satisfy Delta = omega - delta_a = delta_b - omega");
    }
};

// (upper, intermediate, lower)
using LadderState = ComplexVector<3>;
// (upper, lower)
using LadderPair = ComplexVector<2>;

inline LadderState ladder_rhs(double t, const LadderState& s, const LadderParams& p) {
    // Energies relative to |0par 0perp, 0_b>.
    const double e_upper = p.delta_a + p.delta_b;
    const double e_mid = p.delta_a + p.omega;
    const double e_lower = 2.0 * p.omega;
    const complex up = std::polar(p.g, (e_upper - e_mid) * t);
    const complex down = std::polar(std::sqrt(2.0) * p.g, (e_mid - e_lower) * t);
    const double shift = p.compensate_stark_shift ? -p.effective_coupling() : 0.0;
    const complex mi(0.0, -1.0);
    LadderState d;
    d[0] = mi * (up * s[1]);
    d[1] = mi * (std::conj(up) * s[0] + down * s[2]);
    d[2] = mi * (std::conj(down) * s[1] + shift * s[2]);
    return d;
}

inline LadderPair effective_rhs(double, const LadderPair& s, double Omega_b) {
    const complex k(0.0, -std::sqrt(2.0) * Omega_b);
    LadderPair d;
    d[0] = k * s[1];
    d[1] = k * s[0];
    return d;
}

inline SampledTrajectory<3> simulate_ladder_full(const LadderParams& p, const LadderState& s0,
                                                 double t_end, const IntegratorConfig& cfg = {}) {
    LadderParams::validate(p);
    return integrate_sampled<3>([&p](double t, const LadderState& s) { return ladder_rhs(t, s, p); },
                                s0, t_end, cfg);
}

inline SampledTrajectory<2> simulate_ladder_effective(double Omega_b, const LadderPair& s0,
                                                      double t_end,
                                                      const IntegratorConfig& cfg = {}) {
    if (!std::isfinite(Omega_b)) throw argument_error("Omega_b must be finite");
    return integrate_sampled<2>(
        [Omega_b](double t, const LadderPair& s) { return effective_rhs(t, s, Omega_b); }, s0,
        t_end, cfg);
}

// Time for a full population cycle of the effective model, pi / (sqrt(2) Omega_b).
inline double effective_rabi_period(const LadderParams& p) {
    const double w = std::sqrt(2.0) * std::abs(p.effective_coupling());
    return w > 0.0 ? std::numbers::pi / w : std::numeric_limits<double>::infinity();
}

struct LadderComparison {
    double g_over_delta = 0.0;
    double t_end = 0.0;
    double max_outer_discrepancy = 0.0;      // max |P_full - P_eff| over both outer levels
    double max_intermediate_population = 0.0;
    double nominal_rabi_rate = 0.0;          // sqrt(2) g^2 / Delta
    double measured_rabi_rate = 0.0;         // from the first lobe of the full lower population
    double max_lower_population = 0.0;
    double max_norm_drift = 0.0;
    ode::Stats stats;
};

// Integrate both models side by side from the upper level and compare
// populations on a grid fine enough to resolve the intermediate-level
// oscillation at frequency Delta.
inline LadderComparison compare_effective_vs_full(const LadderParams& p, double t_end,
                                                  IntegratorConfig cfg = {}) {
    LadderParams::validate(p);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw argument_error("t_end must be > 0");
    const double resolve = std::numbers::pi / (8.0 * std::abs(p.Delta));
    cfg.sample_interval = std::min(cfg.sample_interval, resolve);
    cfg.ode.max_step = std::min(cfg.ode.max_step, 1.0 / std::abs(p.Delta));

    const double Omega_b = p.effective_coupling();
    // Both models in one state vector, scaled by 1/sqrt(2) to keep unit norm.
    using Joint = ComplexVector<5>;
    auto joint_rhs = [&p, Omega_b](double t, const Joint& y) {
        const LadderState full = ladder_rhs(t, LadderState{{y[0], y[1], y[2]}}, p);
        const LadderPair eff = effective_rhs(t, LadderPair{{y[3], y[4]}}, Omega_b);
        return Joint{{full[0], full[1], full[2], eff[0], eff[1]}};
    };
    const double h = 1.0 / std::sqrt(2.0);
    const Joint y0{{h, 0.0, 0.0, h, 0.0}};

    LadderComparison out;
    out.g_over_delta = p.coupling_ratio();
    out.t_end = t_end;
    out.nominal_rabi_rate = std::sqrt(2.0) * std::abs(Omega_b);

    // The first lobe of the lower population, sin^2(W t), is centred on
    // t = pi / (2 W). Its centre is taken midway between the half-population
    // crossings, which are steep and insensitive to the fast ripple.
    double prev_t = 0.0, prev_pl = 0.0;
    double t_up = -1.0, t_down = -1.0;
    bool in_lobe = false, lobe_done = false;

    out.stats = integrate_observed<5>(joint_rhs, y0, t_end, cfg, [&](double t, const Joint& y, double drift) {
        const double pu = 2.0 * std::norm(y[0]);
        const double pm = 2.0 * std::norm(y[1]);
        const double pl = 2.0 * std::norm(y[2]);
        const double eu = 2.0 * std::norm(y[3]);
        const double el = 2.0 * std::norm(y[4]);
        out.max_outer_discrepancy =
            std::max({out.max_outer_discrepancy, std::abs(pu - eu), std::abs(pl - el)});
        out.max_intermediate_population = std::max(out.max_intermediate_population, pm);
        out.max_lower_population = std::max(out.max_lower_population, pl);
        out.max_norm_drift = std::max(out.max_norm_drift, 2.0 * drift);

        if (!lobe_done && t > 0.0) {
            const auto cross = [&] { return prev_t + (t - prev_t) * (0.5 - prev_pl) / (pl - prev_pl); };
            if (t_up < 0.0 && prev_pl < 0.5 && pl >= 0.5) t_up = cross();
            if (pl > 0.6) in_lobe = true;
            if (in_lobe && prev_pl >= 0.5 && pl < 0.5) t_down = cross();
            if (in_lobe && pl < 0.4) lobe_done = true;
        }
        prev_t = t;
        prev_pl = pl;
    });
    if (t_up > 0.0 && t_down > t_up)
        out.measured_rabi_rate = std::numbers::pi / (t_up + t_down);
    return out;
}

}  // namespace squidqed
