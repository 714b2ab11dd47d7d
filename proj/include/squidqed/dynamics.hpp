#pragma once

// Interaction-picture dynamics of the four coupled amplitudes under chirped
// level frequencies. Time is measured in units of 1/Omega.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "squidqed/cvector.hpp"
#include "squidqed/errors.hpp"
#include "squidqed/ode.hpp"
#include "squidqed/quantum_core.hpp"

namespace squidqed {

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct ModelParams {
    double Omega = 1.0;       // |0par 1perp> <-> |2par 0perp>
    double Omega_a = 0.05;    // photon a, |0par 0perp> <-> |0par 1perp>
    double Omega_b = 0.05;    // two-photon coupling g^2 / Delta
    double omega_a = 20.0;    // incident photon
    double omega_b = 10.0;    // emitted photon
    double omega01_0 = 19.42; // |0par 1perp> at t = 0
    double omega20_0 = 32.8;  // |2par 0perp> at t = 0
    double omega00 = 0.0;     // ground level (gauge)
    double v1 = 1.5e-4;       // upward chirp of |0par 1perp>
    double v2 = 1.5e-4;       // downward chirp of |2par 0perp>
};

inline void validate(const ModelParams& p) {
    const std::array<std::pair<const char*, double>, 10> fields{{{"Omega", p.Omega},
                                                                 {"Omega_a", p.Omega_a},
                                                                 {"Omega_b", p.Omega_b},
                                                                 {"omega_a", p.omega_a},
                                                                 {"omega_b", p.omega_b},
                                                                 {"omega01_0", p.omega01_0},
                                                                 {"omega20_0", p.omega20_0},
                                                                 {"omega00", p.omega00},
                                                                 {"v1", p.v1},
                                                                 {"v2", p.v2}}};
    for (const auto& [name, value] : fields)
        if (!std::isfinite(value))
            throw argument_error(std::string("model parameter ") + name + " is not finite");
    // Omega = 0 is allowed so that single transitions can be isolated.
    if (!(p.Omega >= 0.0)) throw argument_error("model parameter Omega must be >= 0");
    if (p.v1 < 0.0 || p.v2 < 0.0) throw argument_error("chirp rates v1, v2 must be >= 0");
}

enum class Chirp { up, down };

inline double chirped_frequency(double omega0, double v, double t, Chirp dir) {
    return dir == Chirp::up ? omega0 * (1.0 + v * t) : omega0 * (1.0 - v * t);
}

// Integral of chirped_frequency from 0 to t.
inline double phase_r(double omega0, double v, double t, Chirp dir) {
    const double q = 0.5 * v * t * t;
    return dir == Chirp::up ? omega0 * (t + q) : omega0 * (t - q);
}

struct CouplingPhases {
    double a;      // (omega00 + omega_a) t - r01(t)
    double Omega;  // r01(t) - r20(t)
    double b;      // (omega00 + 2 omega_b) t - r20(t)
};

inline CouplingPhases coupling_phases(double t, const ModelParams& p) {
    const double r01 = phase_r(p.omega01_0, p.v1, t, Chirp::up);
    const double r20 = phase_r(p.omega20_0, p.v2, t, Chirp::down);
    return {(p.omega00 + p.omega_a) * t - r01, r01 - r20, (p.omega00 + 2.0 * p.omega_b) * t - r20};
}

using CouplingMatrix = std::array<std::array<complex, 4>, 4>;

// Hermitian M(t) with dc/dt = -i M(t) c.
inline CouplingMatrix coupling_matrix(double t, const ModelParams& p) {
    const CouplingPhases ph = coupling_phases(t, p);
    const complex ea = std::polar(p.Omega_a, ph.a);
    const complex eO = std::polar(p.Omega, ph.Omega);
    const complex eb = std::polar(std::sqrt(2.0) * p.Omega_b, ph.b);
    CouplingMatrix m{};
    m[0][1] = ea;
    m[1][0] = std::conj(ea);
    m[1][2] = eO;
    m[2][1] = std::conj(eO);
    m[2][3] = std::conj(eb);
    m[3][2] = eb;
    return m;
}

inline Amplitudes rhs(double t, const Amplitudes& c, const ModelParams& p) {
    const CouplingMatrix m = coupling_matrix(t, p);
    const complex mi(0.0, -1.0);
    Amplitudes d;
    d[0] = mi * (m[0][1] * c[1]);
    d[1] = mi * (m[1][0] * c[0] + m[1][2] * c[2]);
    d[2] = mi * (m[2][1] * c[1] + m[2][3] * c[3]);
    d[3] = mi * (m[3][2] * c[2]);
    return d;
}

struct IntegratorConfig {
    ode::Config ode{};
    double sample_interval = 1.0;
    double max_sample_drift = 1e-6;  // stability bound at every sample
    double max_final_drift = 1e-8;   // fidelity bound at t_end
};

inline void validate(const IntegratorConfig& cfg) {
    ode::validate(cfg.ode);
    if (!(cfg.sample_interval > 0.0)) throw argument_error("sample interval must be > 0");
}

template <std::size_t N>
struct SampledTrajectory {
    std::vector<double> times;
    std::vector<ComplexVector<N>> states;
    std::vector<double> norm_drift;  // | |c|^2 - 1 | at each sample
    ode::Stats stats;

    std::size_t size() const { return times.size(); }
    const ComplexVector<N>& final_state() const { return states.back(); }
};

using Trajectory = SampledTrajectory<4>;

// Integrate dy/dt = f(t, y) from 0 to t_end and hand every sample (multiples
// of the configured interval, plus t_end) to `observe(t, y, drift)`. No
// renormalization is applied. Returns the stepper statistics.
template <std::size_t N, class Rhs, class Observer>
ode::Stats integrate_observed(Rhs&& f, const ComplexVector<N>& y0, double t_end,
                              const IntegratorConfig& cfg, Observer&& observe) {
    validate(cfg);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw argument_error("t_end must be > 0");
    const double n0 = norm(y0);
    if (!(std::abs(n0 - 1.0) <= default_norm_tolerance))
        throw normalization_error("initial state not normalized: |c|^2 = " + std::to_string(n0));

    auto stepper = ode::make_stepper<ComplexVector<N>>(
        [&f](double t, const ComplexVector<N>& y) { return f(t, y); }, RmsErrorNorm{}, cfg.ode);

    auto record = [&](double t, const ComplexVector<N>& y) {
        const double drift = std::abs(norm(y) - 1.0);
        if (!(drift <= cfg.max_sample_drift))
            throw stability_error(t, "norm drift " + format_double(drift) + " exceeds " +
                                         format_double(cfg.max_sample_drift) + " at t = " +
                                         format_double(t));
        observe(t, y, drift);
        return drift;
    };

    double t = 0.0;
    ComplexVector<N> y = y0;
    record(t, y);
    for (std::size_t k = 1;; ++k) {
        const double target = static_cast<double>(k) * cfg.sample_interval;
        if (target >= t_end * (1.0 - 1e-12)) break;
        stepper.advance(t, y, target);
        record(t, y);
    }
    stepper.advance(t, y, t_end);
    const double final_drift = record(t_end, y);
    if (!(final_drift <= cfg.max_final_drift))
        throw stability_error(t_end, "final norm drift " + format_double(final_drift) +
                                         " exceeds " + format_double(cfg.max_final_drift));
    return stepper.stats();
}

template <std::size_t N, class Rhs>
SampledTrajectory<N> integrate_sampled(Rhs&& f, const ComplexVector<N>& y0, double t_end,
                                       const IntegratorConfig& cfg) {
    SampledTrajectory<N> tr;
    if (cfg.sample_interval > 0.0 && t_end > 0.0) {
        const auto n = static_cast<std::size_t>(t_end / cfg.sample_interval) + 2;
        tr.times.reserve(n);
        tr.states.reserve(n);
        tr.norm_drift.reserve(n);
    }
    tr.stats = integrate_observed<N>(std::forward<Rhs>(f), y0, t_end, cfg,
                                     [&tr](double t, const ComplexVector<N>& y, double drift) {
                                         tr.times.push_back(t);
                                         tr.states.push_back(y);
                                         tr.norm_drift.push_back(drift);
                                     });
    return tr;
}

inline Trajectory integrate(const Amplitudes& c0, const ModelParams& p, double t_end,
                            const IntegratorConfig& cfg = {}) {
    validate(p);
    return integrate_sampled<4>([&p](double t, const Amplitudes& c) { return rhs(t, c, p); }, c0,
                                t_end, cfg);
}

}  // namespace squidqed
