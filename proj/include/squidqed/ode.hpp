#pragma once

// Adaptive Dormand-Prince 5(4) integrator over any vector-space state type.
// The state type needs `x + y`, `double * x` and a free `error_norm` overload
// supplied by the caller through the `Norm` functor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "squidqed/errors.hpp"

namespace squidqed::ode {

struct Config {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 1.0;
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

inline void validate(const Config& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw argument_error("integrator tolerances must be positive");
    if (!(cfg.initial_step > 0.0) || !(cfg.max_step > 0.0))
        throw argument_error("integrator step sizes must be positive");
    if (cfg.max_steps == 0) throw argument_error("integrator max_steps must be positive");
}

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace tableau

// Stepper that keeps the FSAL derivative and the current step size between
// calls so that sampling on a fixed grid does not restart the controller.
template <class State, class Rhs, class Norm>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, Norm err_norm, Config cfg)
        : rhs_(std::move(rhs)), norm_(std::move(err_norm)), cfg_(cfg), h_(cfg.initial_step) {
        validate(cfg_);
    }

    const Stats& stats() const { return stats_; }

    // Advance y from t to t_target (> t). Steps are clipped so that t_target
    // is hit exactly.
    void advance(double& t, State& y, double t_target) {
        using namespace tableau;
        if (!have_k1_ || t != t_k1_) {
            k1_ = rhs_(t, y);
            ++stats_.evaluations;
            have_k1_ = true;
        }
        while (t < t_target) {
            if (stats_.accepted + stats_.rejected >= cfg_.max_steps)
                throw integration_error("maximum number of steps (" +
                                        std::to_string(cfg_.max_steps) + ") exceeded at t = " +
                                        std::to_string(t));
            double h = std::min({h_, cfg_.max_step, t_target - t});
            const bool clipped = h < std::min(h_, cfg_.max_step);
            if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                if (t_target - t <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                    t = t_target;
                    break;
                }
                throw integration_error("step size underflow at t = " + std::to_string(t));
            }

            const State k2 = rhs_(t + c2 * h, y + (h * a21) * k1_);
            const State k3 = rhs_(t + c3 * h, y + (h * a31) * k1_ + (h * a32) * k2);
            const State k4 = rhs_(t + c4 * h, y + (h * a41) * k1_ + (h * a42) * k2 + (h * a43) * k3);
            const State k5 = rhs_(t + c5 * h, y + (h * a51) * k1_ + (h * a52) * k2 +
                                                  (h * a53) * k3 + (h * a54) * k4);
            const State k6 = rhs_(t + h, y + (h * a61) * k1_ + (h * a62) * k2 + (h * a63) * k3 +
                                             (h * a64) * k4 + (h * a65) * k5);
            const State y_new =
                y + (h * b1) * k1_ + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
            const State k7 = rhs_(t + h, y_new);
            stats_.evaluations += 6;

            const State err = (h * e1) * k1_ + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 +
                              (h * e6) * k6 + (h * e7) * k7;
            const double e = norm_(err, y, y_new, cfg_.abs_tol, cfg_.rel_tol);

            if (e <= 1.0) {
                ++stats_.accepted;
                t = (h == t_target - t) ? t_target : t + h;
                y = y_new;
                k1_ = k7;
                t_k1_ = t;
                // A clipped step says nothing about the natural step size.
                if (!clipped) h_ = h * grow_factor(e);
            } else {
                ++stats_.rejected;
                h_ = h * std::max(0.2, 0.9 * std::pow(e, -0.2));
            }
        }
    }

private:
    static double grow_factor(double e) {
        if (e == 0.0) return 5.0;
        return std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
    }

    Rhs rhs_;
    Norm norm_;
    Config cfg_;
    double h_;
    State k1_{};
    double t_k1_ = 0.0;
    bool have_k1_ = false;
    Stats stats_;
};

template <class State, class Rhs, class Norm>
DormandPrince<State, Rhs, Norm> make_stepper(Rhs rhs, Norm err_norm, Config cfg) {
    return DormandPrince<State, Rhs, Norm>(std::move(rhs), std::move(err_norm), cfg);
}

// Classic fixed-step RK4, used for reference integrations.
template <class State, class Rhs>
State rk4_fixed(Rhs&& rhs, State y, double t0, double t1, std::size_t steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    double t = t0;
    for (std::size_t i = 0; i < steps; ++i) {
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
        const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
        const State k4 = rhs(t + h, y + h * k3);
        y = y + (h / 6.0) * k1 + (h / 3.0) * k2 + (h / 3.0) * k3 + (h / 6.0) * k4;
        t = t0 + static_cast<double>(i + 1) * h;
    }
    return y;
}

}  // namespace squidqed::ode
