#pragma once

// Randomized property checks over the state space, the measures and the
// integrator. Each check draws from a seeded generator, so a given seed
// always produces the same verdicts and numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squidqed/dynamics.hpp"
#include "squidqed/measures.hpp"
#include "squidqed/quantum_core.hpp"
#include "squidqed/scenarios.hpp"

namespace squidqed {

struct PropertyResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // largest observed deviation
    double bound = 0.0;
    std::size_t samples = 0;
};

namespace props {

using rng = std::mt19937_64;

inline Amplitudes random_amplitudes(rng& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    Amplitudes c;
    for (std::size_t k = 0; k < 4; ++k) c[k] = {n(g), n(g)};
    return (1.0 / std::sqrt(norm(c))) * c;
}

inline ModelParams random_params(rng& g) {
    auto u = [&g](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); };
    ModelParams p;
    p.Omega = u(0.5, 2.0);
    p.Omega_a = u(0.0, 0.2);
    p.Omega_b = u(0.0, 0.2);
    p.omega_a = u(5.0, 30.0);
    p.omega_b = u(5.0, 20.0);
    p.omega01_0 = u(5.0, 30.0);
    p.omega20_0 = u(10.0, 50.0);
    p.v1 = u(0.0, 5e-4);
    p.v2 = u(0.0, 5e-4);
    return p;
}

// Reduced matrix of the 16-dimensional embedding of c, traced numerically.
// Full index bits: A = 1, B = 2, P = 4, T = 8.
inline PairDensityMatrix embedding_partial_trace(const Amplitudes& c, FactorPair kept) {
    std::array<complex, 16> psi{};
    for (std::size_t k = 0; k < 4; ++k) {
        std::size_t idx = 0;
        for (Factor f : all_factors)
            if (label(k, f)) idx |= std::size_t{1} << static_cast<int>(f);
        psi[idx] += c[k];
    }
    const int bx = static_cast<int>(kept.first), by = static_cast<int>(kept.second);
    PairDensityMatrix::storage m{};
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            // traced bits must agree
            const std::size_t mask = 15u & ~((1u << bx) | (1u << by));
            if ((i & mask) != (j & mask)) continue;
            const auto ri = FactorPair::index((i >> bx) & 1, (i >> by) & 1);
            const auto rj = FactorPair::index((j >> bx) & 1, (j >> by) & 1);
            m[ri][rj] += psi[i] * std::conj(psi[j]);
        }
    return PairDensityMatrix(kept, m);
}

inline std::vector<FactorPair> ordered_pairs() {
    std::vector<FactorPair> out;
    for (Factor a : all_factors)
        for (Factor b : all_factors)
            if (a != b) out.push_back({a, b});
    return out;
}

inline double max_entry_gap(const PairDensityMatrix& x, const PairDensityMatrix& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) d = std::max(d, std::abs(x(i, j) - y(i, j)));
    return d;
}

inline Eigen::Matrix2cd random_unitary(rng& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix2cd z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z(i, j) = {n(g), n(g)};
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(z);
    return qr.householderQ();
}

// Generic full-rank two-qubit state: A A^dagger / tr with Gaussian A.
inline PairDensityMatrix random_mixed_state(rng& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix4cd a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = {n(g), n(g)};
    Eigen::Matrix4cd r = a * a.adjoint();
    r /= r.trace().real();
    PairDensityMatrix::storage m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = r(i, j);
    return PairDensityMatrix({Factor::A, Factor::B}, m);
}

inline PairDensityMatrix from_eigen(const Eigen::Matrix4cd& r, FactorPair kept) {
    PairDensityMatrix::storage m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = r(i, j);
    return PairDensityMatrix(kept, m);
}

inline PropertyResult finish(std::string name, double worst, double bound, std::size_t n) {
    return {std::move(name), worst <= bound, worst, bound, n};
}

}  // namespace props

inline PropertyResult check_partial_trace_oracle(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        for (const auto& kp : props::ordered_pairs())
            worst = std::max(worst, props::max_entry_gap(partial_trace(c, kp),
                                                         props::embedding_partial_trace(c, kp)));
    }
    return props::finish("partial trace = 16-dim embedding", worst, 1e-12, n);
}

// Hermitian, unit trace, positive semidefinite, purity <= 1.
inline PropertyResult check_density_matrix_invariants(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        for (const auto& kp : props::ordered_pairs()) {
            const auto rho = partial_trace(c, kp);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(detail::to_eigen(rho));
            // scaled so that every violation shows up as > 1
            worst = std::max({worst, rho.hermiticity_defect() / 1e-12,
                              std::abs(rho.trace() - 1.0) / 1e-10,
                              -es.eigenvalues().minCoeff() / 1e-10, (rho.purity() - 1.0) / 1e-10});
        }
    }
    return props::finish("reduced states are valid density matrices", worst, 1.0, n);
}

inline PropertyResult check_marginal_consistency(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        // single-factor marginal of f from every pair containing it
        for (Factor f : all_factors) {
            std::vector<std::array<std::array<complex, 2>, 2>> ms;
            for (const auto& kp : props::ordered_pairs()) {
                if (kp.first == f) ms.push_back(partial_trace(c, kp).marginal(0));
                if (kp.second == f) ms.push_back(partial_trace(c, kp).marginal(1));
            }
            for (const auto& m : ms)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) worst = std::max(worst, std::abs(m[a][b] - ms[0][a][b]));
        }
    }
    return props::finish("single-factor marginals agree", worst, 1e-12, n);
}

inline PropertyResult check_concurrence_routes(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto rho = props::random_mixed_state(g);
        worst = std::max(worst, std::abs(concurrence(rho, ConcurrenceRoute::hermitian) -
                                         concurrence(rho, ConcurrenceRoute::general)));
    }
    return props::finish("concurrence: Hermitian route = R eigenvalue route", worst, 1e-9, n);
}

inline PropertyResult check_local_unitary_invariance(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto rho = s % 2 ? props::random_mixed_state(g)
                               : partial_trace(props::random_amplitudes(g), {Factor::T, Factor::P});
        // first factor is the low bit, so U acts on the right of the Kronecker product
        const Eigen::Matrix2cd u = props::random_unitary(g), v = props::random_unitary(g);
        Eigen::Matrix4cd w;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b2 = 0; b2 < 2; ++b2)
                        w(a + 2 * b, a2 + 2 * b2) = u(a, a2) * v(b, b2);
        const Eigen::Matrix4cd r = w * detail::to_eigen(rho) * w.adjoint();
        worst = std::max(worst, std::abs(concurrence(props::from_eigen(r, rho.kept())) - concurrence(rho)));
    }
    return props::finish("concurrence invariant under local unitaries", worst, 1e-9, n);
}

inline PropertyResult check_eof_monotone(std::size_t n = 10000) {
    double worst = 0.0;  // largest decrease
    double prev = eof_from_concurrence(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double e = eof_from_concurrence(static_cast<double>(i) / static_cast<double>(n));
        worst = std::max(worst, prev - e);
        prev = e;
    }
    return props::finish("entanglement of formation monotone in C", worst, 0.0, n);
}

inline PropertyResult check_rhs_hermitian(std::uint64_t seed, std::size_t n = 1000) {
    props::rng g(seed);
    std::uniform_real_distribution<double> ut(0.0, 3000.0);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const ModelParams p = props::random_params(g);
        const double t = ut(g);
        // column k of M is i * rhs(e_k)
        std::array<Amplitudes, 4> cols;
        for (std::size_t k = 0; k < 4; ++k) {
            Amplitudes e;
            e[k] = 1.0;
            cols[k] = complex(0.0, 1.0) * rhs(t, e, p);
        }
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                worst = std::max(worst, std::abs(cols[j][i] - std::conj(cols[i][j])));
    }
    return props::finish("coefficient matrix is Hermitian", worst, 1e-14, n);
}

// Final |norm - 1| after integrating random parameters and initial states.
inline PropertyResult check_norm_conservation(std::uint64_t seed, std::size_t n = 100,
                                              double t_end = 1000.0) {
    props::rng g(seed);
    IntegratorConfig cfg = scenario_integrator();
    cfg.sample_interval = t_end;
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const ModelParams p = props::random_params(g);
        const Amplitudes c0 = props::random_amplitudes(g);
        const auto tr = integrate(c0, p, t_end, cfg);
        worst = std::max(worst, tr.norm_drift.back());
    }
    return props::finish("norm conserved to t_end", worst, 1e-8, n);
}

inline std::vector<PropertyResult> run_property_suite(std::uint64_t seed, std::size_t draws = 100,
                                                      double t_end = 1000.0) {
    std::vector<PropertyResult> out;
    out.push_back(check_partial_trace_oracle(seed));
    out.push_back(check_density_matrix_invariants(seed + 1));
    out.push_back(check_marginal_consistency(seed + 2));
    out.push_back(check_concurrence_routes(seed + 3));
    out.push_back(check_local_unitary_invariance(seed + 4));
    out.push_back(check_eof_monotone());
    out.push_back(check_rhs_hermitian(seed + 5));
    out.push_back(check_norm_conservation(seed + 6, draws, t_end));
    return out;
}

}  // namespace squidqed
