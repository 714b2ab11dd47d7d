#pragma once

// State space of the SQUID + two-mode field system. Only four global basis
// states are ever populated:
//
//   c1: |1>_a |0>_b |0par 0perp>
//   c2: |0>_a |0>_b |0par 1perp>
//   c3: |0>_a |0>_b |2par 0perp>
//   c4: |0>_a |2>_b |0par 0perp>
//
// Each of them factors into four two-level systems (A, B, P, T), which makes
// every reduced density matrix of interest an exact partial trace.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "squidqed/cvector.hpp"
#include "squidqed/errors.hpp"

namespace squidqed {

inline constexpr double default_norm_tolerance = 1e-9;

// Amplitudes (c1, c2, c3, c4) of the four populated basis states.
using Amplitudes = ComplexVector<4>;

inline void require_normalized(const Amplitudes& a, double tol = default_norm_tolerance) {
    const double n = norm(a);
    if (!(std::abs(n - 1.0) <= tol))
        throw normalization_error("amplitudes not normalized: |c|^2 = " + std::to_string(n));
}

// Two-level factors of the global basis.
//   A: photon in mode a          {0, 1}
//   B: photon pair in mode b     {0, 2 photons}
//   P: parallel SQUID mode       {0par, 2par}
//   T: transverse SQUID mode     {0perp, 1perp}
enum class Factor { A = 0, B = 1, P = 2, T = 3 };

inline constexpr std::array<Factor, 4> all_factors{Factor::A, Factor::B, Factor::P, Factor::T};

inline const char* to_string(Factor f) {
    switch (f) {
        case Factor::A: return "A";
        case Factor::B: return "B";
        case Factor::P: return "P";
        case Factor::T: return "T";
    }
    return "?";
}

// labels[k][f] is the level (0 or 1) of factor f in basis state k.
inline constexpr std::array<std::array<int, 4>, 4> basis_labels{{
    {1, 0, 0, 0},  // c1
    {0, 0, 0, 1},  // c2
    {0, 0, 1, 0},  // c3
    {0, 1, 0, 0},  // c4
}};

inline constexpr int label(std::size_t state, Factor f) {
    return basis_labels[state][static_cast<std::size_t>(f)];
}

struct FactorPair {
    Factor first;
    Factor second;

    // Index of the two-level product state |first, second> in the 4x4 basis.
    // The first factor is the low bit: with (A, B) this gives the ordering
    // {|0a 0b>, |1a 0b>, |0a 2b>, |1a 2b>}; with (T, P) the ordering
    // {|0par 0perp>, |0par 1perp>, |2par 0perp>, |2par 1perp>}.
    static constexpr std::size_t index(int first_level, int second_level) {
        return static_cast<std::size_t>(first_level + 2 * second_level);
    }

    friend bool operator==(const FactorPair&, const FactorPair&) = default;
};

inline std::string to_string(FactorPair p) {
    return std::string(to_string(p.first)) + to_string(p.second);
}

// 4x4 complex matrix over two retained factors, row-major.
class PairDensityMatrix {
public:
    using storage = std::array<std::array<complex, 4>, 4>;

    PairDensityMatrix() = default;
    PairDensityMatrix(FactorPair kept, const storage& m) : kept_(kept), m_(m) {}

    const complex& operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
    const storage& data() const { return m_; }
    FactorPair kept() const { return kept_; }

    complex trace() const { return m_[0][0] + m_[1][1] + m_[2][2] + m_[3][3]; }

    double hermiticity_defect() const {
        double d = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                d = std::max(d, std::abs(m_[i][j] - std::conj(m_[j][i])));
        return d;
    }

    double purity() const {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) s += std::norm(m_[i][j]);
        return s;
    }

    // Reduced 2x2 state of one retained factor (0 = first, 1 = second).
    std::array<std::array<complex, 2>, 2> marginal(int which) const {
        std::array<std::array<complex, 2>, 2> r{};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int o = 0; o < 2; ++o) {
                    const auto i = which == 0 ? FactorPair::index(a, o) : FactorPair::index(o, a);
                    const auto j = which == 0 ? FactorPair::index(b, o) : FactorPair::index(o, b);
                    r[a][b] += m_[i][j];
                }
        return r;
    }

private:
    FactorPair kept_{Factor::A, Factor::B};
    storage m_{};
};

// Reduced density matrix of |psi><psi| over `kept`, tracing the other two
// factors. Because at most four product states carry weight, the diagonal
// collects |c_k|^2 and a coherence c_k c_l^* survives only where states k and
// l agree on both traced factors.
inline PairDensityMatrix partial_trace(const Amplitudes& a, FactorPair kept,
                                       double tol = default_norm_tolerance) {
    if (kept.first == kept.second)
        throw argument_error(std::string("partial_trace: retained factors must differ, got ") +
                             to_string(kept.first) + " twice");
    require_normalized(a, tol);

    std::array<Factor, 2> traced{};
    std::size_t n = 0;
    for (Factor f : all_factors)
        if (f != kept.first && f != kept.second) traced[n++] = f;

    std::array<std::size_t, 4> row{};
    std::array<int, 4> env{};
    for (std::size_t k = 0; k < 4; ++k) {
        row[k] = FactorPair::index(label(k, kept.first), label(k, kept.second));
        env[k] = label(k, traced[0]) + 2 * label(k, traced[1]);
    }

    PairDensityMatrix::storage m{};
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l)
            if (env[k] == env[l]) m[row[k]][row[l]] += a[k] * std::conj(a[l]);
    return PairDensityMatrix(kept, m);
}

}  // namespace squidqed
