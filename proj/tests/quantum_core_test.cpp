#include <cmath>
#include <complex>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "squidqed/properties.hpp"
#include "squidqed/quantum_core.hpp"

using namespace squidqed;
using namespace std::complex_literals;

namespace {

const double h = 1.0 / std::sqrt(2.0);

Amplitudes amps(complex a, complex b, complex c, complex d) { return Amplitudes{{a, b, c, d}}; }

// Independent reference: |psi> as a sum of Kronecker products in the
// ordering T (x) P (x) B (x) A, projector, then numerical partial trace.
Eigen::Matrix4cd brute_force_reduce(const Amplitudes& c, FactorPair kept) {
    auto ket = [](int bit) {
        Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
        v(bit) = 1.0;
        return v;
    };
    auto kron = [](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
        Eigen::VectorXcd out(x.size() * y.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
        return out;
    };
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& l = basis_labels[k];  // A, B, P, T
        psi += c[k] * kron(ket(l[3]), kron(ket(l[2]), kron(ket(l[1]), ket(l[0]))));
    }
    const Eigen::MatrixXcd rho = psi * psi.adjoint();
    const int bx = static_cast<int>(kept.first), by = static_cast<int>(kept.second);
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            bool same_env = true;
            for (int b = 0; b < 4; ++b)
                if (b != bx && b != by && ((i >> b) & 1) != ((j >> b) & 1)) same_env = false;
            if (!same_env) continue;
            const int ri = ((i >> bx) & 1) + 2 * ((i >> by) & 1);
            const int rj = ((j >> bx) & 1) + 2 * ((j >> by) & 1);
            out(ri, rj) += rho(i, j);
        }
    return out;
}

void expect_matrix(const PairDensityMatrix& rho, const Eigen::Matrix4cd& want, double tol) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_LT(std::abs(rho(i, j) - want(i, j)), tol) << "entry (" << i << "," << j << ")";
}

}  // namespace

TEST(Norm, Examples) {
    EXPECT_DOUBLE_EQ(norm(amps(1, 0, 0, 0)), 1.0);
    EXPECT_NEAR(norm(amps(h, h, 0, 0)), 1.0, 1e-15);
    EXPECT_NEAR(norm(amps(0.5, 0.5, 0.5, 0.5i)), 1.0, 1e-15);
}

TEST(Populations, Examples) {
    const auto p1 = populations(amps(1, 0, 0, 0));
    EXPECT_EQ(p1, (std::array<double, 4>{1, 0, 0, 0}));
    const auto p2 = populations(amps(0, h, h, 0));
    EXPECT_NEAR(p2[1], 0.5, 1e-15);
    EXPECT_NEAR(p2[2], 0.5, 1e-15);
    const auto p3 = populations(amps(0.6, 0, 0, 0.8i));
    EXPECT_NEAR(p3[0], 0.36, 1e-15);
    EXPECT_NEAR(p3[3], 0.64, 1e-15);
}

TEST(Factors, LabelsAreInjective) {
    std::set<std::array<int, 4>> seen(basis_labels.begin(), basis_labels.end());
    EXPECT_EQ(seen.size(), 4u);
}

TEST(PartialTrace, SquidBellState) {
    const auto rho = partial_trace(amps(0, h, h, 0), {Factor::T, Factor::P});
    Eigen::Matrix4cd want = Eigen::Matrix4cd::Zero();
    want(1, 1) = want(2, 2) = want(1, 2) = want(2, 1) = 0.5;
    expect_matrix(rho, want, 1e-15);
}

TEST(PartialTrace, ProductStateModes) {
    const auto rho = partial_trace(amps(1, 0, 0, 0), {Factor::A, Factor::B});
    Eigen::Matrix4cd want = Eigen::Matrix4cd::Zero();
    want(1, 1) = 1.0;
    expect_matrix(rho, want, 1e-15);
}

TEST(PartialTrace, ModesCoherenceMatchesEmbedding) {
    const Amplitudes c = amps(0.6, 0, 0, 0.8i);
    const auto rho = partial_trace(c, {Factor::A, Factor::B});
    EXPECT_NEAR(rho(1, 1).real(), 0.36, 1e-15);
    EXPECT_NEAR(rho(2, 2).real(), 0.64, 1e-15);
    EXPECT_EQ(rho(0, 0), 0.0);
    EXPECT_EQ(rho(3, 3), 0.0);
    // rho = |psi><psi| puts c1 c4^* at (|1a 0b>, |0a 2b>)
    EXPECT_LT(std::abs(rho(1, 2) - (-0.48i)), 1e-15);
    EXPECT_LT(std::abs(rho(2, 1) - 0.48i), 1e-15);
    expect_matrix(rho, brute_force_reduce(c, {Factor::A, Factor::B}), 1e-15);
}

TEST(PartialTrace, ModesAndSquidStructure) {
    std::mt19937_64 g(11);
    for (int s = 0; s < 200; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        const auto ab = partial_trace(c, {Factor::A, Factor::B});
        EXPECT_NEAR(ab(0, 0).real(), std::norm(c[1]) + std::norm(c[2]), 1e-15);
        EXPECT_NEAR(ab(1, 1).real(), std::norm(c[0]), 1e-15);
        EXPECT_NEAR(ab(2, 2).real(), std::norm(c[3]), 1e-15);
        EXPECT_LT(std::abs(ab(1, 2) - c[0] * std::conj(c[3])), 1e-15);

        const auto sq = partial_trace(c, {Factor::T, Factor::P});
        EXPECT_NEAR(sq(0, 0).real(), std::norm(c[0]) + std::norm(c[3]), 1e-15);
        EXPECT_NEAR(sq(1, 1).real(), std::norm(c[1]), 1e-15);
        EXPECT_NEAR(sq(2, 2).real(), std::norm(c[2]), 1e-15);
        EXPECT_LT(std::abs(sq(1, 2) - c[1] * std::conj(c[2])), 1e-15);

        // zero pattern: only the (1,2) coherence and the first three diagonals
        for (const auto& rho : {ab, sq})
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const bool allowed = (i == j && i < 3) || (i == 1 && j == 2) || (i == 2 && j == 1);
                    if (!allowed) EXPECT_EQ(rho(i, j), 0.0) << i << "," << j;
                }
    }
}

TEST(PartialTrace, ClosedFormEqualsEmbeddingOnRandomStates) {
    std::mt19937_64 g(2024);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        for (const auto& kp : props::ordered_pairs()) {
            const auto rho = partial_trace(c, kp);
            const Eigen::Matrix4cd ref = brute_force_reduce(c, kp);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(rho(i, j) - ref(i, j)));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(PartialTrace, RejectsIdenticalFactors) {
    EXPECT_THROW(partial_trace(amps(1, 0, 0, 0), {Factor::P, Factor::P}), argument_error);
}

TEST(PartialTrace, RejectsUnnormalizedInput) {
    EXPECT_THROW(partial_trace(amps(1, 1, 0, 0), {Factor::A, Factor::B}), normalization_error);
    EXPECT_NO_THROW(partial_trace(amps(1.0 + 1e-10, 0, 0, 0), {Factor::A, Factor::B}));
}

TEST(PartialTrace, ReducedStatesAreValidDensityMatrices) {
    const auto r = check_density_matrix_invariants(5);
    EXPECT_TRUE(r.passed) << "worst scaled violation " << r.worst;
}

TEST(PartialTrace, MarginalsAgreeAcrossPairs) {
    const auto r = check_marginal_consistency(6);
    EXPECT_TRUE(r.passed) << r.worst;
}

TEST(PartialTrace, PurityAtMostOne) {
    std::mt19937_64 g(3);
    for (int s = 0; s < 500; ++s) {
        const Amplitudes c = props::random_amplitudes(g);
        for (const auto& kp : props::ordered_pairs()) EXPECT_LE(partial_trace(c, kp).purity(), 1.0 + 1e-10);
    }
}
