#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "squidqed/errors.hpp"
#include "squidqed/quantum_core.hpp"

namespace squidqed {

namespace detail {

inline Eigen::Matrix4cd to_eigen(const PairDensityMatrix& rho) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = rho(i, j);
    return m;
}

// sigma_y (x) sigma_y in the product basis: antidiagonal (-1, +1, +1, -1).
inline Eigen::Matrix4cd spin_flip() {
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
}

inline constexpr double eigen_invalid = -1e-8;

// Eigenvalues in [-1e-8, 0) are rounding noise and clamped to zero.
inline double concurrence_from_eigenvalues(std::array<double, 4> lambda) {
    for (double& l : lambda) {
        if (l < eigen_invalid)
            throw numerical_error("concurrence: spin-flipped matrix has eigenvalue " +
                                  std::to_string(l));
        l = std::max(l, 0.0);
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    const double c = std::sqrt(lambda[0]) - std::sqrt(lambda[1]) - std::sqrt(lambda[2]) -
                     std::sqrt(lambda[3]);
    return std::clamp(c, 0.0, 1.0);
}

}  // namespace detail

// Eigenvalues of R = rho (sy x sy) rho^* (sy x sy) from a general complex
// eigensolver on R itself.
inline std::array<double, 4> spin_flip_eigenvalues_general(const PairDensityMatrix& rho) {
    const Eigen::Matrix4cd m = detail::to_eigen(rho);
    const Eigen::Matrix4cd s = detail::spin_flip();
    const Eigen::Matrix4cd r = m * s * m.conjugate() * s;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i).real();
    return out;
}

// Square roots of the same spectrum without forming R: with rho = W W^dagger
// (W = V sqrt(mu) from the eigendecomposition of rho) they are the singular
// values of the complex symmetric matrix W^T (sy x sy) W. Eigenvalues of rho
// below `rank_cutoff` are rounding noise of exact zeros and are dropped.
inline std::array<double, 4> spin_flip_roots_hermitian(const PairDensityMatrix& rho) {
    constexpr double rank_cutoff = 1e-14;
    const Eigen::Matrix4cd m = detail::to_eigen(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (m + m.adjoint()));
    const Eigen::Vector4d mu = es.eigenvalues();
    if (mu.minCoeff() < detail::eigen_invalid)
        throw numerical_error("concurrence: density matrix has eigenvalue " +
                              std::to_string(mu.minCoeff()));
    Eigen::Vector4d root;
    for (int i = 0; i < 4; ++i) root(i) = mu(i) > rank_cutoff ? std::sqrt(mu(i)) : 0.0;
    const Eigen::Matrix4cd w = es.eigenvectors() * root.asDiagonal();
    const Eigen::Matrix4cd tau = w.transpose() * detail::spin_flip() * w;
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = svd.singularValues()(i);
    return out;
}

inline std::array<double, 4> spin_flip_eigenvalues_hermitian(const PairDensityMatrix& rho) {
    auto s = spin_flip_roots_hermitian(rho);
    for (double& v : s) v *= v;
    return s;
}

enum class ConcurrenceRoute { hermitian, general };

inline double concurrence(const PairDensityMatrix& rho,
                          ConcurrenceRoute route = ConcurrenceRoute::hermitian) {
    if (route == ConcurrenceRoute::general)
        return detail::concurrence_from_eigenvalues(spin_flip_eigenvalues_general(rho));
    auto s = spin_flip_roots_hermitian(rho);
    std::sort(s.begin(), s.end(), std::greater<>());
    return std::clamp(s[0] - s[1] - s[2] - s[3], 0.0, 1.0);
}

// Entanglement of formation of a two-qubit state with concurrence C, using
// 0 log2 0 = 0.
inline double eof_from_concurrence(double c) {
    if (!(c >= -1e-12 && c <= 1.0 + 1e-12))
        throw argument_error("eof_from_concurrence: C = " + std::to_string(c) +
                             " outside [0, 1]");
    c = std::clamp(c, 0.0, 1.0);
    const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
    auto xlog2x = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
    const double e = -xlog2x(0.5 * (1.0 + root)) - xlog2x(0.5 * (1.0 - root));
    return std::clamp(e, 0.0, 1.0);
}

inline double entanglement_of_formation(const PairDensityMatrix& rho) {
    return eof_from_concurrence(concurrence(rho));
}

// l1-norm coherence in the product basis: sum of |rho_mn| over m != n.
inline double l1_coherence(const PairDensityMatrix& rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) s += std::abs(rho(i, j));
    return s;
}

}  // namespace squidqed
