#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace squidqed {

using complex = std::complex<double>;

// Fixed-size complex amplitude vector with the arithmetic the integrator needs.
template <std::size_t N>
struct ComplexVector {
    std::array<complex, N> c{};

    static constexpr std::size_t size() { return N; }

    constexpr complex& operator[](std::size_t k) { return c[k]; }
    constexpr const complex& operator[](std::size_t k) const { return c[k]; }

    friend ComplexVector operator+(ComplexVector x, const ComplexVector& y) {
        for (std::size_t k = 0; k < N; ++k) x.c[k] += y.c[k];
        return x;
    }
    friend ComplexVector operator-(ComplexVector x, const ComplexVector& y) {
        for (std::size_t k = 0; k < N; ++k) x.c[k] -= y.c[k];
        return x;
    }
    friend ComplexVector operator*(complex s, ComplexVector x) {
        for (auto& v : x.c) v *= s;
        return x;
    }
    friend ComplexVector operator*(double s, ComplexVector x) {
        for (auto& v : x.c) v *= s;
        return x;
    }
    friend bool operator==(const ComplexVector&, const ComplexVector&) = default;
};

template <std::size_t N>
double norm(const ComplexVector<N>& a) {
    double s = 0.0;
    for (const auto& v : a.c) s += std::norm(v);
    return s;
}

template <std::size_t N>
std::array<double, N> populations(const ComplexVector<N>& a) {
    std::array<double, N> p{};
    for (std::size_t k = 0; k < N; ++k) p[k] = std::norm(a[k]);
    return p;
}

template <std::size_t N>
ComplexVector<N> conj(ComplexVector<N> a) {
    for (auto& v : a.c) v = std::conj(v);
    return a;
}

template <std::size_t N>
complex inner(const ComplexVector<N>& bra, const ComplexVector<N>& ket) {
    complex s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += std::conj(bra[k]) * ket[k];
    return s;
}

// Scaled RMS error used by the step-size controller.
struct RmsErrorNorm {
    template <std::size_t N>
    double operator()(const ComplexVector<N>& err, const ComplexVector<N>& y0,
                      const ComplexVector<N>& y1, double atol, double rtol) const {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double scale = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
            const double r = std::abs(err[k]) / scale;
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(N));
    }
};

}  // namespace squidqed
