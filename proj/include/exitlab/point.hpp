#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace exitlab {

/// A point (or vector) in R^Dim. Dimension is a compile-time parameter; the
/// library is instantiated for Dim = 1 and Dim = 2.
template <std::size_t Dim>
using Point = std::array<double, Dim>;

template <std::size_t Dim>
using Matrix = std::array<std::array<double, Dim>, Dim>;

template <std::size_t Dim>
constexpr Point<Dim> zero_point() {
    Point<Dim> p{};
    p.fill(0.0);
    return p;
}

template <std::size_t Dim>
constexpr Point<Dim> operator+(const Point<Dim>& a, const Point<Dim>& b) {
    Point<Dim> r{};
    for (std::size_t i = 0; i < Dim; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t Dim>
constexpr Point<Dim> operator-(const Point<Dim>& a, const Point<Dim>& b) {
    Point<Dim> r{};
    for (std::size_t i = 0; i < Dim; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t Dim>
constexpr Point<Dim> operator-(const Point<Dim>& a) {
    Point<Dim> r{};
    for (std::size_t i = 0; i < Dim; ++i) r[i] = -a[i];
    return r;
}

template <std::size_t Dim>
constexpr Point<Dim> operator*(double s, const Point<Dim>& a) {
    Point<Dim> r{};
    for (std::size_t i = 0; i < Dim; ++i) r[i] = s * a[i];
    return r;
}

template <std::size_t Dim>
constexpr Point<Dim>& operator+=(Point<Dim>& a, const Point<Dim>& b) {
    for (std::size_t i = 0; i < Dim; ++i) a[i] += b[i];
    return a;
}

template <std::size_t Dim>
constexpr double dot(const Point<Dim>& a, const Point<Dim>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t Dim>
constexpr double squared_norm(const Point<Dim>& a) {
    return dot(a, a);
}

template <std::size_t Dim>
double norm(const Point<Dim>& a) {
    return std::sqrt(squared_norm(a));
}

template <std::size_t Dim>
bool is_finite(const Point<Dim>& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Largest absolute eigenvalue of a symmetric matrix (closed form for Dim <= 2).
template <std::size_t Dim>
double spectral_norm(const Matrix<Dim>& h) {
    static_assert(Dim == 1 || Dim == 2, "spectral_norm supports Dim 1 and 2");
    if constexpr (Dim == 1) {
        return std::abs(h[0][0]);
    } else {
        const double tr = h[0][0] + h[1][1];
        const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return std::max(std::abs(tr / 2.0 + disc), std::abs(tr / 2.0 - disc));
    }
}

/// Smallest eigenvalue of a symmetric matrix (closed form for Dim <= 2).
template <std::size_t Dim>
double min_eigenvalue(const Matrix<Dim>& h) {
    static_assert(Dim == 1 || Dim == 2, "min_eigenvalue supports Dim 1 and 2");
    if constexpr (Dim == 1) {
        return h[0][0];
    } else {
        const double tr = h[0][0] + h[1][1];
        const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        return tr / 2.0 - std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    }
}

}  // namespace exitlab
