#pragma once

#include <array>
#include <cmath>

namespace kbound {

/// Truncated Taylor expansion f(t0 + h) = sum_k c[k] h^k, k <= N.
/// Arithmetic propagates the coefficients exactly (up to rounding), which
/// gives derivatives of composed curve maps without hand-written chain rules.
template <int N>
struct Taylor {
    std::array<double, N + 1> c{};

    constexpr Taylor() = default;
    constexpr Taylor(double value) { c[0] = value; }  // NOLINT: implicit constant

    static constexpr Taylor variable(double t0) {
        Taylor r(t0);
        if constexpr (N >= 1) r.c[1] = 1.0;
        return r;
    }

    constexpr double value() const { return c[0]; }

    /// k-th derivative at t0.
    constexpr double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }

    constexpr Taylor& operator+=(const Taylor& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    constexpr Taylor& operator-=(const Taylor& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    constexpr Taylor& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }

    friend constexpr Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend constexpr Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend constexpr Taylor operator-(Taylor a) { return a *= -1.0; }
    friend constexpr Taylor operator*(Taylor a, double s) { return a *= s; }
    friend constexpr Taylor operator*(double s, Taylor a) { return a *= s; }

    friend constexpr Taylor operator*(const Taylor& a, const Taylor& b) {
        Taylor r;
        for (int k = 0; k <= N; ++k) {
            double acc = 0.0;
            for (int i = 0; i <= k; ++i) acc += a.c[i] * b.c[k - i];
            r.c[k] = acc;
        }
        return r;
    }

    friend constexpr Taylor operator/(const Taylor& a, const Taylor& b) {
        Taylor q;
        for (int k = 0; k <= N; ++k) {
            double acc = a.c[k];
            for (int i = 1; i <= k; ++i) acc -= b.c[i] * q.c[k - i];
            q.c[k] = acc / b.c[0];
        }
        return q;
    }
    friend constexpr Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }
};

template <int N>
Taylor<N> sqrt(const Taylor<N>& a) {
    Taylor<N> s;
    s.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double acc = a.c[k];
        for (int i = 1; i < k; ++i) acc -= s.c[i] * s.c[k - i];
        s.c[k] = acc / (2.0 * s.c[0]);
    }
    return s;
}

template <int N>
Taylor<N> exp(const Taylor<N>& a) {
    Taylor<N> e;
    e.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double acc = 0.0;
        for (int i = 1; i <= k; ++i) acc += i * a.c[i] * e.c[k - i];
        e.c[k] = acc / k;
    }
    return e;
}

/// Simultaneous sine and cosine; both recurrences need each other.
template <int N>
void sincos(const Taylor<N>& a, Taylor<N>& s, Taylor<N>& co) {
    s = Taylor<N>();
    co = Taylor<N>();
    s.c[0] = std::sin(a.c[0]);
    co.c[0] = std::cos(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double as = 0.0;
        double ac = 0.0;
        for (int i = 1; i <= k; ++i) {
            as += i * a.c[i] * co.c[k - i];
            ac += i * a.c[i] * s.c[k - i];
        }
        s.c[k] = as / k;
        co.c[k] = -ac / k;
    }
}

/// Drop the constant term and differentiate once; the top coefficient becomes zero.
template <int N>
Taylor<N> differentiate(const Taylor<N>& a) {
    Taylor<N> d;
    for (int k = 0; k < N; ++k) d.c[k] = (k + 1) * a.c[k + 1];
    return d;
}

}  // namespace kbound
