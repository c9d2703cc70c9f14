#pragma once

#include <array>
#include <cstddef>

namespace rsphere
{

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
inline OdeState<N> axpy(const OdeState<N> &x, double a, const OdeState<N> &y)
{
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + a * y[i];
    return out;
}

/// One classical fourth-order Runge-Kutta step of the autonomous system x' = f(x).
template <std::size_t N, class Rhs>
OdeState<N> rk4_step(const Rhs &f, const OdeState<N> &x, double h)
{
    const OdeState<N> k1 = f(x);
    const OdeState<N> k2 = f(axpy(x, 0.5 * h, k1));
    const OdeState<N> k3 = f(axpy(x, 0.5 * h, k2));
    const OdeState<N> k4 = f(axpy(x, h, k3));
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Cubic Hermite interpolation on [0, h] from end values and derivatives, evaluated at t.
inline double hermite(double y0, double d0, double y1, double d1, double h, double t)
{
    const double u = t / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 +
           (u3 - u2) * h * d1;
}

/// Derivative of the Hermite interpolant above.
inline double hermite_derivative(double y0, double d0, double y1, double d1, double h, double t)
{
    const double u = t / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * h * d0 + (-6 * u2 + 6 * u) * y1 +
            (3 * u2 - 2 * u) * h * d1) /
           h;
}

} // namespace rsphere
