#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rsphere
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Width of the excluded band around the chart poles r = 0 and r = pi.
inline constexpr double kPoleGuard = 1e-6;

/// Central finite-difference step used for first derivatives throughout.
inline constexpr double kFdStep = 1e-5;

/// Default fixed RK4 step for geodesic and flow integration.
inline constexpr double kDefaultStep = 1e-3;

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (pole guard, parameter range, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A wind or one-form violates the strict convexity bound (|V|_h < 1, F(-W) < 1, |b|_alpha < 1).
class NonConvexError : public Error
{
  public:
    using Error::Error;
};

/// A trajectory entered the pole guard band.
class PoleCrossingError : public Error
{
  public:
    using Error::Error;
};

class UnsupportedFamilyError : public Error
{
  public:
    using Error::Error;
};

/// Hypotheses of a construction (Killing / closedness conditions) are not met.
class PreconditionFailed : public Error
{
  public:
    using Error::Error;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double theta)
{
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0)
        t += kTwoPi;
    if (t >= kTwoPi)
        t = 0.0;
    return t;
}

/// Signed difference a - b wrapped into (-pi, pi].
inline double angle_diff(double a, double b)
{
    double d = std::remainder(a - b, kTwoPi);
    if (d <= -kPi)
        d += kTwoPi;
    return d;
}

inline bool inside_pole_guard(double r, double guard = kPoleGuard)
{
    return r > guard && r < kPi - guard;
}

/// Throws DomainError when r falls inside the pole guard band.
inline void require_chart(double r, const char *what, double guard = kPoleGuard)
{
    if (!inside_pole_guard(r, guard))
        throw DomainError(std::string(what) + ": r = " + std::to_string(r) +
                          " is inside the pole guard");
}

/// Point of the (r, theta) chart; theta is stored modulo 2pi.
class SurfacePoint
{
  public:
    SurfacePoint() = default;
    SurfacePoint(double r, double theta) : r_(r), theta_(wrap_angle(theta)) {}

    double r() const { return r_; }
    double theta() const { return theta_; }

    /// Same as the constructor but rejects points inside the pole guard.
    static SurfacePoint checked(double r, double theta, double guard = kPoleGuard)
    {
        require_chart(r, "SurfacePoint", guard);
        return {r, theta};
    }

  private:
    double r_ = kPi / 2;
    double theta_ = 0.0;
};

/// Components (v^r, v^theta) of a tangent vector in the chart basis.
struct TangentVector
{
    double r = 0.0;
    double theta = 0.0;

    friend TangentVector operator+(TangentVector a, TangentVector b) { return {a.r + b.r, a.theta + b.theta}; }
    friend TangentVector operator-(TangentVector a, TangentVector b) { return {a.r - b.r, a.theta - b.theta}; }
    friend TangentVector operator*(double s, TangentVector a) { return {s * a.r, s * a.theta}; }
    TangentVector operator-() const { return {-r, -theta}; }
};

/// Components (w_r, w_theta) of a covector in the chart cobasis.
struct Covector
{
    double r = 0.0;
    double theta = 0.0;

    friend Covector operator+(Covector a, Covector b) { return {a.r + b.r, a.theta + b.theta}; }
    friend Covector operator-(Covector a, Covector b) { return {a.r - b.r, a.theta - b.theta}; }
    friend Covector operator*(double s, Covector a) { return {s * a.r, s * a.theta}; }
    Covector operator-() const { return {-r, -theta}; }

    double operator()(TangentVector y) const { return r * y.r + theta * y.theta; }
};

} // namespace rsphere
