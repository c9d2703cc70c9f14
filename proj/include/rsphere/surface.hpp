#pragma once

#include "rsphere/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

namespace rsphere
{

enum class ProfileFamily
{
    RoundSphere,
    TwistedSine,  // h(r) = r - alpha sin(2r), alpha in (0, 1/2)
    ArcsinRatio,  // h(r) = arcsin(sin r / sqrt(1 + lambda cos^2 r)), lambda >= 0
    Custom,
};

using RealFn = std::function<double(double)>;

/// Generator h of a two-sphere of revolution, together with its first two derivatives.
/// The warp function is m(r) = a sin h(r) with a = 1 / h'(0).
struct ProfileSpec
{
    ProfileFamily family = ProfileFamily::RoundSphere;
    double param = 0.0;  // alpha for TwistedSine, lambda for ArcsinRatio
    std::string name = "round";
    RealFn h;
    RealFn dh;
    RealFn d2h;
};

inline std::string_view family_id(ProfileFamily f)
{
    switch (f)
    {
    case ProfileFamily::RoundSphere:
        return "round";
    case ProfileFamily::TwistedSine:
        return "twisted-sine";
    case ProfileFamily::ArcsinRatio:
        return "arcsin-ratio";
    case ProfileFamily::Custom:
        return "custom";
    }
    return "custom";
}

inline ProfileFamily family_from_id(std::string_view id)
{
    if (id == "round")
        return ProfileFamily::RoundSphere;
    if (id == "twisted-sine")
        return ProfileFamily::TwistedSine;
    if (id == "arcsin-ratio")
        return ProfileFamily::ArcsinRatio;
    if (id == "custom")
        return ProfileFamily::Custom;
    throw DomainError("unknown profile family '" + std::string(id) + "'");
}

/// Builds one of the built-in families. `param` is alpha (TwistedSine) or lambda (ArcsinRatio)
/// and is ignored for the round sphere. Custom profiles go through `make_custom_profile`.
inline ProfileSpec make_profile(ProfileFamily family, double param = 0.0)
{
    ProfileSpec spec;
    spec.family = family;
    spec.param = param;
    spec.name = std::string(family_id(family));
    switch (family)
    {
    case ProfileFamily::RoundSphere:
        spec.param = 0.0;
        spec.h = [](double r) { return r; };
        spec.dh = [](double) { return 1.0; };
        spec.d2h = [](double) { return 0.0; };
        break;
    case ProfileFamily::TwistedSine:
        if (!(param > 0.0 && param < 0.5))
            throw DomainError("twisted-sine requires alpha in (0, 1/2), got " + std::to_string(param));
        spec.h = [param](double r) { return r - param * std::sin(2 * r); };
        spec.dh = [param](double r) { return 1.0 - 2 * param * std::cos(2 * r); };
        spec.d2h = [param](double r) { return 4 * param * std::sin(2 * r); };
        break;
    case ProfileFamily::ArcsinRatio: {
        if (!(param >= 0.0) || !std::isfinite(param))
            throw DomainError("arcsin-ratio requires lambda >= 0, got " + std::to_string(param));
        // tan h = sin r / (sqrt(1+lambda) cos r); the atan2 form is the arcsin branch on
        // [0, pi/2] continued by h(pi - r) = pi - h(r), without arcsin's loss near pi/2.
        const double k = std::sqrt(1.0 + param);
        spec.h = [k](double r) { return std::atan2(std::sin(r), k * std::cos(r)); };
        spec.dh = [param, k](double r) {
            const double c = std::cos(r);
            return k / (1.0 + param * c * c);
        };
        spec.d2h = [param, k](double r) {
            const double c = std::cos(r);
            const double q = 1.0 + param * c * c;
            return k * param * std::sin(2 * r) / (q * q);
        };
        break;
    }
    case ProfileFamily::Custom:
        throw DomainError("custom profiles must be built with make_custom_profile");
    }
    return spec;
}

/// Custom generator: h, h', h'' are supplied explicitly (no differentiation is attempted).
inline ProfileSpec make_custom_profile(RealFn h, RealFn dh, RealFn d2h, std::string name = "custom")
{
    ProfileSpec spec;
    spec.family = ProfileFamily::Custom;
    spec.name = std::move(name);
    spec.h = std::move(h);
    spec.dh = std::move(dh);
    spec.d2h = std::move(d2h);
    return spec;
}

/// Outcome of one of the conditions (c1)-(c3) on a sample grid.
struct ConditionCheck
{
    bool holds = true;
    double worst_r = 0.0;      // grid point of worst violation (or smallest margin)
    double worst_value = 0.0;  // residual for (c1), h' for (c2), h'' for (c3) at worst_r
};

struct ConditionReport
{
    ConditionCheck c1;  // h(pi - r) = pi - h(r)
    ConditionCheck c2;  // h' > 0 on [0, pi/2)
    ConditionCheck c3;  // h'' > 0 on (0, pi/2)
    int grid_n = 0;

    bool all() const { return c1.holds && c2.holds && c3.holds; }
};

/// Samples (c1)-(c3) on a uniform grid of [0, pi/2). (c3) skips r = 0 where h'' vanishes
/// for every odd generator.
inline ConditionReport check_profile_conditions(const ProfileSpec &spec, int grid_n = 256)
{
    if (grid_n < 16)
        throw DomainError("check_profile_conditions: grid_n must be >= 16");
    constexpr double kSymmetryTol = 1e-10;

    ConditionReport rep;
    rep.grid_n = grid_n;
    rep.c1.worst_value = 0.0;
    rep.c2.worst_value = std::numeric_limits<double>::infinity();
    rep.c3.worst_value = std::numeric_limits<double>::infinity();

    const double dr = (kPi / 2) / grid_n;
    for (int i = 0; i < grid_n; ++i)
    {
        const double r = i * dr;
        const double sym = std::abs(spec.h(kPi - r) - (kPi - spec.h(r)));
        if (sym > rep.c1.worst_value || i == 0)
        {
            rep.c1.worst_value = sym;
            rep.c1.worst_r = r;
        }
        const double d1 = spec.dh(r);
        if (d1 < rep.c2.worst_value)
        {
            rep.c2.worst_value = d1;
            rep.c2.worst_r = r;
        }
        if (i > 0)
        {
            const double d2 = spec.d2h(r);
            if (d2 < rep.c3.worst_value)
            {
                rep.c3.worst_value = d2;
                rep.c3.worst_r = r;
            }
        }
    }
    rep.c1.holds = rep.c1.worst_value <= kSymmetryTol;
    rep.c2.holds = rep.c2.worst_value > 0.0;
    rep.c3.holds = rep.c3.worst_value > 0.0;
    return rep;
}

/// Two-sphere of revolution h = dr^2 + m(r)^2 dtheta^2 generated by a profile.
class Surface
{
  public:
    explicit Surface(ProfileSpec profile, double pole_guard = kPoleGuard)
        : profile_(std::move(profile)), pole_guard_(pole_guard)
    {
        const double d0 = profile_.dh(0.0);
        if (!(d0 > 0.0) || !std::isfinite(d0))
            throw DomainError("profile must have h'(0) > 0");
        a_ = 1.0 / d0;
    }

    const ProfileSpec &profile() const { return profile_; }
    double a() const { return a_; }
    double pole_guard() const { return pole_guard_; }

    double m(double r) const { return a_ * std::sin(profile_.h(r)); }

    double dm(double r) const { return a_ * std::cos(profile_.h(r)) * profile_.dh(r); }

    double d2m(double r) const
    {
        const double h = profile_.h(r);
        const double d1 = profile_.dh(r);
        return a_ * (std::cos(h) * profile_.d2h(r) - std::sin(h) * d1 * d1);
    }

    /// Largest parallel radius m(pi/2).
    double equator_radius() const { return m(kPi / 2); }

    bool in_chart(double r) const { return inside_pole_guard(r, pole_guard_); }

    void require_chart(double r, const char *what) const { rsphere::require_chart(r, what, pole_guard_); }

  private:
    ProfileSpec profile_;
    double pole_guard_ = kPoleGuard;
    double a_ = 1.0;
};

/// Gaussian curvature G = -m''/m from the analytic derivatives of the warp.
inline double gauss_curvature(const Surface &surface, double r)
{
    surface.require_chart(r, "gauss_curvature");
    return -surface.d2m(r) / surface.m(r);
}

/// Closed-form curvature of the two named families, used as an independent cross-check of
/// gauss_curvature. Both expressions are -m''/m expanded by hand for the family formula.
inline double closed_form_curvature(const ProfileSpec &spec, double r, double pole_guard = kPoleGuard)
{
    rsphere::require_chart(r, "closed_form_curvature", pole_guard);
    switch (spec.family)
    {
    case ProfileFamily::TwistedSine: {
        const double alpha = spec.param;
        const double g = 1.0 - 2 * alpha * std::cos(2 * r);
        return g * g - 4 * alpha * std::sin(2 * r) / std::tan(r - alpha * std::sin(2 * r));
    }
    case ProfileFamily::ArcsinRatio: {
        const double lambda = spec.param;
        const double c2 = std::cos(r) * std::cos(r);
        const double q = 1.0 + lambda * c2;
        return (1.0 + lambda) * (1.0 - 2 * lambda * c2) / (q * q);
    }
    default:
        throw UnsupportedFamilyError("closed_form_curvature: no closed form for family '" +
                                     std::string(family_id(spec.family)) + "'");
    }
}

/// Inverse of m on [0, pi/2] by bisection (m is increasing there under (c2)).
/// Returns the left end of the final bracket, so m(result) <= nu.
inline double inverse_warp(const Surface &surface, double nu, double tol = 1e-12)
{
    double lo = 0.0;
    double hi = kPi / 2;
    if (!(nu > 0.0 && nu < surface.m(hi)))
        throw DomainError("inverse_warp: nu outside (0, m(pi/2))");
    while (hi - lo > tol)
    {
        const double mid = 0.5 * (lo + hi);
        if (surface.m(mid) <= nu)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace rsphere
