#pragma once

#include "rsphere/common.hpp"
#include "rsphere/metrics.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/vector_field.hpp"

#include <cmath>
#include <functional>

namespace rsphere
{

/// Frobenius norm of the Lie derivative L_V h at p, where h = dr^2 + m^2 dtheta^2:
///   (L_V h)_ij = V^k d_k h_ij + h_kj d_i V^k + h_ik d_j V^k.
/// Zero exactly when V is h-Killing at p.
inline double killing_defect(const Surface &surface, const VectorFieldSpec &field, const SurfacePoint &p)
{
    surface.require_chart(p.r(), "killing_defect");
    const double m = surface.m(p.r());
    const double dm = surface.dm(p.r());
    const FieldJet v = field.jet(p);
    const double l_rr = 2.0 * v.dvr_dr;
    const double l_rth = v.dvr_dth + m * m * v.dvth_dr;
    const double l_thth = 2.0 * m * dm * v.vr + 2.0 * m * m * v.dvth_dth;
    return std::sqrt(l_rr * l_rr + 2.0 * l_rth * l_rth + l_thth * l_thth);
}

/// Largest killing_defect over an n_r x n_theta grid inside [r_lo, r_hi] x [0, 2pi).
inline double max_killing_defect(const Surface &surface, const VectorFieldSpec &field, int n_r = 32, int n_theta = 16,
                                 double r_lo = 0.05, double r_hi = kPi - 0.05)
{
    double worst = 0.0;
    for (int i = 0; i < n_r; ++i)
    {
        const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / n_r;
        for (int j = 0; j < n_theta; ++j)
            worst = std::max(worst, killing_defect(surface, field, {r, kTwoPi * j / n_theta}));
    }
    return worst;
}

using PhaseFn = std::function<double(double r, double theta, Covector p)>;

/// Poisson bracket {F, G} = dF/dx^i dG/dp_i - dF/dp_i dG/dx^i by central differences
/// (step kFdStep in every coordinate).
inline double poisson_bracket_fd(const PhaseFn &f, const PhaseFn &g, double r, double theta, Covector p)
{
    constexpr double h = kFdStep;
    auto d = [&](const PhaseFn &fn, int slot) {
        switch (slot)
        {
        case 0:
            return (fn(r + h, theta, p) - fn(r - h, theta, p)) / (2 * h);
        case 1:
            return (fn(r, theta + h, p) - fn(r, theta - h, p)) / (2 * h);
        case 2:
            return (fn(r, theta, {p.r + h, p.theta}) - fn(r, theta, {p.r - h, p.theta})) / (2 * h);
        default:
            return (fn(r, theta, {p.r, p.theta + h}) - fn(r, theta, {p.r, p.theta - h})) / (2 * h);
        }
    };
    return d(f, 0) * d(g, 2) + d(f, 1) * d(g, 3) - d(f, 2) * d(g, 0) - d(f, 3) * d(g, 1);
}

/// |{K, W*}| at (p, cov), with K the co-metric of `nav` (hamiltonian_eval) and W* = W^i p_i.
/// The bracket is 1-homogeneous in cov; callers compare against a tolerance scaled by |cov|.
inline double poisson_defect(const NavigationData &nav, const VectorFieldSpec &field, const SurfacePoint &p,
                             Covector cov)
{
    nav.surface().require_chart(p.r(), "poisson_defect");
    const double h = kFdStep;
    if (!nav.surface().in_chart(p.r() - h) || !nav.surface().in_chart(p.r() + h))
        throw DomainError("poisson_defect: difference stencil leaves the chart");
    PhaseFn K = [&nav](double r, double th, Covector c) { return hamiltonian_eval(nav, SurfacePoint(r, th), c); };
    PhaseFn lift = [&field](double r, double th, Covector c) { return c(field(r, th)); };
    return std::abs(poisson_bracket_fd(K, lift, p.r(), p.theta(), cov));
}

/// beta = -W_i / lambda dx^i (the one-form of the Randers metric with navigation data (h, W)),
/// with analytic partials.
inline OneFormJet one_form_from_navigation(const Surface &surface, const VectorFieldSpec &wind, double r,
                                           double theta)
{
    surface.require_chart(r, "one_form_from_navigation");
    const double m = surface.m(r);
    const double m2 = m * m;
    const double dm2 = 2.0 * m * surface.dm(r);
    const FieldJet w = wind.jet(r, theta);

    const double lambda = 1.0 - w.vr * w.vr - m2 * w.vth * w.vth;
    if (!(lambda > 0.0))
        throw NonConvexError("one_form_from_navigation: |W|_h >= 1");
    const double dl_dr = -(2 * w.vr * w.dvr_dr + dm2 * w.vth * w.vth + 2 * m2 * w.vth * w.dvth_dr);
    const double dl_dth = -(2 * w.vr * w.dvr_dth + 2 * m2 * w.vth * w.dvth_dth);

    // lowered wind W_r = W^r, W_theta = m^2 W^theta
    const double wr = w.vr;
    const double wth = m2 * w.vth;
    const double dwr_dr = w.dvr_dr;
    const double dwr_dth = w.dvr_dth;
    const double dwth_dr = dm2 * w.vth + m2 * w.dvth_dr;
    const double dwth_dth = m2 * w.dvth_dth;

    OneFormJet beta;
    beta.wr = -wr / lambda;
    beta.wth = -wth / lambda;
    beta.dwr_dr = -dwr_dr / lambda + wr * dl_dr / (lambda * lambda);
    beta.dwr_dth = -dwr_dth / lambda + wr * dl_dth / (lambda * lambda);
    beta.dwth_dr = -dwth_dr / lambda + wth * dl_dr / (lambda * lambda);
    beta.dwth_dth = -dwth_dth / lambda + wth * dl_dth / (lambda * lambda);
    return beta;
}

inline OneFormJet one_form_from_navigation(const Surface &surface, const VectorFieldSpec &wind, const SurfacePoint &p)
{
    return one_form_from_navigation(surface, wind, p.r(), p.theta());
}

/// The navigation one-form as a field, for use with closedness_defect.
inline OneForm navigation_one_form(const Surface &surface, const VectorFieldSpec &wind)
{
    return OneForm([surface, wind](double r, double th) { return one_form_from_navigation(surface, wind, r, th); });
}

/// |d omega| = |d_r w_theta - d_theta w_r| at p.
inline double closedness_defect(const OneForm &omega, const SurfacePoint &p, double guard = kPoleGuard)
{
    require_chart(p.r(), "closedness_defect", guard);
    const OneFormJet j = omega.jet(p);
    return std::abs(j.dwth_dr - j.dwr_dth);
}

/// (r, theta) component of dW# - dlog(lambda) ^ W# at p, where W# is the h-lowering of W and
/// lambda = 1 - |W|_h^2. Vanishes exactly when the navigation one-form is closed.
inline double closedness_residual(const Surface &surface, const VectorFieldSpec &wind, const SurfacePoint &p)
{
    surface.require_chart(p.r(), "closedness_residual");
    const double m = surface.m(p.r());
    const double m2 = m * m;
    const double dm2 = 2.0 * m * surface.dm(p.r());
    const FieldJet w = wind.jet(p);
    const double lambda = 1.0 - w.vr * w.vr - m2 * w.vth * w.vth;
    if (!(lambda > 0.0))
        throw NonConvexError("closedness_residual: |W|_h >= 1");

    const double wr = w.vr;
    const double wth = m2 * w.vth;
    const double d_wsharp = (dm2 * w.vth + m2 * w.dvth_dr) - w.dvr_dth;

    const double dl_dr = -(2 * w.vr * w.dvr_dr + dm2 * w.vth * w.vth + 2 * m2 * w.vth * w.dvth_dr);
    const double dl_dth = -(2 * w.vr * w.dvr_dth + 2 * m2 * w.vth * w.dvth_dth);
    const double wedge = (dl_dr * wth - dl_dth * wr) / lambda;
    return d_wsharp - wedge;
}

} // namespace rsphere
