#pragma once

#include "rsphere/common.hpp"
#include "rsphere/fields.hpp"
#include "rsphere/geodesics.hpp"
#include "rsphere/metrics.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/vector_field.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rsphere
{

/// m^{-1}(nu) on [0, pi/2]: bisection to 1e-12, then two Newton steps so that m(r*) - nu is at
/// rounding level (the half-period integrand is sensitive to it near the turning point).
inline double turning_radius(const Surface &surface, double nu)
{
    double r = inverse_warp(surface, nu, 1e-12);
    for (int i = 0; i < 2; ++i)
    {
        const double dm = surface.dm(r);
        if (dm > 0.0)
            r -= (surface.m(r) - nu) / dm;
    }
    return r;
}

/// Half period phi_m(nu) = 2 int_{m^{-1}(nu)}^{pi/2} nu / (m sqrt(m^2 - nu^2)) dr.
/// The substitution r = r* + t^2 removes the inverse square-root singularity at the turning
/// point r*; the smooth integrand is then integrated by adaptive Gauss-Kronrod (7, 15).
inline double half_period(const Surface &surface, double nu, double tol = 1e-8)
{
    if (!(nu > 0.0 && nu < surface.equator_radius()))
        throw DomainError("half_period: nu outside (0, m(pi/2))");
    const double rstar = turning_radius(surface, nu);
    const double tmax = std::sqrt(std::max(0.0, kPi / 2 - rstar));
    const double m_star = surface.m(rstar);
    const double dm_star = surface.dm(rstar);
    const double d2m_star = surface.d2m(rstar);
    // value of the transformed integrand at t = 0
    const double tip = dm_star > 0.0 ? 4.0 / std::sqrt(2.0 * nu * dm_star) : 0.0;

    auto integrand = [&](double t) {
        const double u = t * t;
        double m = 0.0;
        double rise = 0.0;  // m(r* + u) - nu
        if (u < 1e-4)
        {
            // second-order Taylor step avoids cancellation in m - nu close to the turning point
            rise = (m_star - nu) + u * (dm_star + 0.5 * u * d2m_star);
            m = nu + rise;
        }
        else
        {
            m = surface.m(rstar + u);
            rise = m - nu;
        }
        const double gap = rise * (m + nu);
        if (!(gap > 0.0))
            return tip;
        return 4.0 * nu * t / (m * std::sqrt(gap));
    };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, tmax, 15, tol * 1e-2, &err);
}

struct HalfPeriodTable
{
    std::vector<double> nu_grid;
    std::vector<double> phi_values;
    double tolerance = 1e-8;
    bool monotone = true;  // non-increasing within 1e-9
    double max_increase = 0.0;
};

/// Half period on a uniform nu-grid over [0.05, 0.95] m(pi/2).
inline HalfPeriodTable scan_half_period(const Surface &surface, int n_grid = 32, double tol = 1e-8)
{
    if (n_grid < 8)
        throw DomainError("scan_half_period: n_grid must be >= 8");
    constexpr double kSlack = 1e-9;
    HalfPeriodTable table;
    table.tolerance = tol;
    const double m_eq = surface.equator_radius();
    for (int i = 0; i < n_grid; ++i)
    {
        const double nu = m_eq * (0.05 + 0.9 * i / (n_grid - 1));
        table.nu_grid.push_back(nu);
        table.phi_values.push_back(half_period(surface, nu, tol));
    }
    for (std::size_t i = 1; i < table.phi_values.size(); ++i)
        table.max_increase = std::max(table.max_increase, table.phi_values[i] - table.phi_values[i - 1]);
    table.monotone = table.max_increase <= kSlack;
    return table;
}

enum class CutKind
{
    Maxwell,
    Conjugate,
};

inline const char *cut_kind_id(CutKind k) { return k == CutKind::Maxwell ? "maxwell" : "conjugate"; }

struct CutPoint
{
    SurfacePoint source;
    SurfacePoint point;
    double distance = 0.0;
    CutKind kind = CutKind::Maxwell;
    double clairaut_nu = 0.0;
    double angle_phi = 0.0;  // initial direction of the geodesic
};

struct ThetaExtent
{
    double lo = 0.0;
    double hi = 0.0;
};

struct CutLocusResult
{
    SurfacePoint source;
    std::string metric_tag = "h";
    std::vector<CutPoint> cut_points;
    std::optional<double> parallel_r;
    double max_parallel_deviation = 0.0;
    std::optional<ThetaExtent> theta_extent;
    std::vector<std::string> warnings;
};

struct CutLocusOptions
{
    int fan_n = 256;
    double length_cap = kTwoPi;
    double step = kDefaultStep;
    double maxwell_tol = 1e-6;
};

namespace detail
{

inline double fan_angle(int k, int n) { return kTwoPi * (k + 0.5) / n; }

// First return of gamma_a and gamma_b to a common point at equal arclength. Both start at the
// same point; the search is armed once they separate by more than `arm`.
inline std::optional<std::pair<double, SurfacePoint>> first_meeting(const Surface &surface, const GeodesicTrace &a,
                                                                    const GeodesicTrace &b, double tol,
                                                                    double arm = 1e-4)
{
    const std::size_t n = std::min(a.samples.size(), b.samples.size());
    auto gap = [&](std::size_t i) {
        const auto &x = a.samples[i].state;
        const auto &y = b.samples[i].state;
        return chart_distance(surface, x.r, x.theta, y.r, y.theta);
    };
    auto gap_at = [&](double s) {
        const GeodesicState x = state_at(a, s);
        const GeodesicState y = state_at(b, s);
        return chart_distance(surface, x.r, x.theta, y.r, y.theta);
    };
    bool armed = false;
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        const double d = gap(i);
        if (!armed)
        {
            armed = d > arm;
            continue;
        }
        if (!(d <= gap(i - 1) && d < gap(i + 1)))
            continue;
        // golden-section search on [s_{i-1}, s_{i+1}]
        constexpr double g = 0.6180339887498949;
        double lo = a.samples[i - 1].s;
        double hi = a.samples[i + 1].s;
        double x1 = hi - g * (hi - lo);
        double x2 = lo + g * (hi - lo);
        double f1 = gap_at(x1);
        double f2 = gap_at(x2);
        while (hi - lo > 1e-12)
        {
            if (f1 < f2)
            {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = gap_at(x1);
            }
            else
            {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = gap_at(x2);
            }
        }
        const double s = 0.5 * (lo + hi);
        if (gap_at(s) < tol)
        {
            const GeodesicState x = state_at(a, s);
            const GeodesicState y = state_at(b, s);
            const double th = x.theta + 0.5 * angle_diff(y.theta, x.theta);
            return std::pair{s, SurfacePoint(0.5 * (x.r + y.r), th)};
        }
    }
    return std::nullopt;
}

inline std::optional<CutPoint> cut_point_from_pair(const Surface &surface, const SurfacePoint &q, double phi,
                                                  const GeodesicTrace &g, const GeodesicTrace &partner,
                                                  const CutLocusOptions &opt)
{
    const auto conj = first_conjugate_distance(surface, g);
    const auto meet = first_meeting(surface, g, partner, opt.maxwell_tol);
    CutPoint cp;
    cp.source = q;
    cp.clairaut_nu = g.front().clairaut_nu;
    cp.angle_phi = phi;
    if (meet && (!conj || meet->first <= *conj + 1e-6))
    {
        cp.kind = CutKind::Maxwell;
        cp.distance = meet->first;
        cp.point = meet->second;
    }
    else if (conj)
    {
        cp.kind = CutKind::Conjugate;
        cp.distance = *conj;
        const GeodesicState st = state_at(g, *conj);
        cp.point = {st.r, st.theta};
    }
    else
        return std::nullopt;
    return cp;
}

inline void finalize_parallel_fit(CutLocusResult &res)
{
    if (res.cut_points.empty())
        return;
    std::vector<double> rs;
    rs.reserve(res.cut_points.size());
    for (const auto &c : res.cut_points)
        rs.push_back(c.point.r());
    std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
    const double median = rs[rs.size() / 2];
    double dev = 0.0;
    for (const auto &c : res.cut_points)
        dev = std::max(dev, std::abs(c.point.r() - median));
    res.parallel_r = median;
    res.max_parallel_deviation = dev;
}

} // namespace detail

/// Cut locus of q = (r0, theta0) on a two-sphere of revolution.
///
/// The fan uses initial angles phi_k = 2 pi (k + 1/2) / fan_n measured from the parallel
/// direction. The geodesics with angles phi and -phi share the Clairaut constant and are
/// exchanged by the symmetry of the surface, so the cut point of gamma_phi is their first
/// meeting at equal arclength (a Maxwell point) unless a conjugate point comes first. The
/// theta-extent endpoints are the first conjugate points of the two geodesics tangent to the
/// parallel of q (phi = 0 and phi = pi).
inline CutLocusResult riemann_cut_locus(const Surface &surface, const SurfacePoint &q,
                                        const CutLocusOptions &opt = {})
{
    surface.require_chart(q.r(), "riemann_cut_locus");
    if (opt.fan_n < 64)
        throw DomainError("riemann_cut_locus: fan_n must be >= 64");

    CutLocusResult res;
    res.source = q;
    res.metric_tag = "h";

    const int n = opt.fan_n;
    std::vector<GeodesicTrace> fan;
    fan.reserve(n);
    for (int k = 0; k < n; ++k)
        fan.push_back(integrate_h_geodesic(surface, unit_state(surface, q, detail::fan_angle(k, n)), opt.length_cap,
                                           opt.step));

    for (int k = 0; k < n; ++k)
    {
        auto cp = detail::cut_point_from_pair(surface, q, detail::fan_angle(k, n), fan[k], fan[n - 1 - k], opt);
        if (!cp)
        {
            res.warnings.push_back("no cut point within length cap for phi = " + std::to_string(detail::fan_angle(k, n)));
            continue;
        }
        res.cut_points.push_back(*cp);
    }

    const double jump = 5.0 * kPi / n;
    for (std::size_t i = 1; i < res.cut_points.size(); ++i)
    {
        const double d = std::abs(angle_diff(res.cut_points[i].point.theta(), res.cut_points[i - 1].point.theta()));
        if (d > jump)
        {
            res.warnings.push_back("FanTooCoarse: cut candidates jump by " + std::to_string(d) + " in theta near phi = " +
                                   std::to_string(res.cut_points[i].angle_phi));
            break;
        }
    }

    detail::finalize_parallel_fit(res);

    // endpoints of the theta-extent
    const GeodesicTrace tangent = integrate_h_geodesic(surface, unit_state(surface, q, 0.0), opt.length_cap, opt.step);
    if (const auto s = first_conjugate_distance(surface, tangent))
    {
        const double off = std::abs(angle_diff(state_at(tangent, *s).theta, q.theta()));
        res.theta_extent = ThetaExtent{wrap_angle(q.theta() + off), wrap_angle(q.theta() + kTwoPi - off)};
        if (res.theta_extent->hi < res.theta_extent->lo)
            res.theta_extent->hi += kTwoPi;
    }
    return res;
}

/// Cut point of the h-geodesic leaving q at angle phi (same construction as one fan direction
/// of riemann_cut_locus).
inline std::optional<CutPoint> riemann_cut_point(const Surface &surface, const SurfacePoint &q, double phi,
                                                 const CutLocusOptions &opt = {})
{
    surface.require_chart(q.r(), "riemann_cut_point");
    const GeodesicTrace g = integrate_h_geodesic(surface, unit_state(surface, q, phi), opt.length_cap, opt.step);
    const GeodesicTrace partner =
        integrate_h_geodesic(surface, unit_state(surface, q, -phi), opt.length_cap, opt.step);
    return detail::cut_point_from_pair(surface, q, phi, g, partner, opt);
}

/// Per fan direction, the first conjugate point (directions without one inside the cap are
/// omitted).
struct ConjugatePoint
{
    double angle_phi = 0.0;
    SurfacePoint point;
    double distance = 0.0;
};

inline std::vector<ConjugatePoint> conjugate_locus(const Surface &surface, const SurfacePoint &q,
                                                   const CutLocusOptions &opt = {})
{
    surface.require_chart(q.r(), "conjugate_locus");
    if (opt.fan_n < 64)
        throw DomainError("conjugate_locus: fan_n must be >= 64");
    std::vector<ConjugatePoint> out;
    for (int k = 0; k < opt.fan_n; ++k)
    {
        const double phi = detail::fan_angle(k, opt.fan_n);
        const GeodesicTrace g = integrate_h_geodesic(surface, unit_state(surface, q, phi), opt.length_cap, opt.step);
        if (const auto s = first_conjugate_distance(surface, g))
        {
            const GeodesicState st = state_at(g, *s);
            out.push_back({phi, {st.r, st.theta}, *s});
        }
    }
    return out;
}

/// Numerical certificate of the hypotheses of the chain construction.
struct ChainCertificate
{
    struct Entry
    {
        std::string label;  // "C0", "C1", "C2"
        std::size_t wind_index = 0;
        double defect = 0.0;
        double tolerance = 0.0;
        bool holds = false;
        SurfacePoint worst;
    };
    std::vector<Entry> entries;
    std::size_t killing_count = 0;  // length of the Killing prefix that drives the flow

    bool holds() const
    {
        return std::all_of(entries.begin(), entries.end(), [](const Entry &e) { return e.holds; });
    }
};

struct ChainTolerances
{
    double killing = 1e-10;  // (C0) killing_defect
    double poisson = 1e-5;   // (C1) poisson_defect per unit covector
    double closed = 1e-10;   // (C2) closedness_defect
    int n_r = 24;
    int n_theta = 12;
    int n_cov = 8;
};

/// Checks a wind chain (W_1, ..., W_k):
///   (C0) W_1 is h-Killing,
///   (C1) each W_i, 1 < i < k, Poisson-commutes with the co-metric of (h, W_1..W_{i-1}),
///   (C2) the last wind is either Killing in the same sense, or makes the one-form of the full
///        chain closed.
/// Grids avoid the poles; the sampled covectors are h*-unit.
inline ChainCertificate certify_chain(const NavigationData &chain, const ChainTolerances &tol = {})
{
    const Surface &surface = chain.surface();
    const auto &winds = chain.winds();
    ChainCertificate cert;
    if (winds.empty())
        return cert;

    const double r_lo = 0.05;
    const double r_hi = kPi - 0.05;
    auto grid = [&](auto &&fn) {
        for (int i = 0; i < tol.n_r; ++i)
        {
            const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / tol.n_r;
            for (int j = 0; j < tol.n_theta; ++j)
                fn(SurfacePoint(r, kTwoPi * j / tol.n_theta));
        }
    };
    auto killing_entry = [&](std::size_t idx) {
        ChainCertificate::Entry e;
        e.wind_index = idx;
        if (idx == 0)
        {
            e.label = "C0";
            e.tolerance = tol.killing;
            grid([&](const SurfacePoint &p) {
                const double d = killing_defect(surface, winds[0], p);
                if (d > e.defect || !std::isfinite(d))
                {
                    e.defect = d;
                    e.worst = p;
                }
            });
        }
        else
        {
            e.label = "C1";
            e.tolerance = tol.poisson;
            const NavigationData prev = chain.prefix(idx);
            grid([&](const SurfacePoint &p) {
                const double m = surface.m(p.r());
                for (int c = 0; c < tol.n_cov; ++c)
                {
                    const double a = kTwoPi * c / tol.n_cov;
                    const Covector cov{std::cos(a), m * std::sin(a)};
                    const double d = poisson_defect(prev, winds[idx], p, cov);
                    if (d > e.defect || !std::isfinite(d))
                    {
                        e.defect = d;
                        e.worst = p;
                    }
                }
            });
        }
        e.holds = e.defect < e.tolerance;
        return e;
    };

    for (std::size_t i = 0; i + 1 < winds.size(); ++i)
    {
        auto e = killing_entry(i);
        if (e.holds && cert.killing_count == i)
            cert.killing_count = i + 1;
        cert.entries.push_back(e);
    }

    const std::size_t last = winds.size() - 1;
    auto k = killing_entry(last);
    if (k.holds && cert.killing_count == last)
    {
        cert.killing_count = last + 1;
        cert.entries.push_back(k);
        return cert;
    }
    ChainCertificate::Entry c;
    c.label = "C2";
    c.wind_index = last;
    c.tolerance = tol.closed;
    const OneForm beta = navigation_one_form(surface, chain.total_wind());
    grid([&](const SurfacePoint &p) {
        const double d = closedness_defect(beta, p);
        if (d > c.defect || !std::isfinite(d))
        {
            c.defect = d;
            c.worst = p;
        }
    });
    c.holds = c.defect < c.tolerance;
    cert.entries.push_back(c);
    return cert;
}

/// Cut locus of q for the last metric of a certified wind chain: the h-cut locus with each cut
/// point p at distance l moved by the time-l flow of the Killing prefix W_1 + ... + W_j.
/// Throws PreconditionFailed (listing the failing conditions) when the chain is not certified.
inline CutLocusResult randers_cut_locus(const NavigationData &chain, const SurfacePoint &q,
                                        const CutLocusOptions &opt = {}, const ChainTolerances &tol = {})
{
    const ChainCertificate cert = certify_chain(chain, tol);
    if (!cert.holds())
    {
        std::string msg = "randers_cut_locus: chain hypotheses fail:";
        for (const auto &e : cert.entries)
            if (!e.holds)
                msg += " " + e.label + "(wind " + std::to_string(e.wind_index) + ", defect " +
                       std::to_string(e.defect) + " at r=" + std::to_string(e.worst.r()) +
                       ", theta=" + std::to_string(e.worst.theta()) + ")";
        throw PreconditionFailed(msg);
    }

    CutLocusResult res = riemann_cut_locus(chain.surface(), q, opt);
    res.metric_tag = "F" + std::to_string(chain.winds().empty() ? 0 : chain.winds().size() - 1);
    const VectorFieldSpec driver = chain.prefix(cert.killing_count).total_wind();
    const FlowMap flow{driver, opt.step};
    for (auto &cp : res.cut_points)
        cp.point = flow_advance(flow, cp.point, cp.distance);
    // extent endpoints are the images of the two tangent-direction conjugate points, which share
    // the same distance; dropped for non-rotation drivers
    if (res.theta_extent)
    {
        const auto mu = driver.rotation_rate();
        if (!mu)
            res.theta_extent.reset();
        else if (*mu != 0.0)
        {
            const GeodesicTrace tangent =
                integrate_h_geodesic(chain.surface(), unit_state(chain.surface(), q, 0.0), opt.length_cap, opt.step);
            const double s = first_conjugate_distance(chain.surface(), tangent).value_or(0.0);
            res.theta_extent->lo += *mu * s;
            res.theta_extent->hi += *mu * s;
        }
    }
    detail::finalize_parallel_fit(res);
    return res;
}

} // namespace rsphere
