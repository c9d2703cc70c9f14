#pragma once

#include "rsphere/common.hpp"
#include "rsphere/metrics.hpp"
#include "rsphere/rk4.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rsphere
{

/// Chart state along a geodesic. theta is kept unwrapped so traces are continuous.
struct GeodesicState
{
    double r = kPi / 2;
    double theta = 0.0;
    double dr = 0.0;      // dr/ds
    double dtheta = 0.0;  // dtheta/ds
    double clairaut_nu = 0.0;
    double angle_phi = 0.0;  // angle to the parallel direction, so nu = m cos(phi)
    double p_r = 0.0;        // cotangent momentum
    double p_theta = 0.0;

    SurfacePoint point() const { return {r, theta}; }
    TangentVector velocity() const { return {dr, dtheta}; }
    Covector momentum() const { return {p_r, p_theta}; }
};

struct TraceSample
{
    double s = 0.0;
    GeodesicState state;
};

struct GeodesicTrace
{
    std::vector<TraceSample> samples;
    std::string metric_tag = "h";
    double step = kDefaultStep;
    bool pole_crossing = false;  // integration halted at the pole guard

    bool empty() const { return samples.empty(); }
    double length() const { return samples.empty() ? 0.0 : samples.back().s; }
    const GeodesicState &front() const { return samples.front().state; }
    const GeodesicState &back() const { return samples.back().state; }
};

/// h-unit initial state at p heading at angle phi from the parallel direction:
/// dr/ds = sin(phi), m dtheta/ds = cos(phi).
inline GeodesicState unit_state(const Surface &surface, const SurfacePoint &p, double phi)
{
    surface.require_chart(p.r(), "unit_state");
    const double m = surface.m(p.r());
    GeodesicState st;
    st.r = p.r();
    st.theta = p.theta();
    st.dr = std::sin(phi);
    // cos(pi/2) is 6e-17 in floating point; meridians need dtheta exactly 0
    const double c = std::abs(std::cos(phi)) < 1e-15 ? 0.0 : std::cos(phi);
    st.dtheta = c / m;
    st.clairaut_nu = m * c;
    st.angle_phi = phi;
    st.p_r = st.dr;
    st.p_theta = m * m * st.dtheta;
    return st;
}

/// Clairaut constant nu = m(r) cos(phi), with cos(phi) = m dtheta/ds for a unit-speed state.
inline double clairaut_constant(const Surface &surface, const GeodesicState &state)
{
    const double m = surface.m(state.r);
    return m * (m * state.dtheta);
}

namespace detail
{

inline void fill_h_derived(const Surface &surface, GeodesicState &st)
{
    const double m = surface.m(st.r);
    st.clairaut_nu = m * m * st.dtheta;
    st.angle_phi = std::atan2(st.dr, m * st.dtheta);
    st.p_r = st.dr;
    st.p_theta = m * m * st.dtheta;
}

// Uniform grid 0, step, 2 step, ... with a final shorter step landing on `length`.
template <class Step>
void march(double length, double step, Step &&advance)
{
    if (!(step > 0.0))
        throw DomainError("integration step must be positive");
    const int full = static_cast<int>(std::floor(length / step + 1e-9));
    double s = 0.0;
    for (int i = 0; i < full; ++i)
    {
        if (!advance(s, step))
            return;
        s = (i + 1) * step;
    }
    const double rest = length - s;
    if (rest > 1e-12 * std::max(1.0, length))
        advance(s, rest);
}

} // namespace detail

/// Integrates the unit-speed h-geodesic equations
///   r'' = m m' theta'^2,  theta'' = -2 (m'/m) r' theta'
/// with fixed-step RK4. Stops early (pole_crossing = true) if the orbit enters the pole guard,
/// except for exact meridians (dtheta = 0), which are continued through the pole.
inline GeodesicTrace integrate_h_geodesic(const Surface &surface, const GeodesicState &init, double length,
                                          double step = kDefaultStep)
{
    surface.require_chart(init.r, "integrate_h_geodesic");
    GeodesicTrace trace;
    trace.metric_tag = "h";
    trace.step = step;
    trace.samples.reserve(static_cast<std::size_t>(length / step) + 2);

    auto rhs = [&surface](const OdeState<4> &x) {
        const double m = surface.m(x[0]);
        const double dm = surface.dm(x[0]);
        return OdeState<4>{x[2], x[3], m * dm * x[3] * x[3], -2.0 * dm / m * x[2] * x[3]};
    };

    GeodesicState st = init;
    detail::fill_h_derived(surface, st);
    trace.samples.push_back({0.0, st});
    OdeState<4> x{init.r, init.theta, init.dr, init.dtheta};

    const bool meridian = init.dtheta == 0.0;
    detail::march(length, step, [&](double s, double h) {
        OdeState<4> next = rk4_step(rhs, x, h);
        if (meridian && std::isfinite(next[0]) && (next[0] <= 0.0 || next[0] >= kPi))
        {
            // a meridian runs through the pole onto the opposite meridian
            next[0] = next[0] <= 0.0 ? -next[0] : kTwoPi - next[0];
            next[2] = -next[2];
            next[1] += kPi;
        }
        if (!surface.in_chart(next[0]) || !std::isfinite(next[0]))
        {
            trace.pole_crossing = true;
            return false;
        }
        x = next;
        GeodesicState g;
        g.r = x[0];
        g.theta = x[1];
        g.dr = x[2];
        g.dtheta = x[3];
        detail::fill_h_derived(surface, g);
        trace.samples.push_back({s + h, g});
        return true;
    });
    return trace;
}

/// A 1-homogeneous co-metric on T*M with analytic momentum gradient; the position gradient is
/// taken by central differences.
struct CoMetric
{
    std::function<double(double r, double theta, Covector p)> value;
    std::function<TangentVector(double r, double theta, Covector p)> grad_p;
    std::function<bool(double r, double theta)> admissible;  // convexity bound, checked en route
    double fd_step = 1e-6;

    Covector grad_x(double r, double theta, Covector p) const
    {
        const double h = fd_step;
        return {(value(r + h, theta, p) - value(r - h, theta, p)) / (2 * h),
                (value(r, theta + h, p) - value(r, theta - h, p)) / (2 * h)};
    }
};

/// Co-metric of navigation data: K(x, p) = |p|_{h*} + W^i p_i.
inline CoMetric navigation_cometric(const NavigationData &nav)
{
    CoMetric k;
    k.value = [nav](double r, double th, Covector p) {
        const double m = nav.surface().m(r);
        const TangentVector w = nav.wind_at({r, th});
        return std::sqrt(p.r * p.r + p.theta * p.theta / (m * m)) + p(w);
    };
    k.grad_p = [nav](double r, double th, Covector p) {
        const double m2 = nav.surface().m(r) * nav.surface().m(r);
        const double n = std::sqrt(p.r * p.r + p.theta * p.theta / m2);
        const TangentVector w = nav.wind_at({r, th});
        return TangentVector{p.r / n + w.r, p.theta / (m2 * n) + w.theta};
    };
    k.admissible = [nav](double r, double th) { return nav.lambda({r, th}) > 0.0; };
    return k;
}

/// Co-metric sqrt(g^{ij} p_i p_j) of a Riemannian metric given pointwise.
inline CoMetric riemannian_cometric(std::function<MetricMatrix(double r, double theta)> metric)
{
    CoMetric k;
    k.value = [metric](double r, double th, Covector p) { return metric(r, th).dual_norm(p); };
    k.grad_p = [metric](double r, double th, Covector p) {
        const MetricMatrix inv = metric(r, th).inverse();
        const TangentVector v = inv.raise_with_inverse(p);
        const double n = std::sqrt(p(v));
        return TangentVector{v.r / n, v.theta / n};
    };
    k.admissible = [](double, double) { return true; };
    return k;
}

/// Integrates Hamilton's equations x' = dK/dp, p' = -dK/dx with fixed-step RK4. The
/// initial covector is rescaled to K = 1, so the time parameter is the arclength of the dual
/// Finsler metric. Stops early at the pole guard; throws NonConvexError if `admissible` fails.
inline GeodesicTrace integrate_cometric_geodesic(const Surface &surface, const CoMetric &K, const SurfacePoint &start,
                                                 Covector cov, double length, double step = kDefaultStep,
                                                 std::string tag = "F")
{
    surface.require_chart(start.r(), "integrate_cometric_geodesic");
    const double k0 = K.value(start.r(), start.theta(), cov);
    if (!(k0 > 0.0))
        throw DomainError("integrate_cometric_geodesic: initial covector has K <= 0");
    cov = (1.0 / k0) * cov;

    GeodesicTrace trace;
    trace.metric_tag = std::move(tag);
    trace.step = step;
    trace.samples.reserve(static_cast<std::size_t>(length / step) + 2);

    auto rhs = [&K](const OdeState<4> &x) {
        const Covector p{x[2], x[3]};
        const TangentVector v = K.grad_p(x[0], x[1], p);
        const Covector f = K.grad_x(x[0], x[1], p);
        return OdeState<4>{v.r, v.theta, -f.r, -f.theta};
    };
    auto make_state = [&](const OdeState<4> &x) {
        GeodesicState g;
        g.r = x[0];
        g.theta = x[1];
        g.p_r = x[2];
        g.p_theta = x[3];
        const TangentVector v = K.grad_p(x[0], x[1], {x[2], x[3]});
        g.dr = v.r;
        g.dtheta = v.theta;
        const double m = surface.m(x[0]);
        g.clairaut_nu = x[3];  // p_theta, conserved for rotation-invariant co-metrics
        g.angle_phi = std::atan2(v.r, m * v.theta);
        return g;
    };

    OdeState<4> x{start.r(), start.theta(), cov.r, cov.theta};
    trace.samples.push_back({0.0, make_state(x)});
    detail::march(length, step, [&](double s, double h) {
        const OdeState<4> next = rk4_step(rhs, x, h);
        if (!surface.in_chart(next[0]) || !std::isfinite(next[0]))
        {
            trace.pole_crossing = true;
            return false;
        }
        if (!K.admissible(next[0], next[1]))
            throw NonConvexError("integrate_cometric_geodesic: convexity bound fails at r = " +
                                 std::to_string(next[0]));
        x = next;
        trace.samples.push_back({s + h, make_state(x)});
        return true;
    });
    return trace;
}

/// Randers geodesic of the navigation data (h, W_total), integrated in T*M with K = K_h + W*.
inline GeodesicTrace integrate_randers_geodesic(const NavigationData &nav, const SurfacePoint &start, Covector cov,
                                                double length, double step = kDefaultStep, std::string tag = "F")
{
    if (!nav.convex_at(start))
        throw NonConvexError("integrate_randers_geodesic: |W|_h >= 1 at the start point");
    return integrate_cometric_geodesic(nav.surface(), navigation_cometric(nav), start, cov, length, step,
                                       std::move(tag));
}

/// Momentum of the Finsler-unit geodesic with initial velocity u + W, where u is h-unit:
/// p = h(u) / (1 + h(u, W)).
inline Covector navigation_covector(const NavigationData &nav, const SurfacePoint &p, TangentVector u)
{
    const NavigationPoint np = nav.at(p);
    const Covector hu = np.h.lower(u);
    return (1.0 / (1.0 + hu(np.wind))) * hu;
}

/// Inverse Legendre transform of the navigation co-metric: solves K(q) dK/dq(q) = y for q by
/// damped Newton. For y with F(y) = 1 this returns the unit covector with K(q) = 1.
inline Covector legendre_covector(const NavigationData &nav, const SurfacePoint &x, TangentVector y,
                                  double tol = 1e-12, int max_iter = 100)
{
    const NavigationPoint np = nav.at(x);
    const MetricMatrix hinv = np.h.inverse();
    const TangentVector w = np.wind;
    if (!(np.lambda() > 0.0))
        throw NonConvexError("legendre_covector: |W|_h >= 1");

    auto residual = [&](Covector q, double &k, TangentVector &grad) {
        const TangentVector hq = hinv.raise_with_inverse(q);
        const double n = std::sqrt(q(hq));
        k = n + q(w);
        grad = {hq.r / n + w.r, hq.theta / n + w.theta};
        return TangentVector{k * grad.r - y.r, k * grad.theta - y.theta};
    };
    auto size = [](TangentVector v) { return std::hypot(v.r, v.theta); };

    Covector q = np.h.lower(y - w);
    double k = 0.0;
    TangentVector grad;
    TangentVector res = residual(q, k, grad);
    for (int it = 0; it < max_iter && size(res) > tol; ++it)
    {
        // Jacobian: grad grad^T + K * Hess(N), Hess(N) = (H - Hq Hq^T / N^2) / N.
        const TangentVector hq = hinv.raise_with_inverse(q);
        const double n = std::sqrt(q(hq));
        const double j11 = grad.r * grad.r + k * (hinv.rr - hq.r * hq.r / (n * n)) / n;
        const double j12 = grad.r * grad.theta + k * (hinv.rth - hq.r * hq.theta / (n * n)) / n;
        const double j22 = grad.theta * grad.theta + k * (hinv.thth - hq.theta * hq.theta / (n * n)) / n;
        const double det = j11 * j22 - j12 * j12;
        const Covector delta{(j22 * res.r - j12 * res.theta) / det, (-j12 * res.r + j11 * res.theta) / det};

        double damping = 1.0;
        const double before = size(res);
        for (int halve = 0; halve < 30; ++halve, damping *= 0.5)
        {
            const Covector trial = q - damping * delta;
            double kt = 0.0;
            TangentVector gt;
            const TangentVector rt = residual(trial, kt, gt);
            if (size(rt) < before || halve == 29)
            {
                q = trial;
                k = kt;
                grad = gt;
                res = rt;
                break;
            }
        }
    }
    return q;
}

/// Samples of the Jacobi equation J'' + G(r(s)) J = 0 along an h-geodesic, J(0) = 0, J'(0) = 1.
struct JacobiSolution
{
    struct Sample
    {
        double s;
        double J;
        double dJ;
    };
    std::vector<Sample> samples;
    std::optional<double> first_zero;
};

inline JacobiSolution solve_jacobi(const Surface &surface, const GeodesicTrace &trace)
{
    JacobiSolution out;
    if (trace.empty())
        return out;
    out.samples.reserve(trace.samples.size());
    out.samples.push_back({0.0, 0.0, 1.0});

    OdeState<2> y{0.0, 1.0};
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i)
    {
        const auto &a = trace.samples[i];
        const auto &b = trace.samples[i + 1];
        const double h = b.s - a.s;
        // r(s) inside the step from the cubic Hermite interpolant of (r, dr/ds)
        auto curvature_at = [&](double t) {
            const double r = hermite(a.state.r, a.state.dr, b.state.r, b.state.dr, h, t);
            return -surface.d2m(r) / surface.m(r);
        };
        const double g0 = curvature_at(0.0);
        const double gm = curvature_at(0.5 * h);
        const double g1 = curvature_at(h);
        const OdeState<2> k1{y[1], -g0 * y[0]};
        const OdeState<2> y2{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        const OdeState<2> k2{y2[1], -gm * y2[0]};
        const OdeState<2> y3{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        const OdeState<2> k3{y3[1], -gm * y3[0]};
        const OdeState<2> y4{y[0] + h * k3[0], y[1] + h * k3[1]};
        const OdeState<2> k4{y4[1], -g1 * y4[0]};
        const OdeState<2> next{y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                               y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};

        if (!out.first_zero && y[0] > 0.0 && next[0] <= 0.0)
        {
            // bisection on the Hermite interpolant of (J, J')
            double lo = 0.0;
            double hi = h;
            while (hi - lo > 1e-12)
            {
                const double mid = 0.5 * (lo + hi);
                if (hermite(y[0], y[1], next[0], next[1], h, mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            out.first_zero = a.s + 0.5 * (lo + hi);
        }
        y = next;
        out.samples.push_back({b.s, y[0], y[1]});
    }
    return out;
}

/// Arclength of the first point conjugate to the start of an h-geodesic trace, if within the trace.
inline std::optional<double> first_conjugate_distance(const Surface &surface, const GeodesicTrace &trace)
{
    return solve_jacobi(surface, trace).first_zero;
}

/// Interpolated state at arclength s (cubic Hermite in position, linear in the rest).
inline GeodesicState state_at(const GeodesicTrace &trace, double s)
{
    const auto &smp = trace.samples;
    if (smp.empty())
        throw DomainError("state_at: empty trace");
    if (s <= smp.front().s)
        return smp.front().state;
    if (s >= smp.back().s)
        return smp.back().state;
    auto it = std::upper_bound(smp.begin(), smp.end(), s, [](double v, const TraceSample &t) { return v < t.s; });
    const auto &b = *it;
    const auto &a = *(it - 1);
    const double h = b.s - a.s;
    const double t = s - a.s;
    const double u = t / h;
    GeodesicState g;
    g.r = hermite(a.state.r, a.state.dr, b.state.r, b.state.dr, h, t);
    g.theta = hermite(a.state.theta, a.state.dtheta, b.state.theta, b.state.dtheta, h, t);
    g.dr = (1 - u) * a.state.dr + u * b.state.dr;
    g.dtheta = (1 - u) * a.state.dtheta + u * b.state.dtheta;
    g.clairaut_nu = (1 - u) * a.state.clairaut_nu + u * b.state.clairaut_nu;
    g.angle_phi = (1 - u) * a.state.angle_phi + u * b.state.angle_phi;
    g.p_r = (1 - u) * a.state.p_r + u * b.state.p_r;
    g.p_theta = (1 - u) * a.state.p_theta + u * b.state.p_theta;
    return g;
}

/// Sample-wise image P~(s) = psi_s(P(s)) of a trace under the flow of a field. The parameter s is
/// kept. Velocities are exact for rotation flows and central differences otherwise; momenta are
/// carried over unchanged (the cotangent lift of a rotation is trivial).
inline GeodesicTrace deform_trace_by_flow(const GeodesicTrace &trace, const FlowMap &flow, std::string tag = "")
{
    GeodesicTrace out;
    out.metric_tag = tag.empty() ? trace.metric_tag + "~" : std::move(tag);
    out.step = trace.step;
    out.pole_crossing = trace.pole_crossing;
    out.samples.reserve(trace.samples.size());

    const auto rate = flow.generator.rotation_rate();
    for (const auto &smp : trace.samples)
    {
        TraceSample t = smp;
        auto [r, th] = flow_advance_unwrapped(flow, smp.state.r, smp.state.theta, smp.s);
        t.state.r = r;
        t.state.theta = th;
        if (rate)
            t.state.dtheta += *rate;
        out.samples.push_back(t);
    }
    if (!rate && out.samples.size() > 1)
    {
        const auto &in = out.samples;
        std::vector<std::pair<double, double>> vel(in.size());
        for (std::size_t i = 0; i < in.size(); ++i)
        {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == in.size() ? i : i + 1;
            const double ds = in[hi].s - in[lo].s;
            vel[i] = {(in[hi].state.r - in[lo].state.r) / ds, (in[hi].state.theta - in[lo].state.theta) / ds};
        }
        for (std::size_t i = 0; i < in.size(); ++i)
        {
            out.samples[i].state.dr = vel[i].first;
            out.samples[i].state.dtheta = vel[i].second;
        }
    }
    return out;
}

/// Chart distance sqrt(dr^2 + m^2 dtheta^2) with the theta difference wrapped and m taken at the
/// mean radius.
inline double chart_distance(const Surface &surface, double r1, double th1, double r2, double th2)
{
    const double m = surface.m(0.5 * (r1 + r2));
    const double dr = r1 - r2;
    const double dth = angle_diff(th1, th2);
    return std::sqrt(dr * dr + m * m * dth * dth);
}

/// Largest chart distance between two traces at equal parameter values. The second trace is
/// linearly interpolated onto the first trace's parameters when the grids differ; only the
/// common parameter range is compared.
inline double trace_distance(const Surface &surface, const GeodesicTrace &t1, const GeodesicTrace &t2)
{
    if (t1.empty() || t2.empty())
        throw DomainError("trace_distance: empty trace");
    const bool same_grid = t1.samples.size() == t2.samples.size() &&
                           std::equal(t1.samples.begin(), t1.samples.end(), t2.samples.begin(),
                                      [](const TraceSample &a, const TraceSample &b) { return a.s == b.s; });
    double worst = 0.0;
    if (same_grid)
    {
        for (std::size_t i = 0; i < t1.samples.size(); ++i)
        {
            const auto &a = t1.samples[i].state;
            const auto &b = t2.samples[i].state;
            worst = std::max(worst, chart_distance(surface, a.r, a.theta, b.r, b.theta));
        }
        return worst;
    }
    const auto &s2 = t2.samples;
    for (const auto &smp : t1.samples)
    {
        if (smp.s > s2.back().s + 1e-12)
            break;
        auto it = std::lower_bound(s2.begin(), s2.end(), smp.s, [](const TraceSample &t, double v) { return t.s < v; });
        double r = 0.0;
        double th = 0.0;
        if (it == s2.begin())
        {
            r = it->state.r;
            th = it->state.theta;
        }
        else if (it == s2.end())
        {
            r = s2.back().state.r;
            th = s2.back().state.theta;
        }
        else
        {
            const auto &b = *it;
            const auto &a = *(it - 1);
            const double u = (smp.s - a.s) / (b.s - a.s);
            r = (1 - u) * a.state.r + u * b.state.r;
            th = (1 - u) * a.state.theta + u * b.state.theta;
        }
        worst = std::max(worst, chart_distance(surface, smp.state.r, smp.state.theta, r, th));
    }
    return worst;
}

namespace detail
{

// Distance from point x to segment [a, b] in the flat metric dr^2 + m^2 dtheta^2 frozen at x.
inline double point_segment_distance(const Surface &surface, double xr, double xth, double ar, double ath, double br,
                                     double bth)
{
    const double m = surface.m(xr);
    const double ax = ar - xr;
    const double ay = m * angle_diff(ath, xth);
    const double bx = br - xr;
    const double by = ay + m * angle_diff(bth, ath);
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = ax + t * dx;
    const double py = ay + t * dy;
    return std::sqrt(px * px + py * py);
}

inline double directed_hausdorff(const Surface &surface, const GeodesicTrace &from, const GeodesicTrace &to)
{
    const auto &seg = to.samples;
    auto seg_dist = [&](const GeodesicState &x, std::size_t k) {
        return point_segment_distance(surface, x.r, x.theta, seg[k].state.r, seg[k].state.theta, seg[k + 1].state.r,
                                      seg[k + 1].state.theta);
    };
    double worst = 0.0;
    if (seg.size() == 1)
    {
        for (const auto &smp : from.samples)
            worst = std::max(worst, chart_distance(surface, smp.state.r, smp.state.theta, seg[0].state.r,
                                                   seg[0].state.theta));
        return worst;
    }
    // Both polylines are traversed in the same sense, so the nearest segment moves forward with
    // the sample. A window around the previous nearest segment is searched and widened while the
    // minimum sits on its edge; a missed closer segment can only overestimate the distance.
    constexpr std::size_t kWindow = 64;
    const std::size_t last = seg.size() - 2;
    std::size_t hint = 0;
    bool first = true;
    for (const auto &smp : from.samples)
    {
        std::size_t lo = first ? 0 : (hint > kWindow ? hint - kWindow : 0);
        std::size_t hi = first ? last : std::min(last, hint + kWindow);
        first = false;
        double best = std::numeric_limits<double>::infinity();
        for (;;)
        {
            for (std::size_t k = lo; k <= hi; ++k)
            {
                const double d = seg_dist(smp.state, k);
                if (d < best)
                {
                    best = d;
                    hint = k;
                }
            }
            if (hint == hi && hi < last)
            {
                lo = hi + 1;
                hi = std::min(last, hi + kWindow);
            }
            else if (hint == lo && lo > 0 && lo + kWindow >= hint)
            {
                hi = lo - 1;
                lo = lo > kWindow ? lo - kWindow : 0;
            }
            else
                break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace detail

/// Symmetric Hausdorff distance between the polylines of two traces, in the chart metric.
inline double hausdorff_distance(const Surface &surface, const GeodesicTrace &a, const GeodesicTrace &b)
{
    if (a.empty() || b.empty())
        throw DomainError("hausdorff_distance: empty trace");
    return std::max(detail::directed_hausdorff(surface, a, b), detail::directed_hausdorff(surface, b, a));
}

/// Truncates a trace at parameter s_end (interpolating the last sample).
inline GeodesicTrace truncate_trace(const GeodesicTrace &trace, double s_end)
{
    GeodesicTrace out;
    out.metric_tag = trace.metric_tag;
    out.step = trace.step;
    for (const auto &smp : trace.samples)
    {
        if (smp.s >= s_end)
            break;
        out.samples.push_back(smp);
    }
    if (!trace.empty() && s_end <= trace.length())
        out.samples.push_back({s_end, state_at(trace, s_end)});
    return out;
}

/// Direction of the h-unit vector at angle phi from the parallel direction.
inline TangentVector unit_direction(const Surface &surface, double r, double phi)
{
    return {std::sin(phi), std::cos(phi) / surface.m(r)};
}

/// First conjugate distance along the geodesic of the navigation data leaving q in h-direction
/// phi, found from the sign change of det[gamma', J] with J the finite-difference variation of
/// neighbouring geodesics (initial angles phi +- delta). Independent of any Jacobi equation.
inline std::optional<double> variation_conjugate_distance(const NavigationData &nav, const SurfacePoint &q, double phi,
                                                          double length, double step = kDefaultStep,
                                                          double delta = 1e-4)
{
    const Surface &surface = nav.surface();
    auto shoot = [&](double angle) {
        const TangentVector u = unit_direction(surface, q.r(), angle);
        return integrate_randers_geodesic(nav, q, navigation_covector(nav, q, u), length, step);
    };
    const GeodesicTrace mid = shoot(phi);
    const GeodesicTrace plus = shoot(phi + delta);
    const GeodesicTrace minus = shoot(phi - delta);
    const std::size_t n = std::min({mid.samples.size(), plus.samples.size(), minus.samples.size()});

    auto det_at = [&](std::size_t i) {
        const auto &g = mid.samples[i].state;
        const double jr = (plus.samples[i].state.r - minus.samples[i].state.r) / (2 * delta);
        const double jth = (plus.samples[i].state.theta - minus.samples[i].state.theta) / (2 * delta);
        return surface.m(g.r) * (g.dr * jth - g.dtheta * jr);
    };
    const std::size_t start = std::min<std::size_t>(10, n);
    if (start < 1)
        return std::nullopt;
    double prev = det_at(start - 1);
    for (std::size_t i = start; i < n; ++i)
    {
        const double cur = det_at(i);
        if ((prev > 0.0) != (cur > 0.0) && prev != 0.0)
        {
            // quadratic through three samples where available, else linear
            const double s0 = mid.samples[i - 1].s;
            const double s1 = mid.samples[i].s;
            double root = s0 + (s1 - s0) * prev / (prev - cur);
            if (i + 1 < n)
            {
                const double s2 = mid.samples[i + 1].s;
                const double f0 = prev, f1 = cur, f2 = det_at(i + 1);
                // Newton form of the interpolating parabola, refined by two Newton steps
                const double d01 = (f1 - f0) / (s1 - s0);
                const double d12 = (f2 - f1) / (s2 - s1);
                const double d012 = (d12 - d01) / (s2 - s0);
                for (int it = 0; it < 3; ++it)
                {
                    const double p = f0 + d01 * (root - s0) + d012 * (root - s0) * (root - s1);
                    const double dp = d01 + d012 * ((root - s0) + (root - s1));
                    root -= p / dp;
                }
            }
            return root;
        }
        prev = cur;
    }
    return std::nullopt;
}

} // namespace rsphere
