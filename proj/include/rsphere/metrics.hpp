#pragma once

#include "rsphere/common.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/vector_field.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rsphere
{

/// Symmetric 2x2 matrix in the (r, theta) chart basis.
struct MetricMatrix
{
    double rr = 1.0;
    double rth = 0.0;
    double thth = 1.0;

    double det() const { return rr * thth - rth * rth; }

    bool positive_definite() const { return rr > 0.0 && det() > 0.0; }

    MetricMatrix inverse() const
    {
        const double d = det();
        return {thth / d, -rth / d, rr / d};
    }

    double operator()(TangentVector y, TangentVector z) const
    {
        return rr * y.r * z.r + rth * (y.r * z.theta + y.theta * z.r) + thth * y.theta * z.theta;
    }

    double norm(TangentVector y) const { return std::sqrt((*this)(y, y)); }

    Covector lower(TangentVector y) const { return {rr * y.r + rth * y.theta, rth * y.r + thth * y.theta}; }

    /// Raises an index with this matrix read as the inverse metric (g^{ij}).
    TangentVector raise_with_inverse(Covector w) const { return {rr * w.r + rth * w.theta, rth * w.r + thth * w.theta}; }

    /// Dual norm sqrt(g^{ij} w_i w_j) where *this is g_{ij}.
    double dual_norm(Covector w) const
    {
        const MetricMatrix inv = inverse();
        return std::sqrt(inv.rr * w.r * w.r + 2 * inv.rth * w.r * w.theta + inv.thth * w.theta * w.theta);
    }
};

/// Pointwise Randers data F = alpha + beta with alpha^2 = a_ij y^i y^j and beta = b_i y^i.
struct RandersPoint
{
    MetricMatrix a;
    Covector b;

    double norm_b() const { return a.dual_norm(b); }

    /// epsilon = 1 - |b|_alpha^2; positive exactly when F is positive definite.
    double epsilon() const
    {
        const double nb = norm_b();
        return 1.0 - nb * nb;
    }

    double operator()(TangentVector y) const { return a.norm(y) + b(y); }
};

/// Navigation data at a point: Riemannian metric h and wind V.
struct NavigationPoint
{
    MetricMatrix h;
    TangentVector wind;

    /// lambda = 1 - |V|_h^2.
    double lambda() const
    {
        const double n = h.norm(wind);
        return 1.0 - n * n;
    }
};

inline MetricMatrix riemann_eval(const Surface &surface, const SurfacePoint &p)
{
    surface.require_chart(p.r(), "riemann_eval");
    const double m = surface.m(p.r());
    return {1.0, 0.0, m * m};
}

/// Solution of Zermelo's problem for (h, V):
/// a_ij = h_ij / lambda + V_i V_j / lambda^2, b_i = -V_i / lambda, lambda = 1 - |V|_h^2.
inline RandersPoint zermelo_to_randers(const MetricMatrix &h, TangentVector wind)
{
    const Covector v = h.lower(wind);
    const double lambda = 1.0 - h(wind, wind);
    if (!(lambda > 0.0))
        throw NonConvexError("zermelo_to_randers: |V|_h >= 1");
    RandersPoint out;
    out.a = {h.rr / lambda + v.r * v.r / (lambda * lambda), h.rth / lambda + v.r * v.theta / (lambda * lambda),
             h.thth / lambda + v.theta * v.theta / (lambda * lambda)};
    out.b = (-1.0 / lambda) * v;
    return out;
}

inline RandersPoint zermelo_to_randers(const Surface &surface, const VectorFieldSpec &wind, const SurfacePoint &p)
{
    return zermelo_to_randers(riemann_eval(surface, p), wind(p));
}

/// Navigation data of a Randers metric: h_ij = eps (a_ij - b_i b_j), V^i = -b^i / eps.
inline NavigationPoint randers_to_zermelo(const MetricMatrix &a, Covector b)
{
    const MetricMatrix ainv = a.inverse();
    const TangentVector bsharp = ainv.raise_with_inverse(b);
    const double eps = 1.0 - b(bsharp);
    if (!(eps > 0.0))
        throw NonConvexError("randers_to_zermelo: |b|_alpha >= 1");
    NavigationPoint out;
    out.h = {eps * (a.rr - b.r * b.r), eps * (a.rth - b.r * b.theta), eps * (a.thth - b.theta * b.theta)};
    out.wind = (-1.0 / eps) * bsharp;
    return out;
}

inline NavigationPoint randers_to_zermelo(const RandersPoint &F) { return randers_to_zermelo(F.a, F.b); }

/// F(y) = sqrt(a_ij y^i y^j) + b_i y^i.
inline double randers_norm(const MetricMatrix &a, Covector b, TangentVector y) { return a.norm(y) + b(y); }

struct BetaChangeResult
{
    RandersPoint metric;
    double eta = 1.0;
    TangentVector wind;  // the translating field W at the point
};

/// Translates the indicatrix of F by W:
///   eta = [1 + F(W)][1 - F(-W)], Wt_i = W_i - b_i [1 + beta(W)], W_i = a_ij W^j,
///   at_ij = (a_ij - b_i b_j) / eta + Wt_i Wt_j / eta^2, bt_i = -Wt_i / eta.
inline BetaChangeResult beta_change(const RandersPoint &F, TangentVector wind)
{
    const double f_minus = F(-wind);
    if (!(f_minus < 1.0))
        throw NonConvexError("beta_change: F(-W) >= 1");
    const double beta_w = F.b(wind);
    const double eta = (1.0 + F(wind)) * (1.0 - f_minus);
    const Covector wl = F.a.lower(wind);
    const Covector wt = wl - (1.0 + beta_w) * F.b;
    const Covector &b = F.b;

    BetaChangeResult out;
    out.eta = eta;
    out.wind = wind;
    out.metric.a = {(F.a.rr - b.r * b.r) / eta + wt.r * wt.r / (eta * eta),
                    (F.a.rth - b.r * b.theta) / eta + wt.r * wt.theta / (eta * eta),
                    (F.a.thth - b.theta * b.theta) / eta + wt.theta * wt.theta / (eta * eta)};
    out.metric.b = (-1.0 / eta) * wt;
    return out;
}

/// Randers metric given by pointwise evaluators of alpha and beta.
class RandersMetricData
{
  public:
    using AlphaFn = std::function<MetricMatrix(const SurfacePoint &)>;
    using BetaFn = std::function<Covector(const SurfacePoint &)>;

    RandersMetricData(AlphaFn alpha, BetaFn beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {}

    MetricMatrix alpha(const SurfacePoint &p) const { return alpha_(p); }
    Covector beta(const SurfacePoint &p) const { return beta_(p); }
    RandersPoint at(const SurfacePoint &p) const { return {alpha_(p), beta_(p)}; }

    double epsilon(const SurfacePoint &p) const { return at(p).epsilon(); }
    double norm_b(const SurfacePoint &p) const { return at(p).norm_b(); }

    double operator()(const SurfacePoint &p, TangentVector y) const { return at(p)(y); }

  private:
    AlphaFn alpha_;
    BetaFn beta_;
};

/// Navigation data (h, W_1, ..., W_k): the Riemannian surface h followed by an ordered chain of
/// winds. The chain prefix (h, W_1..W_j) describes the Randers metric F_j; by additivity of
/// navigation data, F_k is also the solution of Zermelo's problem for (h, W_1 + ... + W_k).
class NavigationData
{
  public:
    explicit NavigationData(Surface surface, std::vector<VectorFieldSpec> winds = {})
        : surface_(std::move(surface)), winds_(std::move(winds))
    {
    }

    const Surface &surface() const { return surface_; }
    const std::vector<VectorFieldSpec> &winds() const { return winds_; }

    /// The first `count` winds of the chain.
    NavigationData prefix(std::size_t count) const
    {
        count = std::min(count, winds_.size());
        return NavigationData(surface_, std::vector<VectorFieldSpec>(winds_.begin(), winds_.begin() + count));
    }

    NavigationData with_wind(VectorFieldSpec w) const
    {
        auto winds = winds_;
        winds.push_back(std::move(w));
        return NavigationData(surface_, std::move(winds));
    }

    VectorFieldSpec total_wind() const
    {
        if (winds_.empty())
            return VectorFieldSpec::zero();
        if (winds_.size() == 1)
            return winds_.front();
        return VectorFieldSpec::sum(winds_);
    }

    TangentVector wind_at(const SurfacePoint &p) const
    {
        TangentVector w;
        for (const auto &f : winds_)
            w = w + f(p);
        return w;
    }

    NavigationPoint at(const SurfacePoint &p) const { return {riemann_eval(surface_, p), wind_at(p)}; }

    /// lambda = 1 - |W_total|_h^2.
    double lambda(const SurfacePoint &p) const { return at(p).lambda(); }

    bool convex_at(const SurfacePoint &p) const { return lambda(p) > 0.0; }

    /// Randers metric of the whole chain, built directly from the summed wind.
    RandersPoint randers(const SurfacePoint &p) const
    {
        const NavigationPoint nav = at(p);
        return zermelo_to_randers(nav.h, nav.wind);
    }

    /// Same metric built step by step: Zermelo for the first wind, then one beta-change per
    /// further wind. Throws NonConvexError at the first step whose bound fails.
    RandersPoint chained_randers(const SurfacePoint &p) const
    {
        const MetricMatrix h = riemann_eval(surface_, p);
        if (winds_.empty())
            return {h, {}};
        RandersPoint F = zermelo_to_randers(h, winds_.front()(p));
        for (std::size_t i = 1; i < winds_.size(); ++i)
            F = beta_change(F, winds_[i](p)).metric;
        return F;
    }

    RandersMetricData randers_metric() const
    {
        auto self = *this;
        return RandersMetricData([self](const SurfacePoint &p) { return self.randers(p).a; },
                                 [self](const SurfacePoint &p) { return self.randers(p).b; });
    }

  private:
    Surface surface_;
    std::vector<VectorFieldSpec> winds_;
};

/// Co-metric of the navigation data: K(x, p) = |p|_{h*} + W^i p_i.
inline double hamiltonian_eval(const NavigationData &nav, const SurfacePoint &x, Covector cov)
{
    nav.surface().require_chart(x.r(), "hamiltonian_eval");
    const double m = nav.surface().m(x.r());
    const TangentVector w = nav.wind_at(x);
    return std::sqrt(cov.r * cov.r + cov.theta * cov.theta / (m * m)) + cov(w);
}

} // namespace rsphere
