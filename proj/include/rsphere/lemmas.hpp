#pragma once

// Seeded property suites over random admissible data. Each suite returns one Check with the
// worst measured value, its tolerance and the trial count; the CLI's verify-lemmas experiment
// and the acceptance runner share them.

#include "rsphere/fields.hpp"
#include "rsphere/metrics.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/vector_field.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rsphere
{

struct Check
{
    std::string name;
    bool pass = false;
    double value = 0.0;      // worst measured quantity (or mismatch count)
    double tolerance = 0.0;
    int trials = 0;
    std::string note;
};

class Sampler
{
  public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

    /// One of the three built-in surfaces with the parameters used throughout.
    Surface surface()
    {
        switch (index(3))
        {
        case 0:
            return Surface(make_profile(ProfileFamily::RoundSphere));
        case 1:
            return Surface(make_profile(ProfileFamily::TwistedSine, 0.25));
        default:
            return Surface(make_profile(ProfileFamily::ArcsinRatio, 1.0));
        }
    }

    SurfacePoint point(double margin = 0.1) { return {uniform(margin, kPi - margin), uniform(0.0, kTwoPi)}; }

    /// Tangent vector at radius r with h-norm `norm` in a uniform random direction.
    TangentVector vector_with_norm(const Surface &s, double r, double norm)
    {
        const double a = uniform(0.0, kTwoPi);
        return {norm * std::cos(a), norm * std::sin(a) / s.m(r)};
    }

    /// Random catalog wind with |W|_h < 1 everywhere on the sampled surfaces.
    VectorFieldSpec wind()
    {
        switch (index(5))
        {
        case 0:
            return VectorFieldSpec::radial_ratio();
        case 1:
            return VectorFieldSpec::radial_sin(uniform(-0.8, 0.8));
        case 2:
            return VectorFieldSpec::radial_const(uniform(-0.8, 0.8));
        case 3:
            return VectorFieldSpec::rotation(uniform(-0.4, 0.4));
        default:
            return VectorFieldSpec::sum({VectorFieldSpec::radial_sin(uniform(-0.5, 0.5)),
                                         VectorFieldSpec::rotation(uniform(-0.25, 0.25))});
        }
    }

    std::mt19937_64 &engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

namespace detail
{

inline double metric_gap(const MetricMatrix &a, const MetricMatrix &b)
{
    return std::max({std::abs(a.rr - b.rr), std::abs(a.rth - b.rth), std::abs(a.thth - b.thth)});
}

} // namespace detail

/// zermelo_to_randers followed by randers_to_zermelo recovers (h, V).
inline Check suite_roundtrip(Sampler &rng, int n = 100, double tol = 1e-10)
{
    Check c{"zermelo-randers round trip", false, 0.0, tol, n, "max component error"};
    for (int i = 0; i < n; ++i)
    {
        const Surface s = rng.surface();
        const SurfacePoint p = rng.point();
        const MetricMatrix h = riemann_eval(s, p);
        const TangentVector v = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.95));
        const RandersPoint F = zermelo_to_randers(h, v);
        const NavigationPoint back = randers_to_zermelo(F);
        const double err = std::max({detail::metric_gap(h, back.h), std::abs(back.wind.r - v.r),
                                     std::abs(back.wind.theta - v.theta), std::abs(F.epsilon() - (1.0 - h(v, v)))});
        c.value = std::max(c.value, err);
    }
    c.pass = c.value < tol;
    return c;
}

/// [F(-W) < 1] agrees with [|V + W|_h < 1] for F the solution of Zermelo's problem for (h, V).
inline Check suite_convexity(Sampler &rng, int n = 1000)
{
    Check c{"convexity equivalence", false, 0.0, 0.0, n, "number of disagreeing trials"};
    int agree = 0;
    for (int i = 0; i < n; ++i)
    {
        const Surface s = rng.surface();
        const SurfacePoint p = rng.point();
        const MetricMatrix h = riemann_eval(s, p);
        const TangentVector v = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.95));
        const TangentVector w = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 2.0));
        const RandersPoint F = zermelo_to_randers(h, v);
        const bool lhs = F(-w) < 1.0;
        const bool rhs = h.norm(v + w) < 1.0;
        agree += lhs == rhs;
    }
    c.value = n - agree;
    c.pass = agree == n;
    return c;
}

/// sigma = epsilon * eta with sigma = 1 - |V + W|_h^2.
inline Check suite_sigma(Sampler &rng, int n = 200, double tol = 1e-12)
{
    Check c{"sigma = epsilon eta", false, 0.0, tol, n, "max |sigma - epsilon eta|"};
    int done = 0;
    while (done < n)
    {
        const Surface s = rng.surface();
        const SurfacePoint p = rng.point();
        const MetricMatrix h = riemann_eval(s, p);
        const TangentVector v = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.9));
        const TangentVector w = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.9));
        const double vw = h.norm(v + w);
        if (!(vw < 0.99))
            continue;
        const RandersPoint F = zermelo_to_randers(h, v);
        const BetaChangeResult bc = beta_change(F, w);
        const double sigma = 1.0 - vw * vw;
        c.value = std::max(c.value, std::abs(sigma - F.epsilon() * bc.eta));
        ++done;
    }
    c.pass = c.value < tol;
    return c;
}

/// [d beta = 0] agrees with [dW# = dlog(lambda) ^ W#] at random points for random catalog winds.
/// Both quantities are thresholded at `tol`.
inline Check suite_closedness(Sampler &rng, int n = 200, double tol = 1e-8)
{
    Check c{"closedness equivalence", false, 0.0, tol, n, "number of disagreeing trials"};
    int agree = 0;
    int closed = 0;
    for (int i = 0; i < n; ++i)
    {
        const Surface s = rng.surface();
        const VectorFieldSpec w = rng.wind();
        const SurfacePoint p = rng.point(0.2);
        const double d_beta = closedness_defect(navigation_one_form(s, w), p);
        const double res = std::abs(closedness_residual(s, w, p));
        const bool a = d_beta < tol;
        agree += a == (res < tol);
        closed += a;
    }
    c.value = n - agree;
    c.pass = agree == n;
    c.note = "disagreeing trials; closed cases " + std::to_string(closed) + "/" + std::to_string(n);
    return c;
}

/// A chain of beta-changes equals the single Zermelo solution for the summed wind.
inline Check suite_chain(Sampler &rng, int n = 100, double tol = 1e-10)
{
    Check c{"chained winds equal summed wind", false, 0.0, tol, n, "max component gap"};
    int done = 0;
    while (done < n)
    {
        const Surface s = rng.surface();
        const SurfacePoint p = rng.point();
        const MetricMatrix h = riemann_eval(s, p);
        const TangentVector v = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.5));
        const TangentVector w1 = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.4));
        const TangentVector w2 = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.4));
        if (!(h.norm(v + w1) < 0.99 && h.norm(v + w1 + w2) < 0.99))
            continue;
        const RandersPoint chained = beta_change(beta_change(zermelo_to_randers(h, v), w1).metric, w2).metric;
        const RandersPoint direct = zermelo_to_randers(h, v + w1 + w2);
        const double gap = std::max({detail::metric_gap(chained.a, direct.a), std::abs(chained.b.r - direct.b.r),
                                     std::abs(chained.b.theta - direct.b.theta)});
        c.value = std::max(c.value, gap);
        ++done;
    }
    c.pass = c.value < tol;
    return c;
}

/// The translated indicatrix: F~(u + W) = 1 whenever F(u) = 1.
inline Check suite_indicatrix(Sampler &rng, int n = 20, int directions = 64, double tol = 1e-12)
{
    Check c{"indicatrix translation", false, 0.0, tol, n * directions, "max |F~(u + W) - 1|"};
    int done = 0;
    while (done < n)
    {
        const Surface s = rng.surface();
        const SurfacePoint p = rng.point();
        const MetricMatrix h = riemann_eval(s, p);
        const TangentVector v = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.6));
        const TangentVector w = rng.vector_with_norm(s, p.r(), rng.uniform(0.0, 0.3));
        if (!(h.norm(v + w) < 0.95))
            continue;
        const RandersPoint F = zermelo_to_randers(h, v);
        const RandersPoint Ft = beta_change(F, w).metric;
        for (int k = 0; k < directions; ++k)
        {
            const double a = kTwoPi * k / directions;
            TangentVector y{std::cos(a), std::sin(a) / s.m(p.r())};
            y = (1.0 / F(y)) * y;
            c.value = std::max(c.value, std::abs(Ft(y + w) - 1.0));
        }
        ++done;
    }
    c.pass = c.value < tol;
    return c;
}

/// For catalog fields, [Poisson defect < 1e-5 at sampled (p, cov)] agrees with
/// [Killing defect < 1e-10 at those p].
inline Check suite_killing_bridge(Sampler &rng, int n_fields = 20, int n_points = 20)
{
    Check c{"Killing / Poisson agreement", false, 0.0, 0.0, n_fields, "number of disagreeing fields"};
    int agree = 0;
    for (int i = 0; i < n_fields; ++i)
    {
        const Surface s = rng.surface();
        const VectorFieldSpec w = rng.wind();
        const NavigationData nav(s);
        bool poisson_ok = true;
        bool killing_ok = true;
        for (int k = 0; k < n_points; ++k)
        {
            const SurfacePoint p = rng.point(0.2);
            const double a = rng.uniform(0.0, kTwoPi);
            const Covector cov{std::cos(a), s.m(p.r()) * std::sin(a)};
            poisson_ok = poisson_ok && poisson_defect(nav, w, p, cov) < 1e-5;
            killing_ok = killing_ok && killing_defect(s, w, p) < 1e-10;
        }
        agree += poisson_ok == killing_ok;
    }
    c.value = n_fields - agree;
    c.pass = agree == n_fields;
    return c;
}

inline std::vector<Check> verify_lemmas(std::uint64_t seed)
{
    Sampler rng(seed);
    std::vector<Check> out;
    out.push_back(suite_roundtrip(rng));
    out.push_back(suite_convexity(rng));
    out.push_back(suite_sigma(rng));
    out.push_back(suite_closedness(rng));
    out.push_back(suite_chain(rng));
    out.push_back(suite_indicatrix(rng));
    out.push_back(suite_killing_bridge(rng));
    return out;
}

} // namespace rsphere
