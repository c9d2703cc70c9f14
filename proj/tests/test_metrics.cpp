#include "rsphere/lemmas.hpp"
#include "rsphere/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rsphere;

namespace
{

const Surface &round_sphere()
{
    static const Surface s(make_profile(ProfileFamily::RoundSphere));
    return s;
}

} // namespace

TEST(RiemannEval, RoundSphere)
{
    const MetricMatrix e = riemann_eval(round_sphere(), {kPi / 2, 0.0});
    EXPECT_NEAR(e.rr, 1.0, 1e-15);
    EXPECT_NEAR(e.rth, 0.0, 1e-15);
    EXPECT_NEAR(e.thth, 1.0, 1e-15);
    EXPECT_NEAR(riemann_eval(round_sphere(), {kPi / 6, 0.0}).thth, 0.25, 1e-15);
}

TEST(RiemannEval, TwistedSine)
{
    const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    const double m = std::sin(kPi / 3 - 0.25 * std::sin(2 * kPi / 3)) / (1.0 - 0.5);
    const MetricMatrix e = riemann_eval(s, {kPi / 3, 1.0});
    EXPECT_NEAR(e.rr, 1.0, 1e-15);
    EXPECT_NEAR(e.thth, m * m, 1e-13);
    EXPECT_THROW(riemann_eval(s, {0.0, 0.0}), DomainError);
}

TEST(ZermeloToRanders, ZeroWind)
{
    const MetricMatrix h = riemann_eval(round_sphere(), {1.0, 0.0});
    const RandersPoint F = zermelo_to_randers(h, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(F.a.rr, h.rr);
    EXPECT_DOUBLE_EQ(F.a.thth, h.thth);
    EXPECT_DOUBLE_EQ(F.b.r, 0.0);
    EXPECT_DOUBLE_EQ(F.b.theta, 0.0);
}

TEST(ZermeloToRanders, EquatorRotation)
{
    const RandersPoint F =
        zermelo_to_randers(round_sphere(), VectorFieldSpec::rotation(0.5), SurfacePoint{kPi / 2, 0.0});
    EXPECT_NEAR(F.b.theta, -2.0 / 3.0, 1e-14);
    EXPECT_NEAR(F.b.r, 0.0, 1e-15);
    EXPECT_NEAR(F.a.thth, 16.0 / 9.0, 1e-14);
    EXPECT_NEAR(F.a.rr, 1.0 / 0.75, 1e-14);
    EXPECT_NEAR(F.epsilon(), 0.75, 1e-14);

    const NavigationPoint back = randers_to_zermelo(F);
    EXPECT_NEAR(back.h.rr, 1.0, 1e-12);
    EXPECT_NEAR(back.h.rth, 0.0, 1e-12);
    EXPECT_NEAR(back.h.thth, 1.0, 1e-12);
    EXPECT_NEAR(back.wind.r, 0.0, 1e-12);
    EXPECT_NEAR(back.wind.theta, 0.5, 1e-12);
    EXPECT_NEAR(back.lambda(), F.epsilon(), 1e-12);
}

TEST(ZermeloToRanders, NonConvexWind)
{
    const MetricMatrix h = riemann_eval(round_sphere(), {kPi / 2, 0.0});
    EXPECT_THROW(zermelo_to_randers(h, {0.0, 1.0}), NonConvexError);
    EXPECT_THROW(zermelo_to_randers(h, {0.8, 0.8}), NonConvexError);
    EXPECT_THROW(randers_to_zermelo(MetricMatrix{}, Covector{1.0, 0.0}), NonConvexError);
}

TEST(RandersToZermelo, ZeroOneForm)
{
    const MetricMatrix a{2.0, 0.3, 1.5};
    const NavigationPoint n = randers_to_zermelo(a, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(n.h.rr, a.rr);
    EXPECT_DOUBLE_EQ(n.h.rth, a.rth);
    EXPECT_DOUBLE_EQ(n.h.thth, a.thth);
    EXPECT_DOUBLE_EQ(n.wind.r, 0.0);
    EXPECT_DOUBLE_EQ(n.wind.theta, 0.0);
}

TEST(RandersToZermelo, RoundTripRandom)
{
    Sampler rng(7);
    const Check c = suite_roundtrip(rng, 100, 1e-10);
    EXPECT_TRUE(c.pass) << c.value;
}

TEST(RandersNorm, EuclideanAndOddBeta)
{
    EXPECT_DOUBLE_EQ(randers_norm(MetricMatrix{}, {0.0, 0.0}, {3.0, 4.0}), 5.0);
    const MetricMatrix a{1.3, 0.2, 0.9};
    const Covector b{0.3, -0.2};
    const TangentVector y{0.7, -1.1};
    EXPECT_NEAR(randers_norm(a, b, y) + randers_norm(a, b, -y), 2 * a.norm(y), 1e-14);
}

TEST(RandersNorm, ConvexityEquivalence)
{
    Sampler rng(11);
    const Check c = suite_convexity(rng, 1000);
    EXPECT_TRUE(c.pass) << c.value << " disagreements";
}

TEST(BetaChange, ZeroWindIsIdentity)
{
    const RandersPoint F = zermelo_to_randers(round_sphere(), VectorFieldSpec::rotation(0.3), SurfacePoint{1.0, 0.0});
    const BetaChangeResult bc = beta_change(F, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(bc.eta, 1.0);
    EXPECT_NEAR(bc.metric.a.rr, F.a.rr, 1e-15);
    EXPECT_NEAR(bc.metric.a.rth, F.a.rth, 1e-15);
    EXPECT_NEAR(bc.metric.a.thth, F.a.thth, 1e-15);
    EXPECT_NEAR(bc.metric.b.r, F.b.r, 1e-15);
    EXPECT_NEAR(bc.metric.b.theta, F.b.theta, 1e-15);
}

TEST(BetaChange, MatchesSummedNavigation)
{
    const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    const SurfacePoint p{1.1, 0.4};
    const MetricMatrix h = riemann_eval(s, p);
    const TangentVector v{0.2, 0.15};
    const TangentVector w{-0.3, 0.1};
    const RandersPoint chained = beta_change(zermelo_to_randers(h, v), w).metric;
    const RandersPoint direct = zermelo_to_randers(h, v + w);
    EXPECT_NEAR(chained.a.rr, direct.a.rr, 1e-10);
    EXPECT_NEAR(chained.a.rth, direct.a.rth, 1e-10);
    EXPECT_NEAR(chained.a.thth, direct.a.thth, 1e-10);
    EXPECT_NEAR(chained.b.r, direct.b.r, 1e-10);
    EXPECT_NEAR(chained.b.theta, direct.b.theta, 1e-10);
}

TEST(BetaChange, SigmaEqualsEpsilonEta)
{
    Sampler rng(3);
    const Check c = suite_sigma(rng, 200, 1e-12);
    EXPECT_TRUE(c.pass) << c.value;
}

TEST(BetaChange, RejectsNonConvexTranslation)
{
    const MetricMatrix h = riemann_eval(round_sphere(), {kPi / 2, 0.0});
    const RandersPoint F = zermelo_to_randers(h, {0.0, 0.5});
    EXPECT_THROW(beta_change(F, {0.0, 0.6}), NonConvexError);
}

TEST(BetaChange, IndicatrixIsTranslated)
{
    Sampler rng(5);
    const Check c = suite_indicatrix(rng, 20, 64, 1e-12);
    EXPECT_TRUE(c.pass) << c.value;
}

TEST(Navigation, ChainedRandersEqualsSummedWind)
{
    const Surface s(make_profile(ProfileFamily::ArcsinRatio, 1.0));
    const NavigationData nav(
        s, {VectorFieldSpec::rotation(0.1), VectorFieldSpec::rotation(0.2), VectorFieldSpec::radial_ratio()});
    for (const SurfacePoint p : {SurfacePoint{0.5, 0.0}, SurfacePoint{1.3, 2.0}, SurfacePoint{2.6, 5.0}})
    {
        const RandersPoint a = nav.chained_randers(p);
        const RandersPoint b = nav.randers(p);
        EXPECT_NEAR(a.a.rr, b.a.rr, 1e-10);
        EXPECT_NEAR(a.a.thth, b.a.thth, 1e-10);
        EXPECT_NEAR(a.b.r, b.b.r, 1e-10);
        EXPECT_NEAR(a.b.theta, b.b.theta, 1e-10);
    }
}

TEST(Hamiltonian, Examples)
{
    const NavigationData still(round_sphere());
    EXPECT_NEAR(hamiltonian_eval(still, {1.0, 0.0}, {1.0, 0.0}), 1.0, 1e-15);
    const NavigationData windy(round_sphere(), {VectorFieldSpec::rotation(0.5)});
    EXPECT_NEAR(hamiltonian_eval(windy, {kPi / 2, 0.0}, {0.0, 1.0}), 1.5, 1e-14);
    const Covector c{0.3, -0.8};
    EXPECT_NEAR(hamiltonian_eval(windy, {1.0, 0.2}, 2.5 * c), 2.5 * hamiltonian_eval(windy, {1.0, 0.2}, c), 1e-14);
}

TEST(Hamiltonian, DualOfRandersNorm)
{
    // K(p) = sup_{F(y) = 1} p(y)
    const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    const NavigationData nav(s, {VectorFieldSpec::sum({VectorFieldSpec::radial_ratio(), VectorFieldSpec::rotation(-0.3)})});
    const SurfacePoint x{1.0, 0.0};
    const RandersPoint F = nav.randers(x);
    const Covector p{0.4, 0.9};
    double best = -1e9;
    for (int k = 0; k < 20000; ++k)
    {
        const double a = kTwoPi * k / 20000;
        TangentVector y{std::cos(a), std::sin(a)};
        y = (1.0 / F(y)) * y;
        best = std::max(best, p(y));
    }
    EXPECT_NEAR(hamiltonian_eval(nav, x, p), best, 1e-6);
}
