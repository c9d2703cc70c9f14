#include "rsphere/fields.hpp"
#include "rsphere/lemmas.hpp"

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

const Surface &twisted()
{
    static const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    return s;
}

} // namespace

TEST(Catalog, IdsRoundTrip)
{
    for (const char *id : {"zero", "rotation:0.25", "radial:ratio", "radial:sin:-0.5", "radial:const:0.3",
                           "sum:[radial:ratio,rotation:-0.3]", "sum:[rotation:0.1,sum:[radial:sin:0.2,zero]]"})
        EXPECT_EQ(VectorFieldSpec::from_id(id).id(), id);
    EXPECT_THROW(VectorFieldSpec::from_id("rotation:x"), DomainError);
    EXPECT_THROW(VectorFieldSpec::from_id("spiral"), DomainError);
    EXPECT_THROW(VectorFieldSpec::from_id("sum:[rotation:1"), DomainError);
}

TEST(Catalog, RotationRate)
{
    EXPECT_EQ(VectorFieldSpec::rotation(0.3).rotation_rate(), 0.3);
    const auto both = VectorFieldSpec::sum({VectorFieldSpec::rotation(0.1), VectorFieldSpec::rotation(0.2)});
    ASSERT_TRUE(both.rotation_rate());
    EXPECT_NEAR(*both.rotation_rate(), 0.3, 1e-15);
    EXPECT_FALSE(VectorFieldSpec::radial_ratio().rotation_rate());
}

TEST(Flow, RotationExample)
{
    const SurfacePoint p = flow_advance(FlowMap{VectorFieldSpec::rotation(0.3)}, {1.0, 0.0}, 2.0);
    EXPECT_NEAR(p.r(), 1.0, 1e-15);
    EXPECT_NEAR(p.theta(), 0.6, 1e-14);
}

TEST(Flow, ZeroTimeIsIdentity)
{
    for (const auto &w : {VectorFieldSpec::radial_ratio(), VectorFieldSpec::rotation(0.7)})
    {
        const SurfacePoint p = flow_advance(FlowMap{w}, {1.2, 0.4}, 0.0);
        EXPECT_DOUBLE_EQ(p.r(), 1.2);
        EXPECT_DOUBLE_EQ(p.theta(), 0.4);
    }
}

TEST(Flow, RadialMatchesFineScalarIntegration)
{
    // oracle: explicit midpoint on r' = r / sqrt(r^2 + 1) at step 1e-6
    double r = 1.0;
    const double h = 1e-6;
    auto A = [](double x) { return x / std::sqrt(x * x + 1.0); };
    for (int i = 0; i < 500000; ++i)
        r += h * A(r + 0.5 * h * A(r));
    const SurfacePoint p = flow_advance(FlowMap{VectorFieldSpec::radial_ratio()}, {1.0, 0.0}, 0.5);
    EXPECT_NEAR(p.r(), r, 1e-10);
    EXPECT_DOUBLE_EQ(p.theta(), 0.0);
}

TEST(Flow, PoleCrossing)
{
    EXPECT_THROW(flow_advance(FlowMap{VectorFieldSpec::radial_const(0.5)}, {3.0, 0.0}, 1.0), PoleCrossingError);
}

TEST(Killing, RotationsAreKilling)
{
    for (const Surface *s : {&round_sphere(), &twisted()})
        for (double r : {0.3, 1.0, 2.2})
            EXPECT_LT(killing_defect(*s, VectorFieldSpec::rotation(0.4), {r, 1.0}), 1e-12);
}

TEST(Killing, NonKillingFields)
{
    const auto shear = VectorFieldSpec::custom([](double, double) { return 0.0; }, [](double r, double) { return r; });
    EXPECT_GT(killing_defect(round_sphere(), shear, {1.0, 0.0}), 1e-3);
    EXPECT_GT(killing_defect(round_sphere(), VectorFieldSpec::radial_const(0.3), {1.0, 0.0}), 1e-3);
    EXPECT_GT(max_killing_defect(twisted(), VectorFieldSpec::radial_ratio()), 1e-3);
}

TEST(Poisson, RotationCommutesWithRoundCometric)
{
    const NavigationData nav(round_sphere());
    for (double a : {0.2, 1.3, 2.9})
        EXPECT_LT(poisson_defect(nav, VectorFieldSpec::rotation(0.3), {1.1, 0.5}, {std::cos(a), std::sin(a)}), 1e-6);
}

TEST(Poisson, RadialDoesNotCommute)
{
    const NavigationData nav(round_sphere());
    EXPECT_GT(poisson_defect(nav, VectorFieldSpec::radial_const(0.3), {1.1, 0.5}, {0.3, 0.8}), 1e-3);
}

TEST(Poisson, ThresholdIsScaleInvariant)
{
    const NavigationData nav(twisted(), {VectorFieldSpec::rotation(0.2)});
    for (const auto &w : {VectorFieldSpec::rotation(0.1), VectorFieldSpec::radial_ratio()})
    {
        const Covector c{0.6, -0.4};
        const bool small = poisson_defect(nav, w, {1.0, 0.0}, c) < 1e-5;
        const bool small2 = poisson_defect(nav, w, {1.0, 0.0}, 2.0 * c) < 1e-5;
        EXPECT_EQ(small, small2) << w.id();
    }
}

TEST(Poisson, AgreesWithKillingOnCatalog)
{
    Sampler rng(19);
    const Check c = suite_killing_bridge(rng, 30, 20);
    EXPECT_TRUE(c.pass) << c.value;
}

TEST(OneForm, RadialWind)
{
    const auto A = [](double r) { return r / std::sqrt(r * r + 1.0); };
    for (double r : {0.4, 1.2})
    {
        const OneFormJet j = one_form_from_navigation(twisted(), VectorFieldSpec::radial_ratio(), {r, 0.3});
        EXPECT_NEAR(j.wr, -A(r) / (1.0 - A(r) * A(r)), 1e-14);
        EXPECT_NEAR(j.wth, 0.0, 1e-15);
    }
    const OneFormJet z = one_form_from_navigation(twisted(), VectorFieldSpec::zero(), {1.0, 0.0});
    EXPECT_DOUBLE_EQ(z.wr, 0.0);
    EXPECT_DOUBLE_EQ(z.wth, 0.0);
}

TEST(OneForm, RotationOnRoundSphere)
{
    const double mu = 0.4;
    const double r = 1.0;
    const double m2 = std::sin(r) * std::sin(r);
    const OneFormJet j = one_form_from_navigation(round_sphere(), VectorFieldSpec::rotation(mu), {r, 0.0});
    EXPECT_NEAR(j.wth, -mu * m2 / (1.0 - mu * mu * m2), 1e-14);
    EXPECT_NEAR(j.wr, 0.0, 1e-15);
}

TEST(OneForm, NonConvexWind)
{
    EXPECT_THROW(one_form_from_navigation(round_sphere(), VectorFieldSpec::radial_const(1.2), {1.0, 0.0}),
                 NonConvexError);
}

TEST(Closedness, Examples)
{
    EXPECT_LT(closedness_defect(navigation_one_form(twisted(), VectorFieldSpec::radial_ratio()), {1.0, 0.7}), 1e-10);
    const OneForm dtheta = OneForm::from_components([](double, double) { return 0.0; },
                                                    [](double, double) { return 2.5; });
    EXPECT_LT(closedness_defect(dtheta, {1.0, 0.0}), 1e-10);

    // d/dr of -mu m^2 / (1 - mu^2 m^2) at r = 1 on the round sphere
    const double mu = 0.4;
    const double m = std::sin(1.0);
    const double dm2 = 2 * m * std::cos(1.0);
    const double q = 1.0 - mu * mu * m * m;
    const double expect = std::abs(-mu * dm2 / (q * q));
    const double got = closedness_defect(navigation_one_form(round_sphere(), VectorFieldSpec::rotation(mu)), {1.0, 0.0});
    EXPECT_NEAR(got, expect, 1e-9);
    EXPECT_GT(got, 0.1);
}

TEST(ClosednessResidual, ResidualExamples)
{
    EXPECT_LT(std::abs(closedness_residual(twisted(), VectorFieldSpec::radial_ratio(), {1.0, 0.0})), 1e-10);
    EXPECT_LT(std::abs(closedness_residual(twisted(), VectorFieldSpec::zero(), {1.0, 0.0})), 1e-10);
    for (double r : {0.5, 1.0, kPi / 2, 2.0})
    {
        const auto w = VectorFieldSpec::rotation(0.4);
        const double d = closedness_defect(navigation_one_form(round_sphere(), w), {r, 0.0});
        const double res = std::abs(closedness_residual(round_sphere(), w, {r, 0.0}));
        EXPECT_EQ(d > 1e-8, res > 1e-8) << "r = " << r;
    }
}

TEST(ClosednessResidual, EquivalenceOnRandomData)
{
    Sampler rng(23);
    const Check c = suite_closedness(rng, 200, 1e-8);
    EXPECT_TRUE(c.pass) << c.note;
}
