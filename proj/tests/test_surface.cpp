#include "rsphere/surface.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rsphere;

TEST(Profile, RoundSphereIsIdentity)
{
    const Surface s(make_profile(ProfileFamily::RoundSphere));
    for (double r : {0.1, 0.7, 1.5, 2.9})
    {
        EXPECT_DOUBLE_EQ(s.profile().h(r), r);
        EXPECT_NEAR(s.m(r), std::sin(r), 1e-15);
    }
    EXPECT_NEAR(s.a(), 1.0, 1e-12);
}

TEST(Profile, TwistedSineFixesEquator)
{
    const ProfileSpec p = make_profile(ProfileFamily::TwistedSine, 0.25);
    EXPECT_NEAR(p.h(kPi / 2), kPi / 2, 1e-15);
}

TEST(Profile, ArcsinRatioWarpScale)
{
    const Surface s(make_profile(ProfileFamily::ArcsinRatio, 1.0));
    const double h = 1e-5;
    const double dh0 = (s.profile().h(h) - s.profile().h(-h)) / (2 * h);
    EXPECT_NEAR(s.profile().dh(0.0), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(dh0, s.profile().dh(0.0), 1e-9);
    EXPECT_NEAR(s.a(), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.m(kPi / 4), std::sqrt(2.0) * (std::sqrt(2.0) / 2) / std::sqrt(1.5), 1e-12);
    // m'(0) = 1 is what makes the metric smooth at the pole
    EXPECT_NEAR(s.dm(1e-6), 1.0, 1e-9);
}

TEST(Profile, ArcsinRatioBeyondEquatorIsSmooth)
{
    const ProfileSpec p = make_profile(ProfileFamily::ArcsinRatio, 1.0);
    for (double r : {1.8, 2.4, 3.0})
        EXPECT_NEAR(p.h(r), kPi - p.h(kPi - r), 1e-14);
    const double eps = 1e-4;
    EXPECT_NEAR((p.h(kPi / 2 + eps) - p.h(kPi / 2 - eps)) / (2 * eps), p.dh(kPi / 2), 1e-7);
}

TEST(Profile, RejectsBadParameters)
{
    EXPECT_THROW(make_profile(ProfileFamily::TwistedSine, 0.5), DomainError);
    EXPECT_THROW(make_profile(ProfileFamily::TwistedSine, 0.0), DomainError);
    EXPECT_THROW(make_profile(ProfileFamily::ArcsinRatio, -0.1), DomainError);
    EXPECT_THROW(family_from_id("torus"), DomainError);
}

TEST(Profile, FamilyIdsRoundTrip)
{
    for (auto f : {ProfileFamily::RoundSphere, ProfileFamily::TwistedSine, ProfileFamily::ArcsinRatio,
                   ProfileFamily::Custom})
        EXPECT_EQ(family_from_id(family_id(f)), f);
}

TEST(Conditions, TwistedSineHoldsAll)
{
    const ConditionReport r = check_profile_conditions(make_profile(ProfileFamily::TwistedSine, 0.25), 512);
    EXPECT_TRUE(r.c1.holds);
    EXPECT_TRUE(r.c2.holds);
    EXPECT_TRUE(r.c3.holds);
}

TEST(Conditions, RoundSphereFailsStrictConvexity)
{
    const ConditionReport r = check_profile_conditions(make_profile(ProfileFamily::RoundSphere), 512);
    EXPECT_TRUE(r.c1.holds);
    EXPECT_TRUE(r.c2.holds);
    EXPECT_FALSE(r.c3.holds);
}

TEST(Conditions, ArcsinRatioHoldsAll)
{
    const ConditionReport r = check_profile_conditions(make_profile(ProfileFamily::ArcsinRatio, 1.0), 512);
    EXPECT_TRUE(r.all());
}

TEST(Conditions, AsymmetricCustomProfileFailsSymmetry)
{
    const ProfileSpec p = make_custom_profile([](double r) { return r + 0.1 * r * r * (kPi - r) / kPi; },
                                              [](double r) { return 1.0 + 0.1 * (2 * r * kPi - 3 * r * r) / kPi; },
                                              [](double r) { return 0.1 * (2 * kPi - 6 * r) / kPi; });
    EXPECT_FALSE(check_profile_conditions(p, 256).c1.holds);
}

TEST(Curvature, RoundSphereIsOne)
{
    const Surface s(make_profile(ProfileFamily::RoundSphere));
    EXPECT_NEAR(gauss_curvature(s, 1.0), 1.0, 1e-12);
}

TEST(Curvature, EquatorValues)
{
    const ProfileSpec ts = make_profile(ProfileFamily::TwistedSine, 0.25);
    const ProfileSpec ar = make_profile(ProfileFamily::ArcsinRatio, 1.0);
    EXPECT_NEAR(gauss_curvature(Surface(ts), kPi / 2), 2.25, 1e-10);
    EXPECT_NEAR(closed_form_curvature(ts, kPi / 2), 2.25, 1e-12);
    EXPECT_NEAR(gauss_curvature(Surface(ar), kPi / 2), 2.0, 1e-10);
    EXPECT_NEAR(closed_form_curvature(ar, kPi / 2), 2.0, 1e-12);
}

TEST(Curvature, ClosedFormMatchesOnGrid)
{
    for (const ProfileSpec &p :
         {make_profile(ProfileFamily::TwistedSine, 0.25), make_profile(ProfileFamily::ArcsinRatio, 1.0),
          make_profile(ProfileFamily::TwistedSine, 0.1), make_profile(ProfileFamily::ArcsinRatio, 3.0)})
    {
        const Surface s(p);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i)
        {
            const double r = kPi * (i + 0.5) / 1000;
            worst = std::max(worst, std::abs(gauss_curvature(s, r) - closed_form_curvature(p, r)));
        }
        EXPECT_LT(worst, 1e-8) << p.name;
    }
    const ProfileSpec ts = make_profile(ProfileFamily::TwistedSine, 0.25);
    EXPECT_NEAR(gauss_curvature(Surface(ts), kPi / 4), closed_form_curvature(ts, kPi / 4), 1e-8);
}

TEST(Curvature, TwistedSineIsNotMonotone)
{
    // negative near the poles, rising to its maximum 9/4 on the equator and falling back
    const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    double peak_r = 0.0;
    double peak = -1e9;
    for (int i = 1; i < 400; ++i)
    {
        const double r = kPi * i / 400;
        if (gauss_curvature(s, r) > peak)
        {
            peak = gauss_curvature(s, r);
            peak_r = r;
        }
    }
    EXPECT_NEAR(peak_r, kPi / 2, 1e-9);
    EXPECT_LT(gauss_curvature(s, 0.05), 0.0);
    EXPECT_LT(gauss_curvature(s, kPi - 0.05), 0.0);
    EXPECT_NEAR(gauss_curvature(s, 0.7), gauss_curvature(s, kPi - 0.7), 1e-10);
}

TEST(Curvature, CustomProfileHasNoClosedForm)
{
    const ProfileSpec p = make_custom_profile([](double r) { return 2 * r; }, [](double) { return 2.0; },
                                              [](double) { return 0.0; });
    EXPECT_THROW(closed_form_curvature(p, 0.5), UnsupportedFamilyError);
    // h = 2r gives m = sin(2r)/2, curvature 4 on (0, pi/2)
    const Surface s(p);
    EXPECT_NEAR(s.m(0.3), std::sin(0.6) / 2, 1e-14);
    EXPECT_NEAR(gauss_curvature(s, 0.3), 4.0, 1e-10);
}

TEST(Surface, PoleGuard)
{
    const Surface s(make_profile(ProfileFamily::RoundSphere));
    EXPECT_TRUE(s.in_chart(1.0));
    EXPECT_FALSE(s.in_chart(1e-7));
    EXPECT_FALSE(s.in_chart(kPi - 1e-7));
    EXPECT_THROW(gauss_curvature(s, 1e-8), DomainError);
}

TEST(Surface, InverseWarp)
{
    const Surface s(make_profile(ProfileFamily::TwistedSine, 0.25));
    for (double r : {0.2, 0.9, 1.4})
        EXPECT_NEAR(inverse_warp(s, s.m(r)), r, 1e-10);
    EXPECT_THROW(inverse_warp(s, 2.0 * s.equator_radius()), DomainError);
}
