#include "rsphere/cutlocus.hpp"
#include "support/distance_oracle.hpp"

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

const CutLocusResult &twisted_cut()
{
    static const CutLocusResult res = riemann_cut_locus(twisted(), {kPi / 3, 0.0});
    return res;
}

std::vector<VectorFieldSpec> paper_chain()
{
    return {VectorFieldSpec::rotation(0.1), VectorFieldSpec::rotation(0.2),
            VectorFieldSpec::sum({VectorFieldSpec::radial_ratio(), VectorFieldSpec::rotation(-0.3)})};
}

double distance_to_set(const Surface &s, const CutLocusResult &res, const SurfacePoint &x)
{
    double best = 1e300;
    for (const auto &c : res.cut_points)
        best = std::min(best, chart_distance(s, x.r(), x.theta(), c.point.r(), c.point.theta()));
    return best;
}

} // namespace

TEST(HalfPeriod, RoundSphereIsPi)
{
    for (double nu : {0.05, 0.5, 0.9, 0.99})
        EXPECT_NEAR(half_period(round_sphere(), nu, 1e-10), kPi, 1e-8) << nu;
}

TEST(HalfPeriod, DomainErrors)
{
    EXPECT_THROW(half_period(round_sphere(), 0.0), DomainError);
    EXPECT_THROW(half_period(round_sphere(), 1.0), DomainError);
    EXPECT_THROW(half_period(twisted(), -0.3), DomainError);
}

TEST(HalfPeriod, TurningRadius)
{
    for (double nu : {0.2, 0.7, 1.5})
        EXPECT_NEAR(twisted().m(turning_radius(twisted(), nu)), nu, 1e-12);
}

TEST(HalfPeriod, ScanMonotone)
{
    const HalfPeriodTable ts = scan_half_period(twisted(), 32);
    EXPECT_TRUE(ts.monotone);
    EXPECT_EQ(ts.nu_grid.size(), 32u);
    const HalfPeriodTable ar = scan_half_period(Surface(make_profile(ProfileFamily::ArcsinRatio, 1.0)), 32);
    EXPECT_TRUE(ar.monotone);
    const HalfPeriodTable rs = scan_half_period(round_sphere(), 16);
    EXPECT_TRUE(rs.monotone);
    for (double v : rs.phi_values)
        EXPECT_NEAR(v, kPi, 1e-8);
    EXPECT_THROW(scan_half_period(round_sphere(), 4), DomainError);
}

TEST(CutLocus, RoundSphereAntipode)
{
    const CutLocusResult res = riemann_cut_locus(round_sphere(), {kPi / 2, 0.0});
    ASSERT_FALSE(res.cut_points.empty());
    for (const auto &c : res.cut_points)
    {
        EXPECT_LT(chart_distance(round_sphere(), c.point.r(), c.point.theta(), kPi / 2, kPi), 1e-5);
        EXPECT_NEAR(c.distance, kPi, 1e-5);
    }
}

TEST(CutLocus, TwistedSineOnMirrorParallel)
{
    const CutLocusResult &res = twisted_cut();
    ASSERT_EQ(res.cut_points.size(), 256u);
    ASSERT_TRUE(res.parallel_r);
    EXPECT_NEAR(*res.parallel_r, 2 * kPi / 3, 1e-3);
    for (const auto &c : res.cut_points)
        EXPECT_NEAR(c.point.r(), 2 * kPi / 3, 1e-3);
    EXPECT_LT(res.max_parallel_deviation, 1e-3);
}

TEST(CutLocus, TwistedSineProperSubarc)
{
    const CutLocusResult &res = twisted_cut();
    ASSERT_TRUE(res.theta_extent);
    const double lo = res.theta_extent->lo;
    const double hi = res.theta_extent->hi;
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, kTwoPi);
    EXPECT_NEAR(lo + hi, kTwoPi, 1e-9);  // symmetric about theta = pi
    for (const auto &c : res.cut_points)
    {
        EXPECT_GE(c.point.theta(), lo - 1e-6);
        EXPECT_LE(c.point.theta(), hi + 1e-6);
    }

    CutLocusOptions fine;
    fine.step = 5e-4;
    const CutLocusResult half = riemann_cut_locus(twisted(), {kPi / 3, 0.0}, fine);
    ASSERT_TRUE(half.theta_extent);
    EXPECT_NEAR(half.theta_extent->lo, lo, 1e-4);
    EXPECT_NEAR(half.theta_extent->hi, hi, 1e-4);
}

TEST(CutLocus, MirrorSymmetry)
{
    // reflection theta -> -theta maps the cut locus of (r0, 0) to itself
    const CutLocusResult &res = twisted_cut();
    for (std::size_t i = 0; i < res.cut_points.size(); i += 8)
    {
        const SurfacePoint p = res.cut_points[i].point;
        EXPECT_LT(distance_to_set(twisted(), res, {p.r(), -p.theta()}), 1e-6);
    }
}

TEST(CutLocus, CutNotAfterConjugate)
{
    const auto conj = conjugate_locus(twisted(), {kPi / 3, 0.0});
    const CutLocusResult &res = twisted_cut();
    ASSERT_EQ(conj.size(), res.cut_points.size());
    for (std::size_t k = 0; k < conj.size(); ++k)
    {
        EXPECT_NEAR(conj[k].angle_phi, res.cut_points[k].angle_phi, 1e-15);
        EXPECT_LE(res.cut_points[k].distance, conj[k].distance + 1e-6);
    }
}

TEST(CutLocus, RoundConjugateLocusIsAntipode)
{
    for (const auto &c : conjugate_locus(round_sphere(), {1.0, 0.0}))
    {
        EXPECT_NEAR(c.distance, kPi, 1e-4);
        EXPECT_LT(chart_distance(round_sphere(), c.point.r(), c.point.theta(), kPi - 1.0, kPi), 1e-4);
    }
}

TEST(CutLocus, CoarseFanWarns)
{
    CutLocusOptions opt;
    opt.fan_n = 64;
    const CutLocusResult res = riemann_cut_locus(twisted(), {kPi / 3, 0.0}, opt);
    ASSERT_FALSE(res.warnings.empty());
    EXPECT_EQ(res.warnings.front().rfind("FanTooCoarse", 0), 0u);
}

TEST(CutLocus, RejectsCoarseFan)
{
    CutLocusOptions opt;
    opt.fan_n = 32;
    EXPECT_THROW(riemann_cut_locus(twisted(), {1.0, 0.0}, opt), DomainError);
    EXPECT_THROW(riemann_cut_locus(twisted(), {0.0, 0.0}), DomainError);
}

TEST(Chain, PaperChainCertified)
{
    const ChainCertificate cert = certify_chain(NavigationData(twisted(), paper_chain()));
    EXPECT_TRUE(cert.holds());
    EXPECT_EQ(cert.killing_count, 2u);
    for (const auto &e : cert.entries)
        EXPECT_LT(e.defect, e.tolerance) << e.label;
}

TEST(Chain, FailingChainListsConditions)
{
    const NavigationData bad(twisted(), {VectorFieldSpec::radial_sin(0.2), VectorFieldSpec::rotation(0.1),
                                         VectorFieldSpec::radial_sin(0.1)});
    EXPECT_FALSE(certify_chain(bad).holds());
    try
    {
        randers_cut_locus(bad, {kPi / 3, 0.0});
        FAIL() << "expected PreconditionFailed";
    }
    catch (const PreconditionFailed &e)
    {
        EXPECT_NE(std::string(e.what()).find("C0"), std::string::npos);
    }
}

TEST(Chain, IdentityFlowKeepsHCutLocus)
{
    const NavigationData chain(twisted(), {VectorFieldSpec::rotation(0.0), VectorFieldSpec::rotation(0.0),
                                           VectorFieldSpec::radial_ratio()});
    const CutLocusResult f = randers_cut_locus(chain, {kPi / 3, 0.0});
    const CutLocusResult &h = twisted_cut();
    ASSERT_EQ(f.cut_points.size(), h.cut_points.size());
    EXPECT_EQ(f.metric_tag, "F2");
    for (std::size_t k = 0; k < f.cut_points.size(); ++k)
        EXPECT_LT(chart_distance(twisted(), f.cut_points[k].point.r(), f.cut_points[k].point.theta(),
                                 h.cut_points[k].point.r(), h.cut_points[k].point.theta()),
                  1e-12);
}

TEST(Chain, PaperChainRotatesByDistance)
{
    const CutLocusResult f = randers_cut_locus(NavigationData(twisted(), paper_chain()), {kPi / 3, 0.0});
    const CutLocusResult &h = twisted_cut();
    ASSERT_EQ(f.cut_points.size(), h.cut_points.size());
    for (std::size_t k = 0; k < f.cut_points.size(); ++k)
    {
        const auto &a = f.cut_points[k];
        const auto &b = h.cut_points[k];
        EXPECT_NEAR(a.point.r(), b.point.r(), 1e-12);
        EXPECT_NEAR(angle_diff(a.point.theta(), b.point.theta() + 0.3 * b.distance), 0.0, 1e-9);
    }
    ASSERT_TRUE(f.theta_extent);
    EXPECT_NEAR(f.theta_extent->hi - f.theta_extent->lo, h.theta_extent->hi - h.theta_extent->lo, 1e-12);
}

TEST(Oracle, AgreesWithHCutPoints)
{
    oracle::DistanceOracle::Options o;
    o.fan_n = 512;
    o.length = 3.6;
    const SurfacePoint q{kPi / 3, 0.0};
    const auto oracle = oracle::navigation_oracle(NavigationData(twisted()), q, o);
    for (double deg : {35.0, 125.0, -55.0, -145.0})
    {
        const double phi = deg * kPi / 180;
        const auto got = oracle.cut_point(phi, kTwoPi / 16);
        const auto want = riemann_cut_point(twisted(), q, phi);
        ASSERT_TRUE(got);
        ASSERT_TRUE(want);
        EXPECT_NEAR(got->first, want->distance, 1e-4);
        EXPECT_LT(chart_distance(twisted(), got->second.r(), got->second.theta(), want->point.r(), want->point.theta()),
                  1e-4);
    }
}

TEST(Oracle, AgreesWithRotatedCutPoints)
{
    // F1 = Zermelo(h, 0.3 d/dtheta): cut points are h-cut points rotated by 0.3 times the distance
    oracle::DistanceOracle::Options o;
    o.fan_n = 512;
    o.length = 3.6;
    const SurfacePoint q{kPi / 3, 0.0};
    const NavigationData f1(twisted(), {VectorFieldSpec::rotation(0.1), VectorFieldSpec::rotation(0.2)});
    const auto oracle = oracle::navigation_oracle(f1, q, o);
    for (double deg : {55.0, 145.0, -35.0, -125.0})
    {
        const double phi = deg * kPi / 180;
        const auto got = oracle.cut_point(phi, kTwoPi / 16);
        const auto want = riemann_cut_point(twisted(), q, phi);
        ASSERT_TRUE(got);
        ASSERT_TRUE(want);
        const double th = want->point.theta() + 0.3 * want->distance;
        EXPECT_LT(chart_distance(twisted(), got->second.r(), got->second.theta(), want->point.r(), th), 1e-4);
    }
}
