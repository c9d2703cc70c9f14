#pragma once

#include "rsphere/cutlocus.hpp"
#include "rsphere/geodesics.hpp"
#include "rsphere/surface.hpp"

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace rsphere
{

using json = nlohmann::ordered_json;

inline json to_json(const SurfacePoint &p) { return json{{"r", p.r()}, {"theta", p.theta()}}; }

inline json to_json(const ConditionReport &rep)
{
    auto one = [](const ConditionCheck &c) {
        return json{{"holds", c.holds}, {"worst_r", c.worst_r}, {"worst_value", c.worst_value}};
    };
    return json{{"c1", one(rep.c1)}, {"c2", one(rep.c2)}, {"c3", one(rep.c3)}, {"grid_n", rep.grid_n}};
}

inline json to_json(const HalfPeriodTable &t)
{
    return json{{"nu_grid", t.nu_grid},
                {"phi_values", t.phi_values},
                {"tolerance", t.tolerance},
                {"monotone", t.monotone},
                {"max_increase", t.max_increase}};
}

inline json to_json(const CutLocusResult &res)
{
    json out;
    out["source"] = to_json(res.source);
    out["metric_tag"] = res.metric_tag;
    out["parallel_r"] = res.parallel_r ? json(*res.parallel_r) : json(nullptr);
    out["max_parallel_deviation"] = res.max_parallel_deviation;
    out["theta_extent"] =
        res.theta_extent ? json::array({res.theta_extent->lo, res.theta_extent->hi}) : json(nullptr);
    json pts = json::array();
    for (const auto &c : res.cut_points)
        pts.push_back({{"r", c.point.r()},
                       {"theta", c.point.theta()},
                       {"distance", c.distance},
                       {"kind", cut_kind_id(c.kind)},
                       {"nu", c.clairaut_nu},
                       {"phi", c.angle_phi}});
    out["points"] = std::move(pts);
    out["warnings"] = res.warnings;
    return out;
}

/// JSON envelope of a trace (samples are written separately as CSV).
inline json trace_envelope(const GeodesicTrace &t, const std::string &profile_id, const std::vector<std::string> &winds)
{
    return json{{"metric_tag", t.metric_tag},
                {"profile", profile_id},
                {"winds", winds},
                {"step", t.step},
                {"length", t.length()},
                {"samples", t.samples.size()},
                {"pole_crossing", t.pole_crossing}};
}

/// CSV with columns s,r,theta,dr,dtheta,nu (an optional leading column tags fan members).
inline void write_trace_csv(std::ostream &os, const GeodesicTrace &t, int fan_index = -1, bool header = true)
{
    if (header)
        os << (fan_index >= 0 ? "fan," : "") << "s,r,theta,dr,dtheta,nu\n";
    char buf[256];
    for (const auto &smp : t.samples)
    {
        const auto &st = smp.state;
        if (fan_index >= 0)
            os << fan_index << ',';
        std::snprintf(buf, sizeof buf, "%.10g,%.15g,%.15g,%.15g,%.15g,%.15g\n", smp.s, st.r, st.theta, st.dr,
                      st.dtheta, st.clairaut_nu);
        os << buf;
    }
}

} // namespace rsphere
