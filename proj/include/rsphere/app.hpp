#pragma once

// Run configs, experiment dispatch and reports for the command-line front end.

#include "rsphere/cutlocus.hpp"
#include "rsphere/fields.hpp"
#include "rsphere/geodesics.hpp"
#include "rsphere/lemmas.hpp"
#include "rsphere/serialize.hpp"
#include "rsphere/surface.hpp"
#include "rsphere/svg.hpp"

#include "json.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef RSPHERE_VERSION
#define RSPHERE_VERSION "0.1.0"
#endif

namespace rsphere::app
{

enum ExitCode : int
{
    kExitPass = 0,
    kExitCheckFailed = 1,
    kExitConfig = 2,
    kExitPrecondition = 3,
    kExitNumeric = 4,
};

class ConfigError : public Error
{
  public:
    using Error::Error;
};

inline const std::vector<std::string> &experiment_ids()
{
    static const std::vector<std::string> ids{"check",    "curvature",  "geodesic",     "fan",
                                              "cutlocus", "halfperiod", "verify-lemmas"};
    return ids;
}

struct RunConfig
{
    std::string experiment = "check";
    std::string profile = "round";
    double alpha = 0.25;   // twisted-sine
    double lambda = 1.0;   // arcsin-ratio
    std::vector<std::string> winds;  // catalog ids, applied in order
    double q_r = kPi / 3;
    double q_theta = 0.0;
    double phi = 0.0;
    double length = kTwoPi;
    double step = kDefaultStep;
    int fan_n = 256;
    std::uint64_t seed = 42;
    int n_grid = 32;    // half-period scan
    int grid_n = 1000;  // curvature samples and condition grid
    std::string out = "out";
    bool svg = true;
};

namespace detail
{

inline std::string wind_id_from_json(const json &w)
{
    if (w.is_string())
        return w.get<std::string>();
    if (!w.is_object())
        throw ConfigError("winds: entries must be catalog ids or objects");
    if (!w.contains("type") || !w["type"].is_string())
        throw ConfigError("winds: object entry needs a string \"type\"");
    const std::string type = w["type"].get<std::string>();
    auto allowed = [&](std::initializer_list<const char *> keys) {
        for (const auto &[k, v] : w.items())
        {
            bool ok = k == "type";
            for (const char *a : keys)
                ok = ok || k == a;
            if (!ok)
                throw ConfigError("winds: unknown key '" + k + "' for type " + type);
        }
    };
    auto number = [&](const char *key) {
        if (!w.contains(key) || !w[key].is_number())
            throw ConfigError(std::string("winds: type ") + type + " needs numeric \"" + key + "\"");
        return w[key].get<double>();
    };
    auto fmt = [](double x) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    };
    if (type == "zero")
    {
        allowed({});
        return "zero";
    }
    if (type == "rotation")
    {
        allowed({"mu"});
        return "rotation:" + fmt(number("mu"));
    }
    if (type == "radial")
    {
        allowed({"A", "c"});
        if (!w.contains("A") || !w["A"].is_string())
            throw ConfigError("winds: radial needs \"A\" from {\"r/sqrt(r^2+1)\", \"c*sin(r)\", \"c\"}");
        const std::string a = w["A"].get<std::string>();
        if (a == "r/sqrt(r^2+1)" || a == "ratio")
            return "radial:ratio";
        if (a == "c*sin(r)" || a == "sin")
            return "radial:sin:" + fmt(number("c"));
        if (a == "c" || a == "const")
            return "radial:const:" + fmt(number("c"));
        throw ConfigError("winds: unknown radial profile '" + a + "'");
    }
    if (type == "sum")
    {
        allowed({"terms"});
        if (!w.contains("terms") || !w["terms"].is_array() || w["terms"].empty())
            throw ConfigError("winds: sum needs a non-empty \"terms\" array");
        std::string id = "sum:[";
        bool first = true;
        for (const auto &t : w["terms"])
        {
            id += (first ? "" : ",") + wind_id_from_json(t);
            first = false;
        }
        return id + "]";
    }
    throw ConfigError("winds: unknown type '" + type + "'");
}

template <class T>
T get_as(const json &v, const std::string &key)
{
    try
    {
        if constexpr (std::is_same_v<T, std::uint64_t>)
        {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                throw ConfigError(key + ": expected a non-negative integer");
        }
        else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>)
        {
            if (!v.is_number_integer())
                throw ConfigError(key + ": expected an integer");
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            if (!v.is_number())
                throw ConfigError(key + ": expected a number");
        }
        return v.get<T>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(key + ": " + e.what());
    }
}

inline void require_range(const std::string &key, double v, double lo, double hi, bool open_lo = false)
{
    if (!std::isfinite(v) || (open_lo ? v <= lo : v < lo) || v > hi)
        throw ConfigError(key + " = " + std::to_string(v) + " outside " + (open_lo ? "(" : "[") +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

} // namespace detail

/// The worked example of the conclusions: TwistedSine(1/4) with the chain
/// mu0 d/dtheta, mu1 d/dtheta, A(r) d/dr - mu d/dtheta, A = r/sqrt(r^2+1).
inline void apply_preset(RunConfig &cfg, const std::string &name)
{
    if (name != "paper-s4")
        throw ConfigError("unknown preset '" + name + "'");
    cfg.profile = "twisted-sine";
    cfg.alpha = 0.25;
    cfg.winds = {"rotation:0.1", "rotation:0.2", "sum:[radial:ratio,rotation:-0.3]"};
    cfg.q_r = kPi / 3;
    cfg.q_theta = 0.0;
}

/// Overlays the keys of `j` on `cfg`. Unknown keys are rejected.
inline void merge_json(RunConfig &cfg, const json &j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    if (j.contains("preset"))
        apply_preset(cfg, detail::get_as<std::string>(j["preset"], "preset"));
    for (const auto &[key, v] : j.items())
    {
        if (key == "preset")
            continue;
        else if (key == "experiment")
            cfg.experiment = detail::get_as<std::string>(v, key);
        else if (key == "profile")
            cfg.profile = detail::get_as<std::string>(v, key);
        else if (key == "alpha")
            cfg.alpha = detail::get_as<double>(v, key);
        else if (key == "lambda")
            cfg.lambda = detail::get_as<double>(v, key);
        else if (key == "winds")
        {
            if (!v.is_array())
                throw ConfigError("winds: expected an array");
            cfg.winds.clear();
            for (const auto &w : v)
                cfg.winds.push_back(detail::wind_id_from_json(w));
        }
        else if (key == "q_r")
            cfg.q_r = detail::get_as<double>(v, key);
        else if (key == "q_theta")
            cfg.q_theta = detail::get_as<double>(v, key);
        else if (key == "phi")
            cfg.phi = detail::get_as<double>(v, key);
        else if (key == "length")
            cfg.length = detail::get_as<double>(v, key);
        else if (key == "step")
            cfg.step = detail::get_as<double>(v, key);
        else if (key == "fan_n")
            cfg.fan_n = detail::get_as<int>(v, key);
        else if (key == "seed")
            cfg.seed = detail::get_as<std::uint64_t>(v, key);
        else if (key == "n_grid")
            cfg.n_grid = detail::get_as<int>(v, key);
        else if (key == "grid_n")
            cfg.grid_n = detail::get_as<int>(v, key);
        else if (key == "out")
            cfg.out = detail::get_as<std::string>(v, key);
        else if (key == "svg")
        {
            if (!v.is_boolean())
                throw ConfigError("svg: expected a boolean");
            cfg.svg = v.get<bool>();
        }
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
}

inline RunConfig load_config_file(const std::string &path, RunConfig base = {})
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config " + path);
    json j;
    try
    {
        j = json::parse(f);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    merge_json(base, j);
    return base;
}

/// Range checks; catalog ids and profile parameters are checked by constructing them.
inline void validate(const RunConfig &cfg)
{
    bool known = false;
    for (const auto &id : experiment_ids())
        known = known || id == cfg.experiment;
    if (!known)
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    if (cfg.profile == "custom")
        throw ConfigError("profile 'custom' is only available through the library API");
    detail::require_range("q_r", cfg.q_r, 0.0, kPi, true);
    if (cfg.q_r >= kPi)
        throw ConfigError("q_r must be below pi");
    detail::require_range("q_theta", cfg.q_theta, -1e6, 1e6);
    detail::require_range("phi", cfg.phi, -1e6, 1e6);
    detail::require_range("length", cfg.length, 0.0, 100.0, true);
    detail::require_range("step", cfg.step, 0.0, 0.1, true);
    detail::require_range("fan_n", cfg.fan_n, 64, 16384);
    detail::require_range("n_grid", cfg.n_grid, 8, 4096);
    detail::require_range("grid_n", cfg.grid_n, 16, 1000000);
    if (cfg.out.empty())
        throw ConfigError("out: empty output directory");
    try
    {
        for (const auto &w : cfg.winds)
            (void)VectorFieldSpec::from_id(w);
        (void)family_from_id(cfg.profile);
    }
    catch (const DomainError &e)
    {
        throw ConfigError(e.what());
    }
}

inline json config_to_json(const RunConfig &cfg)
{
    return json{{"experiment", cfg.experiment}, {"profile", cfg.profile}, {"alpha", cfg.alpha},
                {"lambda", cfg.lambda},         {"winds", cfg.winds},     {"q_r", cfg.q_r},
                {"q_theta", cfg.q_theta},       {"phi", cfg.phi},         {"length", cfg.length},
                {"step", cfg.step},             {"fan_n", cfg.fan_n},     {"seed", cfg.seed},
                {"n_grid", cfg.n_grid},         {"grid_n", cfg.grid_n},   {"svg", cfg.svg}};
}

inline ProfileSpec build_profile(const RunConfig &cfg)
{
    const ProfileFamily fam = family_from_id(cfg.profile);
    try
    {
        switch (fam)
        {
        case ProfileFamily::TwistedSine:
            return make_profile(fam, cfg.alpha);
        case ProfileFamily::ArcsinRatio:
            return make_profile(fam, cfg.lambda);
        default:
            return make_profile(fam);
        }
    }
    catch (const DomainError &e)
    {
        throw ConfigError(e.what());
    }
}

inline NavigationData build_navigation(const RunConfig &cfg)
{
    std::vector<VectorFieldSpec> winds;
    for (const auto &w : cfg.winds)
        winds.push_back(VectorFieldSpec::from_id(w));
    return NavigationData(Surface(build_profile(cfg)), std::move(winds));
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string &s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Digest of a report with the timestamp and the digest itself removed.
inline std::string report_digest(json report)
{
    report.erase("report_digest");
    if (report.contains("provenance"))
        report["provenance"].erase("timestamp");
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(report.dump())));
    return buf;
}

struct Report
{
    std::string experiment;
    json config;
    std::vector<Check> checks;
    json results = json::object();
    std::vector<std::string> artifacts;
    std::optional<std::string> error;
    int exit_code = kExitPass;

    bool pass() const
    {
        if (error)
            return false;
        for (const auto &c : checks)
            if (!c.pass)
                return false;
        return true;
    }

    void add(std::string name, double value, double tolerance, bool pass, int trials = 1, std::string note = "")
    {
        checks.push_back({std::move(name), pass, value, tolerance, trials, std::move(note)});
    }
};

inline std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json report_to_json(const Report &rep, const RunConfig &cfg)
{
    json j;
    j["schema"] = 1;
    j["experiment"] = rep.experiment;
    j["config"] = rep.config;
    json checks = json::array();
    for (const auto &c : rep.checks)
    {
        json e{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance},
               {"trials", c.trials}};
        if (!c.note.empty())
            e["note"] = c.note;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["results"] = rep.results;
    j["artifacts"] = rep.artifacts;
    if (rep.error)
        j["error"] = *rep.error;
    j["provenance"] = {{"seed", cfg.seed}, {"step", cfg.step}, {"version", RSPHERE_VERSION},
                       {"timestamp", utc_timestamp()}};
    j["pass"] = rep.pass();
    j["exit_code"] = rep.exit_code;
    j["report_digest"] = report_digest(j);
    return j;
}

namespace detail
{

inline GeodesicTrace downsample(const GeodesicTrace &t, std::size_t stride)
{
    GeodesicTrace out = t;
    out.samples.clear();
    for (std::size_t i = 0; i < t.samples.size(); i += stride)
        out.samples.push_back(t.samples[i]);
    if (!t.empty() && (t.samples.size() - 1) % stride != 0)
        out.samples.push_back(t.samples.back());
    return out;
}

inline Curve chart_curve(const GeodesicTrace &t, std::string label = "", std::string color = "")
{
    Curve c;
    c.label = std::move(label);
    c.color = std::move(color);
    for (const auto &smp : t.samples)
        c.points.emplace_back(smp.state.theta, smp.state.r);
    return c;
}

class Runner
{
  public:
    Runner(const RunConfig &cfg, Report &rep) : cfg_(cfg), rep_(rep), dir_(cfg.out) {}

    void run()
    {
        const std::string &e = cfg_.experiment;
        if (e == "check")
            check();
        else if (e == "curvature")
            curvature();
        else if (e == "geodesic")
            geodesic();
        else if (e == "fan")
            fan();
        else if (e == "cutlocus")
            cutlocus();
        else if (e == "halfperiod")
            halfperiod();
        else if (e == "verify-lemmas")
            verify();
    }

  private:
    std::ofstream open(const std::string &name)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw Error("cannot write " + (dir_ / name).string());
        rep_.artifacts.push_back(name);
        return f;
    }

    void svg(const std::string &name, const std::vector<Curve> &curves, const PlotStyle &style)
    {
        if (!cfg_.svg || curves.empty())
            return;
        emit_svg((dir_ / name).string(), curves, style);
        rep_.artifacts.push_back(name);
    }

    SurfacePoint source() const { return {cfg_.q_r, cfg_.q_theta}; }

    void check()
    {
        const ProfileSpec spec = build_profile(cfg_);
        const ConditionReport cr = check_profile_conditions(spec, cfg_.grid_n);
        rep_.add("(c1) symmetry h(pi - r) = pi - h(r)", cr.c1.worst_value, 1e-10, cr.c1.holds, cr.grid_n);
        rep_.add("(c2) h' > 0 on [0, pi/2)", cr.c2.worst_value, 0.0, cr.c2.holds, cr.grid_n);
        rep_.add("(c3) h'' > 0 on (0, pi/2)", cr.c3.worst_value, 0.0, cr.c3.holds, cr.grid_n);
        rep_.results["conditions"] = to_json(cr);
        rep_.results["a"] = Surface(spec).a();
        if (cfg_.winds.empty())
            return;
        const NavigationData nav = build_navigation(cfg_);
        const ChainCertificate cert = certify_chain(nav);
        json entries = json::array();
        for (const auto &e : cert.entries)
        {
            const std::string name = e.label + " wind " + std::to_string(e.wind_index + 1);
            rep_.add(name, e.defect, e.tolerance, e.holds);
            entries.push_back({{"label", e.label},
                               {"wind", cfg_.winds[e.wind_index]},
                               {"defect", e.defect},
                               {"tolerance", e.tolerance},
                               {"holds", e.holds},
                               {"worst", to_json(e.worst)}});
        }
        rep_.results["chain"] = {{"entries", entries}, {"killing_prefix", cert.killing_count}};
    }

    void curvature()
    {
        const ProfileSpec spec = build_profile(cfg_);
        const Surface surface(spec);
        auto out = open("curvature.csv");
        out << "r,G,G_closed\n";
        Curve numeric{{}, "G(r)", "", false};
        double worst = 0.0;
        double worst_r = 0.0;
        char buf[96];
        for (int i = 0; i < cfg_.grid_n; ++i)
        {
            const double r = kPi * (i + 0.5) / cfg_.grid_n;
            const double g = gauss_curvature(surface, r);
            const double gc = closed_form_curvature(spec, r);
            const double d = std::abs(g - gc);
            if (d > worst)
            {
                worst = d;
                worst_r = r;
            }
            std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g\n", r, g, gc);
            out << buf;
            numeric.points.emplace_back(r, g);
        }
        rep_.add("curvature agrees with closed form", worst, 1e-8, worst < 1e-8, cfg_.grid_n);
        rep_.results["max_abs_error"] = worst;
        rep_.results["worst_r"] = worst_r;
        rep_.results["G_equator"] = gauss_curvature(surface, kPi / 2);
        PlotStyle style;
        style.title = "Gauss curvature, " + spec.name;
        style.x_label = "r";
        style.y_label = "G";
        svg("curvature.svg", {numeric}, style);
    }

    GeodesicTrace shoot(const NavigationData &nav, double phi, double length) const
    {
        const SurfacePoint q = source();
        if (cfg_.winds.empty())
            return integrate_h_geodesic(nav.surface(), unit_state(nav.surface(), q, phi), length, cfg_.step);
        const Covector p = navigation_covector(nav, q, unit_direction(nav.surface(), q.r(), phi));
        return integrate_randers_geodesic(nav, q, p, length, cfg_.step,
                                          "F" + std::to_string(cfg_.winds.size() - 1));
    }

    /// Drift of the conserved quantity (Clairaut constant, or p_theta for Randers geodesics).
    double drift(const NavigationData &nav, const GeodesicTrace &t) const
    {
        double worst = 0.0;
        const double ref = cfg_.winds.empty() ? t.front().clairaut_nu : t.front().p_theta;
        for (const auto &smp : t.samples)
        {
            const double v = cfg_.winds.empty() ? clairaut_constant(nav.surface(), smp.state) : smp.state.p_theta;
            worst = std::max(worst, std::abs(v - ref));
        }
        return worst;
    }

    void geodesic()
    {
        const NavigationData nav = build_navigation(cfg_);
        const GeodesicTrace t = shoot(nav, cfg_.phi, cfg_.length);
        if (t.pole_crossing)
            throw PoleCrossingError("geodesic reached the pole guard at s = " + std::to_string(t.length()));
        const double d = drift(nav, t);
        rep_.add(cfg_.winds.empty() ? "Clairaut constant conserved" : "p_theta conserved", d, 1e-8, d < 1e-8,
                 static_cast<int>(t.samples.size()));
        json env = trace_envelope(t, cfg_.profile, cfg_.winds);
        if (cfg_.winds.empty())
            if (auto s = first_conjugate_distance(nav.surface(), t))
                env["first_conjugate_distance"] = *s;
        env["end"] = to_json(t.back().point());
        rep_.results["trace"] = env;
        auto out = open("trace.csv");
        write_trace_csv(out, t);
        PlotStyle style;
        style.projection = Projection::Chart;
        style.title = t.metric_tag + "-geodesic";
        style.x_label = "theta";
        style.y_label = "r";
        svg("trace.svg", {chart_curve(t, t.metric_tag)}, style);
    }

    void fan()
    {
        const NavigationData nav = build_navigation(cfg_);
        auto out = open("fan.csv");
        std::vector<Curve> curves;
        double worst = 0.0;
        int crossings = 0;
        const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(0.01 / cfg_.step));
        for (int k = 0; k < cfg_.fan_n; ++k)
        {
            const double phi = kTwoPi * (k + 0.5) / cfg_.fan_n;
            const GeodesicTrace t = shoot(nav, phi, cfg_.length);
            crossings += t.pole_crossing;
            worst = std::max(worst, drift(nav, t));
            const GeodesicTrace thin = downsample(t, stride);
            write_trace_csv(out, thin, k, k == 0);
            if (k % std::max(1, cfg_.fan_n / 64) == 0)
                curves.push_back(chart_curve(thin, "", "#1f77b4"));
        }
        rep_.add("conserved quantity drift over fan", worst, 1e-8, worst < 1e-8, cfg_.fan_n);
        rep_.results["fan_n"] = cfg_.fan_n;
        rep_.results["pole_crossings"] = crossings;
        rep_.results["csv_stride"] = stride;
        PlotStyle style;
        style.projection = Projection::Chart;
        style.title = "geodesic fan";
        style.x_label = "theta";
        style.y_label = "r";
        svg("fan.svg", curves, style);
    }

    void cutlocus()
    {
        const NavigationData nav = build_navigation(cfg_);
        const Surface &surface = nav.surface();
        const SurfacePoint q = source();
        CutLocusOptions opt;
        opt.fan_n = cfg_.fan_n;
        opt.step = cfg_.step;
        opt.length_cap = std::max(cfg_.length, kTwoPi);
        const CutLocusResult res = cfg_.winds.empty() ? riemann_cut_locus(surface, q, opt)
                                                      : randers_cut_locus(nav, q, opt);
        rep_.results["cut_locus"] = to_json(res);
        rep_.add("cut points found", static_cast<double>(res.cut_points.size()), 1.0, !res.cut_points.empty(),
                 opt.fan_n);

        // distinct points up to 1e-5 (the round sphere collapses to the antipode)
        std::vector<SurfacePoint> distinct;
        for (const auto &c : res.cut_points)
        {
            bool seen = false;
            for (const auto &d : distinct)
                seen = seen || chart_distance(surface, c.point.r(), c.point.theta(), d.r(), d.theta()) < 1e-5;
            if (!seen)
                distinct.push_back(c.point);
        }
        rep_.results["distinct_points"] = distinct.size();

        const ConditionReport cond = check_profile_conditions(surface.profile(), 256);
        if (cond.all() && !res.cut_points.empty())
        {
            const double target = kPi - q.r();
            double dev = 0.0;
            for (const auto &c : res.cut_points)
                dev = std::max(dev, std::abs(c.point.r() - target));
            rep_.add("cut locus on the parallel r = pi - r(q)", dev, 1e-3, dev < 1e-3,
                     static_cast<int>(res.cut_points.size()));
        }
        if (cfg_.profile == "round" && !res.cut_points.empty())
        {
            const double th = wrap_angle(q.theta() + kPi);
            double dev = 0.0;
            for (const auto &c : res.cut_points)
                dev = std::max(dev, chart_distance(surface, c.point.r(), c.point.theta(), kPi - q.r(), th));
            rep_.add("cut locus is the antipode", dev, 1e-5, dev < 1e-5, static_cast<int>(res.cut_points.size()));
        }

        auto out = open("cutlocus.csv");
        out << "r,theta,distance,kind,nu,phi\n";
        char buf[160];
        Curve pts{{}, res.metric_tag + " cut points", "#d62728", true};
        for (const auto &c : res.cut_points)
        {
            std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%s,%.15g,%.15g\n", c.point.r(), c.point.theta(),
                          c.distance, cut_kind_id(c.kind), c.clairaut_nu, c.angle_phi);
            out << buf;
            pts.points.emplace_back(c.point.theta(), c.point.r());
        }
        std::vector<Curve> curves;
        if (cfg_.winds.empty())
        {
            Curve conj{{}, "conjugate locus", "#2ca02c", true};
            for (const auto &c : conjugate_locus(surface, q, opt))
                conj.points.emplace_back(c.point.theta(), c.point.r());
            rep_.results["conjugate_points"] = conj.points.size();
            curves.push_back(std::move(conj));
        }
        curves.push_back(std::move(pts));
        curves.push_back({{{q.theta(), q.r()}}, "q", "#000000", true});
        PlotStyle style;
        style.projection = Projection::Chart;
        style.title = res.metric_tag + " cut locus";
        style.x_label = "theta";
        style.y_label = "r";
        svg("cutlocus.svg", curves, style);
    }

    void halfperiod()
    {
        const Surface surface(build_profile(cfg_));
        const HalfPeriodTable t = scan_half_period(surface, cfg_.n_grid);
        rep_.results["half_period"] = to_json(t);
        rep_.add("half period non-increasing in nu", t.max_increase, 0.0, t.monotone, cfg_.n_grid);
        if (cfg_.profile == "round")
        {
            double dev = 0.0;
            for (double v : t.phi_values)
                dev = std::max(dev, std::abs(v - kPi));
            rep_.add("half period equals pi", dev, 1e-8, dev < 1e-8, cfg_.n_grid);
        }
        auto out = open("halfperiod.csv");
        out << "nu,phi\n";
        char buf[64];
        Curve c{{}, "phi(nu)", "", false};
        for (std::size_t i = 0; i < t.nu_grid.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%.15g,%.15g\n", t.nu_grid[i], t.phi_values[i]);
            out << buf;
            c.points.emplace_back(t.nu_grid[i], t.phi_values[i]);
        }
        PlotStyle style;
        style.title = "half period";
        style.x_label = "nu";
        style.y_label = "phi";
        svg("halfperiod.svg", {c}, style);
    }

    void verify()
    {
        for (auto &c : verify_lemmas(cfg_.seed))
            rep_.checks.push_back(std::move(c));
        rep_.results["seed"] = cfg_.seed;
    }

    const RunConfig &cfg_;
    Report &rep_;
    std::filesystem::path dir_;
};

} // namespace detail

struct RunOutcome
{
    int exit_code = kExitPass;
    json report;
};

/// Runs a validated config, writes <out>/report.json and the experiment's artifacts. Errors
/// raised by the experiment are recorded in the report and mapped to exit codes.
inline RunOutcome run(const RunConfig &cfg)
{
    Report rep;
    rep.experiment = cfg.experiment;
    rep.config = config_to_json(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + cfg.out + ": " + ec.message());
    try
    {
        detail::Runner(cfg, rep).run();
        rep.exit_code = rep.pass() ? kExitPass : kExitCheckFailed;
    }
    catch (const ConfigError &e)
    {
        rep.error = e.what();
        rep.exit_code = kExitConfig;
    }
    catch (const PreconditionFailed &e)
    {
        rep.error = e.what();
        rep.exit_code = kExitPrecondition;
    }
    catch (const NonConvexError &e)
    {
        rep.error = e.what();
        rep.exit_code = kExitPrecondition;
    }
    catch (const Error &e)
    {
        rep.error = e.what();
        rep.exit_code = kExitNumeric;
    }
    RunOutcome outcome{rep.exit_code, report_to_json(rep, cfg)};
    std::ofstream f(std::filesystem::path(cfg.out) / "report.json", std::ios::binary);
    if (!f)
        throw ConfigError("cannot write report.json in " + cfg.out);
    f << outcome.report.dump(2) << '\n';
    return outcome;
}

} // namespace rsphere::app
