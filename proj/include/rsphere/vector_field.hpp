#pragma once

#include "rsphere/common.hpp"
#include "rsphere/rk4.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rsphere
{

/// Value and first partials of a chart vector field at one point.
struct FieldJet
{
    double vr = 0.0;
    double vth = 0.0;
    double dvr_dr = 0.0;
    double dvr_dth = 0.0;
    double dvth_dr = 0.0;
    double dvth_dth = 0.0;

    TangentVector value() const { return {vr, vth}; }

    FieldJet &operator+=(const FieldJet &o)
    {
        vr += o.vr;
        vth += o.vth;
        dvr_dr += o.dvr_dr;
        dvr_dth += o.dvr_dth;
        dvth_dr += o.dvth_dr;
        dvth_dth += o.dvth_dth;
        return *this;
    }
};

enum class FieldKind
{
    Rotation,  // mu d/dtheta
    Radial,    // A(r) d/dr from the named catalog
    Sum,
    Custom,
};

/// Chart vector field V = v^r d/dr + v^theta d/dtheta with first partials.
/// Built-in kinds carry exact partials; custom fields may fall back to central differences.
class VectorFieldSpec
{
  public:
    using JetFn = std::function<FieldJet(double r, double theta)>;

    VectorFieldSpec() : VectorFieldSpec(FieldKind::Sum, "zero", [](double, double) { return FieldJet{}; }) {}

    FieldKind kind() const { return kind_; }
    const std::string &id() const { return id_; }
    const std::vector<VectorFieldSpec> &terms() const { return terms_; }

    FieldJet jet(double r, double theta) const { return jet_(r, theta); }
    FieldJet jet(const SurfacePoint &p) const { return jet_(p.r(), p.theta()); }
    TangentVector operator()(double r, double theta) const { return jet_(r, theta).value(); }
    TangentVector operator()(const SurfacePoint &p) const { return jet(p).value(); }

    /// Total rotation rate when the field is a rotation or a sum of rotations.
    std::optional<double> rotation_rate() const
    {
        if (kind_ == FieldKind::Rotation)
            return mu_;
        if (kind_ == FieldKind::Sum)
        {
            double total = 0.0;
            for (const auto &t : terms_)
            {
                auto rate = t.rotation_rate();
                if (!rate)
                    return std::nullopt;
                total += *rate;
            }
            return total;
        }
        return std::nullopt;
    }

    static VectorFieldSpec zero() { return VectorFieldSpec(); }

    static VectorFieldSpec rotation(double mu)
    {
        VectorFieldSpec f(FieldKind::Rotation, "rotation:" + format_number(mu), [mu](double, double) {
            FieldJet j;
            j.vth = mu;
            return j;
        });
        f.mu_ = mu;
        return f;
    }

    /// A(r) d/dr with A(r) = r / sqrt(r^2 + 1).
    static VectorFieldSpec radial_ratio()
    {
        return radial("radial:ratio", [](double r) {
            const double q = r * r + 1.0;
            return std::pair{r / std::sqrt(q), 1.0 / (q * std::sqrt(q))};
        });
    }

    /// A(r) d/dr with A(r) = c sin r.
    static VectorFieldSpec radial_sin(double c)
    {
        return radial("radial:sin:" + format_number(c),
                      [c](double r) { return std::pair{c * std::sin(r), c * std::cos(r)}; });
    }

    /// A(r) d/dr with A constant.
    static VectorFieldSpec radial_const(double c)
    {
        return radial("radial:const:" + format_number(c), [c](double) { return std::pair{c, 0.0}; });
    }

    static VectorFieldSpec sum(std::vector<VectorFieldSpec> terms)
    {
        std::string id = "sum:[";
        for (std::size_t i = 0; i < terms.size(); ++i)
            id += (i ? "," : "") + terms[i].id();
        id += "]";
        auto shared = terms;
        VectorFieldSpec f(FieldKind::Sum, std::move(id), [shared](double r, double th) {
            FieldJet acc;
            for (const auto &t : shared)
                acc += t.jet(r, th);
            return acc;
        });
        f.terms_ = std::move(terms);
        return f;
    }

    /// Custom field with explicit partials.
    static VectorFieldSpec custom(JetFn jet, std::string name = "custom")
    {
        return VectorFieldSpec(FieldKind::Custom, std::move(name), std::move(jet));
    }

    /// Custom field from components only; partials by central differences with step kFdStep.
    static VectorFieldSpec custom(std::function<double(double, double)> vr, std::function<double(double, double)> vth,
                                  std::string name = "custom")
    {
        auto jet = [vr, vth](double r, double th) {
            constexpr double h = kFdStep;
            FieldJet j;
            j.vr = vr(r, th);
            j.vth = vth(r, th);
            j.dvr_dr = (vr(r + h, th) - vr(r - h, th)) / (2 * h);
            j.dvr_dth = (vr(r, th + h) - vr(r, th - h)) / (2 * h);
            j.dvth_dr = (vth(r + h, th) - vth(r - h, th)) / (2 * h);
            j.dvth_dth = (vth(r, th + h) - vth(r, th - h)) / (2 * h);
            return j;
        };
        return VectorFieldSpec(FieldKind::Custom, std::move(name), std::move(jet));
    }

    /// Parses a catalog id: "zero", "rotation:<mu>", "radial:ratio", "radial:sin:<c>",
    /// "radial:const:<c>", "sum:[<id>,<id>,...]".
    static VectorFieldSpec from_id(std::string_view id);

  private:
    VectorFieldSpec(FieldKind kind, std::string id, JetFn jet) : kind_(kind), id_(std::move(id)), jet_(std::move(jet)) {}

    template <class A>
    static VectorFieldSpec radial(std::string id, A profile)
    {
        return VectorFieldSpec(FieldKind::Radial, std::move(id), [profile](double r, double) {
            auto [value, slope] = profile(r);
            FieldJet j;
            j.vr = value;
            j.dvr_dr = slope;
            return j;
        });
    }

    /// Shortest text that parses back to x.
    static std::string format_number(double x)
    {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }

    FieldKind kind_ = FieldKind::Sum;
    std::string id_;
    JetFn jet_;
    double mu_ = 0.0;
    std::vector<VectorFieldSpec> terms_;
};

namespace detail
{

inline double parse_number(std::string_view s, std::string_view whole)
{
    std::string buf(s);
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(buf, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used != buf.size() || buf.empty() || !std::isfinite(v))
        throw DomainError("bad number in wind id '" + std::string(whole) + "'");
    return v;
}

// Splits "a,b,[c,d]" at top-level commas.
inline std::vector<std::string_view> split_top_level(std::string_view s)
{
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (s[i] == '[')
            ++depth;
        else if (s[i] == ']')
            --depth;
        else if (s[i] == ',' && depth == 0)
        {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (start < s.size())
        out.push_back(s.substr(start));
    return out;
}

} // namespace detail

inline VectorFieldSpec VectorFieldSpec::from_id(std::string_view id)
{
    auto starts = [&](std::string_view prefix) { return id.substr(0, prefix.size()) == prefix; };
    if (id == "zero")
        return zero();
    if (starts("rotation:"))
        return rotation(detail::parse_number(id.substr(9), id));
    if (id == "radial:ratio")
        return radial_ratio();
    if (starts("radial:sin:"))
        return radial_sin(detail::parse_number(id.substr(11), id));
    if (starts("radial:const:"))
        return radial_const(detail::parse_number(id.substr(13), id));
    if (starts("sum:[") && id.back() == ']')
    {
        std::vector<VectorFieldSpec> terms;
        for (auto part : detail::split_top_level(id.substr(5, id.size() - 6)))
            terms.push_back(from_id(part));
        if (terms.empty())
            throw DomainError("empty sum in wind id '" + std::string(id) + "'");
        return sum(std::move(terms));
    }
    throw DomainError("unknown wind id '" + std::string(id) + "'");
}

/// First partials of a one-form omega = w_r dr + w_theta dtheta at a point.
struct OneFormJet
{
    double wr = 0.0;
    double wth = 0.0;
    double dwr_dr = 0.0;
    double dwr_dth = 0.0;
    double dwth_dr = 0.0;
    double dwth_dth = 0.0;

    Covector value() const { return {wr, wth}; }
};

class OneForm
{
  public:
    using JetFn = std::function<OneFormJet(double r, double theta)>;

    explicit OneForm(JetFn jet) : jet_(std::move(jet)) {}

    /// One-form from components only; partials by central differences (step kFdStep).
    static OneForm from_components(std::function<double(double, double)> wr, std::function<double(double, double)> wth)
    {
        return OneForm([wr, wth](double r, double th) {
            constexpr double h = kFdStep;
            OneFormJet j;
            j.wr = wr(r, th);
            j.wth = wth(r, th);
            j.dwr_dr = (wr(r + h, th) - wr(r - h, th)) / (2 * h);
            j.dwr_dth = (wr(r, th + h) - wr(r, th - h)) / (2 * h);
            j.dwth_dr = (wth(r + h, th) - wth(r - h, th)) / (2 * h);
            j.dwth_dth = (wth(r, th + h) - wth(r, th - h)) / (2 * h);
            return j;
        });
    }

    OneFormJet jet(double r, double theta) const { return jet_(r, theta); }
    OneFormJet jet(const SurfacePoint &p) const { return jet_(p.r(), p.theta()); }
    Covector operator()(const SurfacePoint &p) const { return jet(p).value(); }

  private:
    JetFn jet_;
};

/// Flow of a chart vector field, integrated with fixed-step RK4.
struct FlowMap
{
    VectorFieldSpec generator;
    double step = kDefaultStep;
    std::string method = "rk4";
};

/// Position after flowing for time t, with theta left unwrapped. Rotations use the exact
/// solution theta + mu t; everything else is integrated.
inline std::pair<double, double> flow_advance_unwrapped(const FlowMap &flow, double r, double theta, double t,
                                                        double guard = kPoleGuard)
{
    require_chart(r, "flow_advance", guard);
    if (t == 0.0)
        return {r, theta};
    if (auto mu = flow.generator.rotation_rate())
        return {r, theta + *mu * t};

    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / flow.step - 1e-9)));
    const double h = t / n;
    auto rhs = [&](const OdeState<2> &x) {
        const TangentVector v = flow.generator(x[0], x[1]);
        return OdeState<2>{v.r, v.theta};
    };
    OdeState<2> x{r, theta};
    for (int i = 0; i < n; ++i)
    {
        x = rk4_step(rhs, x, h);
        if (!inside_pole_guard(x[0], guard) || !std::isfinite(x[0]))
            throw PoleCrossingError("flow_advance: trajectory entered the pole guard at t = " +
                                    std::to_string((i + 1) * h));
    }
    return {x[0], x[1]};
}

inline SurfacePoint flow_advance(const FlowMap &flow, const SurfacePoint &p, double t, double guard = kPoleGuard)
{
    auto [r, th] = flow_advance_unwrapped(flow, p.r(), p.theta(), t, guard);
    return {r, th};
}

} // namespace rsphere
