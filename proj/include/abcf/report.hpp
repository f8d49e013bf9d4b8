#pragma once

// JSON views of the library results.  Exact values carry a float shadow.

#include "abcf/attractor.hpp"
#include "abcf/exceptional.hpp"
#include "abcf/measures.hpp"

#include <json.hpp>

namespace abcf {

using json = nlohmann::ordered_json;

template <Scalar S>
json value_json(const S& v)
{
    return {{"exact", to_string(v)}, {"float", to_double(v)}};
}

template <Scalar S>
json value_json(const ExtReal<S>& v)
{
    if (v.is_inf())
        return {{"exact", "inf"}, {"float", "inf"}};
    return value_json(v.value());
}

template <Scalar C>
json value_json(const Coord<C>& c)
{
    if (c.inf)
        return {{"exact", c.str()}, {"float", c.inf < 0 ? "-inf" : "inf"}};
    return value_json(c.v);
}

inline json value_json(const Integer& n) { return n.str(); }

inline json digits_json(const std::vector<Integer>& d)
{
    json out = json::array();
    for (const Integer& n : d) {
        if (boost::multiprecision::abs(n) < Integer(1) << 53)
            out.push_back(n.convert_to<long long>());
        else
            out.push_back(n.str());
    }
    return out;
}

inline std::string word_str(const Word& w)
{
    std::string s;
    for (Gen g : w)
        s += g == Gen::T ? "T" : g == Gen::S ? "S" : "t";  // t = T^-1
    return s;
}

template <Scalar S>
json params_json(const Params<S>& P)
{
    return {{"a", value_json(P.a)}, {"b", value_json(P.b)}};
}

inline json expansion_json(const Expansion& e)
{
    const char* st = e.status == ExpansionStatus::Terminated ? "terminated" : e.status == ExpansionStatus::Periodic ? "periodic" : "truncated";
    json j = {{"digits", digits_json(e.digits)}, {"status", st}};
    if (e.status == ExpansionStatus::Periodic)
        j["period_start"] = e.period_start;
    return j;
}

template <Scalar S>
json cycle_json(const CycleResult<S>& c)
{
    json j = {{"endpoint", c.endpoint == Endpoint::A ? "a" : "b"}, {"classification", class_name(c.cls)}};
    if (c.end) {
        j["end"] = c.end->str();
        j["end_float"] = c.end->to_double();
        j["upper_steps"] = c.upper_len;
        j["lower_steps"] = c.lower_len;
        j["upper_word"] = word_str(c.upper_word());
        j["lower_word"] = word_str(c.lower_word());
        j["relation"] = c.relation.str();
    }
    return j;
}

template <Scalar C>
json step_json(const Step<C>& s)
{
    json j = {{"x_lo", value_json(s.x_lo)}, {"x_hi", value_json(s.x_hi)}, {"y", value_json(s.y)}};
    if (s.origin)
        j["origin"] = origin_name(*s.origin);
    return j;
}

template <Scalar C>
json box_json(const Box<C>& b)
{
    return {{"x0", value_json(b.x0)}, {"x1", value_json(b.x1)}, {"y0", value_json(b.y0)}, {"y1", value_json(b.y1)}};
}

template <Scalar S>
json domain_json(const RectDomain<S>& D)
{
    json j = {{"params", params_json(D.params)}, {"degenerate", D.degenerate}};
    if (D.x_a)
        j["x_a"] = value_json(*D.x_a);
    if (D.x_b)
        j["x_b"] = value_json(*D.x_b);
    j["upper"] = json::array();
    for (const auto& s : D.upper)
        j["upper"].push_back(step_json(s));
    j["lower"] = json::array();
    for (const auto& s : D.lower)
        j["lower"].push_back(step_json(s));
    j["boxes"] = json::array();
    for (const auto& b : D.boxes())
        j["boxes"].push_back(box_json(b));
    return j;
}

template <Scalar C>
json bijectivity_json(const BijectivityReport<C>& r)
{
    json j = {{"tiles", r.tiles()},
              {"overlap", static_cast<double>(r.overlap)},
              {"uncovered", static_cast<double>(r.uncovered)},
              {"extra", static_cast<double>(r.extra)},
              {"overlap_cells", r.overlap_cells},
              {"uncovered_cells", r.uncovered_cells},
              {"extra_cells", r.extra_cells}};
    j["locking"] = json::array();
    for (const auto& L : r.locking)
        j["locking"].push_back({{"endpoint", L.endpoint == Endpoint::A ? "a" : "b"},
                                {"y", value_json(L.y)},
                                {"x_lo", value_json(L.x_lo)},
                                {"x_hi", value_json(L.x_hi)},
                                {"sides_agree", L.sides_agree}});
    return j;
}

inline json oracle_json(const OracleComparison& o)
{
    return {{"inside_fraction", o.inside_fraction},
            {"boundary_gap", o.boundary_gap},
            {"point_gap", o.point_gap},
            {"boundary_segments", o.segments},
            {"boundary_samples", o.samples}};
}

inline json reduction_json(const ReductionReport& r)
{
    return {{"points", r.points}, {"reached", r.reached}, {"coverage", r.coverage()}, {"max_time", r.max_time}};
}

inline json interval_json(const RatInterval& r)
{
    return {{"lo", to_string(r.lo)}, {"hi", to_string(r.hi)}, {"lo_float", to_double(r.lo)}, {"hi_float", to_double(r.hi)}};
}

inline json exceptional_json(const ExceptionalResult& r)
{
    const GenerationRecord& last = r.generations.back();
    json j = {{"b", value_json(r.b)},
              {"a", value_json(Rational(r.b - 1))},
              {"b_lo", to_double(last.b_range.lo)},
              {"b_hi", to_double(last.b_range.hi)},
              {"width", to_double(r.width)},
              {"width_log2", r.width > 0 ? static_cast<long>(bit_length(numerator(r.width))) - static_cast<long>(bit_length(denominator(r.width))) : 0},
              {"digits_prefix", r.prefix}};
    j["generations"] = json::array();
    for (const auto& g : r.generations) {
        json gj = {{"generation", g.generation}, {"prefix_length", g.prefix_length}, {"nested", g.nested}, {"b_width", to_double(g.b_range.width())}};
        if (g.generation > 0)
            gj["base_length"] = to_double(g.base.mid());
        j["generations"].push_back(gj);
    }
    return j;
}

struct MeasureSummary {
    double C = 0, h_closed = 0, h_rokhlin = 0, nu_mass = 0, mu_mass = 0, log_integral = 0;
    InvarianceResult ks;
};

template <Scalar S>
MeasureSummary measure_summary(const Params<S>& P, std::size_t n_points, std::uint64_t seed)
{
    HatDomain D = hat_domain(P);
    MeasureSummary m;
    m.C = D.C();
    m.h_closed = entropy_closed(P);
    m.h_rokhlin = entropy_rokhlin(D);
    m.nu_mass = nu_mass(D);
    m.mu_mass = mu_mass(D);
    m.log_integral = log_integral(D);
    m.ks = invariance_check(D, n_points, seed);
    return m;
}

inline json measures_json(const MeasureSummary& m)
{
    json j = {{"C", m.C}, {"h_closed", m.h_closed}, {"h_rokhlin", m.h_rokhlin}, {"nu_mass", m.nu_mass}, {"mu_mass", m.mu_mass}, {"log_integral", m.log_integral}};
    if (m.ks.empty())
        j["ks_stat"] = nullptr;
    else
        j["ks_stat"] = m.ks.statistic();
    j["ks_samples"] = m.ks.samples;
    return j;
}

}  // namespace abcf
