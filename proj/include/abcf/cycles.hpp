#pragma once

#include "abcf/cf.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace abcf {

enum class Endpoint { A, B };
enum class Side { Lower, Upper };
enum class CycleClass { Strong, Weak, PeriodicNoCycle, ApproximateCycle, Undetermined };

inline const char* class_name(CycleClass c)
{
    switch (c) {
    case CycleClass::Strong:
        return "Strong";
    case CycleClass::Weak:
        return "Weak";
    case CycleClass::PeriodicNoCycle:
        return "PeriodicNoCycle";
    case CycleClass::ApproximateCycle:
        return "ApproximateCycle";
    case CycleClass::Undetermined:
        return "Undetermined";
    }
    return "?";
}

// Orbit step with the discontinuity convention: a lower orbit continues from
// a with T and from b with S; an upper orbit follows f.
template <Scalar S>
Gen orbit_gen(const ExtReal<S>& y, Side side, const Params<S>& P)
{
    if (side == Side::Lower && !y.is_inf()) {
        if (y.value() == P.a)
            return Gen::T;
        if (y.value() == P.b)
            return Gen::S;
    }
    return f_gen(y, P);
}

template <Scalar S>
Gen seed_gen(Endpoint e, Side side)
{
    if (e == Endpoint::A)
        return side == Side::Lower ? Gen::T : Gen::S;
    return side == Side::Lower ? Gen::S : Gen::Tinv;
}

template <Scalar S>
struct Orbit {
    Side side = Side::Lower;
    Gen seed = Gen::T;
    std::vector<ExtReal<S>> values;  // values[0] is the seed image of the endpoint
    std::vector<Gen> gens;           // gens[i] takes values[i] to values[i+1]
    bool periodic = false;
    std::size_t repeat_index = 0;    // when periodic: next value equals values[repeat_index]

    // Word from the endpoint to values[i].
    Word word_to(std::size_t i) const
    {
        Word w;
        w.reserve(i + 1);
        w.push_back(seed);
        for (std::size_t k = 0; k < i; ++k)
            w.push_back(gens[k]);
        return w;
    }
};

template <Scalar S>
struct CycleResult {
    Endpoint endpoint = Endpoint::A;
    CycleClass cls = CycleClass::Undetermined;
    std::optional<ExtReal<S>> end;
    std::size_t upper_len = 0;  // m: steps on the upper side before the end
    std::size_t lower_len = 0;  // k: steps on the lower side before the end
    Orbit<S> upper, lower;
    Mobius relation;            // identity in PSL(2,Z) exactly for strong cycles
    bool relation_identity = false;

    bool met() const { return end.has_value(); }
    bool finite() const { return cls != CycleClass::Undetermined; }
    Word upper_word() const { return upper.word_to(upper_len); }
    Word lower_word() const { return lower.word_to(lower_len); }
};

namespace detail {

template <Scalar S>
using OrbitIndex = std::map<ExtReal<S>, std::size_t, ext_less<S>>;

template <Scalar S>
std::optional<std::size_t> lookup(const OrbitIndex<S>& idx, const ExtReal<S>& v)
{
    if constexpr (is_exact_v<S>) {
        auto it = idx.find(v);
        if (it == idx.end())
            return std::nullopt;
        return it->second;
    } else {
        auto it = idx.lower_bound(v);
        if (it != idx.end() && it->first == v)
            return it->second;
        if (it != idx.begin() && std::prev(it)->first == v)
            return std::prev(it)->second;
        return std::nullopt;
    }
}

}  // namespace detail

// Runs the two orbits of an endpoint in lockstep until they meet, both become
// periodic, or `cap` steps pass.
template <Scalar S>
CycleResult<S> detect_cycle(const Params<S>& P, Endpoint e, std::size_t cap = 100000)
{
    CycleResult<S> R;
    R.endpoint = e;
    const S& x = e == Endpoint::A ? P.a : P.b;
    R.lower.side = Side::Lower;
    R.upper.side = Side::Upper;
    R.lower.seed = seed_gen<S>(e, Side::Lower);
    R.upper.seed = seed_gen<S>(e, Side::Upper);
    detail::OrbitIndex<S> li, ui;

    auto meet = [&](std::size_t ui_idx, std::size_t li_idx) {
        R.end = R.upper.values[ui_idx];
        R.upper_len = ui_idx;
        R.lower_len = li_idx;
    };
    auto push = [&](Orbit<S>& o, detail::OrbitIndex<S>& own, detail::OrbitIndex<S>& other, const ExtReal<S>& v) -> bool {
        if (auto j = detail::lookup(own, v)) {
            o.periodic = true;
            o.repeat_index = *j;
            return false;
        }
        std::size_t i = o.values.size();
        o.values.push_back(v);
        own.emplace(v, i);
        if (auto j = detail::lookup(other, v)) {
            if (o.side == Side::Upper)
                meet(i, *j);
            else
                meet(*j, i);
            return true;
        }
        return false;
    };
    auto step = [&](Orbit<S>& o, detail::OrbitIndex<S>& own, detail::OrbitIndex<S>& other) -> bool {
        if (o.periodic)
            return false;
        Gen g = orbit_gen(o.values.back(), o.side, P);
        o.gens.push_back(g);
        ExtReal<S> v = Mobius::of(g).apply(o.values.back());
        return push(o, own, other, v);
    };

    ExtReal<S> ex(x);
    bool hit = push(R.lower, li, ui, Mobius::of(R.lower.seed).apply(ex));
    if (!hit)
        hit = push(R.upper, ui, li, Mobius::of(R.upper.seed).apply(ex));
    for (std::size_t n = 0; !hit && n < cap; ++n) {
        hit = step(R.lower, li, ui);
        if (!hit)
            hit = step(R.upper, ui, li);
        if (!hit && R.lower.periodic && R.upper.periodic)
            break;
    }

    if (R.met()) {
        Mobius L = Mobius::of(R.lower_word());
        Mobius U = Mobius::of(R.upper_word());
        R.relation = e == Endpoint::A ? L.inverse() * U : U.inverse() * L;
        R.relation_identity = R.relation.is_identity();
        if constexpr (is_exact_v<S>)
            R.cls = R.relation_identity ? CycleClass::Strong : CycleClass::Weak;
        else
            R.cls = CycleClass::ApproximateCycle;
    } else if (R.lower.periodic && R.upper.periodic) {
        R.cls = CycleClass::PeriodicNoCycle;
    } else {
        R.cls = CycleClass::Undetermined;
    }
    return R;
}

// Classification for a detected cycle, from its word relation.
template <Scalar S>
CycleClass cycle_strength(const CycleResult<S>& c)
{
    if (!c.met())
        throw error("cycle_strength needs a cycle");
    return c.relation_identity ? CycleClass::Strong : CycleClass::Weak;
}

// ---------------------------------------------------------------------------
// Truncated orbits: the levels that make up the boundary of the attractor.

enum class Origin { La, Ua, Lb, Ub };

inline const char* origin_name(Origin o)
{
    switch (o) {
    case Origin::La:
        return "La";
    case Origin::Ua:
        return "Ua";
    case Origin::Lb:
        return "Lb";
    case Origin::Ub:
        return "Ub";
    }
    return "?";
}

template <Scalar S>
struct Level {
    ExtReal<S> y;
    Origin origin;
    std::size_t index;  // position within its truncated orbit
    Word word;          // from the endpoint, seed generator included
};

template <Scalar S>
struct TruncatedOrbits {
    std::vector<Level<S>> La, Ua, Lb, Ub;
    CycleResult<S> a, b;
    bool finite = false;
};

namespace detail {

template <Scalar S>
std::vector<Level<S>> truncate(const CycleResult<S>& c, Side side, Origin origin)
{
    const Orbit<S>& o = side == Side::Lower ? c.lower : c.upper;
    std::size_t len = o.values.size();
    bool append_end = false;
    if (c.met()) {
        len = side == Side::Lower ? c.lower_len : c.upper_len;
        bool strong = c.relation_identity;
        append_end = !strong;
    }
    std::vector<Level<S>> out;
    for (std::size_t i = 0; i < len; ++i)
        out.push_back({o.values[i], origin, i, o.word_to(i)});
    if (append_end)
        out.push_back({*c.end, origin, len, o.word_to(len)});
    return out;
}

}  // namespace detail

// Strong cycle: the two sides.  Weak cycle: the sides plus the end point.
// No cycle: each orbit up to its first repeat.
template <Scalar S>
TruncatedOrbits<S> truncated_orbits(const Params<S>& P, std::size_t cap = 100000)
{
    TruncatedOrbits<S> T;
    T.a = detect_cycle(P, Endpoint::A, cap);
    T.b = detect_cycle(P, Endpoint::B, cap);
    T.finite = T.a.finite() && T.b.finite();
    if (!T.finite)
        return T;
    T.La = detail::truncate(T.a, Side::Lower, Origin::La);
    T.Ua = detail::truncate(T.a, Side::Upper, Origin::Ua);
    T.Lb = detail::truncate(T.b, Side::Lower, Origin::Lb);
    T.Ub = detail::truncate(T.b, Side::Upper, Origin::Ub);
    return T;
}

struct FinitenessReport {
    bool finite = false;
    CycleClass a = CycleClass::Undetermined;
    CycleClass b = CycleClass::Undetermined;
    bool la_finite = false, ua_finite = false, lb_finite = false, ub_finite = false;
    std::optional<Endpoint> suspect;
    std::set<std::size_t> digit_pattern;  // T-run lengths along the suspect's lower orbit
};

template <Scalar S>
FinitenessReport finiteness_check(const Params<S>& P, std::size_t cap = 100000)
{
    FinitenessReport r;
    auto ca = detect_cycle(P, Endpoint::A, cap);
    auto cb = detect_cycle(P, Endpoint::B, cap);
    r.a = ca.cls;
    r.b = cb.cls;
    r.la_finite = r.ua_finite = ca.finite();
    r.lb_finite = r.ub_finite = cb.finite();
    r.finite = ca.finite() && cb.finite();
    if (!r.finite) {
        const CycleResult<S>& c = !cb.finite() ? cb : ca;
        r.suspect = c.endpoint;
        std::size_t run = 0;
        bool seen_s = c.lower.seed == Gen::S;
        for (Gen g : c.lower.gens) {
            if (g == Gen::T) {
                ++run;
            } else {
                if (g == Gen::S && seen_s && run > 0)
                    r.digit_pattern.insert(run);
                seen_s = seen_s || g == Gen::S;
                run = 0;
            }
        }
    }
    return r;
}

}  // namespace abcf
