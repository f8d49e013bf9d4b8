#pragma once

#include "abcf/mobius.hpp"
#include "abcf/params.hpp"

#include <map>
#include <optional>
#include <vector>

namespace abcf {

// Generalized integer part: floor(x-a) below a, 0 on [a,b), floor(x-b)+1 from b on.
template <Scalar S>
Integer digit_ab(const S& x, const Params<S>& P)
{
    if (x < P.a)
        return floor_int(S(x - P.a));
    if (x < P.b)
        return 0;
    return floor_int(S(x - P.b)) + 1;
}

// Generator used by f at x.  Infinity is treated as lying above b.
template <Scalar S>
Gen f_gen(const ExtReal<S>& x, const Params<S>& P)
{
    if (x.is_inf())
        return Gen::Tinv;
    if (x.value() < P.a)
        return Gen::T;
    if (x.value() < P.b)
        return Gen::S;
    return Gen::Tinv;
}

template <Scalar S>
ExtReal<S> f_step(const ExtReal<S>& x, const Params<S>& P)
{
    return Mobius::of(f_gen(x, P)).apply(x);
}

template <Scalar S>
struct FHat {
    S value;
    Integer digit;  // n with value = T^{-n} S x
    Mobius word;
};

// First return of f to [a,b).
template <Scalar S>
FHat<S> f_hat_step(const S& x, const Params<S>& P)
{
    if (x < P.a || !(x < P.b))
        throw error("f_hat_step needs x in [a,b), got " + to_string(x));
    if (sign_of(x) == 0)
        return {x, 0, Mobius::identity()};
    S y = -(from_int<S>(1L, x) / x);
    Integer n = digit_ab(y, P);
    return {S(y - from_int<S>(n, x)), n, Mobius::Tpow(-n) * Mobius::S()};
}

enum class ExpansionStatus { Terminated, Periodic, Truncated };

struct Expansion {
    std::vector<Integer> digits;
    ExpansionStatus status = ExpansionStatus::Truncated;
    std::size_t period_start = 0;  // valid when Periodic: digits[period_start..] repeat

    std::vector<Integer> preperiod() const
    {
        return status == ExpansionStatus::Periodic ? std::vector<Integer>(digits.begin(), digits.begin() + period_start) : digits;
    }
    std::vector<Integer> period() const
    {
        return status == ExpansionStatus::Periodic ? std::vector<Integer>(digits.begin() + period_start, digits.end()) : std::vector<Integer>{};
    }
};

// Digits n0, n1, ... of x.  Exact backings detect eventual periodicity by a
// repeated remainder; floats stop when the remainder vanishes within tolerance.
template <Scalar S>
Expansion expand(const S& x, const Params<S>& P, std::size_t max_digits = 1000)
{
    Expansion e;
    std::map<S, std::size_t> seen;
    S cur = x;
    for (std::size_t i = 0; i < max_digits; ++i) {
        if constexpr (is_exact_v<S>) {
            auto [it, fresh] = seen.emplace(cur, i);
            if (!fresh) {
                e.status = ExpansionStatus::Periodic;
                e.period_start = it->second;
                return e;
            }
        }
        Integer n = digit_ab(cur, P);
        e.digits.push_back(n);
        S rem = cur - from_int<S>(n, cur);
        if (sign_of(rem) == 0) {
            e.status = ExpansionStatus::Terminated;
            return e;
        }
        cur = -(from_int<S>(1L, rem) / rem);
    }
    e.status = ExpansionStatus::Truncated;
    return e;
}

// Convergents p_k/q_k from p_{-2}=0, p_{-1}=1, q_{-2}=-1, q_{-1}=0.
inline std::vector<std::pair<Integer, Integer>> convergents(const std::vector<Integer>& digits)
{
    std::vector<std::pair<Integer, Integer>> out;
    Integer p2 = 0, p1 = 1, q2 = -1, q1 = 0;
    for (const Integer& n : digits) {
        Integer p = n * p1 - p2;
        Integer q = n * q1 - q2;
        out.emplace_back(p, q);
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
    }
    return out;
}

// T^{n0} S T^{n1} S ... T^{nk} S
inline Mobius cf_matrix(const std::vector<Integer>& digits)
{
    Mobius m;
    for (const Integer& n : digits)
        m = m * (Mobius::Tpow(n) * Mobius::S());
    return m;
}

inline ExtReal<Rational> evaluate_finite_cf(const std::vector<Integer>& digits)
{
    return cf_matrix(digits).apply(ExtReal<Rational>::infinity());
}

// Value of (preperiod, overline(period)).  A parabolic period has a single
// fixed point, which is still the limit of the truncations.
inline ExtReal<QuadSurd> evaluate_minus_cf(const std::vector<Integer>& preperiod, const std::vector<Integer>& period)
{
    Mobius pre = cf_matrix(preperiod);
    if (period.empty())
        return pre.apply(ExtReal<QuadSurd>::infinity());
    Mobius per = cf_matrix(period);
    FixedPoints fp = per.fixed_points();
    if (!fp.attracting)
        throw error("period matrix " + per.str() + " has no attracting fixed point");
    return pre.apply(*fp.attracting);
}

// Cylinder of x with digits (0, n1, ..., nk), n_i in {m, m+1}.
struct DigitInterval {
    Rational lo;             // (0, n1, ..., nk - 1)
    Rational hi;             // (0, n1, ..., nk)
    Rational length;         // 1 / (q_k (q_k - q_{k-1}))
    Rational union_next;     // length of the union of the two children
    Integer qk, qk1;
};

inline DigitInterval bounded_digit_interval(long m, const std::vector<Integer>& digits)
{
    if (m < 2)
        throw error("bounded digits need m >= 2");
    if (digits.empty())
        throw error("bounded_digit_interval needs at least one digit");
    for (const Integer& n : digits)
        if (n != m && n != m + 1)
            throw error("digit " + n.str() + " outside {m, m+1}");
    std::vector<Integer> full{0};
    full.insert(full.end(), digits.begin(), digits.end());
    auto conv = convergents(full);
    DigitInterval I;
    I.qk = conv.back().second;
    I.qk1 = conv[conv.size() - 2].second;
    std::vector<Integer> low = full;
    low.back() -= 1;
    I.lo = evaluate_finite_cf(low).value();
    I.hi = evaluate_finite_cf(full).value();
    I.length = Rational(Integer(1), I.qk * (I.qk - I.qk1));
    Integer u = (m + 1) * I.qk - I.qk1, v = (m - 1) * I.qk - I.qk1;
    I.union_next = Rational(Integer(2), u * v);
    return I;
}

}  // namespace abcf
