#pragma once

#include "abcf/cf.hpp"

#include <boost/multiprecision/integer.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace abcf {

using Digits = std::vector<long>;

// Closed interval with rational ends.
struct RatInterval {
    Rational lo, hi;

    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }
    friend RatInterval operator-(const RatInterval& x, const RatInterval& y) { return {x.lo - y.hi, x.hi - y.lo}; }
};

inline unsigned bit_length(const Integer& n)
{
    return n == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(abs(n))) + 1u;
}

// outer(x*) where x* is the attracting fixed point of a hyperbolic `period`.
// Rational enclosures come from integer square roots at adjustable precision,
// so values from unrelated quadratic fields compare without building surds.
class QuadPoint {
public:
    QuadPoint() = default;
    QuadPoint(Mobius outer, Mobius period) : outer_(std::move(outer)), period_(std::move(period))
    {
        if (period_.kind() != MobiusKind::Hyperbolic)
            throw error("period " + period_.str() + " is not hyperbolic");
        if (period_.r() == 0)
            throw error("period " + period_.str() + " fixes infinity");
        Integer t = period_.trace();
        disc_ = t * t - 4;
    }

    const Mobius& outer() const { return outer_; }
    const Mobius& period() const { return period_; }
    unsigned height_bits() const { return bit_length(disc_); }

    // Enclosure with sqrt(D) known to within 2^-bits.
    const RatInterval& enclosure(unsigned bits) const
    {
        if (bits <= bits_)
            return enc_;
        const Integer& p = period_.p();
        const Integer& s = period_.s();
        const Integer& r = period_.r();
        int sg = period_.trace().sign();
        Integer scaled = disc_ << (2 * bits);
        Integer root = isqrt(scaled);
        Integer den = Integer(1) << bits;
        Rational sl(root, den), sh(root * root == scaled ? root : root + 1, den);
        Rational x1 = (Rational(p - s) + sg * sl) / Rational(2 * r);
        Rational x2 = (Rational(p - s) + sg * sh) / Rational(2 * r);
        if (x2 < x1)
            std::swap(x1, x2);
        enc_ = map(x1, x2);
        bits_ = bits;
        return enc_;
    }

    QuadSurd exact() const
    {
        FixedPoints fp = period_.fixed_points();
        ExtReal<QuadSurd> v = outer_.apply(*fp.attracting);
        if (v.is_inf())
            throw error("point at infinity");
        return v.value();
    }

    double to_double() const
    {
        RatInterval e = enclosure(std::max(64u, height_bits()));
        return e.mid().convert_to<double>();
    }

    bool same_as(const QuadPoint& o) const { return outer_ == o.outer_ && period_ == o.period_; }

private:
    // Image of [x1,x2] under the increasing map `outer`, which must have no pole there.
    RatInterval map(const Rational& x1, const Rational& x2) const
    {
        auto den = [&](const Rational& x) { return Rational(outer_.r()) * x + Rational(outer_.s()); };
        Rational d1 = den(x1), d2 = den(x2);
        if (d1.sign() == 0 || d2.sign() == 0 || d1.sign() != d2.sign())
            throw error("enclosure meets a pole; raise precision");
        auto val = [&](const Rational& x, const Rational& d) { return (Rational(outer_.p()) * x + Rational(outer_.q())) / d; };
        return {val(x1, d1), val(x2, d2)};
    }

    Mobius outer_, period_;
    Integer disc_ = 0;
    mutable RatInterval enc_;
    mutable unsigned bits_ = 0;
};

// Sign of x - y.  Refines enclosures until they separate; identical quadratics
// that stay undecided are settled exactly.
inline int compare(const QuadPoint& x, const QuadPoint& y)
{
    if (x.same_as(y))
        return 0;
    unsigned start = 2 * std::max(x.height_bits(), y.height_bits()) + 64;
    for (unsigned bits = start; bits <= 16 * start; bits *= 2) {
        const RatInterval& ex = x.enclosure(bits);
        const RatInterval& ey = y.enclosure(bits);
        if (ex.hi < ey.lo)
            return -1;
        if (ey.hi < ex.lo)
            return 1;
    }
    return QuadSurd::compare(x.exact(), y.exact());
}

// ---------------------------------------------------------------------------
// "-" continued fractions with positive digits: (0, s1, s2, ...) = -1/(s1 - 1/(s2 - ...)).

inline Mobius digits_matrix(const Digits& d, long sign = 1)
{
    Mobius m;
    for (long n : d)
        m = m * (Mobius::Tpow(Integer(sign * n)) * Mobius::S());
    return m;
}

// (0, pre, overline(per))
inline QuadPoint minus_cf_point(const Digits& pre, const Digits& per)
{
    return QuadPoint(Mobius::S() * digits_matrix(pre), digits_matrix(per));
}

// Lexicographic order of digit sequences; a proper prefix precedes its extensions.
inline bool lex_less(const Digits& x, const Digits& y)
{
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] != y[i])
            return x[i] < y[i];
    return x.size() < y.size();
}

// ---------------------------------------------------------------------------
// Triangles T^{n1,...,nk}: the b-range of their trace on b = a + 1.

struct TriangleRegion {
    long m = 3;
    Digits digits;
    QuadPoint lower;  // largest lower bound over all prefixes
    QuadPoint upper;  // smallest vertex over all prefixes
    std::size_t lower_prefix = 0, upper_prefix = 0;
    bool empty = false;
};

inline void check_alphabet(long m, const Digits& seq)
{
    if (m < 2)
        throw error("digit bound m must be at least 2");
    if (seq.empty() || seq.front() != m)
        throw error("sequence must start with m = " + std::to_string(m));
    for (long n : seq)
        if (n != m && n != m + 1)
            throw error("digit " + std::to_string(n) + " outside {" + std::to_string(m) + ", " + std::to_string(m + 1) + "}");
}

// Feeds digits one at a time.  The vertex of prefix j solves f^sigma(b) = b,
// its lower bound f^sigma(b) = b/(b+1), with f^sigma = T^{nj} S ... T^{n1} S.
class TriangleSweep {
public:
    explicit TriangleSweep(long m) : m_(m) {}

    void push(long n)
    {
        if (n != m_ && n != m_ + 1)
            throw error("digit " + std::to_string(n) + " outside {m, m+1}");
        if (digits_.empty() && n != m_)
            throw error("sequence must start with m");
        digits_.push_back(n);
        Mobius step = Mobius::Tpow(Integer(-n)) * Mobius::S();
        P_ = P_ * step;
        if (digits_.size() >= 2)
            R_ = R_ * step;
        else
            head_ = Mobius::S() * step;
        QuadPoint up(Mobius::S(), P_);
        QuadPoint lo(head_, R_ * Mobius::Tpow(Integer(-(m_ + 1))) * Mobius::S());
        std::size_t j = digits_.size();
        if (j == 1 || compare(up, upper_) < 0) {
            upper_ = up;
            upper_at_ = j;
        }
        if (j == 1 || compare(lower_, lo) < 0) {
            lower_ = lo;
            lower_at_ = j;
        }
    }

    TriangleRegion region() const
    {
        TriangleRegion t;
        t.m = m_;
        t.digits = digits_;
        t.lower = lower_;
        t.upper = upper_;
        t.lower_prefix = lower_at_;
        t.upper_prefix = upper_at_;
        t.empty = digits_.empty() || compare(lower_, upper_) >= 0;
        return t;
    }

    const Digits& digits() const { return digits_; }

private:
    long m_;
    Digits digits_;
    Mobius P_, R_, head_;
    QuadPoint lower_, upper_;
    std::size_t lower_at_ = 0, upper_at_ = 0;
};

inline TriangleRegion triangle_region(long m, const Digits& seq)
{
    check_alphabet(m, seq);
    TriangleSweep sw(m);
    for (long n : seq)
        sw.push(n);
    return sw.region();
}

// ---------------------------------------------------------------------------
// Block substitution

enum class SubCase { One = 1, Two = 2 };

struct PlanStep {
    SubCase c;
    long mult;
};

struct Plan {
    long m = 3;
    std::vector<PlanStep> steps;

    std::string str() const
    {
        std::string s = "m=" + std::to_string(m) + ";";
        for (std::size_t i = 0; i < steps.size(); ++i)
            s += (i ? "," : "") + std::to_string(static_cast<int>(steps[i].c)) + "x" + std::to_string(steps[i].mult);
        return s;
    }
};

// "m=3;1x2,1x2,2x1": substitution case times multiplicity.
inline Plan parse_plan(const std::string& text)
{
    Plan p;
    std::string body = text;
    auto semi = text.find(';');
    if (semi != std::string::npos) {
        std::string head = text.substr(0, semi);
        if (head.rfind("m=", 0) != 0)
            throw error("plan must start with m=<digit>: '" + text + "'");
        p.m = std::stol(head.substr(2));
        body = text.substr(semi + 1);
    }
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        auto x = item.find('x');
        if (x == std::string::npos)
            throw error("plan step '" + item + "' is not of the form <case>x<multiplicity>");
        long c = std::stol(item.substr(0, x));
        long mult = std::stol(item.substr(x + 1));
        if (c != 1 && c != 2)
            throw error("plan case must be 1 or 2, got " + std::to_string(c));
        p.steps.push_back({static_cast<SubCase>(c), mult});
    }
    return p;
}

struct Scheme {
    long m = 3;
    int generation = 0;
    Digits A, B;                       // A^(n), B^(n)
    Digits prevA, prevB;               // A^(n-1), B^(n-1)
    std::optional<SubCase> last_case;  // rule that produced A^(n)
    Digits sigma;                      // starting block of A^(n), empty at generation 0

    static Scheme start(long m)
    {
        Scheme s;
        s.m = m;
        s.A = {m};
        s.B = {m + 1};
        return s;
    }
};

inline Digits repeat_blocks(const Digits& x, long times)
{
    Digits out;
    for (long i = 0; i < times; ++i)
        out.insert(out.end(), x.begin(), x.end());
    return out;
}

inline Digits concat(Digits x, const Digits& y)
{
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

inline Scheme substitution_step(const Scheme& s, SubCase c, long mult)
{
    if (c == SubCase::One && mult < 2)
        throw error("case 1 needs multiplicity >= 2, got " + std::to_string(mult));
    if (c == SubCase::Two && mult < 1)
        throw error("case 2 needs multiplicity >= 1, got " + std::to_string(mult));
    Scheme t;
    t.m = s.m;
    t.generation = s.generation + 1;
    t.prevA = s.A;
    t.prevB = s.B;
    t.last_case = c;
    if (c == SubCase::One) {
        t.A = concat(repeat_blocks(s.A, mult), s.B);
        t.B = concat(repeat_blocks(s.A, mult - 1), s.B);
    } else {
        t.A = concat(s.A, repeat_blocks(s.B, mult));
        t.B = concat(s.A, repeat_blocks(s.B, mult + 1));
    }
    if (s.generation == 0) {
        t.sigma = c == SubCase::One ? Digits(static_cast<std::size_t>(mult), s.m) : Digits{s.m};
    } else if (*s.last_case == SubCase::One) {
        t.sigma = c == SubCase::One ? concat(repeat_blocks(s.A, mult - 1), s.sigma) : s.sigma;
    } else {
        t.sigma = c == SubCase::One ? concat(repeat_blocks(s.A, mult), s.sigma) : concat(s.A, s.sigma);
    }
    return t;
}

inline Scheme unroll(const Plan& plan, std::size_t depth)
{
    if (depth > plan.steps.size())
        throw error("plan has " + std::to_string(plan.steps.size()) + " steps, depth " + std::to_string(depth) + " requested");
    Scheme s = Scheme::start(plan.m);
    for (std::size_t i = 0; i < depth; ++i)
        s = substitution_step(s, plan.steps[i].c, plan.steps[i].mult);
    return s;
}

// A^(depth): the digit prefix shared by every sequence built from the plan.
inline Digits admissible_prefix(const Plan& plan, std::size_t depth)
{
    return unroll(plan, depth).A;
}

// Length of the lower base of T^{A^(n)} from the closed form:
// (0, overline(B)) - (0, A, overline(B)) with the current blocks (A,B).
inline RatInterval base_length(const Scheme& s, unsigned bits = 0)
{
    if (s.generation == 0)
        throw error("base length is defined from generation 1 on");
    // Both cases use the generation n+1 blocks; f^A maps (0,A,overline B)
    // onto (0,overline B) only when A is the current block.
    QuadPoint hi = minus_cf_point({}, s.B), lo = minus_cf_point(s.A, s.B);
    if (bits == 0)
        bits = 2 * std::max(hi.height_bits(), lo.height_bits()) + 64;
    return hi.enclosure(bits) - lo.enclosure(bits);
}

struct GenerationRecord {
    int generation = 0;
    std::size_t prefix_length = 0;
    TriangleRegion triangle;  // of A^(n)
    RatInterval base;         // closed-form base length (generation >= 1)
    RatInterval b_range;      // certified [b_lower, b_upper]
    bool nested = true;       // contained in the previous generation's range
};

struct ExceptionalResult {
    Rational b;
    Rational width;  // certified bound on b_upper - b_lower
    Digits prefix;
    std::vector<GenerationRecord> generations;
};

// Runs the whole plan and returns the simplest rational inside the final
// enclosure, with a = b - 1.  Fails if the enclosure is not below `target_width`.
inline ExceptionalResult exceptional_b(const Plan& plan, const Rational& target_width)
{
    ExceptionalResult res;
    TriangleSweep sweep(plan.m);
    Scheme s = Scheme::start(plan.m);
    auto record = [&](const Scheme& sc) {
        for (std::size_t i = sweep.digits().size(); i < sc.A.size(); ++i)
            sweep.push(sc.A[i]);
        GenerationRecord g;
        g.generation = sc.generation;
        g.prefix_length = sc.A.size();
        g.triangle = sweep.region();
        if (g.triangle.empty)
            throw error("triangle of generation " + std::to_string(sc.generation) + " is empty");
        unsigned bits = 2 * std::max(g.triangle.lower.height_bits(), g.triangle.upper.height_bits()) + 64;
        g.b_range = {g.triangle.lower.enclosure(bits).lo, g.triangle.upper.enclosure(bits).hi};
        if (sc.generation > 0)
            g.base = base_length(sc);
        if (!res.generations.empty()) {
            const GenerationRecord& p = res.generations.back();
            g.nested = compare(p.triangle.lower, g.triangle.lower) <= 0 && compare(g.triangle.upper, p.triangle.upper) <= 0;
        }
        res.generations.push_back(std::move(g));
    };
    record(s);
    for (const PlanStep& st : plan.steps) {
        s = substitution_step(s, st.c, st.mult);
        record(s);
    }
    const GenerationRecord& last = res.generations.back();
    res.width = last.b_range.width();
    res.b = simplest_between(last.b_range.lo, last.b_range.hi);
    res.prefix = s.A;
    if (!(res.width < target_width))
        throw error("enclosure width " + std::to_string(res.width.convert_to<double>()) + " not below target after the whole plan");
    return res;
}

// The a-side exceptional set is the mirror image under (a,b) -> (-b,-a).
template <Scalar S>
Params<S> mirror(const Params<S>& P)
{
    return Params<S>(S(-P.b), S(-P.a));
}

}  // namespace abcf
