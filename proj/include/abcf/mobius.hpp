#pragma once

#include "abcf/arith.hpp"

#include <optional>
#include <string>
#include <vector>

namespace abcf {

enum class Gen : std::uint8_t { T, Tinv, S };

inline const char* gen_name(Gen g)
{
    switch (g) {
    case Gen::T:
        return "T";
    case Gen::Tinv:
        return "T^-1";
    case Gen::S:
        return "S";
    }
    return "?";
}

// Sequence of generators in the order they are applied.
using Word = std::vector<Gen>;

enum class MobiusKind { Identity, Elliptic, Parabolic, Hyperbolic };

struct FixedPoints {
    MobiusKind kind = MobiusKind::Identity;
    // hyperbolic: both set; parabolic: attracting holds the unique fixed point
    std::optional<ExtReal<QuadSurd>> attracting;
    std::optional<ExtReal<QuadSurd>> repelling;
};

// x -> (p x + q) / (r x + s) with integer entries and determinant 1.
class Mobius {
public:
    Mobius() : p_(1), q_(0), r_(0), s_(1) {}
    Mobius(Integer p, Integer q, Integer r, Integer s) : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), s_(std::move(s)) {}

    static Mobius identity() { return {}; }
    static Mobius T() { return {1, 1, 0, 1}; }
    static Mobius Tinv() { return {1, -1, 0, 1}; }
    static Mobius S() { return {0, -1, 1, 0}; }
    static Mobius Tpow(const Integer& n) { return {1, n, 0, 1}; }
    static Mobius of(Gen g)
    {
        switch (g) {
        case Gen::T:
            return T();
        case Gen::Tinv:
            return Tinv();
        case Gen::S:
            return S();
        }
        return {};
    }
    // The composite that applies w[0] first.
    static Mobius of(const Word& w)
    {
        Mobius m;
        for (Gen g : w)
            m = of(g) * m;
        return m;
    }

    const Integer& p() const { return p_; }
    const Integer& q() const { return q_; }
    const Integer& r() const { return r_; }
    const Integer& s() const { return s_; }

    friend Mobius operator*(const Mobius& a, const Mobius& b)
    {
        return {a.p_ * b.p_ + a.q_ * b.r_, a.p_ * b.q_ + a.q_ * b.s_, a.r_ * b.p_ + a.s_ * b.r_, a.r_ * b.q_ + a.s_ * b.s_};
    }
    Mobius& operator*=(const Mobius& o) { return *this = *this * o; }

    Mobius inverse() const { return {s_, -q_, -r_, p_}; }
    Integer trace() const { return p_ + s_; }
    Integer det() const { return p_ * s_ - q_ * r_; }

    // Equality in PSL(2,Z): M and -M act identically.
    bool psl_equal(const Mobius& o) const
    {
        return (p_ == o.p_ && q_ == o.q_ && r_ == o.r_ && s_ == o.s_) || (p_ == -o.p_ && q_ == -o.q_ && r_ == -o.r_ && s_ == -o.s_);
    }
    bool is_identity() const { return psl_equal(identity()); }

    template <Scalar X>
    ExtReal<X> apply(const ExtReal<X>& x) const
    {
        if (x.is_inf()) {
            if (r_ == 0)
                return ExtReal<X>::infinity();
            const X& like = X(0L);
            return ExtReal<X>(from_int<X>(p_, like) / from_int<X>(r_, like));
        }
        const X& v = x.value();
        X den = from_int<X>(r_, v) * v + from_int<X>(s_, v);
        if (sign_of(den) == 0)
            return ExtReal<X>::infinity();
        return ExtReal<X>((from_int<X>(p_, v) * v + from_int<X>(q_, v)) / den);
    }

    MobiusKind kind() const
    {
        if (is_identity())
            return MobiusKind::Identity;
        Integer t = abs(trace());
        if (t < 2)
            return MobiusKind::Elliptic;
        if (t == 2)
            return MobiusKind::Parabolic;
        return MobiusKind::Hyperbolic;
    }

    // Exact fixed points.  The attracting one of a hyperbolic map has |r x + s| > 1.
    FixedPoints fixed_points() const
    {
        FixedPoints fp;
        fp.kind = kind();
        if (fp.kind == MobiusKind::Identity || fp.kind == MobiusKind::Elliptic)
            return fp;
        if (r_ == 0) {
            // det 1 forces p = s = +-1: a translation, parabolic at infinity
            fp.attracting = ExtReal<QuadSurd>::infinity();
            return fp;
        }
        Integer D = trace() * trace() - 4;
        if (fp.kind == MobiusKind::Parabolic) {
            fp.attracting = ExtReal<QuadSurd>(QuadSurd(Rational(p_ - s_, 2 * r_)));
            return fp;
        }
        int sg = trace().sign();
        fp.attracting = ExtReal<QuadSurd>(QuadSurd(p_ - s_, Integer(sg), 2 * r_, D));
        fp.repelling = ExtReal<QuadSurd>(QuadSurd(p_ - s_, Integer(-sg), 2 * r_, D));
        return fp;
    }

    std::string str() const
    {
        return "[[" + p_.str() + "," + q_.str() + "],[" + r_.str() + "," + s_.str() + "]]";
    }

    friend bool operator==(const Mobius& a, const Mobius& b) { return a.p_ == b.p_ && a.q_ == b.q_ && a.r_ == b.r_ && a.s_ == b.s_; }

private:
    Integer p_, q_, r_, s_;
};

inline std::string word_string(const Word& w)
{
    // rightmost letter acts first, as in ordinary composition
    std::string out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        if (!out.empty())
            out += ' ';
        out += gen_name(*it);
    }
    return out.empty() ? std::string("Id") : out;
}

}  // namespace abcf
