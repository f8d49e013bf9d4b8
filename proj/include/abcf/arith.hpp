#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abcf {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct field_mismatch : error {
    using error::error;
};

// ---------------------------------------------------------------------------
// integer helpers

inline Integer floor_div(const Integer& n, const Integer& d)
{
    Integer q, r;
    boost::multiprecision::divide_qr(n, d, q, r);
    if (r != 0 && ((r < 0) != (d < 0)))
        --q;
    return q;
}

inline Integer isqrt(const Integer& n)
{
    if (n < 0)
        throw error("isqrt of negative integer");
    return boost::multiprecision::sqrt(n);
}

inline bool is_square(const Integer& n, Integer* root = nullptr)
{
    if (n < 0)
        return false;
    Integer s = isqrt(n);
    if (root)
        *root = s;
    return s * s == n;
}

inline Integer floor_of(const Rational& x)
{
    return floor_div(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x));
}

// Rational with the smallest denominator in the open interval (lo, hi).
// Runs the continued fraction expansions of both ends on integer pairs so no
// intermediate value is reduced.
inline Rational simplest_between(const Rational& lo, const Rational& hi)
{
    if (!(lo < hi))
        throw error("simplest_between needs lo < hi");
    Integer shift = floor_of(lo);
    Integer p = boost::multiprecision::numerator(lo) - shift * boost::multiprecision::denominator(lo);
    Integer q = boost::multiprecision::denominator(lo);
    Integer r = boost::multiprecision::numerator(hi) - shift * boost::multiprecision::denominator(hi);
    Integer s = boost::multiprecision::denominator(hi);
    // Invariant: 0 <= p/q < r/s, s == 0 meaning +inf.
    std::vector<Integer> terms;
    for (;;) {
        Integer a = p / q;  // floor, p >= 0
        Integer c = a + 1;
        if (s == 0 || c * s < r) {
            terms.push_back(c);
            break;
        }
        terms.push_back(a);
        // (lo, hi) -> (1/(hi - a), 1/(lo - a))
        Integer np = s, nq = r - a * s;
        Integer nr = q, ns = p - a * q;
        p = std::move(np), q = std::move(nq), r = std::move(nr), s = std::move(ns);
    }
    Integer h1 = 1, h0 = 0, k1 = 0, k0 = 1;
    for (const Integer& t : terms) {
        Integer h = t * h1 + h0, k = t * k1 + k0;
        h0 = std::move(h1), h1 = std::move(h), k0 = std::move(k1), k1 = std::move(k);
    }
    return Rational(h1, k1) + shift;
}

// n = s^2 * d with d squarefree as far as trial division up to `bound` can tell.
// Once every prime below cbrt(n) is removed the cofactor has at most two prime
// factors, so the result is exact whenever cbrt(n) <= bound.
inline std::pair<Integer, Integer> squarefree_split(Integer n, std::uint64_t bound = 2000000)
{
    if (n <= 0)
        throw error("squarefree_split needs a positive integer");
    Integer s = 1;
    auto strip = [&](std::uint64_t p) {
        Integer pp = Integer(p) * p;
        while (n % pp == 0) {
            n /= pp;
            s *= p;
        }
        while (n % p == 0 && (n / p) % p == 0) {
            n /= pp;
            s *= p;
        }
    };
    strip(2);
    for (std::uint64_t p = 3; p <= bound; p += 2) {
        if (Integer(p) * p * p > n)
            break;
        if (n % p == 0)
            strip(p);
    }
    Integer r;
    if (n > 1 && is_square(n, &r)) {
        s *= r;
        n = 1;
    }
    return {s, n};
}

// ---------------------------------------------------------------------------
// Quadratic surd (p + q*sqrt(d)) / r.  r > 0, gcd(p,q,r) = 1, d = 0 iff q = 0.

class QuadSurd {
public:
    QuadSurd() : p_(0), q_(0), r_(1), d_(0) {}
    QuadSurd(long v) : p_(v), q_(0), r_(1), d_(0) {}
    QuadSurd(const Integer& v) : p_(v), q_(0), r_(1), d_(0) {}
    QuadSurd(const Rational& v)
        : p_(boost::multiprecision::numerator(v)), q_(0), r_(boost::multiprecision::denominator(v)), d_(0) {}

    QuadSurd(Integer p, Integer q, Integer r, Integer d) : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), d_(std::move(d))
    {
        if (r_ == 0)
            throw error("surd with zero denominator");
        if (q_ != 0) {
            if (d_ <= 0)
                throw error("surd radicand must be positive");
            auto [s, dd] = squarefree_split(d_);
            q_ *= s;
            d_ = dd;
            if (d_ == 1) {
                p_ += q_;
                q_ = 0;
            }
        }
        if (q_ == 0)
            d_ = 0;
        normalize();
    }

    static QuadSurd sqrt_of(const Integer& n) { return QuadSurd(0, 1, 1, n); }

    const Integer& p() const { return p_; }
    const Integer& q() const { return q_; }
    const Integer& r() const { return r_; }
    const Integer& d() const { return d_; }
    bool is_rational() const { return q_ == 0; }
    Rational to_rational() const
    {
        if (!is_rational())
            throw error("surd is irrational");
        return Rational(p_, r_);
    }

    int sign() const
    {
        int sp = p_.sign(), sq = q_.sign();
        if (sq == 0)
            return sp;
        if (sp == 0)
            return sq;
        if (sp == sq)
            return sp;
        // opposite signs: compare p^2 with q^2 d
        Integer lhs = p_ * p_, rhs = q_ * q_ * d_;
        int c = lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
        return sp > 0 ? c : -c;
    }

    QuadSurd operator-() const
    {
        QuadSurd t = *this;
        t.p_ = -t.p_;
        t.q_ = -t.q_;
        return t;
    }

    friend QuadSurd operator+(const QuadSurd& x, const QuadSurd& y)
    {
        auto [u, v] = unify(x, y);
        return QuadSurd(u.p_ * v.r_ + v.p_ * u.r_, u.q_ * v.r_ + v.q_ * u.r_, u.r_ * v.r_, field_of(u, v), raw_tag{});
    }
    friend QuadSurd operator-(const QuadSurd& x, const QuadSurd& y) { return x + (-y); }
    friend QuadSurd operator*(const QuadSurd& x, const QuadSurd& y)
    {
        auto [u, v] = unify(x, y);
        Integer d = field_of(u, v);
        return QuadSurd(u.p_ * v.p_ + u.q_ * v.q_ * d, u.p_ * v.q_ + u.q_ * v.p_, u.r_ * v.r_, d, raw_tag{});
    }
    QuadSurd inverse() const
    {
        // r / (p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
        Integer den = p_ * p_ - q_ * q_ * d_;
        if (den == 0)
            throw error("division by zero surd");
        return QuadSurd(r_ * p_, -r_ * q_, den, d_, raw_tag{});
    }
    friend QuadSurd operator/(const QuadSurd& x, const QuadSurd& y) { return x * y.inverse(); }

    QuadSurd& operator+=(const QuadSurd& o) { return *this = *this + o; }
    QuadSurd& operator-=(const QuadSurd& o) { return *this = *this - o; }
    QuadSurd& operator*=(const QuadSurd& o) { return *this = *this * o; }
    QuadSurd& operator/=(const QuadSurd& o) { return *this = *this / o; }

    friend bool operator==(const QuadSurd& x, const QuadSurd& y)
    {
        if (x.d_ == y.d_ || x.q_ == 0 || y.q_ == 0)
            return x.p_ == y.p_ && x.q_ == y.q_ && x.r_ == y.r_ && (x.q_ == 0 || x.d_ == y.d_);
        return compare(x, y) == 0;
    }
    friend std::strong_ordering operator<=>(const QuadSurd& x, const QuadSurd& y)
    {
        int s = compare(x, y);
        return s < 0 ? std::strong_ordering::less : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    // Exact comparison, also across unrelated quadratic fields.
    static int compare(const QuadSurd& x, const QuadSurd& y)
    {
        if (x.q_ == 0 || y.q_ == 0 || x.d_ == y.d_)
            return (x - y).sign();
        Integer k;
        if (is_square(x.d_ * y.d_, &k))
            return (x - y).sign();
        // sign of A + B sqrt(d1) + C sqrt(d2)
        Integer A = x.p_ * y.r_ - y.p_ * x.r_;
        Integer B = x.q_ * y.r_;
        Integer C = -y.q_ * x.r_;
        int su = QuadSurd(A, B, 1, x.d_, raw_tag{}).sign();
        int sv = C.sign();
        if (su == 0 || sv == 0 || su == sv)
            return su != 0 ? su : sv;
        // |u| vs |v|: u^2 - v^2 = (A^2 + B^2 d1 - C^2 d2) + 2AB sqrt(d1)
        int diff = QuadSurd(A * A + B * B * x.d_ - C * C * y.d_, 2 * A * B, 1, x.d_, raw_tag{}).sign();
        return diff > 0 ? su : (diff < 0 ? sv : 0);
    }

    Integer floor() const
    {
        if (q_ == 0)
            return floor_div(p_, r_);
        // estimate from an integer square root, then correct exactly
        Integer n = q_ * q_ * d_;
        Integer t = isqrt(n);
        Integer num = q_ > 0 ? p_ + t : p_ - t;
        Integer c = floor_div(num, r_);
        while (*this < QuadSurd(c))
            --c;
        while (!(*this < QuadSurd(c + 1)))
            ++c;
        return c;
    }

    double to_double() const
    {
        // long double keeps a few extra bits for the cancellation in p + q sqrt d
        long double pv = p_.convert_to<long double>();
        long double qv = q_.convert_to<long double>();
        long double dv = d_.convert_to<long double>();
        long double rv = r_.convert_to<long double>();
        if (!std::isfinite(static_cast<double>(pv)) || !std::isfinite(static_cast<double>(rv))) {
            Rational lo(p_, r_);
            return lo.convert_to<double>() + (q_ == 0 ? 0.0 : static_cast<double>(qv * std::sqrt(dv) / rv));
        }
        return static_cast<double>((pv + qv * std::sqrt(dv)) / rv);
    }

    std::string str() const
    {
        std::ostringstream os;
        if (q_ == 0) {
            os << p_;
            if (r_ != 1)
                os << '/' << r_;
            return os.str();
        }
        os << '(' << p_ << (q_ < 0 ? "-" : "+") << abs(q_) << "*sqrt(" << d_ << "))/" << r_;
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadSurd& x) { return os << x.str(); }

private:
    struct raw_tag {};
    QuadSurd(Integer p, Integer q, Integer r, Integer d, raw_tag) : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), d_(std::move(d))
    {
        if (r_ == 0)
            throw error("surd with zero denominator");
        if (q_ == 0)
            d_ = 0;
        normalize();
    }

    void normalize()
    {
        if (r_ < 0) {
            r_ = -r_;
            p_ = -p_;
            q_ = -q_;
        }
        Integer g = gcd(gcd(abs(p_), abs(q_)), r_);
        if (g > 1) {
            p_ /= g;
            q_ /= g;
            r_ /= g;
        }
    }

    static Integer field_of(const QuadSurd& u, const QuadSurd& v) { return u.q_ != 0 ? u.d_ : v.d_; }

    // Rewrite y over x's radicand when the two fields coincide.
    static std::pair<QuadSurd, QuadSurd> unify(const QuadSurd& x, const QuadSurd& y)
    {
        if (x.q_ == 0 || y.q_ == 0 || x.d_ == y.d_)
            return {x, y};
        Integer k;
        if (!is_square(x.d_ * y.d_, &k))
            throw field_mismatch("surds from different quadratic fields: sqrt(" + x.d_.str() + ") and sqrt(" + y.d_.str() + ")");
        // sqrt(dy) = k / dx * sqrt(dx)
        return {x, QuadSurd(y.p_ * x.d_, y.q_ * k, y.r_ * x.d_, x.d_, raw_tag{})};
    }

    Integer p_, q_, r_, d_;
};

// ---------------------------------------------------------------------------
// Floating approximation carrying its comparison tolerance.

inline constexpr double default_epsilon = 1e-12;

struct Float {
    double v = 0.0;
    double eps = 0.0;  // 0 means "inherit"; resolved to default_epsilon when compared

    Float() = default;
    Float(double x, double e = 0.0) : v(x), eps(e) {}
    Float(long x) : v(static_cast<double>(x)) {}
    Float(int x) : v(static_cast<double>(x)) {}
    explicit Float(const Integer& x) : v(x.convert_to<double>()) {}
    explicit Float(const Rational& x) : v(x.convert_to<double>()) {}

    double tol_with(const Float& o) const
    {
        double e = std::max(eps, o.eps);
        if (e == 0.0)
            e = default_epsilon;
        return e * std::max({1.0, std::fabs(v), std::fabs(o.v)});
    }

    Float operator-() const { return {-v, eps}; }
    friend Float operator+(const Float& x, const Float& y) { return {x.v + y.v, std::max(x.eps, y.eps)}; }
    friend Float operator-(const Float& x, const Float& y) { return {x.v - y.v, std::max(x.eps, y.eps)}; }
    friend Float operator*(const Float& x, const Float& y) { return {x.v * y.v, std::max(x.eps, y.eps)}; }
    friend Float operator/(const Float& x, const Float& y) { return {x.v / y.v, std::max(x.eps, y.eps)}; }
    Float& operator+=(const Float& o) { return *this = *this + o; }
    Float& operator-=(const Float& o) { return *this = *this - o; }
    Float& operator*=(const Float& o) { return *this = *this * o; }
    Float& operator/=(const Float& o) { return *this = *this / o; }

    friend bool operator==(const Float& x, const Float& y)
    {
        if (std::isinf(x.v) || std::isinf(y.v))
            return x.v == y.v;
        return std::fabs(x.v - y.v) <= x.tol_with(y);
    }
    friend std::partial_ordering operator<=>(const Float& x, const Float& y)
    {
        if (x == y)
            return std::partial_ordering::equivalent;
        return x.v < y.v ? std::partial_ordering::less : std::partial_ordering::greater;
    }

    int sign() const { return *this == Float(0.0, eps) ? 0 : (v < 0 ? -1 : 1); }

    Integer floor() const
    {
        double k = std::round(v);
        if (std::fabs(v - k) <= tol_with(Float(k)))
            return Integer(static_cast<long long>(k));
        return Integer(static_cast<long long>(std::floor(v)));
    }

    double to_double() const { return v; }
    std::string str() const
    {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const Float& x) { return os << x.str(); }
};

// ---------------------------------------------------------------------------
// uniform interface over the three backings

inline int sign_of(const Rational& x) { return x.sign(); }
inline int sign_of(const QuadSurd& x) { return x.sign(); }
inline int sign_of(const Float& x) { return x.sign(); }

inline Integer floor_int(const Rational& x) { return floor_of(x); }
inline Integer floor_int(const QuadSurd& x) { return x.floor(); }
inline Integer floor_int(const Float& x) { return x.floor(); }

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(const QuadSurd& x) { return x.to_double(); }
inline double to_double(const Float& x) { return x.v; }

inline std::string to_string(const Rational& x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}
inline std::string to_string(const QuadSurd& x) { return x.str(); }
inline std::string to_string(const Float& x) { return x.str(); }

template <class S>
concept Scalar = std::same_as<S, Rational> || std::same_as<S, QuadSurd> || std::same_as<S, Float>;

template <Scalar S>
inline constexpr bool is_exact_v = !std::same_as<S, Float>;

// Embed an integer with the tolerance of a reference value (floats only).
template <Scalar S>
S from_int(const Integer& n, const S& like)
{
    if constexpr (std::same_as<S, Float>)
        return Float(n.convert_to<double>(), like.eps);
    else
        return S(n);
}

template <Scalar S>
S from_int(long n, const S& like)
{
    return from_int<S>(Integer(n), like);
}

// Coordinate type able to hold fixed points of integer Mobius maps.
template <Scalar S>
struct coord_of {
    using type = QuadSurd;
};
template <>
struct coord_of<Float> {
    using type = Float;
};
template <Scalar S>
using coord_t = typename coord_of<S>::type;

template <Scalar S>
coord_t<S> to_coord(const S& x)
{
    if constexpr (std::same_as<S, Rational>)
        return QuadSurd(x);
    else
        return x;
}

template <Scalar C>
C coord_from_surd(const QuadSurd& x, const C& like)
{
    if constexpr (std::same_as<C, Float>)
        return Float(x.to_double(), like.eps);
    else if constexpr (std::same_as<C, Rational>)
        return x.to_rational();
    else
        return x;
}

// ---------------------------------------------------------------------------
// Projectively extended reals: one unsigned point at infinity.

template <Scalar S>
class ExtReal {
public:
    ExtReal() : v_(S(0L)) {}
    ExtReal(const S& v) : v_(v)
    {
        if constexpr (std::same_as<S, Float>) {
            if (std::isinf(v.v) || std::isnan(v.v))
                v_.reset();
        }
    }
    static ExtReal infinity()
    {
        ExtReal e;
        e.v_.reset();
        return e;
    }

    bool is_inf() const { return !v_.has_value(); }
    const S& value() const
    {
        if (!v_)
            throw error("value of infinity requested");
        return *v_;
    }

    friend bool operator==(const ExtReal& x, const ExtReal& y)
    {
        if (x.is_inf() || y.is_inf())
            return x.is_inf() && y.is_inf();
        return *x.v_ == *y.v_;
    }

    std::string str() const { return is_inf() ? std::string("inf") : to_string(*v_); }
    double to_double() const { return is_inf() ? std::numeric_limits<double>::infinity() : abcf::to_double(*v_); }

private:
    std::optional<S> v_;
};

// Total order used for containers: finite values by value, infinity last.
template <Scalar S>
struct ext_less {
    bool operator()(const ExtReal<S>& x, const ExtReal<S>& y) const
    {
        if (x.is_inf())
            return false;
        if (y.is_inf())
            return true;
        if constexpr (std::same_as<S, Float>)
            return x.value().v < y.value().v;
        else
            return x.value() < y.value();
    }
};

// ---------------------------------------------------------------------------
// parsing

// Decimal integer; the string constructor would read a leading 0 as octal.
inline Integer parse_integer(const std::string& text)
{
    std::size_t i = text.empty() || (text[0] != '-' && text[0] != '+') ? 0 : 1;
    std::string digits = text.substr(i);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw error("not an integer: '" + text + "'");
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    Integer n(digits);
    return i && text[0] == '-' ? Integer(-n) : n;
}

// Accepts "p/q", "p", decimals such as "-0.7" or "1e-3".
inline Rational parse_rational(const std::string& text)
{
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty())
        throw error("empty number");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Integer n = parse_integer(s.substr(0, slash)), d = parse_integer(s.substr(slash + 1));
            if (d == 0)
                throw error("zero denominator in '" + text + "'");
            return Rational(n, d);
        }
        std::string mant = s;
        long exp10 = 0;
        auto e = s.find_first_of("eE");
        if (e != std::string::npos) {
            mant = s.substr(0, e);
            exp10 = std::stol(s.substr(e + 1));
        }
        bool neg = !mant.empty() && (mant[0] == '-' || mant[0] == '+');
        bool minus = !mant.empty() && mant[0] == '-';
        if (neg)
            mant = mant.substr(1);
        auto dot = mant.find('.');
        std::string digits = mant;
        if (dot != std::string::npos) {
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
            exp10 -= static_cast<long>(mant.size() - dot - 1);
        }
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw error("not a number: '" + text + "'");
        Integer n = parse_integer(digits);
        if (minus)
            n = -n;
        Integer p10 = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(exp10)));
        return exp10 >= 0 ? Rational(n * p10) : Rational(n, p10);
    } catch (const std::runtime_error&) {
        throw error("not a number: '" + text + "'");
    }
}

// Accepts the output of QuadSurd::str(): "(p+q*sqrt(d))/r", "(p-q*sqrt(d))/r"
// or a plain rational.
inline QuadSurd parse_surd(const std::string& text)
{
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    auto sq = s.find("sqrt(");
    if (sq == std::string::npos)
        return QuadSurd(parse_rational(s));
    auto close = s.find(')', sq);
    auto outer = s.find(')', close + 1);
    if (s.empty() || s[0] != '(' || close == std::string::npos || outer == std::string::npos)
        throw error("malformed surd '" + text + "'");
    std::string inner = s.substr(1, outer - 1);  // p+q*sqrt(d)
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < inner.size(); ++i)
        if (inner[i] == '+' || inner[i] == '-') {
            split = i;
            break;
        }
    if (split == std::string::npos)
        throw error("malformed surd '" + text + "'");
    Integer p = parse_integer(inner.substr(0, split));
    std::string qpart = inner.substr(split);  // +q*sqrt(d)
    auto star = qpart.find("*sqrt(");
    Integer q = star == std::string::npos ? Integer(qpart[0] == '-' ? -1 : 1) : parse_integer(qpart.substr(0, star));
    auto lp = qpart.find("sqrt(") + 5;
    Integer d = parse_integer(qpart.substr(lp, qpart.find(')', lp) - lp));
    Integer r = 1;
    if (outer + 1 < s.size()) {
        if (s[outer + 1] != '/')
            throw error("malformed surd '" + text + "'");
        r = parse_integer(s.substr(outer + 2));
    }
    return QuadSurd(p, q, r, d);
}

}  // namespace abcf
