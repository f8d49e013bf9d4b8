#pragma once

#include "abcf/cf.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <thread>
#include <vector>

namespace abcf {

template <Scalar S>
struct Point2 {
    ExtReal<S> x;
    ExtReal<S> y;
};

template <Scalar S>
Gen rho_gen(const ExtReal<S>& y, const Params<S>& P)
{
    return f_gen(y, P);
}

// F(x,y) = (rho(y) x, rho(y) y)
template <Scalar S>
Point2<S> F_step(const Point2<S>& p, const Params<S>& P)
{
    Mobius m = Mobius::of(rho_gen(p.y, P));
    return {m.apply(p.x), m.apply(p.y)};
}

// ---------------------------------------------------------------------------
// Signed coordinates for boxes: unlike points, box sides need -inf and +inf.

template <Scalar C>
struct Coord {
    int inf = 0;  // -1, 0, +1
    C v{};

    static Coord neg_inf() { return {-1, C{}}; }
    static Coord pos_inf() { return {1, C{}}; }
    Coord() = default;
    Coord(int i, C x) : inf(i), v(std::move(x)) {}
    Coord(const C& x) : inf(0), v(x) {}

    bool finite() const { return inf == 0; }
    double to_double() const
    {
        if (inf)
            return inf * std::numeric_limits<double>::infinity();
        return abcf::to_double(v);
    }
    std::string str() const { return inf ? (inf < 0 ? "-inf" : "inf") : to_string(v); }

    friend int cmp(const Coord& a, const Coord& b)
    {
        if (a.inf || b.inf)
            return a.inf == b.inf ? 0 : (a.inf < b.inf ? -1 : 1);
        if (a.v == b.v)
            return 0;
        return a.v < b.v ? -1 : 1;
    }
    friend bool operator<(const Coord& a, const Coord& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Coord& a, const Coord& b) { return cmp(a, b) <= 0; }
    friend bool operator==(const Coord& a, const Coord& b) { return cmp(a, b) == 0; }
};

// Closed box [x0,x1] x [y0,y1].
template <Scalar C>
struct Box {
    Coord<C> x0, x1, y0, y1;

    bool degenerate() const { return !(x0 < x1) || !(y0 < y1); }
    bool contains(const ExtReal<C>& x, const ExtReal<C>& y) const
    {
        return in(x0, x1, x) && in(y0, y1, y);
    }

private:
    // infinity matches either infinite end
    static bool in(const Coord<C>& lo, const Coord<C>& hi, const ExtReal<C>& t)
    {
        if (t.is_inf())
            return lo.inf == -1 || hi.inf == 1;
        Coord<C> c(t.value());
        return lo <= c && c <= hi;
    }
};

template <Scalar C>
Coord<C> shift(const Coord<C>& c, long k)
{
    if (!c.finite())
        return c;
    return Coord<C>(c.v + from_int<C>(k, c.v));
}

// Image of [lo,hi] under S when 0 is not interior.  Returns false if it is.
template <Scalar C>
bool s_interval(const Coord<C>& lo, const Coord<C>& hi, Coord<C>& out_lo, Coord<C>& out_hi)
{
    auto left = [](const Coord<C>& c) -> Coord<C> {
        if (c.inf)
            return Coord<C>(C(0L));
        if (sign_of(c.v) == 0)
            return Coord<C>::neg_inf();
        return Coord<C>(-(from_int<C>(1L, c.v) / c.v));
    };
    auto right = [](const Coord<C>& c) -> Coord<C> {
        if (c.inf)
            return Coord<C>(C(0L));
        if (sign_of(c.v) == 0)
            return Coord<C>::pos_inf();
        return Coord<C>(-(from_int<C>(1L, c.v) / c.v));
    };
    Coord<C> zero(C(0L));
    if (lo < zero && zero < hi)
        return false;
    out_lo = left(lo);
    out_hi = right(hi);
    return true;
}

// Image of a box under a generator, split at the pole of S where needed.
template <Scalar C>
std::vector<Box<C>> map_box(Gen g, const Box<C>& b)
{
    if (g == Gen::T)
        return {{shift(b.x0, 1), shift(b.x1, 1), shift(b.y0, 1), shift(b.y1, 1)}};
    if (g == Gen::Tinv)
        return {{shift(b.x0, -1), shift(b.x1, -1), shift(b.y0, -1), shift(b.y1, -1)}};
    Coord<C> zero(C(0L));
    auto split = [&](const Coord<C>& lo, const Coord<C>& hi) {
        std::vector<std::pair<Coord<C>, Coord<C>>> parts;
        if (lo < zero && zero < hi) {
            parts.emplace_back(lo, zero);
            parts.emplace_back(zero, hi);
        } else {
            parts.emplace_back(lo, hi);
        }
        return parts;
    };
    std::vector<Box<C>> out;
    for (auto& [xl, xh] : split(b.x0, b.x1))
        for (auto& [yl, yh] : split(b.y0, b.y1)) {
            Box<C> r;
            s_interval(xl, xh, r.x0, r.x1);
            s_interval(yl, yh, r.y0, r.y1);
            out.push_back(r);
        }
    return out;
}

// Measure of a box for du dw / (w - u)^2.  The box must stay off the diagonal;
// a box reaching the corner (-inf, +inf) or (+inf, -inf) has infinite measure.
inline long double box_measure(double x0, double x1, double y0, double y1)
{
    const double inf = std::numeric_limits<double>::infinity();
    if ((x0 == -inf && y1 == inf) || (x1 == inf && y0 == -inf))
        return std::numeric_limits<long double>::infinity();
    // ln |(y1-x1)(y0-x0) / ((y0-x1)(y1-x0))|; terms with an infinite side cancel in pairs
    auto lg = [](double y, double x) -> long double {
        if (std::isinf(y) || std::isinf(x))
            return 0.0L;
        return std::log(std::fabs(static_cast<long double>(y) - x));
    };
    return std::fabs(lg(y1, x1) + lg(y0, x0) - lg(y0, x1) - lg(y1, x0));
}

template <Scalar C>
long double box_measure(const Box<C>& b)
{
    return box_measure(b.x0.to_double(), b.x1.to_double(), b.y0.to_double(), b.y1.to_double());
}

// ---------------------------------------------------------------------------
// Trapping region: a finite union of closed boxes, split into upper and lower parts.

template <Scalar S>
struct TrapRegion {
    std::vector<Box<S>> upper;
    std::vector<Box<S>> lower;

    bool contains(const Point2<S>& p) const
    {
        for (const auto& b : upper)
            if (b.contains(p.x, p.y))
                return true;
        for (const auto& b : lower)
            if (b.contains(p.x, p.y))
                return true;
        return false;
    }
};

template <Scalar S>
TrapRegion<S> trapping_region(const Params<S>& P)
{
    using Cd = Coord<S>;
    const S& a = P.a;
    const S& b = P.b;
    S zero = P.zero(), one = P.one();
    Cd ninf = Cd::neg_inf(), pinf = Cd::pos_inf();
    Cd m1(-one), z(zero), p1(one);
    TrapRegion<S> R;
    if (P.a_zero()) {
        R.lower = {{m1, z, ninf, m1}, {z, p1, ninf, z}, {p1, pinf, ninf, p1}};
        return R;
    }
    if (P.b_zero()) {
        R.upper = {{ninf, m1, m1, pinf}, {m1, z, z, pinf}, {z, p1, p1, pinf}};
        return R;
    }
    if (P.is_minus_one_one()) {
        R.upper = {{ninf, m1, z, pinf}, {m1, z, p1, pinf}};
        R.lower = {{z, p1, ninf, m1}, {p1, pinf, ninf, z}};
        return R;
    }
    if (!(b < one)) {
        R.upper = {{ninf, m1, Cd(b - one), pinf}, {m1, z, Cd(-(one / a)), pinf}};
    } else {
        S c = std::min(S(-(b / (b - one))), S(-(one / a)));
        R.upper = {{ninf, m1, Cd(b - one), pinf}, {m1, z, Cd(c), pinf}, {z, p1, Cd(-(one / (b - one))), pinf}};
    }
    if (!(-one < a)) {
        R.lower = {{z, p1, ninf, Cd(-(one / b))}, {p1, pinf, ninf, Cd(a + one)}};
    } else {
        S c = std::max(S(a / (a + one)), S(-(one / b)));
        R.lower = {{m1, z, ninf, Cd(-(one / (a + one)))}, {z, p1, ninf, Cd(c)}, {p1, pinf, ninf, Cd(a + one)}};
    }
    return R;
}

// Least n <= cap with F^n(p) in the trapping region.
template <Scalar S>
std::optional<std::size_t> time_to_trap(Point2<S> p, const Params<S>& P, std::size_t cap)
{
    if (p.x == p.y)
        throw error("time_to_trap needs an off-diagonal point, got x = y = " + p.x.str());
    TrapRegion<S> R = trapping_region(P);
    for (std::size_t n = 0; n <= cap; ++n) {
        if (R.contains(p))
            return n;
        p = F_step(p, P);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Point clouds from forward iteration of F in double precision.

struct Cloud {
    std::vector<std::array<double, 2>> pts;  // infinite coordinates stored as +inf
};

namespace detail {

inline double unit_double(std::mt19937_64& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline void F_double(double& x, double& y, double a, double b)
{
    auto s = [](double t) { return t == 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / t; };
    if (std::isinf(y)) {
        x -= 1.0;
    } else if (y < a) {
        x += 1.0;
        y += 1.0;
    } else if (y < b) {
        x = std::isinf(x) ? 0.0 : s(x);
        y = s(y);
    } else {
        x -= 1.0;
        y -= 1.0;
    }
    if (std::isinf(x))
        x = std::numeric_limits<double>::infinity();
    if (std::isinf(y))
        y = std::numeric_limits<double>::infinity();
}

inline constexpr std::size_t cloud_chunk = 4096;

}  // namespace detail

// Random starts in [-20,20]^2 with |x-y| > 1e-3, each pushed burn_in steps.
// Points are generated in fixed-size chunks with their own seed, so the result
// does not depend on the number of worker threads.
template <Scalar S>
Cloud sample_attractor(const Params<S>& P, std::size_t n_points, std::size_t burn_in, std::uint64_t seed, unsigned threads = 0)
{
    const double a = to_double(P.a), b = to_double(P.b);
    Cloud c;
    c.pts.resize(n_points);
    std::size_t chunks = (n_points + detail::cloud_chunk - 1) / detail::cloud_chunk;
    auto work = [&](std::size_t chunk) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(chunk)};
        std::mt19937_64 g(sq);
        std::size_t lo = chunk * detail::cloud_chunk, hi = std::min(n_points, lo + detail::cloud_chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            double x, y;
            do {
                x = -20.0 + 40.0 * detail::unit_double(g);
                y = -20.0 + 40.0 * detail::unit_double(g);
            } while (std::fabs(x - y) <= 1e-3);
            for (std::size_t k = 0; k < burn_in; ++k)
                detail::F_double(x, y, a, b);
            c.pts[i] = {x, y};
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
    if (threads <= 1) {
        for (std::size_t k = 0; k < chunks; ++k)
            work(k);
        return c;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < chunks; k += threads)
                work(k);
        });
    for (auto& th : pool)
        th.join();
    return c;
}

}  // namespace abcf
