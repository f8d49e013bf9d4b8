#pragma once

#include "abcf/natural_extension.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <thread>

namespace abcf {

// Simple case: 1 <= -1/a <= b+1 and a-1 <= -1/b <= -1.
template <Scalar S>
bool simple_case_applies(const Params<S>& P)
{
    if (P.a_zero() || P.b_zero())
        return false;
    S one = P.one();
    S ia = -(one / P.a), ib = -(one / P.b);
    return !(ia < one) && !(P.b + one < ia) && !(ib < P.a - one) && !(-one < ib);
}

struct HatBox {
    double x0, x1, y0, y1;
};

// Domain of the Gauss-type natural extension in the simple case, with the
// parameters held as doubles.
struct HatDomain {
    double a = 0, b = 0;
    std::array<HatBox, 4> boxes{};

    double C() const { return std::log((1 + b) * (1 - a)); }

    bool contains(double x, double y, double tol = 0) const
    {
        for (const HatBox& q : boxes)
            if (q.x0 - tol <= x && x <= q.x1 + tol && q.y0 - tol <= y && y <= q.y1 + tol)
                return true;
        return false;
    }
};

template <Scalar S>
HatDomain hat_domain(const Params<S>& P)
{
    if (!simple_case_applies(P))
        throw error("parameters " + P.str() + " are outside the simple case");
    HatDomain D;
    D.a = to_double(P.a);
    D.b = to_double(P.b);
    const double a = D.a, b = D.b;
    D.boxes = {{{a, 1 - 1 / b, -1, 0}, {1 - 1 / b, a + 1, -0.5, 0}, {b - 1, -1 / a - 1, 0, 0.5}, {-1 / a - 1, b, 0, 1}}};
    return D;
}

namespace detail {

// Digit n with z - n in [a, b).
inline double digit_double(double z, double a, double b)
{
    if (z < a)
        return std::floor(z - a);
    if (z < b)
        return 0;
    return std::floor(z - b) + 1;
}

}  // namespace detail

struct HatPoint {
    double x, y;
    bool terminal = false;  // x = 0: f-hat fixes 0 and the digit is undefined
};

inline HatPoint F_hat_step(double x, double y, double a, double b)
{
    if (x < a || !(x < b))
        throw error("F_hat_step needs x in [a,b)");
    if (x == 0)
        return {0, y, true};
    double z = -1 / x;
    double n = detail::digit_double(z, a, b);
    return {z - n, -1 / (y - n), false};
}

inline double f_hat_double(double x, double a, double b)
{
    if (x == 0)
        return 0;
    double z = -1 / x;
    return z - detail::digit_double(z, a, b);
}

// 2D density 1/(C (1+xy)^2) on the domain; 0 outside, with `inside` cleared.
inline double nu_density(double x, double y, const HatDomain& D, bool* inside = nullptr)
{
    bool in = D.contains(x, y);
    if (inside)
        *inside = in;
    if (!in)
        return 0;
    double t = 1 + x * y;
    return 1 / (D.C() * t * t);
}

inline double mu_density(double x, const HatDomain& D, bool* inside = nullptr)
{
    bool in = D.a <= x && x <= D.b;
    if (inside)
        *inside = in;
    if (!in)
        return 0;
    const auto& q = D.boxes;
    double s = 0;
    if (q[0].x0 < x && x < q[0].x1)
        s += 1 / (1 - x);
    if (q[1].x0 < x && x < q[1].x1)
        s += 1 / (2 - x);
    if (q[2].x0 < x && x < q[2].x1)
        s += 1 / (x + 2);
    if (q[3].x0 < x && x < q[3].x1)
        s += 1 / (x + 1);
    return s / D.C();
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline double gk(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    if (!(lo < hi))
        return 0;
    double err = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 30, tol, &err);
    if (!(err <= tol * std::max(1.0, std::fabs(v)))) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << lo << ", " << hi << "]: error estimate " << err;
        throw error(os.str());
    }
    return v;
}

// Antiderivative of log|x| vanishing at 0.
inline double xlogx(double x)
{
    return x == 0 ? 0.0 : x * std::log(std::fabs(x)) - x;
}

// The remainder x log|x| still has an unbounded derivative at 0, which
// Gauss-Kronrod resolves only to about 1e-10; tanh-sinh clusters nodes there.
inline double endpoint_singular(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    if (!(lo < hi))
        return 0;
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0;
    double v = ts.integrate(f, lo, hi, tol, &err);
    if (!(err <= tol * std::max(1.0, std::fabs(v)))) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << lo << ", " << hi << "]: error estimate " << err;
        throw error(os.str());
    }
    return v;
}

// Integral of log|x| g(x) over [lo, hi] for smooth g.  The singular part
// g(0) log|x| is integrated in closed form; the remainder is split at 0.
inline double log_weighted(const std::function<double(double)>& g, double lo, double hi, double tol)
{
    if (!(lo < hi))
        return 0;
    double g0 = g(0);
    auto rest = [&](double x) { return x == 0 ? 0.0 : std::log(std::fabs(x)) * (g(x) - g0); };
    double v = g0 * (xlogx(hi) - xlogx(lo));
    if (lo < 0 && 0 < hi)
        v += endpoint_singular(rest, lo, 0, tol) + endpoint_singular(rest, 0, hi, tol);
    else if (lo == 0 || hi == 0)
        v += endpoint_singular(rest, lo, hi, tol);
    else
        v += gk(rest, lo, hi, tol);
    return v;
}

}  // namespace detail

// Integral of 1/(1+xy)^2 over the domain (before normalization).
inline double nu_raw_mass(const HatDomain& D, double tol = 1e-12)
{
    double s = 0;
    for (const HatBox& q : D.boxes) {
        auto fiber = [&](double x) {
            auto g = [x](double y) {
                double t = 1 + x * y;
                return 1 / (t * t);
            };
            return detail::gk(g, q.y0, q.y1, tol);
        };
        s += detail::gk(fiber, q.x0, q.x1, tol);
    }
    return s;
}

inline double nu_mass(const HatDomain& D, double tol = 1e-12) { return nu_raw_mass(D, tol) / D.C(); }

inline double mu_mass(const HatDomain& D, double tol = 1e-12)
{
    std::array<std::function<double(double)>, 4> g = {[](double x) { return 1 / (1 - x); }, [](double x) { return 1 / (2 - x); },
                                                      [](double x) { return 1 / (x + 2); }, [](double x) { return 1 / (x + 1); }};
    double s = 0;
    for (int i = 0; i < 4; ++i)
        s += detail::gk(g[i], D.boxes[i].x0, D.boxes[i].x1, tol);
    return s / D.C();
}

// I(a,b): the sum of the four log-weighted integrals of the 1D density terms.
inline double log_integral(const HatDomain& D, double tol = 1e-12)
{
    std::array<std::function<double(double)>, 4> g = {[](double x) { return 1 / (1 - x); }, [](double x) { return 1 / (2 - x); },
                                                      [](double x) { return 1 / (x + 2); }, [](double x) { return 1 / (x + 1); }};
    double s = 0;
    for (int i = 0; i < 4; ++i)
        s += detail::log_weighted(g[i], D.boxes[i].x0, D.boxes[i].x1, tol);
    return s;
}

inline double entropy_rokhlin(const HatDomain& D, double tol = 1e-12)
{
    return -2 * log_integral(D, tol) / D.C();
}

template <Scalar S>
double entropy_closed(const Params<S>& P)
{
    double a = to_double(P.a), b = to_double(P.b);
    double pi = boost::math::constants::pi<double>();
    return pi * pi / (3 * std::log((1 - a) * (1 + b)));
}

// ---------------------------------------------------------------------------
// Invariance of nu under one F-hat step

// Marginal CDFs of nu in closed form.
inline double nu_cdf_x(const HatDomain& D, double x)
{
    auto part = [&](int i, auto prim) {
        const HatBox& q = D.boxes[i];
        double t = std::clamp(x, q.x0, q.x1);
        return q.x0 < q.x1 ? prim(t) - prim(q.x0) : 0.0;
    };
    double s = part(0, [](double t) { return -std::log(1 - t); }) + part(1, [](double t) { return -std::log(2 - t); }) +
               part(2, [](double t) { return std::log(t + 2); }) + part(3, [](double t) { return std::log(t + 1); });
    return s / D.C();
}

inline double nu_cdf_y(const HatDomain& D, double y)
{
    // integral over x of 1/(1+xy)^2 is x1/(1+x1 y) - x0/(1+x0 y), whose
    // y-primitive is log(1+x1 y) - log(1+x0 y).
    double s = 0;
    for (const HatBox& q : D.boxes) {
        if (!(q.x0 < q.x1))
            continue;
        double t = std::clamp(y, q.y0, q.y1);
        auto prim = [&](double u) { return std::log1p(q.x1 * u) - std::log1p(q.x0 * u); };
        s += prim(t) - prim(q.y0);
    }
    return s / D.C();
}

struct InvarianceResult {
    std::size_t samples = 0;
    double ks_x = 0, ks_y = 0;
    std::size_t escaped = 0;  // pushed points outside the domain (tolerance 1e-9)
    double statistic() const { return std::max(ks_x, ks_y); }
    bool empty() const { return samples == 0; }
};

namespace detail {

inline constexpr std::size_t nu_chunk = 65536;

inline double ks_sup(std::vector<double>& v, const std::function<double(double)>& cdf)
{
    std::sort(v.begin(), v.end());
    double n = static_cast<double>(v.size()), sup = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double F = cdf(v[i]);
        sup = std::max({sup, std::fabs(F - i / n), std::fabs((i + 1) / n - F)});
    }
    return sup;
}

}  // namespace detail

// Samples of nu by rejection against the bounding box of the domain.
inline std::vector<std::array<double, 2>> sample_nu(const HatDomain& D, std::size_t n, std::uint64_t seed, unsigned threads = 0)
{
    double dmax = 0;
    for (const HatBox& q : D.boxes)
        for (double x : {q.x0, q.x1})
            for (double y : {q.y0, q.y1})
                dmax = std::max(dmax, 1 / ((1 + x * y) * (1 + x * y)));
    std::vector<std::array<double, 2>> out(n);
    std::size_t chunks = (n + detail::nu_chunk - 1) / detail::nu_chunk;
    auto work = [&](std::size_t chunk) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(chunk)};
        std::mt19937_64 g(sq);
        std::size_t lo = chunk * detail::nu_chunk, hi = std::min(n, lo + detail::nu_chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            for (;;) {
                double x = D.a + (D.b - D.a) * detail::unit_double(g);
                double y = -1 + 2 * detail::unit_double(g);
                if (!D.contains(x, y) || !(x < D.b))
                    continue;
                double t = 1 + x * y;
                if (detail::unit_double(g) * dmax <= 1 / (t * t)) {
                    out[i] = {x, y};
                    break;
                }
            }
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < chunks; k += threads)
                work(k);
        });
    for (auto& th : pool)
        th.join();
    return out;
}

// Sup distance between the marginals of the pushed-forward sample and those
// of nu.
inline InvarianceResult invariance_check(const HatDomain& D, std::size_t n_points, std::uint64_t seed, unsigned threads = 0)
{
    InvarianceResult r;
    r.samples = n_points;
    if (n_points == 0)
        return r;
    auto pts = sample_nu(D, n_points, seed, threads);
    std::vector<double> xs, ys;
    xs.reserve(n_points);
    ys.reserve(n_points);
    for (auto [x, y] : pts) {
        HatPoint p = F_hat_step(x, y, D.a, D.b);
        if (!D.contains(p.x, p.y, 1e-9))
            ++r.escaped;
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    r.ks_x = detail::ks_sup(xs, [&](double t) { return nu_cdf_x(D, t); });
    r.ks_y = detail::ks_sup(ys, [&](double t) { return nu_cdf_y(D, t); });
    return r;
}

// Time average of `obs` along the f-hat orbit of x0.
inline double birkhoff_average(const HatDomain& D, double x0, std::size_t steps, const std::function<double(double)>& obs)
{
    double x = x0, s = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        s += obs(x);
        x = f_hat_double(x, D.a, D.b);
    }
    return steps ? s / static_cast<double>(steps) : 0.0;
}

}  // namespace abcf
