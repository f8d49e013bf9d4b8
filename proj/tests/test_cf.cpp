#include "abcf/cf.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace abcf;

namespace {

Rational R(long p, long q = 1) { return Rational(Integer(p), Integer(q)); }

// (n0, ..., nk) evaluated from the tail: v = n_k, v = n_i - 1/v.
Rational eval_backward(const std::vector<Integer>& d)
{
    Rational v(d.back());
    for (std::size_t i = d.size() - 1; i-- > 0;)
        v = Rational(d[i]) - 1 / v;
    return v;
}

std::vector<Integer> ints(std::initializer_list<long> xs)
{
    std::vector<Integer> out;
    for (long x : xs)
        out.emplace_back(x);
    return out;
}

Params<Rational> random_params(std::mt19937_64& g)
{
    std::uniform_int_distribution<long> num(0, 60);
    for (;;) {
        Rational a = R(-num(g), 20), b = R(num(g), 20);
        try {
            return Params<Rational>(a, b);
        } catch (const invalid_params&) {
        }
    }
}

}  // namespace

TEST(Params, RejectsOutsideRegion)
{
    EXPECT_THROW(Params<Rational>(R(1, 2), R(1)), invalid_params);
    EXPECT_THROW(Params<Rational>(R(-1, 4), R(1, 4)), invalid_params);
    EXPECT_THROW(Params<Rational>(R(-2), R(1)), invalid_params);
    EXPECT_NO_THROW(Params<Rational>(R(-1), R(1)));
    EXPECT_NO_THROW(Params<Rational>(R(0), R(1)));
}

TEST(DigitAb, Examples)
{
    Params<Rational> P(R(-1, 2), R(1, 2));
    EXPECT_EQ(digit_ab(R(7, 10), P), 1);
    EXPECT_EQ(digit_ab(R(-5, 2), P), -2);
    EXPECT_EQ(digit_ab(R(0), P), 0);
    Params<Rational> Z(R(-4, 5), R(2, 5));
    EXPECT_EQ(digit_ab(R(0), Z), 0);
}

// Property: x - digit lands in [a, b).
TEST(DigitAb, RemainderInFundamentalInterval)
{
    std::mt19937_64 g(5);
    std::uniform_int_distribution<long> num(-2000, 2000);
    for (int t = 0; t < 50; ++t) {
        auto P = random_params(g);
        for (int i = 0; i < 40; ++i) {
            Rational x = R(num(g), 97);
            Rational r = x - Rational(digit_ab(x, P));
            EXPECT_LE(P.a, r);
            EXPECT_LT(r, P.b);
        }
    }
}

TEST(FStep, Examples)
{
    Params<Rational> P(R(-4, 5), R(2, 5));
    using X = ExtReal<Rational>;
    EXPECT_EQ(f_step(X(R(-1)), P), X(R(0)));
    EXPECT_TRUE(f_step(X(R(0)), P).is_inf());
    EXPECT_EQ(f_step(X(R(2, 5)), P), X(R(-3, 5)));
}

TEST(FHatStep, Examples)
{
    Params<Rational> P(R(-1, 2), R(1, 2));
    EXPECT_EQ(f_hat_step(R(0), P).value, R(0));
    auto h = f_hat_step(R(2, 5), P);
    EXPECT_EQ(h.value, R(-1, 2));
    EXPECT_EQ(h.digit, -2);
    // -1/x = 2 = b + 2 gets digit 3, so the return lands on a = -1, not on 0 (outside [a,b))
    Params<Rational> M(R(-1), R(0));
    auto m = f_hat_step(R(-1, 2), M);
    EXPECT_EQ(m.digit, 3);
    EXPECT_EQ(m.value, R(-1));
    EXPECT_THROW(f_hat_step(R(1, 2), P), error);
}

TEST(Expand, Examples)
{
    Params<Rational> P(R(-1, 2), R(1, 2));
    Expansion e = expand(R(2, 5), P);
    EXPECT_EQ(e.status, ExpansionStatus::Terminated);
    EXPECT_EQ(e.digits, ints({0, -2, 2}));
    EXPECT_EQ(eval_backward(e.digits), R(2, 5));

    Params<Rational> M(R(-1), R(0));
    Expansion z = expand(R(0), M);
    ASSERT_EQ(z.status, ExpansionStatus::Periodic);
    EXPECT_EQ(z.preperiod(), ints({1}));
    EXPECT_EQ(z.period(), ints({2}));

    Params<Rational> Z(R(-4, 5), R(2, 5));
    Expansion a = expand(Z.a, Z);
    EXPECT_EQ(a.digits.front(), 0);
    Expansion tail = expand(R(5, 4), Z);  // -1/a
    EXPECT_EQ(std::vector<Integer>(a.digits.begin() + 1, a.digits.end()), tail.digits);
}

TEST(Expand, GoldenMeanIsPurelyPeriodicAfterZero)
{
    QuadSurd g = parse_surd("(-1+sqrt(5))/2");
    Params<QuadSurd> P(-g, g);
    Expansion e = expand(g, P);
    ASSERT_EQ(e.status, ExpansionStatus::Periodic);
    EXPECT_EQ(evaluate_minus_cf(e.preperiod(), e.period()).value(), g);
}

// Property: rational expansions terminate (b != 0) and evaluate back exactly.
TEST(Expand, RationalRoundTrip)
{
    std::mt19937_64 g(9);
    std::uniform_int_distribution<long> num(-5000, 5000), den(1, 997);
    for (int t = 0; t < 40; ++t) {
        auto P = random_params(g);
        if (P.b_zero())
            continue;
        for (int i = 0; i < 25; ++i) {
            Rational x = R(num(g), den(g));
            Expansion e = expand(x, P);
            ASSERT_EQ(e.status, ExpansionStatus::Terminated) << P.str() << " " << x;
            EXPECT_EQ(eval_backward(e.digits), x);
            EXPECT_EQ(evaluate_finite_cf(e.digits).value(), x);
        }
    }
}

// No (p,1) or (-p,-1) consecutive digit pairs with p >= 1.
TEST(Expand, ForbiddenDigitPairs)
{
    std::mt19937_64 g(21);
    std::uniform_int_distribution<long> num(-100000, 100000);
    for (int t = 0; t < 40; ++t) {
        auto P = random_params(g);
        if (P.b_zero())
            continue;
        for (int i = 0; i < 20; ++i) {
            Expansion e = expand(R(num(g), 9973), P);
            for (std::size_t k = 1; k + 1 < e.digits.size(); ++k) {
                const Integer& n = e.digits[k];
                const Integer& next = e.digits[k + 1];
                EXPECT_FALSE(n >= 1 && next == 1) << P.str();
                EXPECT_FALSE(n <= -1 && next == -1) << P.str();
            }
        }
    }
}

TEST(Convergents, Examples)
{
    auto c = convergents(ints({0, -2, 2}));
    EXPECT_EQ(Rational(c.back().first, c.back().second), R(2, 5));
    // all-2 convergents are (k+2)/(k+1): slow, 1/k convergence to 1
    std::vector<Integer> twos(200, Integer(2));
    auto t = convergents(twos);
    EXPECT_EQ(Rational(t[30].first, t[30].second), R(32, 31));
    EXPECT_NEAR(Rational(t.back().first, t.back().second).convert_to<double>(), 1.0, 1e-2);
}

// p_k q_{k+1} - p_{k+1} q_k = 1 and r_k = (n_0..n_k).
TEST(Convergents, DeterminantAndValues)
{
    std::mt19937_64 g(4);
    std::uniform_int_distribution<long> d(-9, 9);
    for (int t = 0; t < 200; ++t) {
        std::vector<Integer> digits;
        for (int i = 0; i < 15; ++i) {
            long n = d(g);
            digits.emplace_back(n == 0 || n == 1 || n == -1 ? 3 : n);
        }
        auto c = convergents(digits);
        for (std::size_t k = 0; k + 1 < c.size(); ++k)
            EXPECT_EQ(c[k].first * c[k + 1].second - c[k + 1].first * c[k].second, 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            std::vector<Integer> pre(digits.begin(), digits.begin() + static_cast<long>(k) + 1);
            EXPECT_EQ(Rational(c[k].first, c[k].second), eval_backward(pre));
        }
    }
}

// |r_k - x| <= 1/|q_k| whenever |x_{k+1}| >= 1 and |q_k| > |q_{k-1}|.
TEST(Convergents, ApproximationBoundFloatMode)
{
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> ux(-20, 20);
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        auto PR = random_params(g);
        Params<Float> P(Float(to_double(PR.a)), Float(to_double(PR.b)));
        double x = ux(g);
        Expansion e = expand(Float(x), P, 40);
        Expansion exact = expand(Rational(x), PR, 40);
        auto c = convergents(e.digits);
        Rational xr(x);
        Rational tail = xr;  // x_k, exact
        for (std::size_t k = 0; k < e.digits.size(); ++k) {
            if (k >= exact.digits.size() || e.digits[k] != exact.digits[k])
                break;  // float digits are only trusted while they match the exact ones
            Rational rem = tail - Rational(exact.digits[k]);
            if (rem == 0)
                break;
            Rational next = -1 / rem;  // x_{k+1}
            bool grows = k == 0 ? true : abs(c[k].second) > abs(c[k - 1].second);
            if (abs(next) >= 1 && grows) {
                Rational rk(c[k].first, c[k].second);
                EXPECT_LE(abs(rk - xr), Rational(Integer(1), abs(c[k].second)));
                ++checked;
            }
            tail = next;
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(EvaluateMinusCf, Examples)
{
    auto v = evaluate_minus_cf(ints({0}), ints({-3}));
    EXPECT_EQ(v.value(), parse_surd("(3-sqrt(5))/2"));
    auto w = evaluate_minus_cf(ints({0, -3}), ints({-4}));
    QuadSurd b = w.value();
    EXPECT_NEAR(b.to_double(), 0.3660254037844386, 1e-15);
    EXPECT_EQ(QuadSurd(2L) * b * b + QuadSurd(2L) * b - QuadSurd(1L), QuadSurd(0L));
    EXPECT_EQ(evaluate_minus_cf(ints({1}), ints({2})).value(), QuadSurd(0L));
}

// Oracle: iterate the period map from a generic start.
TEST(EvaluateMinusCf, MatchesIteration)
{
    std::mt19937_64 g(2);
    std::uniform_int_distribution<long> d(2, 6), s(0, 1);
    for (int t = 0; t < 100; ++t) {
        std::vector<Integer> pre{Integer(s(g) ? 1 : -1)}, per;
        for (int i = 0; i < 3; ++i)
            per.emplace_back((s(g) ? 1 : -1) * d(g));
        if (per[0] == 2 && per[1] == 2 && per[2] == 2)
            continue;
        double v = evaluate_minus_cf(pre, per).value().to_double();
        // truncations (pre, per, per, ..., per) converge to the value
        std::vector<Integer> trunc = pre;
        for (int k = 0; k < 30; ++k)
            trunc.insert(trunc.end(), per.begin(), per.end());
        EXPECT_NEAR(eval_backward(trunc).convert_to<double>(), v, 1e-9);
    }
}

TEST(BoundedDigits, Examples)
{
    auto one = bounded_digit_interval(2, ints({2}));
    EXPECT_EQ(one.length, R(1, 2));
    EXPECT_EQ(abs(one.hi - one.lo), one.length);
    auto two = bounded_digit_interval(2, ints({2, 2}));
    EXPECT_EQ(two.qk, 3);
    EXPECT_EQ(two.length, R(1, 3));
    EXPECT_THROW(bounded_digit_interval(2, ints({5})), error);
    EXPECT_THROW(bounded_digit_interval(1, ints({1})), error);
}

// Length formula against evaluated endpoints.  With q_0 = 1 for the leading 0,
// k digits give q_{k-1}/q_k <= k/(k+1), so the ratio bound is 2K/(2K+1), K = k+1.
TEST(BoundedDigits, LengthAndUnionRatio)
{
    std::mt19937_64 g(8);
    std::uniform_int_distribution<int> bit(0, 1);
    for (long m = 2; m <= 4; ++m) {
        for (int k = 1; k <= 20; ++k) {
            for (int t = 0; t < 30; ++t) {
                std::vector<Integer> d;
                for (int i = 0; i < k; ++i)
                    d.emplace_back(m + bit(g));
                auto I = bounded_digit_interval(m, d);
                std::vector<Integer> full{0};
                full.insert(full.end(), d.begin(), d.end());
                std::vector<Integer> low = full;
                low.back() -= 1;
                Rational lo = eval_backward(low), hi = eval_backward(full);
                EXPECT_EQ(abs(hi - lo), I.length);
                // children: append m or m+1; their union spans four endpoints
                Rational mn = hi, mx = hi;
                for (long n : {m, m + 1}) {
                    auto c = full;
                    c.emplace_back(n);
                    auto cl = c;
                    cl.back() -= 1;
                    for (const Rational& v : {eval_backward(c), eval_backward(cl)}) {
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                }
                Rational uni = bounded_digit_interval(m, [&] { auto c = d; c.emplace_back(m); return c; }()).length +
                               bounded_digit_interval(m, [&] { auto c = d; c.emplace_back(m + 1); return c; }()).length;
                EXPECT_EQ(uni, I.union_next);
                EXPECT_LE(mx - mn, I.length);
                EXPECT_LE(I.union_next, Rational(2 * (k + 1), 2 * k + 3) * I.length) << "m=" << m << " k=" << k;
            }
        }
    }
}
