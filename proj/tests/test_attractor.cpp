#include "abcf/attractor.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace abcf;

namespace {

using C = QuadSurd;  // corner values of rational parameters may be surds
using X = ExtReal<C>;
using Cd = Coord<C>;

Rational R(long p, long q = 1) { return Rational(Integer(p), Integer(q)); }
C Q(long p, long q = 1) { return C(R(p, q)); }

bool closed_contains(const RectDomain<Rational>& D, const X& x, const X& y)
{
    for (const auto& b : D.boxes())
        if (b.contains(x, y))
            return true;
    return false;
}

// Random rational parameters strictly inside the region, b - a > 1 and -ab < 1.
std::vector<Params<Rational>> interior_params(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    std::uniform_int_distribution<long> num(1, 79);
    std::vector<Params<Rational>> out;
    while (out.size() < n) {
        Rational a = R(-num(g), 40), b = R(num(g), 40);
        if (!(b - a > 1) || !(-(a * b) < 1))
            continue;
        out.emplace_back(a, b);
    }
    return out;
}

// Every step pushed 10% of the level span away from its component.
RectDomain<Rational> shrunk(RectDomain<Rational> D)
{
    C lo = D.lower.front().y, hi = D.upper.back().y;
    for (const auto& s : D.upper)
        lo = std::min(lo, s.y);
    for (const auto& s : D.lower)
        hi = std::max(hi, s.y);
    C d = (hi - lo) / C(10L);
    for (auto& s : D.upper)
        s.y += d;
    for (auto& s : D.lower)
        s.y -= d;
    return D;
}

}  // namespace

TEST(BuildAttractor, ClassicalIsTheTrap)
{
    auto D = build_attractor(Params<Rational>(R(-1), R(1)));
    EXPECT_TRUE(D.degenerate);
    auto boxes = D.boxes();
    ASSERT_EQ(boxes.size(), 4u);
    Cd ni = Cd::neg_inf(), pi = Cd::pos_inf();
    std::vector<std::array<Cd, 4>> want = {
        {ni, Cd(Q(-1)), Cd(Q(0)), pi}, {Cd(Q(-1)), Cd(Q(0)), Cd(Q(1)), pi}, {Cd(Q(0)), Cd(Q(1)), ni, Cd(Q(-1))}, {Cd(Q(1)), pi, ni, Cd(Q(0))}};
    for (const auto& w : want) {
        bool found = false;
        for (const auto& b : boxes)
            found = found || (b.x0 == w[0] && b.x1 == w[1] && b.y0 == w[2] && b.y1 == w[3]);
        EXPECT_TRUE(found) << w[0].str() << " " << w[1].str() << " " << w[2].str() << " " << w[3].str();
    }
}

TEST(BuildAttractor, ZagierSteps)
{
    auto D = build_attractor(Params<Rational>(R(-4, 5), R(2, 5)));
    EXPECT_FALSE(D.degenerate);
    EXPECT_EQ(*D.x_a, Q(2));
    EXPECT_EQ(*D.x_b, Q(-1));
    std::vector<C> up, lo;
    for (const auto& s : D.upper)
        up.push_back(s.y);
    for (const auto& s : D.lower)
        lo.push_back(s.y);
    EXPECT_EQ(up, (std::vector<C>{Q(-3, 5), Q(-1, 3), Q(1, 4), Q(2, 3), Q(5, 4), Q(5, 3), Q(3)}));
    EXPECT_EQ(lo, (std::vector<C>{Q(-5), Q(-5, 2), Q(-3, 2), Q(-1, 2), Q(1, 5)}));
    EXPECT_TRUE(verify_connectivity(D).ok);
}

// Corner values from the special cases of the two-equation system.
TEST(BuildAttractor, CornerSpecialCases)
{
    auto corners = [](long an, long ad, long bn, long bd) {
        auto D = build_attractor(Params<Rational>(R(an, ad), R(bn, bd)));
        return std::make_pair(*D.x_a, *D.x_b);
    };
    EXPECT_EQ(corners(-7, 10, 4, 5), std::make_pair(Q(1), Q(-1)));  // m_a = m_b = 1
    EXPECT_EQ(corners(-4, 5, 2, 5), std::make_pair(Q(2), Q(-1)));   // m_a = 1, m_b = 2
    // a <= -1: x_a is the digit count m with T^m S b in [a, a+1)
    EXPECT_EQ(corners(-6, 5, 1, 2), std::make_pair(Q(1), Q(-1)));
    EXPECT_EQ(corners(-11, 10, 3, 10), std::make_pair(Q(3), Q(-1)));
    EXPECT_EQ(corners(-3, 2, 1, 5), std::make_pair(Q(4), Q(-1)));
}

TEST(BuildAttractor, ClassicalFigureCases)
{
    auto M = build_attractor(Params<Rational>(R(-1), R(0)));
    EXPECT_TRUE(M.degenerate);
    EXPECT_TRUE(M.lower.empty());
    EXPECT_EQ(M.upper.size(), 3u);
    EXPECT_TRUE(verify_connectivity(M).ok);
    auto H = build_attractor(Params<Rational>(R(-1, 2), R(1, 2)));
    EXPECT_TRUE(verify_connectivity(H).ok);
    EXPECT_TRUE(verify_bijectivity(H).tiles());
}

TEST(Connectivity, CorruptedDomainFails)
{
    auto D = build_attractor(Params<Rational>(R(-4, 5), R(2, 5)));
    ASSERT_TRUE(verify_connectivity(D).ok);
    auto bad = D;
    bad.upper[2].x_lo = Cd(bad.upper[2].x_lo.v + Q(1, 10));
    auto r = verify_connectivity(bad);
    EXPECT_FALSE(r.ok);
    ASSERT_FALSE(r.failures.empty());
    EXPECT_NE(r.failures.front().find("not connected"), std::string::npos);
}

TEST(Bijectivity, Examples)
{
    auto Z = verify_bijectivity(build_attractor(Params<Rational>(R(-4, 5), R(2, 5))));
    EXPECT_TRUE(Z.tiles());
    EXPECT_EQ(Z.overlap, 0);
    EXPECT_EQ(Z.uncovered, 0);
    EXPECT_EQ(Z.locking.size(), 2u);
    auto C = verify_bijectivity(build_attractor(Params<Rational>(R(-1), R(1))));
    EXPECT_TRUE(C.tiles());
    EXPECT_TRUE(C.locking.empty());
    EXPECT_TRUE(verify_bijectivity(build_attractor(Params<Rational>(R(-1), R(0)))).tiles());
}

TEST(Bijectivity, CorruptedDomainDoesNotTile)
{
    auto D = build_attractor(Params<Rational>(R(-4, 5), R(2, 5)));
    D.lower[1].y = D.lower[1].y - Q(1, 7);
    EXPECT_FALSE(verify_bijectivity(D).tiles());
}

// Structural invariants on random interior parameters.
TEST(BuildAttractor, RandomParamsInvariants)
{
    for (const auto& P : interior_params(25, 77)) {
        auto D = build_attractor(P);
        SCOPED_TRACE(P.str());
        EXPECT_TRUE(verify_connectivity(D).ok);
        EXPECT_TRUE(verify_bijectivity(D).tiles());
        if (D.degenerate)
            continue;
        EXPECT_GE(*D.x_a, Q(1));
        EXPECT_LE(*D.x_b, Q(-1));
        // level sets: upper levels are U_a and U_b, lower levels L_a and L_b
        std::set<C> up, lo, want_up, want_lo;
        for (const auto& s : D.upper)
            up.insert(s.y);
        for (const auto& s : D.lower)
            lo.insert(s.y);
        for (const auto* L : {&D.orbits.Ua, &D.orbits.Ub})
            for (const auto& l : *L)
                want_up.insert(C(l.y.value()));
        for (const auto* L : {&D.orbits.La, &D.orbits.Lb})
            for (const auto& l : *L)
                want_lo.insert(C(l.y.value()));
        EXPECT_EQ(up, want_up);
        EXPECT_EQ(lo, want_lo);
        // non-decreasing step functions
        for (std::size_t i = 0; i + 1 < D.upper.size(); ++i)
            EXPECT_TRUE(D.upper[i].x_lo <= D.upper[i + 1].x_lo);
        for (std::size_t i = 0; i + 1 < D.lower.size(); ++i)
            EXPECT_TRUE(D.lower[i].x_lo <= D.lower[i + 1].x_lo);
    }
}

// Property: F maps the closed domain into itself (exact arithmetic).
TEST(BuildAttractor, ForwardInvariantExact)
{
    std::mt19937_64 g(3);
    std::uniform_int_distribution<long> u(1, 999);
    auto params = interior_params(8, 5);
    params.emplace_back(R(-4, 5), R(2, 5));
    for (const auto& P : params) {
        auto D = build_attractor(P);
        Params<C> PC(C(P.a), C(P.b));
        for (const auto& bx : D.boxes()) {
            for (int i = 0; i < 100; ++i) {
                auto pick = [&](const Cd& lo, const Cd& hi) {
                    C l = lo.finite() ? lo.v : hi.v - C(20L), h = hi.finite() ? hi.v : lo.v + C(20L);
                    return l + (h - l) * Q(u(g), 1000);
                };
                Point2<C> p{X(pick(bx.x0, bx.x1)), X(pick(bx.y0, bx.y1))};
                if (p.x == p.y)
                    continue;
                auto q = F_step(p, PC);
                EXPECT_TRUE(closed_contains(D, q.x, q.y)) << P.str() << " (" << p.x.str() << ", " << p.y.str() << ")";
            }
        }
    }
}

TEST(BuildAttractor, BoundaryAbsorptionForStrongCycles)
{
    for (const auto& P : interior_params(10, 19)) {
        auto D = build_attractor(P);
        if (D.degenerate || D.orbits.a.cls != CycleClass::Strong || D.orbits.b.cls != CycleClass::Strong)
            continue;
        auto rep = boundary_absorption(D, 200);
        EXPECT_TRUE(rep.stuck.empty()) << P.str() << " " << (rep.stuck.empty() ? "" : rep.stuck.front());
    }
}

TEST(Oracle, ZagierCloud)
{
    Params<Rational> P(R(-4, 5), R(2, 5));
    auto D = build_attractor(P);
    auto cloud = sample_attractor(P, 100000, 300, 1);
    auto o = compare_with_oracle(D, cloud);
    EXPECT_GE(o.inside_fraction, 0.999);
    EXPECT_LE(o.boundary_gap, 0.05);
    EXPECT_GT(o.segments, 10u);
}

TEST(Oracle, ClassicalCloudFullyInside)
{
    Params<Rational> P(R(-1), R(1));
    auto o = compare_with_oracle(build_attractor(P), sample_attractor(P, 20000, 300, 2));
    EXPECT_EQ(o.inside_fraction, 1.0);
}

TEST(Oracle, ShrunkDomainLosesPoints)
{
    Params<Rational> P(R(-4, 5), R(2, 5));
    auto D = shrunk(build_attractor(P));
    auto o = compare_with_oracle(D, sample_attractor(P, 20000, 300, 3));
    EXPECT_LT(o.inside_fraction, 0.95);
}

TEST(Oracle, EmptyCloudRejected)
{
    auto D = build_attractor(Params<Rational>(R(-1), R(1)));
    EXPECT_THROW(compare_with_oracle(D, Cloud{}), error);
}

TEST(Oracle, RandomParamsAgree)
{
    std::uint64_t seed = 100;
    for (const auto& P : interior_params(10, 41)) {
        auto o = compare_with_oracle(build_attractor(P), sample_attractor(P, 100000, 300, seed++));
        EXPECT_GE(o.inside_fraction, 0.999) << P.str();
        EXPECT_LE(o.boundary_gap, 0.05) << P.str();
    }
}

TEST(ReductionScan, ZagierFullCoverage)
{
    auto D = build_attractor(Params<Rational>(R(-4, 5), R(2, 5)));
    auto r = reduction_scan(D, 100, 10000);
    EXPECT_EQ(r.points, 10000u - 100u);  // diagonal cells skipped
    EXPECT_EQ(r.coverage(), 1.0);
    auto empty = reduction_scan(D, 0, 10000);
    EXPECT_EQ(empty.points, 0u);
    EXPECT_TRUE(std::isnan(empty.coverage()));
}

TEST(BuildAttractor, ExactSurdParameters)
{
    QuadSurd g = parse_surd("(-1+sqrt(5))/2");
    auto D = build_attractor(Params<QuadSurd>(-g, g));
    EXPECT_TRUE(verify_connectivity(D).ok);
    EXPECT_TRUE(verify_bijectivity(D).tiles());
}
