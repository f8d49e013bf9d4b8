// One PASS/FAIL line per acceptance criterion.  Exit status is 0 when every
// criterion passes or fails only for a reason listed in `known_false`.

#include "abcf/abcf.hpp"
#include "../figures.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace abcf;

namespace {

Rational R(long p, long q = 1) { return Rational(Integer(p), Integer(q)); }
using C = coord_t<Rational>;
using Cd = Coord<C>;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

// Criteria whose literal statement does not hold; a failure here is reported
// but does not fail the run.
const int known_false[] = {8};

std::vector<Params<Rational>> interior_params(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    std::uniform_int_distribution<long> num(1, 79);
    std::vector<Params<Rational>> out;
    while (out.size() < n) {
        Rational a = R(-num(g), 40), b = R(num(g), 40);
        if (!(b - a > 1) || !(-(a * b) < 1))
            continue;
        Params<Rational> P(a, b);
        if (finiteness_check(P, 10000).finite)
            out.push_back(P);
    }
    return out;
}

Verdict classical_domain(double& limit)
{
    limit = 1;
    Verdict v;
    auto D = build_attractor(Params<Rational>(R(-1), R(1)));
    auto boxes = D.boxes();
    Cd ni = Cd::neg_inf(), pi = Cd::pos_inf();
    std::vector<std::array<Cd, 4>> want = {
        {ni, Cd(C(-1L)), Cd(C(0L)), pi}, {Cd(C(-1L)), Cd(C(0L)), Cd(C(1L)), pi}, {Cd(C(0L)), Cd(C(1L)), ni, Cd(C(-1L))}, {Cd(C(1L)), pi, ni, Cd(C(0L))}};
    v.require(boxes.size() == 4, std::to_string(boxes.size()) + " boxes");
    for (const auto& w : want) {
        bool found = false;
        for (const auto& b : boxes)
            found = found || (b.x0 == w[0] && b.x1 == w[1] && b.y0 == w[2] && b.y1 == w[3]);
        v.require(found, "missing box [" + w[0].str() + "," + w[1].str() + "]x[" + w[2].str() + "," + w[3].str() + "]");
    }
    v.detail = v.pass ? "four boxes, exact corners" : v.detail;
    return v;
}

Verdict zagier(double& limit)
{
    limit = 30;
    Verdict v;
    Params<Rational> P(R(-4, 5), R(2, 5));
    auto D = build_attractor(P);
    const auto& b = D.orbits.b;
    const auto& a = D.orbits.a;
    v.require(b.cls == CycleClass::Strong && b.end && *b.end == ExtReal<Rational>(R(2)), "b-cycle not Strong with end 2");
    v.require(a.cls == CycleClass::Strong && a.end && *a.end == ExtReal<Rational>(R(-4)), "a-cycle not Strong with end -4");
    auto o = compare_with_oracle(D, sample_attractor(P, 100000, 300, 1));
    v.require(o.inside_fraction >= 0.999, "inside_fraction " + std::to_string(o.inside_fraction));
    v.require(o.boundary_gap <= 0.05, "boundary_gap " + std::to_string(o.boundary_gap));
    if (v.pass)
        v.detail = "Strong/2, Strong/-4, inside " + std::to_string(o.inside_fraction) + ", gap " + std::to_string(o.boundary_gap);
    return v;
}

Verdict cycle_oracles(double& limit)
{
    limit = 3;  // three cases, < 1 s each
    Verdict v;
    auto c1 = detect_cycle(Params<Rational>(R(-6, 5), R(1, 2)), Endpoint::A);
    v.require(c1.cls == CycleClass::Strong && c1.end && *c1.end == ExtReal<Rational>(R(5)), "a = -6/5 not Strong with end 5");
    auto c2 = detect_cycle(Params<Rational>(R(-3, 5), R(1, 2)), Endpoint::B);
    v.require(c2.cls == CycleClass::Weak && c2.end && *c2.end == ExtReal<Rational>(R(0)), "b = 1/2 not Weak with end 0");
    QuadSurd g = parse_surd("(-1+sqrt(5))/2");
    auto c3 = detect_cycle(Params<QuadSurd>(-g, g), Endpoint::B);
    v.require(c3.cls == CycleClass::PeriodicNoCycle, "golden preset not PeriodicNoCycle");
    if (v.pass)
        v.detail = "Strong c_a=5, Weak c_b=0, PeriodicNoCycle";
    return v;
}

Verdict corners(double& limit)
{
    limit = 10;
    Verdict v;
    struct Case {
        long an, ad, bn, bd, xa, xb;
    };
    for (const Case& c : {Case{-7, 10, 4, 5, 1, -1}, Case{-4, 5, 2, 5, 2, -1}, Case{-11, 10, 3, 10, 3, -1}, Case{-3, 2, 1, 5, 4, -1}}) {
        Params<Rational> P(R(c.an, c.ad), R(c.bn, c.bd));
        auto D = build_attractor(P);
        bool ok = D.x_a && D.x_b && *D.x_a == C(c.xa) && *D.x_b == C(c.xb);
        v.require(ok, P.str() + " gave (" + (D.x_a ? D.x_a->str() : "-") + "," + (D.x_b ? D.x_b->str() : "-") + ")");
    }
    if (v.pass)
        v.detail = "(1,1)->(1,-1), (1,2)->(2,-1), a<=-1 with m=3,4 -> (m,-1)";
    return v;
}

Verdict tiling(double& limit)
{
    limit = 100;  // ten cases, < 10 s each
    Verdict v;
    double worst = 0;
    for (const auto& P : interior_params(10, 2024)) {
        auto t0 = std::chrono::steady_clock::now();
        auto D = build_attractor(P);
        auto rep = verify_bijectivity(D);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst = std::max(worst, dt);
        v.require(rep.tiles(), P.str() + " overlap " + std::to_string(rep.overlap_cells) + " uncovered " + std::to_string(rep.uncovered_cells));
        v.require(dt < 10, P.str() + " took " + std::to_string(dt) + " s");
    }
    if (v.pass)
        v.detail = "10 params tile exactly, slowest " + std::to_string(worst) + " s";
    return v;
}

Verdict reduction(double& limit)
{
    limit = 300;  // five cases, < 60 s each
    Verdict v;
    std::size_t found = 0;
    double worst = 0;
    for (const auto& P : interior_params(60, 606)) {
        if (found == 5)
            break;
        auto D = build_attractor(P);
        if (D.degenerate || D.orbits.a.cls != CycleClass::Strong || D.orbits.b.cls != CycleClass::Strong)
            continue;
        ++found;
        auto t0 = std::chrono::steady_clock::now();
        auto r = reduction_scan(D, 100, 10000);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst = std::max(worst, dt);
        v.require(r.coverage() == 1.0, P.str() + " coverage " + std::to_string(r.coverage()));
        v.require(dt < 60, P.str() + " took " + std::to_string(dt) + " s");
    }
    v.require(found == 5, "only " + std::to_string(found) + " both-strong params found");
    if (v.pass)
        v.detail = "5 both-strong params, coverage 1, slowest " + std::to_string(worst) + " s";
    return v;
}

Verdict convergence(double& limit)
{
    limit = 10;
    Verdict v;
    std::mt19937_64 g(7);
    std::uniform_int_distribution<long> k(1, 39);
    std::uniform_real_distribution<double> ux(-20, 20);
    std::size_t checked = 0, dets = 0;
    for (int t = 0; t < 100; ++t) {
        Rational a, b;
        do {
            a = R(-k(g), 20);
            b = R(k(g), 20);
        } while (!(b - a >= 1) || !(-(a * b) <= 1));
        Params<Rational> PR(a, b);
        Params<Float> P(Float(a.convert_to<double>()), Float(b.convert_to<double>()));
        double x = ux(g);
        Expansion e = expand(Float(x), P, 40);
        auto c = convergents(e.digits);
        for (std::size_t i = 0; i + 1 < c.size(); ++i, ++dets)
            v.require(c[i].first * c[i + 1].second - c[i + 1].first * c[i].second == 1, "determinant identity at index " + std::to_string(i));
        // the bound is checked with exact remainders while the float digits
        // agree with the exact expansion of the same double
        Rational xr(x), tail = xr;
        Expansion exact = expand(xr, PR, 40);
        for (std::size_t i = 0; i < e.digits.size() && i < exact.digits.size() && e.digits[i] == exact.digits[i]; ++i) {
            Rational rem = tail - Rational(exact.digits[i]);
            if (rem == 0)
                break;
            Rational next = -1 / rem;
            bool grows = i == 0 || abs(c[i].second) > abs(c[i - 1].second);
            if (abs(next) >= 1 && grows) {
                ++checked;
                v.require(abs(Rational(c[i].first, c[i].second) - xr) <= Rational(Integer(1), abs(c[i].second)), "bound fails for x = " + std::to_string(x));
            }
            tail = next;
        }
    }
    v.require(checked > 0, "no admissible indices");
    if (v.pass)
        v.detail = std::to_string(checked) + " bound checks, " + std::to_string(dets) + " determinants";
    return v;
}

Verdict bounded_digits(double& limit)
{
    limit = 60;
    Verdict v;
    std::mt19937_64 g(8);
    std::uniform_int_distribution<int> bit(0, 1);
    std::string worst;
    double worst_excess = 0;
    for (long m = 2; m <= 4; ++m)
        for (int k = 1; k <= 20; ++k)
            for (int t = 0; t < 20; ++t) {
                std::vector<Integer> d;
                // the all-m sequence first: it has the largest ratio
                for (int i = 0; i < k; ++i)
                    d.emplace_back(t == 0 ? m : m + bit(g));
                auto I = bounded_digit_interval(m, d);
                v.require(abs(I.hi - I.lo) == I.length, "length formula fails at m=" + std::to_string(m) + " k=" + std::to_string(k));
                Rational ratio = I.union_next / I.length, bound(Integer(2 * k), Integer(2 * k + 1));
                if (ratio > bound) {
                    double excess = (ratio - bound).convert_to<double>();
                    if (excess > worst_excess) {
                        worst_excess = excess;
                        worst = "m=" + std::to_string(m) + " k=" + std::to_string(k) + " ratio " + ratio.str() + " > " + bound.str();
                    }
                    v.pass = false;
                }
            }
    if (!v.pass && v.detail.empty())
        v.detail = "length formula exact; union ratio above 2k/(2k+1) for m=2, worst " + worst + " (all-2 digits give 2(k+1)/(2k+3))";
    else if (v.pass)
        v.detail = "length formula exact, union ratio within 2k/(2k+1)";
    return v;
}

Verdict exceptional(double& limit)
{
    limit = 30;
    Verdict v;
    Plan plan = parse_plan("m=3;1x2,2x1,1x3,2x2,1x2,2x1,1x2,2x1");
    auto res = exceptional_b(plan, R(1, 1000000));
    for (std::size_t i = 0; i < res.generations.size(); ++i) {
        const auto& g = res.generations[i];
        v.require(!g.triangle.empty, "generation " + std::to_string(i) + " empty");
        v.require(g.nested, "generation " + std::to_string(i) + " not nested");
        if (i > 1)
            v.require(g.base.hi < res.generations[i - 1].base.lo, "base length not decreasing at " + std::to_string(i));
    }
    v.require(res.width < R(1, 1000000), "width " + res.width.str());
    auto F = finiteness_check(Params<Rational>(res.b - 1, res.b), 1000);
    v.require(!F.finite, "(b-1,b) passes finiteness at cap 1000");
    for (const Digits& d : {Digits{3, 3, 4, 4}, Digits{3, 3, 3, 4, 4}, Digits{3, 3, 4, 3, 3, 3}, Digits{3, 3, 3, 4, 3, 3, 3, 3}})
        v.require(triangle_region(3, d).empty, "forbidden pattern with nonempty triangle");
    if (v.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "9 nested triangles, width %.2e, b = %.15f, not finite at cap 1000", res.width.convert_to<double>(), res.b.convert_to<double>());
        v.detail = buf;
    }
    return v;
}

Verdict measures(double& limit)
{
    limit = 120;
    Verdict v;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    std::string info;
    for (const auto& P : {Params<Rational>(R(-7, 10), R(4, 5)), Params<Rational>(R(-1), R(1))}) {
        HatDomain D = hat_domain(P);
        double nu = nu_mass(D), mu = mu_mass(D), h = entropy_rokhlin(D), hc = entropy_closed(P), I = log_integral(D);
        auto ks = invariance_check(D, 1000000, 2024);
        v.require(std::fabs(nu - 1) <= 1e-8, P.str() + " nu mass " + std::to_string(nu));
        v.require(std::fabs(mu - 1) <= 1e-8, P.str() + " mu mass " + std::to_string(mu));
        v.require(std::fabs(h - hc) <= 1e-5, P.str() + " entropy gap " + std::to_string(h - hc));
        v.require(std::fabs(I + pi2 / 6) <= 1e-6, P.str() + " I = " + std::to_string(I));
        v.require(ks.statistic() <= 3e-3, P.str() + " KS " + std::to_string(ks.statistic()));
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s h=%.6f KS=%.2e", info.empty() ? "" : "; ", P.str().c_str(), h, ks.statistic());
        info += buf;
    }
    if (v.pass)
        v.detail = info;
    return v;
}

Verdict figures(double& limit)
{
    limit = 60;
    Verdict v;
    for (const auto& f : figs::all) {
        std::string first = figs::render(f, 1), second = figs::render(f);
        v.require(first == second, std::string(f.name) + " differs between runs");
        v.require(first == figs::read(figs::path(f)), std::string(f.name) + " differs from the golden file");
    }
    if (v.pass)
        v.detail = "fig1, fig4a, fig4b, fig4c match goldens";
    return v;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict(double&)> run;
    };
    const Criterion all[] = {
        {1, "classical domain", classical_domain}, {2, "zagier example", zagier},      {3, "cycle oracles", cycle_oracles},
        {4, "corner system", corners},             {5, "bijectivity tiling", tiling},  {6, "reduction scan", reduction},
        {7, "convergence", convergence},           {8, "bounded digits", bounded_digits}, {9, "exceptional set", exceptional},
        {10, "measures", measures},                {11, "figures", figures},
    };
    int hard = 0;
    for (const Criterion& c : all) {
        double limit = 0;
        Verdict v;
        auto t0 = std::chrono::steady_clock::now();
        try {
            v = c.run(limit);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.pass && dt >= limit) {
            v.pass = false;
            v.detail += "; took " + std::to_string(dt) + " s, limit " + std::to_string(limit) + " s";
        }
        bool known = std::find(std::begin(known_false), std::end(known_false), c.id) != std::end(known_false);
        std::printf("%-4s criterion %2d (%s) [%.2f s]: %s%s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, dt, v.detail.c_str(),
                    !v.pass && known ? " [known: literal bound is false]" : "");
        std::fflush(stdout);
        if (!v.pass && !known)
            ++hard;
    }
    return hard == 0 ? 0 : 1;
}
