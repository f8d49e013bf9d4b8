#pragma once

#include "abcf/cycles.hpp"
#include "abcf/natural_extension.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace abcf {

struct attractor_error : error {
    using error::error;
};

// One horizontal piece of a boundary step function.
template <Scalar C>
struct Step {
    Coord<C> x_lo, x_hi;
    C y;
    std::optional<Origin> origin;  // empty for the explicit degenerate regions
    std::size_t index = 0;         // position in its truncated orbit
};

// Upper component {x <= R, y >= phi_u(x)} and lower component {x >= L, y <= phi_l(x)},
// both bounded by non-decreasing step functions.  Steps are sorted by y.
template <Scalar S>
struct RectDomain {
    using C = coord_t<S>;
    Params<S> params;
    std::vector<Step<C>> upper, lower;
    std::optional<C> x_a, x_b;  // empty for the degenerate regions
    bool degenerate = false;
    TruncatedOrbits<S> orbits;

    std::vector<Box<C>> upper_boxes() const
    {
        std::vector<Box<C>> out;
        for (const auto& s : upper)
            out.push_back({s.x_lo, s.x_hi, Coord<C>(s.y), Coord<C>::pos_inf()});
        return out;
    }
    std::vector<Box<C>> lower_boxes() const
    {
        std::vector<Box<C>> out;
        for (const auto& s : lower)
            out.push_back({s.x_lo, s.x_hi, Coord<C>::neg_inf(), Coord<C>(s.y)});
        return out;
    }
    std::vector<Box<C>> boxes() const
    {
        auto out = upper_boxes();
        auto lo = lower_boxes();
        out.insert(out.end(), lo.begin(), lo.end());
        return out;
    }

    // Closed membership in double precision; infinite coordinates match infinite box sides.
    bool contains(double x, double y, double tol = 1e-9) const
    {
        auto in = [tol](double lo, double hi, double t) {
            if (std::isinf(t))
                return std::isinf(lo) || std::isinf(hi);
            return lo - tol <= t && t <= hi + tol;
        };
        for (const auto& s : upper)
            if (in(s.x_lo.to_double(), s.x_hi.to_double(), x) && in(to_double(s.y), HUGE_VAL, y))
                return true;
        for (const auto& s : lower)
            if (in(s.x_lo.to_double(), s.x_hi.to_double(), x) && in(-HUGE_VAL, to_double(s.y), y))
                return true;
        return false;
    }
};

namespace detail {

template <Scalar S>
Params<coord_t<S>> coord_params(const Params<S>& P)
{
    return Params<coord_t<S>>(to_coord(P.a), to_coord(P.b));
}

template <Scalar C>
C ext_coord(const ExtReal<C>& v, const char* what)
{
    if (v.is_inf())
        throw attractor_error(std::string("unexpected infinite ") + what);
    return v.value();
}

// Transports [lo,hi] along a word; false if some S step meets its pole inside.
template <Scalar C>
bool transport(Coord<C> lo, Coord<C> hi, const Word& w, Coord<C>& out_lo, Coord<C>& out_hi)
{
    for (Gen g : w) {
        if (g == Gen::T) {
            lo = shift(lo, 1);
            hi = shift(hi, 1);
        } else if (g == Gen::Tinv) {
            lo = shift(lo, -1);
            hi = shift(hi, -1);
        } else {
            Coord<C> nl, nh;
            if (!s_interval(lo, hi, nl, nh))
                return false;
            lo = nl;
            hi = nh;
        }
    }
    out_lo = lo;
    out_hi = hi;
    return true;
}

template <Scalar C>
void ray_of(bool a_side, const C& x_a, const C& x_b, Coord<C>& lo, Coord<C>& hi)
{
    if (a_side) {
        lo = Coord<C>(x_a);
        hi = Coord<C>::pos_inf();
    } else {
        lo = Coord<C>::neg_inf();
        hi = Coord<C>(x_b);
    }
}

template <Scalar S>
std::vector<const Level<S>*> closest(const std::vector<const std::vector<Level<S>>*>& pools, const std::vector<const Level<S>*>& skip, const S& bound,
                                     bool above)
{
    std::vector<const Level<S>*> best;
    for (const auto* pool : pools)
        for (const auto& l : *pool) {
            if (std::find(skip.begin(), skip.end(), &l) != skip.end() || l.y.is_inf())
                continue;
            const S& y = l.y.value();
            if (above ? y < bound : bound < y)
                continue;
            if (best.empty() || y == best.front()->y.value()) {
                best.push_back(&l);
            } else if (above ? y < best.front()->y.value() : best.front()->y.value() < y) {
                best.assign(1, &l);
            }
        }
    return best;
}

}  // namespace detail

struct CornerChoice {
    Origin ell, up;
    std::size_t ell_index, up_index;
};

template <Scalar S>
struct Corners {
    coord_t<S> x_a, x_b;
    CornerChoice choice;
};

// Candidate (y_l, y_u) pairs in preference order: y_l is the closest lower level
// at or above Sb, y_u the closest upper level at or below Sa; on ties L_a is
// preferred for y_l and U_b for y_u.  Sb and STa (resp. Sa and ST^{-1}b) are never
// candidates: they meet at x = 0 on the other side.
template <Scalar S>
std::vector<std::pair<const Level<S>*, const Level<S>*>> corner_candidates(const TruncatedOrbits<S>& O)
{
    if (O.Lb.empty() || O.Ua.empty())
        throw attractor_error("truncated orbits lack the levels Sb or Sa");
    const S& Sb = O.Lb.front().y.value();
    const S& Sa = O.Ua.front().y.value();
    std::vector<const Level<S>*> skip_l{&O.Lb.front()}, skip_u{&O.Ua.front()};
    if (O.La.size() > 1 && O.a.lower.gens.at(0) == Gen::S)
        skip_l.push_back(&O.La[1]);
    if (O.Ub.size() > 1 && O.b.upper.gens.at(0) == Gen::S)
        skip_u.push_back(&O.Ub[1]);
    auto ells = detail::closest<S>({&O.La, &O.Lb}, skip_l, Sb, true);
    auto ups = detail::closest<S>({&O.Ub, &O.Ua}, skip_u, Sa, false);
    if (ells.empty())
        throw attractor_error("no lower level above Sb");
    if (ups.empty())
        throw attractor_error("no upper level below Sa");
    std::stable_sort(ells.begin(), ells.end(), [](auto* p, auto* q) { return p->origin == Origin::La && q->origin != Origin::La; });
    std::stable_sort(ups.begin(), ups.end(), [](auto* p, auto* q) { return p->origin == Origin::Ub && q->origin != Origin::Ub; });
    std::vector<std::pair<const Level<S>*, const Level<S>*>> out;
    for (auto* l : ells)
        for (auto* u : ups)
            out.emplace_back(l, u);
    return out;
}

// Solves  S x_b = left end at y_l  and  S x_a = right end at y_u.
template <Scalar S>
Corners<S> solve_corners(const Params<S>& P, const Level<S>& ell, const Level<S>& up)
{
    using C = coord_t<S>;
    C like = to_coord(P.a);
    Mobius Sm = Mobius::S();
    Mobius Wl = Mobius::of(ell.word), Wu = Mobius::of(up.word);
    auto inf = ExtReal<C>::infinity();
    std::optional<C> xa, xb;
    bool ell_a = ell.origin == Origin::La;
    bool up_a = up.origin == Origin::Ua;
    // a level coming from the b-ray starts at -inf (lower) or from x_b (upper); from the
    // a-ray it starts at x_a (lower) or ends at +inf (upper)
    if (!ell_a)
        xb = detail::ext_coord((Sm * Wl).apply(inf), "x_b");
    if (up_a)
        xa = detail::ext_coord((Sm * Wu).apply(inf), "x_a");
    if (ell_a && !up_a) {
        Mobius N = Sm * Wu * Sm * Wl;
        FixedPoints fp = N.fixed_points();
        if (fp.kind != MobiusKind::Hyperbolic)
            throw attractor_error("corner word " + N.str() + " is not hyperbolic");
        xa = coord_from_surd(fp.attracting->value(), like);
        xb = detail::ext_coord((Sm * Wl).apply(ExtReal<C>(*xa)), "x_b");
    } else if (ell_a) {
        xb = detail::ext_coord((Sm * Wl).apply(ExtReal<C>(*xa)), "x_b");
    } else if (!up_a) {
        xa = detail::ext_coord((Sm * Wu).apply(ExtReal<C>(*xb)), "x_a");
    }
    return {*xa, *xb, {ell.origin, up.origin, ell.index, up.index}};
}

struct ConnectivityReport {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string msg)
    {
        ok = false;
        failures.push_back(std::move(msg));
    }
};

template <Scalar S>
ConnectivityReport verify_connectivity(const RectDomain<S>& D)
{
    using C = coord_t<S>;
    ConnectivityReport r;
    auto chain = [&](const std::vector<Step<C>>& st, const char* name, bool upper) {
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (st[i].x_hi < st[i].x_lo)
                r.fail(std::string(name) + " step at y=" + to_string(st[i].y) + " has reversed ends");
            if (i + 1 < st.size() && !(st[i].x_hi == st[i + 1].x_lo))
                r.fail(std::string(name) + " levels " + to_string(st[i].y) + " and " + to_string(st[i + 1].y) + " not connected: " +
                       st[i].x_hi.str() + " vs " + st[i + 1].x_lo.str());
        }
        if (st.empty())
            return;
        if (upper && (st.front().x_lo.inf != -1 || !st.back().x_hi.finite()))
            r.fail("upper boundary must start at -inf and end at a finite x");
        if (!upper && (!st.front().x_lo.finite() || st.back().x_hi.inf != 1))
            r.fail("lower boundary must start at a finite x and end at +inf");
    };
    chain(D.upper, "upper", true);
    chain(D.lower, "lower", false);
    if (D.degenerate)
        return r;

    const auto& O = D.orbits;
    Coord<C> zero(to_coord(D.params.zero()));
    auto find = [](const std::vector<Step<C>>& st, Origin o, std::size_t idx) -> const Step<C>* {
        for (const auto& s : st)
            if (s.origin == o && s.index == idx)
                return &s;
        return nullptr;
    };
    // Sb and STa, Sa and ST^{-1}b meet at x = 0
    if (const Step<C>* sb = find(D.lower, Origin::Lb, 0)) {
        if (!(sb->x_lo == zero))
            r.fail("level Sb does not start at x = 0");
        if (O.La.size() > 1 && O.a.lower.gens.size() > 0 && O.a.lower.gens[0] == Gen::S)
            if (const Step<C>* sta = find(D.lower, Origin::La, 1); sta && !(sta->x_hi == zero))
                r.fail("level STa does not end at x = 0");
    }
    if (const Step<C>* sa = find(D.upper, Origin::Ua, 0)) {
        if (!(sa->x_hi == zero))
            r.fail("level Sa does not end at x = 0");
        if (O.Ub.size() > 1 && O.b.upper.gens.size() > 0 && O.b.upper.gens[0] == Gen::S)
            if (const Step<C>* stb = find(D.upper, Origin::Ub, 1); stb && !(stb->x_lo == zero))
                r.fail("level ST^-1 b does not start at x = 0");
    }
    // y_a^- < a <= y_a^+ joined at x_a, y_b^- <= b < y_b^+ joined at x_b
    // when a (or b) is itself a level the vertical segment at x_a (x_b) may sit
    // next to any of the steps at that level
    C a = to_coord(D.params.a), b = to_coord(D.params.b);
    Coord<C> xa(*D.x_a), xb(*D.x_b);
    for (std::size_t i = 0; i + 1 < D.lower.size(); ++i)
        if (D.lower[i].y < a && !(D.lower[i + 1].y < a)) {
            bool hit = D.lower[i].x_hi == xa;
            for (std::size_t j = i + 1; j + 1 < D.lower.size() && D.lower[j].y == a; ++j)
                hit = hit || D.lower[j].x_hi == xa;
            if (!hit)
                r.fail("levels around a are not joined at x_a");
        }
    for (std::size_t i = 0; i + 1 < D.upper.size(); ++i)
        if (!(b < D.upper[i].y) && b < D.upper[i + 1].y) {
            bool hit = false;
            for (std::size_t j = i + 1; j-- > 0;) {
                hit = hit || D.upper[j].x_hi == xb;
                if (!(D.upper[j].y == b))
                    break;
            }
            if (!hit)
                r.fail("levels around b are not joined at x_b");
        }
    return r;
}

namespace detail {

template <Scalar S>
RectDomain<S> degenerate_domain(const Params<S>& P)
{
    using C = coord_t<S>;
    RectDomain<S> D{P, {}, {}, {}, {}, true, {}};
    TrapRegion<C> R = trapping_region(coord_params(P));
    for (const auto& bx : R.upper)
        D.upper.push_back({bx.x0, bx.x1, bx.y0.v, std::nullopt, 0});
    for (const auto& bx : R.lower)
        D.lower.push_back({bx.x0, bx.x1, bx.y1.v, std::nullopt, 0});
    auto by_y = [](const Step<C>& p, const Step<C>& q) { return p.y < q.y; };
    std::sort(D.upper.begin(), D.upper.end(), by_y);
    std::sort(D.lower.begin(), D.lower.end(), by_y);
    return D;
}

template <Scalar S>
void add_steps(RectDomain<S>& D, const std::vector<Level<S>>& levels, bool a_side, bool upper)
{
    using C = coord_t<S>;
    Coord<C> lo0, hi0;
    ray_of<C>(a_side, *D.x_a, *D.x_b, lo0, hi0);
    for (const auto& l : levels) {
        if (l.y.is_inf())
            throw attractor_error(std::string("level at infinity in ") + origin_name(l.origin));
        Step<C> s{{}, {}, to_coord(l.y.value()), l.origin, l.index};
        if (!transport(lo0, hi0, l.word, s.x_lo, s.x_hi))
            throw attractor_error(std::string("segment of ") + origin_name(l.origin) + "[" + std::to_string(l.index) + "] crosses the pole of S");
        (upper ? D.upper : D.lower).push_back(s);
    }
}

template <Scalar S>
RectDomain<S> assemble(const Params<S>& P, const TruncatedOrbits<S>& O, const Corners<S>& K)
{
    using C = coord_t<S>;
    RectDomain<S> D{P, {}, {}, K.x_a, K.x_b, false, O};
    add_steps(D, O.La, true, false);
    add_steps(D, O.Lb, false, false);
    add_steps(D, O.Ua, true, true);
    add_steps(D, O.Ub, false, true);
    // equal levels are kept as separate steps, ordered by x
    auto order = [](const Step<C>& p, const Step<C>& q) {
        if (!(p.y == q.y))
            return p.y < q.y;
        return p.x_lo < q.x_lo;
    };
    std::sort(D.upper.begin(), D.upper.end(), order);
    std::sort(D.lower.begin(), D.lower.end(), order);
    return D;
}

}  // namespace detail

template <Scalar S>
RectDomain<S> build_attractor(const Params<S>& P, std::size_t cap = 100000)
{
    if (P.degenerate())
        return detail::degenerate_domain(P);
    TruncatedOrbits<S> O = truncated_orbits(P, cap);
    if (!O.finite)
        throw attractor_error("finiteness condition not established within " + std::to_string(cap) + " steps for " + P.str());
    std::string first_failure;
    for (auto [ell, up] : corner_candidates(O)) {
        Corners<S> K = solve_corners(P, *ell, *up);
        RectDomain<S> D = detail::assemble(P, O, K);
        ConnectivityReport rep = verify_connectivity(D);
        if (rep.ok)
            return D;
        if (first_failure.empty())
            first_failure = rep.failures.front();
    }
    throw attractor_error("connectivity failure for " + P.str() + ": " + first_failure);
}

// ---------------------------------------------------------------------------
// Bijectivity

template <Scalar C>
struct LockingSegment {
    Endpoint endpoint;
    C y;
    Coord<C> x_lo, x_hi;
    bool sides_agree = false;  // the upper and lower transports give the same segment
};

template <Scalar C>
struct Piece {
    std::string name;
    Gen map;
    std::vector<Box<C>> boxes, images;
};

template <Scalar C>
struct BijectivityReport {
    std::vector<Piece<C>> pieces;  // U1, U2, U3, L1, L2, L3
    long double overlap = 0, uncovered = 0, extra = 0;
    std::size_t overlap_cells = 0, uncovered_cells = 0, extra_cells = 0;
    std::vector<LockingSegment<C>> locking;

    bool tiles() const { return overlap_cells == 0 && uncovered_cells == 0 && extra_cells == 0; }
};

namespace detail {

// Clip [y0,y1] to [lo,hi]; empty or degenerate results are dropped.
template <Scalar C>
std::optional<std::pair<Coord<C>, Coord<C>>> clip(const Coord<C>& y0, const Coord<C>& y1, const Coord<C>& lo, const Coord<C>& hi)
{
    Coord<C> l = y0 < lo ? lo : y0, h = hi < y1 ? hi : y1;
    if (!(l < h))
        return std::nullopt;
    return std::make_pair(l, h);
}

template <Scalar C>
std::size_t coord_index(const std::vector<Coord<C>>& g, const Coord<C>& c)
{
    auto it = std::lower_bound(g.begin(), g.end(), c);
    return static_cast<std::size_t>(it - g.begin());
}

}  // namespace detail

// Cuts the domain at y = b, 0 (upper) and y = a, 0 (lower), maps each piece by
// the branch of F it lies in and compares the images with the domain cell by cell.
template <Scalar S>
BijectivityReport<coord_t<S>> verify_bijectivity(const RectDomain<S>& D)
{
    using C = coord_t<S>;
    using Cd = Coord<C>;
    BijectivityReport<C> R;
    const Params<S>& P = D.params;
    Cd a(to_coord(P.a)), b(to_coord(P.b)), zero(to_coord(P.zero()));
    Cd ninf = Cd::neg_inf(), pinf = Cd::pos_inf();

    struct Band {
        const char* name;
        bool upper;
        Cd lo, hi;
        Gen g;
    };
    std::vector<Band> bands = {
        {"U1", true, b, pinf, Gen::Tinv}, {"U2", true, ninf, zero, Gen::S}, {"U3", true, zero, b, Gen::S},
        {"L1", false, ninf, a, Gen::T},   {"L2", false, zero, pinf, Gen::S}, {"L3", false, a, zero, Gen::S},
    };
    auto ub = D.upper_boxes(), lb = D.lower_boxes();
    std::vector<Box<C>> images;
    for (const Band& bd : bands) {
        Piece<C> pc{bd.name, bd.g, {}, {}};
        for (const auto& bx : bd.upper ? ub : lb) {
            auto cy = detail::clip(bx.y0, bx.y1, bd.lo, bd.hi);
            if (!cy || !(bx.x0 < bx.x1))
                continue;
            Box<C> part{bx.x0, bx.x1, cy->first, cy->second};
            pc.boxes.push_back(part);
            for (auto& im : map_box(bd.g, part))
                if (!im.degenerate())
                    pc.images.push_back(im);
        }
        images.insert(images.end(), pc.images.begin(), pc.images.end());
        R.pieces.push_back(std::move(pc));
    }

    std::vector<Box<C>> dom;
    for (auto& bx : D.boxes())
        if (!bx.degenerate())
            dom.push_back(bx);
    std::vector<Cd> gx, gy;
    for (const auto* v : {&dom, &images})
        for (const auto& bx : *v) {
            gx.push_back(bx.x0);
            gx.push_back(bx.x1);
            gy.push_back(bx.y0);
            gy.push_back(bx.y1);
        }
    auto uniq = [](std::vector<Cd>& g) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    };
    uniq(gx);
    uniq(gy);
    std::size_t nx = gx.size(), ny = gy.size();
    // 2D difference arrays over cells, then prefix sums
    auto count = [&](const std::vector<Box<C>>& bs) {
        std::vector<long> d((nx + 1) * (ny + 1), 0);
        for (const auto& bx : bs) {
            std::size_t i0 = detail::coord_index(gx, bx.x0), i1 = detail::coord_index(gx, bx.x1);
            std::size_t j0 = detail::coord_index(gy, bx.y0), j1 = detail::coord_index(gy, bx.y1);
            d[i0 * (ny + 1) + j0] += 1;
            d[i1 * (ny + 1) + j0] -= 1;
            d[i0 * (ny + 1) + j1] -= 1;
            d[i1 * (ny + 1) + j1] += 1;
        }
        for (std::size_t i = 0; i <= nx; ++i)
            for (std::size_t j = 0; j <= ny; ++j) {
                long v = d[i * (ny + 1) + j];
                if (i)
                    v += d[(i - 1) * (ny + 1) + j];
                if (j)
                    v += d[i * (ny + 1) + j - 1];
                if (i && j)
                    v -= d[(i - 1) * (ny + 1) + j - 1];
                d[i * (ny + 1) + j] = v;
            }
        return d;
    };
    auto cd = count(dom), ci = count(images);
    for (std::size_t i = 0; i + 1 < nx; ++i)
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            long in_d = cd[i * (ny + 1) + j], in_i = ci[i * (ny + 1) + j];
            if (in_d == in_i && in_d <= 1)
                continue;
            long double m = box_measure(gx[i].to_double(), gx[i + 1].to_double(), gy[j].to_double(), gy[j + 1].to_double());
            if (in_i > 1 || in_d > 1) {
                R.overlap += m;
                ++R.overlap_cells;
            }
            if (in_d >= 1 && in_i == 0) {
                R.uncovered += m;
                ++R.uncovered_cells;
            }
            if (in_d == 0 && in_i >= 1) {
                R.extra += m;
                ++R.extra_cells;
            }
        }

    if (!D.degenerate) {
        for (const CycleResult<S>* c : {&D.orbits.a, &D.orbits.b}) {
            if (!c->met() || !c->relation_identity)
                continue;
            bool a_side = c->endpoint == Endpoint::A;
            Cd lo0, hi0, ul, uh, ll, lh;
            detail::ray_of<C>(a_side, *D.x_a, *D.x_b, lo0, hi0);
            bool okU = detail::transport(lo0, hi0, c->upper_word(), ul, uh);
            bool okL = detail::transport(lo0, hi0, c->lower_word(), ll, lh);
            if (!okU && !okL)
                continue;
            LockingSegment<C> ls{c->endpoint, to_coord(c->end->value()), okU ? ul : ll, okU ? uh : lh, false};
            ls.sides_agree = okU && okL && ul == ll && uh == lh;
            R.locking.push_back(ls);
        }
    }
    return R;
}

// ---------------------------------------------------------------------------
// Comparison with forward iterates of F

struct OracleComparison {
    double inside_fraction = 0;
    double boundary_gap = 0;
    double point_gap = 0;
    std::size_t segments = 0;  // boundary segments inside the window
    std::size_t samples = 0;   // boundary points checked
};

struct Window {
    double x0 = -3, x1 = 3, y0 = -6, y1 = 6;
};

namespace detail {

// Uniform grid hash over a window for nearest-point queries.
class PointGrid {
public:
    PointGrid(const Cloud& c, const Window& w, double cell) : w_(w), cell_(cell)
    {
        nx_ = static_cast<long>(std::ceil((w.x1 - w.x0) / cell)) + 1;
        ny_ = static_cast<long>(std::ceil((w.y1 - w.y0) / cell)) + 1;
        for (const auto& p : c.pts) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
                continue;
            if (p[0] < w.x0 - cell || p[0] > w.x1 + cell || p[1] < w.y0 - cell || p[1] > w.y1 + cell)
                continue;
            cells_[key(p[0], p[1])].push_back(p);
        }
    }

    // Distance to the nearest stored point, searching up to `max_r`.
    double nearest(double x, double y, double max_r) const
    {
        long cx = ix(x), cy = iy(y);
        long rings = static_cast<long>(std::ceil(max_r / cell_)) + 1;
        double best = HUGE_VAL;
        for (long r = 0; r <= rings; ++r) {
            for (long i = cx - r; i <= cx + r; ++i)
                for (long j = cy - r; j <= cy + r; ++j) {
                    if (std::max(std::labs(i - cx), std::labs(j - cy)) != r)
                        continue;
                    auto it = cells_.find(i * 1000003L + j);
                    if (it == cells_.end())
                        continue;
                    for (const auto& p : it->second)
                        best = std::min(best, std::hypot(p[0] - x, p[1] - y));
                }
            if (best <= r * cell_)
                break;
        }
        return best;
    }

private:
    long ix(double x) const { return static_cast<long>(std::floor((x - w_.x0) / cell_)); }
    long iy(double y) const { return static_cast<long>(std::floor((y - w_.y0) / cell_)); }
    long key(double x, double y) const { return ix(x) * 1000003L + iy(y); }

    Window w_;
    double cell_;
    long nx_, ny_;
    std::unordered_map<long, std::vector<std::array<double, 2>>> cells_;
};

}  // namespace detail

// Boundary segments of the domain clipped to a window, each sampled with
// spacing `h`: the horizontal steps and the vertical risers between
// consecutive steps.
template <Scalar S>
std::vector<std::vector<std::array<double, 2>>> boundary_segments(const RectDomain<S>& D, const Window& w, double h)
{
    std::vector<std::vector<std::array<double, 2>>> out;
    auto seg = [&](double x0, double y0, double x1, double y1) {
        x0 = std::clamp(x0, w.x0, w.x1);
        x1 = std::clamp(x1, w.x0, w.x1);
        y0 = std::clamp(y0, w.y0, w.y1);
        y1 = std::clamp(y1, w.y0, w.y1);
        double len = std::hypot(x1 - x0, y1 - y0);
        if (len == 0)  // clipped away to a single point on the window edge
            return;
        std::size_t n = static_cast<std::size_t>(std::ceil(len / h));
        std::vector<std::array<double, 2>> pts;
        for (std::size_t k = 0; k <= n; ++k) {
            double t = n ? static_cast<double>(k) / n : 0.0;
            pts.push_back({x0 + t * (x1 - x0), y0 + t * (y1 - y0)});
        }
        out.push_back(std::move(pts));
    };
    auto in_window = [&](double y) { return y >= w.y0 && y <= w.y1; };
    for (const auto* st : {&D.upper, &D.lower}) {
        for (std::size_t i = 0; i < st->size(); ++i) {
            const auto& s = (*st)[i];
            double y = to_double(s.y);
            double x0 = s.x_lo.to_double(), x1 = s.x_hi.to_double();
            if (in_window(y) && x1 >= w.x0 && x0 <= w.x1)
                seg(x0, y, x1, y);
            if (i + 1 < st->size()) {
                double xj = s.x_hi.to_double(), y2 = to_double((*st)[i + 1].y);
                if (xj >= w.x0 && xj <= w.x1 && y2 >= w.y0 && y <= w.y1)
                    seg(xj, y, xj, y2);
            }
        }
    }
    return out;
}

// inside_fraction: cloud points in the closed domain.  boundary_gap: the
// largest, over boundary segments in the window, of the distance from the
// segment to the nearest cloud point.  point_gap is the stricter sup over
// every sampled boundary point and depends strongly on the cloud size.
template <Scalar S>
OracleComparison compare_with_oracle(const RectDomain<S>& D, const Cloud& cloud, const Window& w = {}, double tol = 1e-9)
{
    if (cloud.pts.empty())
        throw error("compare_with_oracle needs a nonempty cloud");
    OracleComparison r;
    std::size_t inside = 0;
    for (const auto& p : cloud.pts)
        if (D.contains(p[0], p[1], tol))
            ++inside;
    r.inside_fraction = static_cast<double>(inside) / static_cast<double>(cloud.pts.size());
    detail::PointGrid grid(cloud, w, 0.05);
    for (const auto& seg : boundary_segments(D, w, 0.01)) {
        double seg_gap = HUGE_VAL;
        for (const auto& p : seg) {
            double d = grid.nearest(p[0], p[1], 1.0);
            seg_gap = std::min(seg_gap, d);
            r.point_gap = std::max(r.point_gap, d);
        }
        r.boundary_gap = std::max(r.boundary_gap, seg_gap);
        r.samples += seg.size();
        ++r.segments;
    }
    return r;
}

struct ReductionReport {
    std::size_t points = 0;
    std::size_t reached = 0;
    std::size_t max_time = 0;
    double coverage() const { return points ? static_cast<double>(reached) / static_cast<double>(points) : std::nan(""); }
};

// Lattice of grid x grid points in [-R,R]^2 (cell centres, diagonal skipped),
// each iterated by F until it enters the domain.
template <Scalar S>
ReductionReport reduction_scan(const RectDomain<S>& D, std::size_t grid, std::size_t cap, double R = 10.0, unsigned threads = 0)
{
    ReductionReport rep;
    if (grid == 0)
        return rep;
    const double a = to_double(D.params.a), b = to_double(D.params.b);
    std::vector<std::array<double, 2>> starts;
    for (std::size_t i = 0; i < grid; ++i)
        for (std::size_t j = 0; j < grid; ++j) {
            double x = -R + (i + 0.5) * 2 * R / grid, y = -R + (j + 0.5) * 2 * R / grid;
            if (std::fabs(x - y) > 1e-12)
                starts.push_back({x, y});
        }
    rep.points = starts.size();
    std::atomic<std::size_t> reached{0}, next{0};
    std::vector<std::size_t> times(starts.size(), 0);
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < starts.size();) {
            double x = starts[k][0], y = starts[k][1];
            for (std::size_t n = 0; n <= cap; ++n) {
                if (D.contains(x, y, 0.0)) {
                    reached.fetch_add(1);
                    times[k] = n;
                    break;
                }
                detail::F_double(x, y, a, b);
            }
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(work);
    for (auto& th : pool)
        th.join();
    rep.reached = reached.load();
    rep.max_time = starts.empty() ? 0 : *std::max_element(times.begin(), times.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Exact interior test and absorption of boundary points

// Interior of the union of the two components.
template <Scalar S>
bool strictly_inside(const RectDomain<S>& D, const Point2<coord_t<S>>& p)
{
    using C = coord_t<S>;
    if (p.x.is_inf() || p.y.is_inf())
        return false;
    Coord<C> x(p.x.value());
    const C& y = p.y.value();
    if (!D.upper.empty() && x < D.upper.back().x_hi) {
        std::optional<C> top;
        for (const auto& s : D.upper)
            if (s.x_lo <= x && x <= s.x_hi && (!top || *top < s.y))
                top = s.y;
        if (top && *top < y)
            return true;
    }
    if (!D.lower.empty() && D.lower.front().x_lo < x) {
        std::optional<C> bot;
        for (const auto& s : D.lower)
            if (s.x_lo <= x && x <= s.x_hi && (!bot || s.y < *bot))
                bot = s.y;
        if (bot && y < *bot)
            return true;
    }
    return false;
}

struct AbsorptionReport {
    std::size_t samples = 0, absorbed = 0, max_steps = 0;
    std::vector<std::string> stuck;  // boundary points not absorbed within the limit
};

// Midpoints of every horizontal step and vertical riser, iterated exactly by F.
template <Scalar S>
AbsorptionReport boundary_absorption(const RectDomain<S>& D, std::size_t limit = 200)
{
    using C = coord_t<S>;
    AbsorptionReport rep;
    Params<C> PC = detail::coord_params(D.params);
    C one = PC.one(), two = one + one;
    auto mid = [&](const Coord<C>& lo, const Coord<C>& hi) -> C {
        if (lo.finite() && hi.finite())
            return (lo.v + hi.v) / two;
        if (lo.finite())
            return lo.v + one;
        return hi.v - one;
    };
    std::vector<Point2<C>> pts;
    for (const auto* st : {&D.upper, &D.lower})
        for (std::size_t i = 0; i < st->size(); ++i) {
            const auto& s = (*st)[i];
            pts.push_back({ExtReal<C>(mid(s.x_lo, s.x_hi)), ExtReal<C>(s.y)});
            if (i + 1 < st->size() && s.x_hi.finite())
                pts.push_back({ExtReal<C>(s.x_hi.v), ExtReal<C>((s.y + (*st)[i + 1].y) / two)});
        }
    for (auto p : pts) {
        ++rep.samples;
        Point2<C> start = p;
        bool done = false;
        for (std::size_t n = 1; n <= limit; ++n) {
            p = F_step(p, PC);
            if (strictly_inside(D, p)) {
                ++rep.absorbed;
                rep.max_steps = std::max(rep.max_steps, n);
                done = true;
                break;
            }
        }
        if (!done)
            rep.stuck.push_back("(" + start.x.str() + ", " + start.y.str() + ")");
    }
    return rep;
}

}  // namespace abcf
