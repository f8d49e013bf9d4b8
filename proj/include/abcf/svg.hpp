#pragma once

#include "abcf/attractor.hpp"

#include <cstdio>
#include <string>

namespace abcf {

struct SvgStyle {
    int size = 800;
    const char* upper_fill = "#9ecae1";
    const char* lower_fill = "#fdae6b";
    const char* stroke = "#08306b";
    const char* point = "#222222";
};

namespace detail {

class SvgCanvas {
public:
    SvgCanvas(const Window& w, int size) : w_(w), size_(size)
    {
        if (!(w.x0 < w.x1) || !(w.y0 < w.y1) || !std::isfinite(w.x0) || !std::isfinite(w.x1) || !std::isfinite(w.y0) || !std::isfinite(w.y1))
            throw error("render_svg needs a finite nonempty window");
    }

    // Window to pixel coordinates, y pointing up; infinities clamp to the edges.
    double px(double x) const { return (std::clamp(x, w_.x0, w_.x1) - w_.x0) / (w_.x1 - w_.x0) * size_; }
    double py(double y) const { return size_ - (std::clamp(y, w_.y0, w_.y1) - w_.y0) / (w_.y1 - w_.y0) * size_; }
    bool inside(double x, double y) const { return w_.x0 <= x && x <= w_.x1 && w_.y0 <= y && y <= w_.y1; }

    static std::string num(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v == 0 ? 0.0 : v);  // no "-0.00"
        std::string s = buf;
        return s == "-0.00" ? "0.00" : s;
    }

    void rect(double x0, double x1, double y0, double y1, const char* fill)
    {
        double l = px(x0), r = px(x1), t = py(y1), b = py(y0);
        if (r - l <= 0 || b - t <= 0)
            return;
        out_ += "<rect x=\"" + num(l) + "\" y=\"" + num(t) + "\" width=\"" + num(r - l) + "\" height=\"" + num(b - t) + "\" fill=\"" + fill + "\"/>\n";
    }

    void polyline(const std::vector<std::array<double, 2>>& pts, const char* stroke)
    {
        if (pts.size() < 2)
            return;
        out_ += "<polyline fill=\"none\" stroke=\"";
        out_ += stroke;
        out_ += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i)
                out_ += ' ';
            out_ += num(px(pts[i][0])) + "," + num(py(pts[i][1]));
        }
        out_ += "\"/>\n";
    }

    void dot(double x, double y, const char* fill)
    {
        out_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"0.7\" fill=\"" + fill + "\"/>\n";
    }

    void raw(const std::string& s) { out_ += s; }
    const std::string& str() const { return out_; }

private:
    Window w_;
    int size_;
    std::string out_;
};

}  // namespace detail

// Steps are drawn as filled boxes, the two boundary step functions as
// polylines, and cloud points inside the window as dots.
template <Scalar S>
std::string render_svg(const RectDomain<S>& D, const Cloud* cloud = nullptr, const Window& w = {}, const SvgStyle& st = {})
{
    detail::SvgCanvas cv(w, st.size);
    const std::string n = std::to_string(st.size);
    cv.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    cv.raw("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + n + "\" height=\"" + n + "\" viewBox=\"0 0 " + n + " " + n + "\">\n");
    cv.raw("<title>attractor for (a,b) = " + D.params.str() + "</title>\n");
    cv.raw("<rect x=\"0\" y=\"0\" width=\"" + n + "\" height=\"" + n + "\" fill=\"white\"/>\n");

    const double inf = HUGE_VAL;
    for (const auto& s : D.upper)
        cv.rect(s.x_lo.to_double(), s.x_hi.to_double(), to_double(s.y), inf, st.upper_fill);
    for (const auto& s : D.lower)
        cv.rect(s.x_lo.to_double(), s.x_hi.to_double(), -inf, to_double(s.y), st.lower_fill);

    // axes
    cv.polyline({{w.x0, 0}, {w.x1, 0}}, "#bbbbbb");
    cv.polyline({{0, w.y0}, {0, w.y1}}, "#bbbbbb");

    // Consecutive steps are joined by a riser when they meet; otherwise a new
    // polyline starts.
    auto staircase = [&](const std::vector<Step<coord_t<S>>>& steps, bool upper) {
        std::vector<std::array<double, 2>> pts;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& s = steps[i];
            double y = to_double(s.y), lo = s.x_lo.to_double(), hi = s.x_hi.to_double();
            bool joined = i > 0 && steps[i - 1].x_hi == s.x_lo;
            if (!joined) {
                cv.polyline(pts, st.stroke);
                pts.clear();
                if (!upper)
                    pts.push_back({lo, -inf});
            }
            pts.push_back({lo, y});
            pts.push_back({hi, y});
            bool next = i + 1 < steps.size() && steps[i + 1].x_lo == s.x_hi;
            if (!next && upper)
                pts.push_back({hi, inf});
        }
        cv.polyline(pts, st.stroke);
    };
    staircase(D.upper, true);
    staircase(D.lower, false);

    if (cloud)
        for (const auto& p : cloud->pts)
            if (cv.inside(p[0], p[1]))
                cv.dot(p[0], p[1], st.point);
    cv.raw("</svg>\n");
    return cv.str();
}

}  // namespace abcf
