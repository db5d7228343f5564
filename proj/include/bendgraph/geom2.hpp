#pragma once

// Planar loop geometry for trimmed face domains: segments and circular arcs
// chained into closed loops, with exact area/ray queries and a tessellation
// based point-in-region test.

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "bendgraph/core.hpp"

namespace bendgraph::geom2 {

struct Seg2 {
    Vec2 a, b;
};

// point(s) = center + r * dir(a0 + s * sweep), s in [0,1]; sweep signed.
struct Arc2 {
    Vec2 center;
    double r = 0;
    double a0 = 0;
    double sweep = 0;

    Vec2 at(double s) const {
        double a = a0 + s * sweep;
        return center + Vec2{std::cos(a), std::sin(a)} * r;
    }
};

using Curve2 = std::variant<Seg2, Arc2>;

inline Vec2 curve_start(const Curve2& c) {
    if (auto* s = std::get_if<Seg2>(&c)) return s->a;
    return std::get<Arc2>(c).at(0);
}
inline Vec2 curve_end(const Curve2& c) {
    if (auto* s = std::get_if<Seg2>(&c)) return s->b;
    return std::get<Arc2>(c).at(1);
}

struct Loop2 {
    std::vector<Curve2> curves;  // head-to-tail closed chain
};

// Signed area by Green's theorem; exact for arcs.
inline double signed_area(const Loop2& loop) {
    double twice = 0;
    for (const Curve2& c : loop.curves) {
        if (auto* s = std::get_if<Seg2>(&c)) {
            twice += s->a.cross(s->b);
        } else {
            const Arc2& a = std::get<Arc2>(c);
            double t0 = a.a0, t1 = a.a0 + a.sweep;
            twice += a.r * a.r * a.sweep;
            twice += a.center.x * a.r * (std::sin(t1) - std::sin(t0));
            twice -= a.center.y * a.r * (std::cos(t1) - std::cos(t0));
        }
    }
    return 0.5 * twice;
}

inline void reverse_loop(Loop2& loop) {
    std::reverse(loop.curves.begin(), loop.curves.end());
    for (Curve2& c : loop.curves) {
        if (auto* s = std::get_if<Seg2>(&c)) {
            std::swap(s->a, s->b);
        } else {
            Arc2& a = std::get<Arc2>(c);
            a.a0 = a.a0 + a.sweep;
            a.sweep = -a.sweep;
        }
    }
}

inline std::vector<Vec2> tessellate(const Loop2& loop, int arc_segments) {
    std::vector<Vec2> pts;
    for (const Curve2& c : loop.curves) {
        if (auto* s = std::get_if<Seg2>(&c)) {
            pts.push_back(s->a);
        } else {
            const Arc2& a = std::get<Arc2>(c);
            for (int i = 0; i < arc_segments; ++i)
                pts.push_back(a.at(double(i) / arc_segments));
        }
    }
    return pts;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

struct Region2 {
    Loop2 outer;                 // CCW
    std::vector<Loop2> inners;   // CW

    // Normalize orientations: outer CCW, inners CW.
    void normalize() {
        if (signed_area(outer) < 0) reverse_loop(outer);
        for (Loop2& l : inners)
            if (signed_area(l) > 0) reverse_loop(l);
    }

    double area() const {
        double a = signed_area(outer);
        for (const Loop2& l : inners) a += signed_area(l);
        return a;
    }

    // Even-odd test with arcs tessellated; arc_segments fixed at 64 to match
    // the UV-mask convention.
    bool contains(Vec2 p, int arc_segments = 64) const {
        if (!point_in_polygon(tessellate(outer, arc_segments), p)) return false;
        for (const Loop2& l : inners)
            if (point_in_polygon(tessellate(l, arc_segments), p)) return false;
        return true;
    }

    void bbox(Vec2& lo, Vec2& hi) const {
        lo = {1e300, 1e300};
        hi = {-1e300, -1e300};
        auto take = [&](Vec2 p) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
        };
        for (const Curve2& c : outer.curves) {
            if (auto* s = std::get_if<Seg2>(&c)) {
                take(s->a);
                take(s->b);
            } else {
                const Arc2& a = std::get<Arc2>(c);
                take(a.at(0));
                take(a.at(1));
                // axis-aligned extremes inside the swept range
                for (int k = -8; k <= 8; ++k) {
                    double ang = k * (kPi / 2);
                    double s = (ang - a.a0) / a.sweep;
                    if (s > 0 && s < 1) take(a.at(s));
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Exact ray / loop intersections (flange length measurement)
// ---------------------------------------------------------------------------

// Positive-t intersections of the ray origin + t*dir (dir unit) with a curve.
inline void ray_hits(const Curve2& c, Vec2 origin, Vec2 dir, std::vector<double>& ts) {
    if (auto* s = std::get_if<Seg2>(&c)) {
        Vec2 e = s->b - s->a;
        double denom = dir.cross(e);
        if (std::abs(denom) < 1e-14) return;  // parallel
        Vec2 d = s->a - origin;
        double t = d.cross(e) / denom;
        double u = d.cross(dir) / denom;
        if (u >= -1e-12 && u <= 1 + 1e-12) ts.push_back(t);
    } else {
        const Arc2& a = std::get<Arc2>(c);
        // |origin + t*dir - center|^2 = r^2
        Vec2 oc = origin - a.center;
        double b = 2 * oc.dot(dir);
        double cc = oc.dot(oc) - a.r * a.r;
        double disc = b * b - 4 * cc;
        if (disc < 0) return;
        double sq = std::sqrt(disc);
        for (double t : {(-b - sq) / 2, (-b + sq) / 2}) {
            Vec2 p = origin + dir * t;
            double ang = std::atan2(p.y - a.center.y, p.x - a.center.x);
            // position within the sweep
            double rel = (ang - a.a0) / a.sweep;
            // bring into the closest wrap
            double period = 2 * kPi / std::abs(a.sweep);
            while (rel < -1e-9) rel += period;
            while (rel > period - 1e-9) rel -= period;
            if (rel >= -1e-9 && rel <= 1 + 1e-9) ts.push_back(t);
        }
    }
}

// First crossing of the loop strictly ahead of the origin (t > tol).
inline std::optional<double> first_loop_crossing(const Loop2& loop, Vec2 origin,
                                                 Vec2 dir, double tol = 1e-9) {
    std::vector<double> ts;
    for (const Curve2& c : loop.curves) ray_hits(c, origin, dir, ts);
    std::optional<double> best;
    for (double t : ts)
        if (t > tol && (!best || t < *best)) best = t;
    return best;
}

}  // namespace bendgraph::geom2
