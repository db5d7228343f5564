#pragma once

// Shared test fixtures and independent oracles.

#include <cmath>
#include <vector>

#include "bendgraph/builder.hpp"
#include "bendgraph/core.hpp"
#include "bendgraph/geom2.hpp"

namespace fixtures {

using namespace bendgraph;

// 100 x 50 x 2 plate
inline builder::BuiltPart plate() {
    builder::ChainPartSpec s;
    s.thickness = 2;
    s.width = 50;
    s.flange_lens = {100};
    return builder::build_chain_part(s);
}

// t=2, r_inner=4, legs 50 (flanges 44), width 30
inline builder::BuiltPart lbracket() {
    builder::ChainPartSpec s;
    s.thickness = 2;
    s.width = 30;
    s.flange_lens = {44, 44};
    s.bends = {{4, kPi / 2}};
    return builder::build_chain_part(s);
}

inline builder::BuiltPart uchannel() {
    builder::ChainPartSpec s;
    s.thickness = 2;
    s.width = 30;
    s.flange_lens = {40, 50, 40};
    s.bends = {{4, kPi / 2}, {4, kPi / 2}};
    return builder::build_chain_part(s);
}

inline builder::BuiltPart corner_part() {
    builder::CornerPartSpec s;
    s.thickness = 2;
    s.inner_radius = 4;
    s.base_x = 60;
    s.base_y = 50;
    s.flap_height_1 = 30;
    s.flap_height_2 = 25;
    return builder::build_corner_part(s);
}

inline builder::BuiltPart holed_plate() {
    builder::ChainPartSpec s;
    s.thickness = 2;
    s.width = 50;
    s.flange_lens = {100};
    s.holes = {{0, 50, 25, 5}};
    return builder::build_chain_part(s);
}

// Brute-force ray/loop oracle: tessellate every curve densely and intersect
// the ray with each tiny segment. Independent of the analytic arc
// intersection used by the implementation.
inline double brute_force_first_crossing(const geom2::Loop2& loop, Vec2 origin,
                                         Vec2 dir, int density = 4096) {
    double best = 1e300;
    auto segment_hit = [&](Vec2 a, Vec2 b) {
        Vec2 e = b - a;
        double denom = dir.cross(e);
        if (std::abs(denom) < 1e-15) return;
        Vec2 d = a - origin;
        double t = d.cross(e) / denom;
        double u = d.cross(dir) / denom;
        if (u >= -1e-9 && u <= 1 + 1e-9 && t > 1e-9 && t < best) best = t;
    };
    for (const geom2::Curve2& c : loop.curves) {
        if (auto* s = std::get_if<geom2::Seg2>(&c)) {
            segment_hit(s->a, s->b);
        } else {
            const auto& a = std::get<geom2::Arc2>(c);
            Vec2 prev = a.at(0);
            for (int i = 1; i <= density; ++i) {
                Vec2 cur = a.at(double(i) / density);
                segment_hit(prev, cur);
                prev = cur;
            }
        }
    }
    return best;
}

// Least-squares B-spline patch (quadratic in u, linear in v) approximating a
// quarter of the cylinder x^2+y^2=r^2, z in [0, height]. Built in test code
// only; serves as the sampled-freeform stand-in for recognition checks.
inline brep::BSplineGeom cylinder_quadrant_patch(double radius, double height,
                                                 int spans = 8) {
    brep::BSplineGeom b;
    b.deg_u = 2;
    b.deg_v = 1;
    b.num_u = spans + 2;
    b.num_v = 2;
    b.knots_u.assign(3, 0.0);
    for (int k = 1; k < spans; ++k) b.knots_u.push_back(double(k) / spans);
    for (int k = 0; k < 3; ++k) b.knots_u.push_back(1.0);
    b.knots_v = {0, 0, 1, 1};
    int unknowns = b.num_u * b.num_v;
    // normal equations per coordinate
    std::vector<std::vector<double>> ata(unknowns, std::vector<double>(unknowns, 0.0));
    std::vector<std::array<double, 3>> atb(unknowns, {0, 0, 0});
    const int su = 64, sv = 3;
    std::vector<double> nu(b.deg_u + 1), du(b.deg_u + 1);
    std::vector<double> nv(b.deg_v + 1), dv(b.deg_v + 1);
    for (int iu = 0; iu <= su; ++iu) {
        double u = double(iu) / su;
        int span_u = brep::bspline::find_span(b.num_u, b.deg_u, u, b.knots_u);
        brep::bspline::basis_with_derivs(span_u, u, b.deg_u, b.knots_u, nu.data(), du.data());
        for (int iv = 0; iv < sv; ++iv) {
            double v = double(iv) / (sv - 1);
            int span_v = brep::bspline::find_span(b.num_v, b.deg_v, v, b.knots_v);
            brep::bspline::basis_with_derivs(span_v, v, b.deg_v, b.knots_v, nv.data(), dv.data());
            double theta = u * kPi / 2;
            Vec3 p{radius * std::cos(theta), radius * std::sin(theta), v * height};
            std::vector<std::pair<int, double>> row;
            for (int a = 0; a <= b.deg_u; ++a)
                for (int c = 0; c <= b.deg_v; ++c)
                    row.push_back({(span_u - b.deg_u + a) * b.num_v + (span_v - b.deg_v + c),
                                   nu[a] * nv[c]});
            for (auto [i, wi] : row) {
                for (auto [j, wj] : row) ata[i][j] += wi * wj;
                atb[i][0] += wi * p.x;
                atb[i][1] += wi * p.y;
                atb[i][2] += wi * p.z;
            }
        }
    }
    // gaussian elimination with partial pivoting
    std::vector<std::vector<double>> m = ata;
    std::vector<std::array<double, 3>> rhs = atb;
    for (int col = 0; col < unknowns; ++col) {
        int piv = col;
        for (int r = col + 1; r < unknowns; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = 0; r < unknowns; ++r) {
            if (r == col || std::abs(m[col][col]) < 1e-14) continue;
            double f = m[r][col] / m[col][col];
            for (int c = col; c < unknowns; ++c) m[r][c] -= f * m[col][c];
            for (int k = 0; k < 3; ++k) rhs[r][k] -= f * rhs[col][k];
        }
    }
    b.ctrl.resize(unknowns);
    for (int i = 0; i < unknowns; ++i)
        b.ctrl[i] = {rhs[i][0] / m[i][i], rhs[i][1] / m[i][i], rhs[i][2] / m[i][i]};
    b.sense = 1;
    return b;
}

// A one-face pseudo-solid carrying the patch (enough for per-face queries).
inline brep::BrepSolid patch_only_solid(const brep::BSplineGeom& b) {
    brep::BrepSolid s;
    brep::Face f;
    f.id = 0;
    f.surf.kind = brep::SurfaceKind::BSpline;
    f.surf.bsp = b;
    double u0 = b.knots_u[b.deg_u], u1 = b.knots_u[b.num_u];
    double v0 = b.knots_v[b.deg_v], v1 = b.knots_v[b.num_v];
    f.uv.outer.curves = {geom2::Seg2{{u0, v0}, {u1, v0}}, geom2::Seg2{{u1, v0}, {u1, v1}},
                         geom2::Seg2{{u1, v1}, {u0, v1}}, geom2::Seg2{{u0, v1}, {u0, v0}}};
    f.uv.normalize();
    f.uv.bbox(f.uv_lo, f.uv_hi);
    s.faces.push_back(std::move(f));
    return s;
}

// Brute-force adjacency: distinct face pairs sharing at least one edge.
inline int brute_force_adjacent_pairs(const brep::BrepSolid& s) {
    std::set<std::pair<int, int>> pairs;
    for (const brep::Edge& e : s.edges) {
        int a = std::min(e.faces[0], e.faces[1]);
        int b = std::max(e.faces[0], e.faces[1]);
        if (a != b) pairs.insert({a, b});
    }
    return int(pairs.size());
}

}  // namespace fixtures
