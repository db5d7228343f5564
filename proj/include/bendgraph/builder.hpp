#pragma once

// Constructive solid builder for folded sheet parts. A part is a thick
// profile (straight flanges joined by tangent arcs) swept along the bend
// axis direction, optionally with drilled shell holes, axial tunnel holes,
// a tapered end flange, or the two-flap corner template. Every face, edge
// and vertex is placed analytically, so the returned ground truth is exact.

#include <cmath>
#include <map>
#include <vector>

#include "bendgraph/brep.hpp"
#include "bendgraph/core.hpp"

namespace bendgraph::builder {

using brep::BrepSolid;
using brep::CurveGeom;
using brep::CurveKind;
using brep::Edge;
using brep::EdgeUse;
using brep::Face;
using brep::Loop;
using brep::SurfaceGeom;
using brep::SurfaceKind;

// ---------------------------------------------------------------------------
// Part specifications
// ---------------------------------------------------------------------------

struct BendParam {
    double inner_radius = 0;
    double angle = 0;  // signed turn, |angle| in (0, 3*pi/4]
};

struct ShellHole {
    int flange = 0;      // index into the flange chain
    double s_along = 0;  // distance from the flange start tangency
    double y_center = 0;
    double radius = 0;
};

struct TunnelHole {
    int flange = 0;
    double s_along = 0;
    double radius = 0;
};

struct ChainPartSpec {
    double thickness = 0;
    double width = 0;                  // sweep extent
    std::vector<double> flange_lens;   // bends.size() + 1 entries (length at y=0)
    double last_len_at_w = -1;         // taper: last flange length at y=width
    std::vector<BendParam> bends;
    std::vector<ShellHole> holes;
    std::vector<TunnelHole> tunnels;

    double last_len(double y_frac) const {
        double l0 = flange_lens.back();
        double l1 = last_len_at_w < 0 ? l0 : last_len_at_w;
        return l0 + (l1 - l0) * y_frac;
    }
};

struct CornerPartSpec {
    double thickness = 0;
    double base_x = 0;   // base extent along x
    double base_y = 0;   // base extent along y
    double inner_radius = 0;
    double flap_height_1 = 0;  // flap on the x~0 edge
    double flap_height_2 = 0;  // flap on the y~0 edge
};

// ---------------------------------------------------------------------------
// Exact ground truth
// ---------------------------------------------------------------------------

using Role = SheetRole;

struct GtBend {
    int inner_face = -1, outer_face = -1;
    double inner_radius = 0, outer_radius = 0;
    double length = 0;
    double angle = 0;      // inner-cylinder arc angle, (0, pi)
    int orientation = 0;   // +1 toward the top shell normal, -1 away
    // flange length at axial fraction 0 and 1 on either side (affine)
    double flange_a0 = 0, flange_a1 = 0;
    double flange_b0 = 0, flange_b1 = 0;
    std::vector<int> corner_partners;
    Vec3 axis_point, axis_dir;
    double axis_v0 = 0, axis_v1 = 0;
};

struct GtHole {
    std::vector<int> wall_faces;
    bool side_hole = false;
    double diameter = 0;
};

struct GroundTruth {
    std::vector<Role> roles;
    std::vector<GtBend> bends;
    std::vector<GtHole> holes;
    std::vector<int> contour_faces;
    double thickness = 0;
    double total_area = 0;

    int through_holes() const { return int(holes.size()); }
};

struct BuiltPart {
    BrepSolid solid;
    GroundTruth gt;
};

// ---------------------------------------------------------------------------
// Low-level assembly
// ---------------------------------------------------------------------------

namespace detail {

class Assembler {
public:
    int vertex(const Vec3& p) {
        solid.vertices.push_back(p);
        return int(solid.vertices.size()) - 1;
    }

    int line(int v1, int v2) {
        Edge e;
        e.v1 = v1;
        e.v2 = v2;
        e.curve.kind = CurveKind::Line;
        e.curve.point = solid.vertices[v1];
        Vec3 d = solid.vertices[v2] - solid.vertices[v1];
        e.curve.dir = d.normalized();
        e.t1 = 0;
        e.t2 = d.norm();
        solid.edges.push_back(e);
        return int(solid.edges.size()) - 1;
    }

    // Arc from v1 to v2 turning positively around `axis`; sweep in (0, 2*pi).
    int arc(int v1, int v2, const Vec3& center, const Vec3& axis, double radius) {
        Edge e;
        e.v1 = v1;
        e.v2 = v2;
        e.curve.kind = CurveKind::Circle;
        e.curve.center = center;
        e.curve.axis = axis;
        e.curve.radius = radius;
        Vec3 r1 = solid.vertices[v1] - center;
        r1 = r1 - axis * axis.dot(r1);
        e.curve.ref_u = r1.normalized();
        e.curve.ref_v = axis.cross(e.curve.ref_u);
        Vec3 r2 = solid.vertices[v2] - center;
        double a2 = std::atan2(r2.dot(e.curve.ref_v), r2.dot(e.curve.ref_u));
        while (a2 <= 1e-12) a2 += 2 * kPi;
        e.t1 = 0;
        e.t2 = a2;
        solid.edges.push_back(e);
        return int(solid.edges.size()) - 1;
    }

    int plane_face(const Vec3& origin, const Vec3& normal, const Vec3& u_hint,
                   Loop outer, std::vector<Loop> inners = {}) {
        SurfaceGeom g;
        g.kind = SurfaceKind::Plane;
        g.plane.origin = origin;
        g.plane.normal = normal.normalized();
        Vec3 u = u_hint - g.plane.normal * g.plane.normal.dot(u_hint);
        g.plane.axis_u = u.normalized();
        g.plane.axis_v = g.plane.normal.cross(g.plane.axis_u);
        return face(g, std::move(outer), std::move(inners));
    }

    int cylinder_face(const Vec3& origin, const Vec3& axis, double radius,
                      double sense, Loop outer, std::vector<Loop> inners = {}) {
        SurfaceGeom g;
        g.kind = SurfaceKind::Cylinder;
        g.cyl.origin = origin;
        g.cyl.axis = axis.normalized();
        g.cyl.ref_u = any_perpendicular(g.cyl.axis);
        g.cyl.ref_v = g.cyl.axis.cross(g.cyl.ref_u);
        g.cyl.radius = radius;
        g.cyl.sense = sense;
        return face(g, std::move(outer), std::move(inners));
    }

    int face(SurfaceGeom g, Loop outer, std::vector<Loop> inners) {
        Face f;
        f.id = int(solid.faces.size());
        f.surf = std::move(g);
        f.outer = std::move(outer);
        f.inners = std::move(inners);
        solid.faces.push_back(std::move(f));
        return int(solid.faces.size()) - 1;
    }

    BrepSolid finish() {
        brep::finalize_topology(solid);
        return std::move(solid);
    }

    BrepSolid solid;
};

inline Loop loop_of(std::initializer_list<EdgeUse> uses) {
    Loop l;
    l.uses.assign(uses);
    return l;
}

// Shared deterministic convention: the top shell is the one holding the
// largest shell face; near-ties (1e-9 relative) resolve to the smaller id.
inline int largest_face_with_ties(const std::vector<double>& areas,
                                  const std::vector<bool>& eligible) {
    double amax = -1;
    for (size_t i = 0; i < areas.size(); ++i)
        if (eligible[i]) amax = std::max(amax, areas[i]);
    for (size_t i = 0; i < areas.size(); ++i)
        if (eligible[i] && areas[i] >= amax * (1 - 1e-9)) return int(i);
    throw Error("no eligible face");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chain parts (plate, L-bracket, U-channel, general folded strips)
// ---------------------------------------------------------------------------

inline BuiltPart build_chain_part(const ChainPartSpec& spec) {
    const double t = spec.thickness;
    const double w = spec.width;
    const int n = int(spec.bends.size());
    if (int(spec.flange_lens.size()) != n + 1)
        throw Error("chain spec needs bends+1 flange lengths");

    // --- midline walk -----------------------------------------------------
    struct FlangeGeo {
        Vec2 start, dir;
        double len0, len1;  // len at y=0 / y=width
    };
    struct BendGeo {
        Vec2 center;
        double r_mid;     // midline radius
        double angle;     // signed
        Vec2 dir_in, dir_out;
    };
    std::vector<FlangeGeo> flanges;
    std::vector<BendGeo> arcs;
    Vec2 m{0, 0}, d{1, 0};
    for (int j = 0; j <= n; ++j) {
        FlangeGeo fg;
        fg.start = m;
        fg.dir = d;
        fg.len0 = spec.flange_lens[j];
        fg.len1 = (j == n) ? spec.last_len(1.0) : fg.len0;
        flanges.push_back(fg);
        m = m + d * fg.len0;
        if (j < n) {
            const BendParam& b = spec.bends[j];
            BendGeo bg;
            bg.r_mid = b.inner_radius + t / 2;
            bg.angle = b.angle;
            bg.dir_in = d;
            Vec2 nrm = (b.angle > 0) ? d.perp() : -d.perp();
            bg.center = m + nrm * bg.r_mid;
            m = bg.center + (m - bg.center).rotated(b.angle);
            d = d.rotated(b.angle);
            bg.dir_out = d;
            arcs.push_back(bg);
        }
    }

    // --- boundary breakpoints: side 0 = left offset, side 1 = right -------
    auto offset = [&](Vec2 p, Vec2 dir, int side) {
        return p + dir.perp() * (side == 0 ? t / 2 : -t / 2);
    };
    // breakpoints indexed 0..2n+1; index 2n+1 (chain end) depends on y
    auto breakpoint = [&](int side, int idx, double y_frac) -> Vec2 {
        if (idx == 0) return offset(flanges[0].start, flanges[0].dir, side);
        if (idx == 2 * n + 1) {
            const FlangeGeo& fg = flanges[n];
            double len = fg.len0 + (fg.len1 - fg.len0) * y_frac;
            return offset(fg.start + fg.dir * len, fg.dir, side);
        }
        int k = (idx - 1) / 2;
        bool in = (idx % 2) == 1;
        const BendGeo& bg = arcs[k];
        Vec2 mid = in ? flanges[k].start + flanges[k].dir * flanges[k].len0
                      : flanges[k + 1].start;
        return offset(mid, in ? bg.dir_in : bg.dir_out, side);
    };

    detail::Assembler as;
    auto to3 = [&](Vec2 p, double y) { return Vec3{p.x, y, p.y}; };

    // vertices: v[station][side][idx]
    int bp_count = 2 * n + 2;
    std::vector<std::vector<std::vector<int>>> v(
        2, std::vector<std::vector<int>>(2, std::vector<int>(bp_count)));
    for (int st = 0; st < 2; ++st)
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < bp_count; ++i)
                v[st][side][i] = as.vertex(to3(breakpoint(side, i, st), st == 0 ? 0 : w));

    // side radii of bend k: left offset is inner when turning left
    auto side_radius = [&](int k, int side) {
        bool left_inner = arcs[k].angle > 0;
        bool is_inner = (side == 0) == left_inner;
        return is_inner ? arcs[k].r_mid - t / 2 : arcs[k].r_mid + t / 2;
    };

    // station element edges: elem[station][side][m], m = 0..2n
    std::vector<std::vector<std::vector<int>>> elem(
        2, std::vector<std::vector<int>>(2, std::vector<int>(2 * n + 1)));
    for (int st = 0; st < 2; ++st) {
        double y = st == 0 ? 0 : w;
        for (int side = 0; side < 2; ++side) {
            for (int mel = 0; mel <= 2 * n; ++mel) {
                int v1 = v[st][side][mel], v2 = v[st][side][mel + 1];
                if (mel % 2 == 0) {
                    elem[st][side][mel] = as.line(v1, v2);
                } else {
                    int k = (mel - 1) / 2;
                    Vec3 axis = arcs[k].angle > 0 ? Vec3{0, -1, 0} : Vec3{0, 1, 0};
                    elem[st][side][mel] =
                        as.arc(v1, v2, to3(arcs[k].center, y), axis, side_radius(k, side));
                }
            }
        }
    }

    // cap edges: cap[station][end], from left corner to right corner
    int cap[2][2];
    for (int st = 0; st < 2; ++st) {
        cap[st][0] = as.line(v[st][0][0], v[st][1][0]);
        cap[st][1] = as.line(v[st][0][bp_count - 1], v[st][1][bp_count - 1]);
    }

    // longitudinal edges lon[side][idx]
    std::vector<std::vector<int>> lon(2, std::vector<int>(bp_count));
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < bp_count; ++i)
            lon[side][i] = as.line(v[0][side][i], v[1][side][i]);

    // --- faces -------------------------------------------------------------
    GroundTruth gt;
    auto quad_loop = [&](int side, int mel) {
        return detail::loop_of({{elem[0][side][mel], true},
                                {lon[side][mel + 1], true},
                                {elem[1][side][mel], false},
                                {lon[side][mel], false}});
    };

    // shell faces interleaved: flange j -> (4j, 4j+1), bend k -> (4k+2, 4k+3)
    std::vector<std::array<int, 2>> flange_faces(n + 1);
    std::vector<std::array<int, 2>> bend_faces(n);
    for (int j = 0; j <= n; ++j) {
        for (int side = 0; side < 2; ++side) {
            const FlangeGeo& fg = flanges[j];
            Vec3 d3 = to3(fg.dir, 0) - to3(Vec2{0, 0}, 0);
            Vec3 nrm = to3(fg.dir.perp(), 0) * (side == 0 ? 1.0 : -1.0);
            Vec3 origin = to3(breakpoint(side, 2 * j, 0), 0);
            flange_faces[j][side] = as.plane_face(origin, nrm, d3, quad_loop(side, 2 * j));
        }
        if (j < n) {
            for (int side = 0; side < 2; ++side) {
                const BendGeo& bg = arcs[j];
                double r = side_radius(j, side);
                bool is_inner = r < bg.r_mid;
                bend_faces[j][side] = as.cylinder_face(to3(bg.center, 0), Vec3{0, 1, 0}, r,
                                                       is_inner ? -1.0 : 1.0,
                                                       quad_loop(side, 2 * j + 1));
            }
        }
    }

    // caps: start, end
    Vec3 cap_start_n = -to3(flanges[0].dir, 0);
    int cap_start = as.plane_face(
        to3(breakpoint(0, 0, 0), 0), cap_start_n, Vec3{0, 1, 0},
        detail::loop_of({{cap[0][0], true},
                         {lon[1][0], true},
                         {cap[1][0], false},
                         {lon[0][0], false}}));
    // the end cap may be slanted by the taper
    Vec3 e00 = as.solid.vertices[v[0][0][bp_count - 1]];
    Vec3 e0r = as.solid.vertices[v[0][1][bp_count - 1]];
    Vec3 e10 = as.solid.vertices[v[1][0][bp_count - 1]];
    Vec3 cap_end_n = (e0r - e00).cross(e10 - e00);
    if (cap_end_n.dot(to3(flanges[n].dir, 0)) < 0) cap_end_n = -cap_end_n;
    int cap_end = as.plane_face(
        e00, cap_end_n, Vec3{0, 1, 0},
        detail::loop_of({{cap[0][1], true},
                         {lon[1][bp_count - 1], true},
                         {cap[1][1], false},
                         {lon[0][bp_count - 1], false}}));

    // profile faces at y = 0 and y = width
    std::array<int, 2> profile_faces;
    for (int st = 0; st < 2; ++st) {
        Loop l;
        for (int mel = 0; mel <= 2 * n; ++mel) l.uses.push_back({elem[st][0][mel], true});
        l.uses.push_back({cap[st][1], true});
        for (int mel = 2 * n; mel >= 0; --mel) l.uses.push_back({elem[st][1][mel], false});
        l.uses.push_back({cap[st][0], false});
        profile_faces[st] = as.plane_face(to3(breakpoint(0, 0, st), st == 0 ? 0 : w),
                                          Vec3{0, st == 0 ? -1.0 : 1.0, 0},
                                          Vec3{1, 0, 0}, std::move(l));
    }

    // --- shell holes --------------------------------------------------------
    std::vector<std::vector<Loop>> extra_inners(as.solid.faces.size());
    double hole_area_removed = 0, hole_wall_area = 0;
    for (const ShellHole& h : spec.holes) {
        const FlangeGeo& fg = flanges[h.flange];
        Vec3 d3 = to3(fg.dir, 0);
        Vec3 n_l = to3(fg.dir.perp(), 0);
        Vec2 left0 = breakpoint(0, 2 * h.flange, 0);
        Vec3 o_l = to3(left0 + fg.dir * h.s_along, h.y_center);
        Vec3 h_axis = -n_l;  // from the left face into the material
        Vec3 o_r = o_l + h_axis * t;
        int alp = as.vertex(o_l + d3 * h.radius);
        int alm = as.vertex(o_l - d3 * h.radius);
        int arp = as.vertex(o_r + d3 * h.radius);
        int arm = as.vertex(o_r - d3 * h.radius);
        int arc_l1 = as.arc(alp, alm, o_l, h_axis, h.radius);
        int arc_l2 = as.arc(alm, alp, o_l, h_axis, h.radius);
        int arc_r1 = as.arc(arp, arm, o_r, h_axis, h.radius);
        int arc_r2 = as.arc(arm, arp, o_r, h_axis, h.radius);
        int seam_p = as.line(alp, arp);
        int seam_m = as.line(alm, arm);
        int w1 = as.cylinder_face(o_l, h_axis, h.radius, -1.0,
                                  detail::loop_of({{arc_l1, true},
                                                   {seam_m, true},
                                                   {arc_r1, false},
                                                   {seam_p, false}}));
        int w2 = as.cylinder_face(o_l, h_axis, h.radius, -1.0,
                                  detail::loop_of({{arc_l2, true},
                                                   {seam_p, true},
                                                   {arc_r2, false},
                                                   {seam_m, false}}));
        extra_inners.resize(as.solid.faces.size());
        extra_inners[flange_faces[h.flange][0]].push_back(
            detail::loop_of({{arc_l1, true}, {arc_l2, true}}));
        extra_inners[flange_faces[h.flange][1]].push_back(
            detail::loop_of({{arc_r1, true}, {arc_r2, true}}));
        GtHole gh;
        gh.wall_faces = {w1, w2};
        gh.side_hole = false;
        gh.diameter = 2 * h.radius;
        gt.holes.push_back(gh);
        hole_area_removed += 2 * kPi * h.radius * h.radius;
        hole_wall_area += 2 * kPi * h.radius * t;
    }

    // --- tunnel (side) holes ------------------------------------------------
    for (const TunnelHole& h : spec.tunnels) {
        const FlangeGeo& fg = flanges[h.flange];
        Vec3 d3 = to3(fg.dir, 0);
        Vec2 mid0 = fg.start + fg.dir * h.s_along;
        Vec3 o_0 = to3(mid0, 0);
        Vec3 o_w = to3(mid0, w);
        Vec3 axis{0, 1, 0};
        int b0p = as.vertex(o_0 + d3 * h.radius);
        int b0m = as.vertex(o_0 - d3 * h.radius);
        int bwp = as.vertex(o_w + d3 * h.radius);
        int bwm = as.vertex(o_w - d3 * h.radius);
        int arc_01 = as.arc(b0p, b0m, o_0, axis, h.radius);
        int arc_02 = as.arc(b0m, b0p, o_0, axis, h.radius);
        int arc_w1 = as.arc(bwp, bwm, o_w, axis, h.radius);
        int arc_w2 = as.arc(bwm, bwp, o_w, axis, h.radius);
        int seam_p = as.line(b0p, bwp);
        int seam_m = as.line(b0m, bwm);
        int w1 = as.cylinder_face(o_0, axis, h.radius, -1.0,
                                  detail::loop_of({{arc_01, true},
                                                   {seam_m, true},
                                                   {arc_w1, false},
                                                   {seam_p, false}}));
        int w2 = as.cylinder_face(o_0, axis, h.radius, -1.0,
                                  detail::loop_of({{arc_02, true},
                                                   {seam_p, true},
                                                   {arc_w2, false},
                                                   {seam_m, false}}));
        extra_inners.resize(as.solid.faces.size());
        extra_inners[profile_faces[0]].push_back(
            detail::loop_of({{arc_01, true}, {arc_02, true}}));
        extra_inners[profile_faces[1]].push_back(
            detail::loop_of({{arc_w1, true}, {arc_w2, true}}));
        GtHole gh;
        gh.wall_faces = {w1, w2};
        gh.side_hole = true;
        gh.diameter = 2 * h.radius;
        gt.holes.push_back(gh);
        hole_area_removed += 2 * kPi * h.radius * h.radius;
        hole_wall_area += 2 * kPi * h.radius * w;
    }

    for (size_t f = 0; f < extra_inners.size(); ++f)
        for (Loop& l : extra_inners[f]) as.solid.faces[f].inners.push_back(std::move(l));

    // --- ground truth -------------------------------------------------------
    int total_faces = int(as.solid.faces.size());
    gt.thickness = t;

    // exact areas
    std::vector<double> area(total_faces, 0);
    for (int j = 0; j <= n; ++j) {
        double avg = (flanges[j].len0 + flanges[j].len1) / 2;
        area[flange_faces[j][0]] = avg * w;
        area[flange_faces[j][1]] = avg * w;
    }
    for (int k = 0; k < n; ++k) {
        area[bend_faces[k][0]] = side_radius(k, 0) * std::abs(arcs[k].angle) * w;
        area[bend_faces[k][1]] = side_radius(k, 1) * std::abs(arcs[k].angle) * w;
    }
    area[cap_start] = t * w;
    double dlen = flanges[n].len1 - flanges[n].len0;
    area[cap_end] = t * std::sqrt(w * w + dlen * dlen);
    double profile_base = 0;
    for (int k = 0; k < n; ++k) profile_base += arcs[k].r_mid * std::abs(arcs[k].angle) * t;
    for (int j = 0; j < n; ++j) profile_base += flanges[j].len0 * t;
    area[profile_faces[0]] = profile_base + flanges[n].len0 * t;
    area[profile_faces[1]] = profile_base + flanges[n].len1 * t;
    for (const ShellHole& h : spec.holes) {
        area[flange_faces[h.flange][0]] -= kPi * h.radius * h.radius;
        area[flange_faces[h.flange][1]] -= kPi * h.radius * h.radius;
    }
    for (const TunnelHole& h : spec.tunnels) {
        area[profile_faces[0]] -= kPi * h.radius * h.radius;
        area[profile_faces[1]] -= kPi * h.radius * h.radius;
    }
    for (const GtHole& gh : gt.holes) {
        double len = gh.side_hole ? w : t;
        for (int wf : gh.wall_faces) area[wf] = kPi * (gh.diameter / 2) * len;
    }
    gt.total_area = 0;
    for (double a : area) gt.total_area += a;

    // roles: top side by the largest-shell-face rule
    std::vector<bool> shell_face(total_faces, false);
    std::vector<int> face_side(total_faces, -1);
    for (int j = 0; j <= n; ++j)
        for (int side = 0; side < 2; ++side) {
            shell_face[flange_faces[j][side]] = true;
            face_side[flange_faces[j][side]] = side;
        }
    for (int k = 0; k < n; ++k)
        for (int side = 0; side < 2; ++side) {
            shell_face[bend_faces[k][side]] = true;
            face_side[bend_faces[k][side]] = side;
        }
    int largest = detail::largest_face_with_ties(area, shell_face);
    int top_side = face_side[largest];
    gt.roles.assign(total_faces, Role::Side);
    for (int f = 0; f < total_faces; ++f)
        if (shell_face[f]) gt.roles[f] = (face_side[f] == top_side) ? Role::Top : Role::Bottom;

    // bends
    for (int k = 0; k < n; ++k) {
        GtBend b;
        int inner_side = side_radius(k, 0) < side_radius(k, 1) ? 0 : 1;
        b.inner_face = bend_faces[k][inner_side];
        b.outer_face = bend_faces[k][1 - inner_side];
        b.inner_radius = side_radius(k, inner_side);
        b.outer_radius = side_radius(k, 1 - inner_side);
        b.length = w;
        b.angle = std::abs(arcs[k].angle);
        // +1 when the fold rotates toward the top surface side; the left
        // boundary is the +perp side, so a left turn folds toward side 0
        b.orientation = (arcs[k].angle > 0) == (top_side == 0) ? 1 : -1;
        b.flange_a0 = flanges[k].len0;
        b.flange_a1 = flanges[k].len1;
        b.flange_b0 = flanges[k + 1].len0;
        b.flange_b1 = flanges[k + 1].len1;
        b.axis_point = Vec3{arcs[k].center.x, 0, arcs[k].center.y};
        b.axis_dir = Vec3{0, 1, 0};
        b.axis_v0 = 0;
        b.axis_v1 = w;
        gt.bends.push_back(b);
    }
    // corner relation by axis proximity (chains never share bend vertices)
    for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = i2 + 1; j2 < n; ++j2) {
            double dist = (arcs[i2].center - arcs[j2].center).norm();
            if (dist < 2 * t) {
                gt.bends[i2].corner_partners.push_back(j2);
                gt.bends[j2].corner_partners.push_back(i2);
            }
        }

    // contour: side faces that are not hole walls
    std::vector<bool> is_wall(total_faces, false);
    for (const GtHole& gh : gt.holes)
        for (int f2 : gh.wall_faces) is_wall[f2] = true;
    for (int f2 = 0; f2 < total_faces; ++f2)
        if (gt.roles[f2] == Role::Side && !is_wall[f2]) gt.contour_faces.push_back(f2);

    BuiltPart part;
    part.solid = as.finish();
    part.gt = std::move(gt);
    return part;
}

// ---------------------------------------------------------------------------
// Corner template: a base with two perpendicular full-edge flaps whose bends
// meet at the notch corner, sharing two vertices.
// ---------------------------------------------------------------------------

inline BuiltPart build_corner_part(const CornerPartSpec& spec) {
    const double t = spec.thickness;
    const double r = spec.inner_radius;
    const double c = r + t;
    const double lx = spec.base_x, ly = spec.base_y;
    const double h1 = spec.flap_height_1, h2 = spec.flap_height_2;
    if (lx <= c + 1 || ly <= c + 1 || h1 <= c + 1 || h2 <= c + 1)
        throw Error("corner part dimensions too small");

    detail::Assembler as;
    auto V = [&](double x, double y, double z) { return as.vertex({x, y, z}); };

    int A = V(c, c, 0), B = V(c, c, t);
    int P1 = V(lx, ly, 0), P2 = V(lx, ly, t), P3 = V(c, ly, t), P4 = V(t, ly, c);
    int P5 = V(t, ly, h1), P6 = V(0, ly, h1), P7 = V(0, ly, c), P8 = V(c, ly, 0);
    int Q3 = V(lx, c, t), Q4 = V(lx, t, c), Q5 = V(lx, t, h2), Q6 = V(lx, 0, h2);
    int Q7 = V(lx, 0, c), Q8 = V(lx, c, 0);
    int C3 = V(t, c, c), C4 = V(t, c, h1), C5 = V(0, c, h1), C6 = V(0, c, c);
    int D3 = V(c, t, c), D4 = V(c, t, h2), D5 = V(c, 0, h2), D6 = V(c, 0, c);

    Vec3 yhat{0, 1, 0}, xhat{1, 0, 0};
    Vec3 ax1{c, 0, c};  // pipe-1 axis point (axis along y)
    Vec3 ax2{0, c, c};  // pipe-2 axis point (axis along x)

    // profile y = ly
    int E1 = as.line(P1, P2), E2 = as.line(P2, P3);
    int E3 = as.arc(P3, P4, {c, ly, c}, yhat, r);
    int E4 = as.line(P4, P5), E5 = as.line(P5, P6), E6 = as.line(P6, P7);
    int E7 = as.arc(P7, P8, {c, ly, c}, -yhat, c);
    int E8 = as.line(P8, P1);
    // profile x = lx
    int F1 = as.line(P2, Q3);
    int F2 = as.arc(Q3, Q4, {lx, c, c}, -xhat, r);
    int F3 = as.line(Q4, Q5), F4 = as.line(Q5, Q6), F5 = as.line(Q6, Q7);
    int F6 = as.arc(Q7, Q8, {lx, c, c}, xhat, c);
    int F7 = as.line(Q8, P1);
    // cap y = c
    int G1 = as.line(A, B);
    int G2 = as.arc(B, C3, {c, c, c}, yhat, r);
    int G3 = as.line(C3, C4), G4 = as.line(C4, C5), G5 = as.line(C5, C6);
    int G6 = as.arc(C6, A, {c, c, c}, -yhat, c);
    // cap x = c
    int H2 = as.arc(B, D3, {c, c, c}, -xhat, r);
    int H3 = as.line(D3, D4), H4 = as.line(D4, D5), H5 = as.line(D5, D6);
    int H6 = as.arc(D6, A, {c, c, c}, xhat, c);
    // longitudinal along y (pipe-1 system)
    int K1 = as.line(B, P3), K2 = as.line(A, P8), K3 = as.line(C3, P4);
    int K4 = as.line(C6, P7), K5 = as.line(C4, P5), K6 = as.line(C5, P6);
    // longitudinal along x (pipe-2 system)
    int M1 = as.line(B, Q3), M2 = as.line(A, Q8), M3 = as.line(D3, Q4);
    int M4 = as.line(D6, Q7), M5 = as.line(D4, Q5), M6 = as.line(D5, Q6);

    using detail::loop_of;
    int base_top = as.plane_face({c, c, t}, {0, 0, 1}, xhat,
                                 loop_of({{K1, true}, {E2, false}, {F1, true}, {M1, false}}));
    int base_bot = as.plane_face({c, c, 0}, {0, 0, -1}, xhat,
                                 loop_of({{K2, true}, {E8, true}, {F7, false}, {M2, false}}));
    int p1_in = as.cylinder_face(ax1, yhat, r, -1.0,
                                 loop_of({{G2, true}, {K3, true}, {E3, false}, {K1, false}}));
    int p1_out = as.cylinder_face(ax1, yhat, c, 1.0,
                                  loop_of({{G6, false}, {K4, true}, {E7, true}, {K2, false}}));
    int f1_in = as.plane_face({t, c, c}, {1, 0, 0}, yhat,
                              loop_of({{G3, true}, {K5, true}, {E4, false}, {K3, false}}));
    int f1_out = as.plane_face({0, c, c}, {-1, 0, 0}, yhat,
                               loop_of({{G5, false}, {K6, true}, {E6, true}, {K4, false}}));
    int f1_rim = as.plane_face({t, c, h1}, {0, 0, 1}, yhat,
                               loop_of({{G4, true}, {K6, true}, {E5, false}, {K5, false}}));
    int prof_y = as.plane_face({c, ly, 0}, {0, 1, 0}, xhat,
                               loop_of({{E1, true}, {E2, true}, {E3, true}, {E4, true},
                                        {E5, true}, {E6, true}, {E7, true}, {E8, true}}));
    int cap_y = as.plane_face({c, c, 0}, {0, -1, 0}, xhat,
                              loop_of({{G1, true}, {G2, true}, {G3, true}, {G4, true},
                                       {G5, true}, {G6, true}}));
    int p2_in = as.cylinder_face(ax2, xhat, r, -1.0,
                                 loop_of({{H2, true}, {M3, true}, {F2, false}, {M1, false}}));
    int p2_out = as.cylinder_face(ax2, xhat, c, 1.0,
                                  loop_of({{H6, false}, {M4, true}, {F6, true}, {M2, false}}));
    int f2_in = as.plane_face({c, t, c}, {0, 1, 0}, xhat,
                              loop_of({{H3, true}, {M5, true}, {F3, false}, {M3, false}}));
    int f2_out = as.plane_face({c, 0, c}, {0, -1, 0}, xhat,
                               loop_of({{H5, false}, {M6, true}, {F5, true}, {M4, false}}));
    int f2_rim = as.plane_face({c, t, h2}, {0, 0, 1}, xhat,
                               loop_of({{H4, true}, {M6, true}, {F4, false}, {M5, false}}));
    int prof_x = as.plane_face({lx, c, 0}, {1, 0, 0}, yhat,
                               loop_of({{E1, true}, {F1, true}, {F2, true}, {F3, true},
                                        {F4, true}, {F5, true}, {F6, true}, {F7, true}}));
    int cap_x = as.plane_face({c, c, 0}, {-1, 0, 0}, yhat,
                              loop_of({{G1, true}, {H2, true}, {H3, true}, {H4, true},
                                       {H5, true}, {H6, true}}));

    GroundTruth gt;
    gt.thickness = t;
    int total = int(as.solid.faces.size());
    std::vector<double> area(total, 0);
    double sector = (kPi / 4) * (2 * r * t + t * t);
    area[base_top] = area[base_bot] = (lx - c) * (ly - c);
    area[p1_in] = r * (kPi / 2) * (ly - c);
    area[p1_out] = c * (kPi / 2) * (ly - c);
    area[f1_in] = area[f1_out] = (h1 - c) * (ly - c);
    area[f1_rim] = t * (ly - c);
    area[prof_y] = (lx - c) * t + sector + t * (h1 - c);
    area[cap_y] = sector + t * (h1 - c);
    area[p2_in] = r * (kPi / 2) * (lx - c);
    area[p2_out] = c * (kPi / 2) * (lx - c);
    area[f2_in] = area[f2_out] = (h2 - c) * (lx - c);
    area[f2_rim] = t * (lx - c);
    area[prof_x] = (ly - c) * t + sector + t * (h2 - c);
    area[cap_x] = sector + t * (h2 - c);
    gt.total_area = 0;
    for (double a : area) gt.total_area += a;

    std::vector<bool> shell(total, false);
    for (int f : {base_top, base_bot, p1_in, p1_out, f1_in, f1_out, p2_in, p2_out,
                  f2_in, f2_out})
        shell[f] = true;
    std::vector<int> inner_shell = {base_top, p1_in, f1_in, p2_in, f2_in};
    int largest = detail::largest_face_with_ties(area, shell);
    bool top_is_inner =
        std::find(inner_shell.begin(), inner_shell.end(), largest) != inner_shell.end();
    gt.roles.assign(total, Role::Side);
    for (int f : inner_shell) gt.roles[f] = top_is_inner ? Role::Top : Role::Bottom;
    for (int f : {base_bot, p1_out, f1_out, p2_out, f2_out})
        gt.roles[f] = top_is_inner ? Role::Bottom : Role::Top;

    for (int k = 0; k < 2; ++k) {
        GtBend b;
        b.inner_face = k == 0 ? p1_in : p2_in;
        b.outer_face = k == 0 ? p1_out : p2_out;
        b.inner_radius = r;
        b.outer_radius = c;
        b.length = (k == 0 ? ly : lx) - c;
        b.angle = kPi / 2;
        b.orientation = top_is_inner ? 1 : -1;  // both flaps fold toward the inner side
        b.flange_a0 = b.flange_a1 = (k == 0 ? lx : ly) - c;   // base side
        b.flange_b0 = b.flange_b1 = (k == 0 ? h1 : h2) - c;   // flap side
        b.corner_partners = {1 - k};
        b.axis_point = k == 0 ? ax1 : ax2;
        b.axis_dir = k == 0 ? yhat : xhat;
        b.axis_v0 = c;
        b.axis_v1 = k == 0 ? ly : lx;
        gt.bends.push_back(b);
    }
    for (int f = 0; f < total; ++f)
        if (gt.roles[f] == Role::Side) gt.contour_faces.push_back(f);

    BuiltPart part;
    part.solid = as.finish();
    part.gt = std::move(gt);
    return part;
}

}  // namespace bendgraph::builder
