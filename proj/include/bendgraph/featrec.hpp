#pragma once

// Rule-based sheet-metal feature recognition: cylindrical surface abstraction,
// top/bottom/side face labelling, bends with flange statistics, holes and
// side holes, bend corners, and the outer contour.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "bendgraph/brep.hpp"
#include "bendgraph/core.hpp"

namespace bendgraph::featrec {

using brep::BrepSolid;
using brep::Dihedral;
using brep::SurfaceKind;

// ---------------------------------------------------------------------------
// Feature records
// ---------------------------------------------------------------------------

struct CylFeature {
    int face = -1;
    double radius = 0;
    double axial_length = 0;
    double arc_angle = 0;
    int convexity = 0;  // +1 outward normal away from the axis, -1 toward it
    bool fitted = false;  // recovered from a sampled freeform surface
};

struct BendFeature {
    int inner_face = -1, outer_face = -1;
    double inner_radius = 0, outer_radius = 0;
    double length = 0;
    double bend_angle = 0;  // inner-cylinder arc angle; flat = 0, right angle = pi/2
    int orientation = 0;    // +1 fold toward the top shell normal at side A
    Aggregates flange_a, flange_b;
    std::vector<int> corner_partners;  // indices into the bend list
    // side bookkeeping (plane face ids; a = smaller representative id)
    std::array<int, 2> side_a_planes{-1, -1};
    std::array<int, 2> side_b_planes{-1, -1};
};

struct HoleFeature {
    std::vector<int> wall_faces;
    SheetRole host = SheetRole::Side;
    double diameter = 0;  // 0 when the walls are not a single cylinder
    bool is_side_hole = false;
};

struct FeatureReport {
    std::vector<SheetRole> roles;
    std::vector<CylFeature> cylinders;
    std::vector<BendFeature> bends;
    std::vector<HoleFeature> holes;
    std::vector<int> outer_contour;
    std::vector<std::vector<int>> contour_cycles;  // ordered edge ids
    double thickness = 0;

    const CylFeature* cylinder_of(int face) const {
        for (const CylFeature& c : cylinders)
            if (c.face == face) return &c;
        return nullptr;
    }
};

class MalformedSheet : public Error {
public:
    explicit MalformedSheet(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Cylinder fitting from surface samples
// ---------------------------------------------------------------------------

struct CylinderFit {
    bool is_cylinder = false;
    bool is_planar = false;
    Vec3 axis_point, axis_dir;
    double radius = 0;
    double rms = 0;
};

inline CylinderFit fit_cylinder(const std::vector<Vec3>& points,
                                const std::vector<Vec3>& normals) {
    if (points.size() < 9 || points.size() != normals.size())
        throw Error("fit_cylinder needs at least 9 point/normal samples");
    CylinderFit out;
    std::array<std::array<double, 3>, 3> cov{};
    for (const Vec3& n : normals)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += n[i] * n[j];
    for (auto& row : cov)
        for (double& x : row) x /= double(normals.size());
    Eig3 eig = eig_sym3(cov);
    // all normals parallel -> two vanishing eigenvalues -> planar patch
    if (eig.values[1] < 1e-8) {
        out.is_planar = true;
        return out;
    }
    Vec3 axis = eig.vectors[0].normalized();
    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : points) centroid += p;
    centroid = centroid / double(points.size());
    Vec3 e1 = any_perpendicular(axis);
    Vec3 e2 = axis.cross(e1);
    // Kasa circle fit in the plane perpendicular to the axis
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    size_t n = points.size();
    std::vector<Vec2> q(n);
    for (size_t i = 0; i < n; ++i) {
        Vec3 d = points[i] - centroid;
        q[i] = {d.dot(e1), d.dot(e2)};
        double z = q[i].x * q[i].x + q[i].y * q[i].y;
        sxx += q[i].x * q[i].x; sxy += q[i].x * q[i].y; syy += q[i].y * q[i].y;
        sx += q[i].x; sy += q[i].y;
        sxz += q[i].x * z; syz += q[i].y * z; sz += z;
    }
    // solve [2sxx 2sxy sx; 2sxy 2syy sy; 2sx 2sy n] [cx cy d] = [sxz syz sz]
    double a[3][4] = {{2 * sxx, 2 * sxy, sx, sxz},
                      {2 * sxy, 2 * syy, sy, syz},
                      {2 * sx, 2 * sy, double(n), sz}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r2 = col + 1; r2 < 3; ++r2)
            if (std::abs(a[r2][col]) > std::abs(a[piv][col])) piv = r2;
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) < 1e-14) { out.is_planar = true; return out; }
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == col) continue;
            double f = a[r2][col] / a[col][col];
            for (int c2 = col; c2 < 4; ++c2) a[r2][c2] -= f * a[col][c2];
        }
    }
    double cx = a[0][3] / a[0][0], cy = a[1][3] / a[1][1], dd = a[2][3] / a[2][2];
    double r2v = dd + cx * cx + cy * cy;
    if (r2v <= 0) { out.is_planar = true; return out; }
    double radius = std::sqrt(r2v);
    double ss = 0;
    for (const Vec2& p : q) {
        double dist = std::hypot(p.x - cx, p.y - cy) - radius;
        ss += dist * dist;
    }
    out.rms = std::sqrt(ss / double(n));
    out.radius = radius;
    out.axis_dir = axis;
    out.axis_point = centroid + cx * e1 + cy * e2;
    out.is_cylinder = out.rms < 1e-3 * radius;
    return out;
}

// ---------------------------------------------------------------------------
// Stage 1: surface classification and face labelling
// ---------------------------------------------------------------------------

inline std::vector<CylFeature> classify_surfaces(const BrepSolid& s) {
    std::vector<CylFeature> out;
    for (int f = 0; f < s.face_count(); ++f) {
        const brep::Face& face = s.faces[f];
        if (face.surf.kind == SurfaceKind::Cylinder) {
            CylFeature c;
            c.face = f;
            c.radius = face.surf.cyl.radius;
            c.arc_angle = face.uv_hi.x - face.uv_lo.x;
            c.axial_length = face.uv_hi.y - face.uv_lo.y;
            c.convexity = face.surf.cyl.sense > 0 ? 1 : -1;
            out.push_back(c);
        } else if (face.surf.kind == SurfaceKind::BSpline) {
            std::vector<Vec3> pts, nrm;
            const int g = 32;
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j) {
                    double u = face.uv_lo.x +
                               (face.uv_hi.x - face.uv_lo.x) * (i + 0.5) / g;
                    double v = face.uv_lo.y +
                               (face.uv_hi.y - face.uv_lo.y) * (j + 0.5) / g;
                    auto smp = brep::eval_surface(face.surf, u, v);
                    pts.push_back(smp.point);
                    nrm.push_back(smp.normal);
                }
            CylinderFit fit = fit_cylinder(pts, nrm);
            if (!fit.is_cylinder) continue;  // freeform
            CylFeature c;
            c.face = f;
            c.fitted = true;
            c.radius = fit.radius;
            // angular/axial extents of the samples about the fitted axis
            Vec3 e1 = any_perpendicular(fit.axis_dir);
            Vec3 e2 = fit.axis_dir.cross(e1);
            double amin = 1e300, amax = -1e300, vmin = 1e300, vmax = -1e300;
            double prev = 0;
            bool first = true;
            double mean_dot = 0;
            for (size_t i2 = 0; i2 < pts.size(); ++i2) {
                Vec3 d = pts[i2] - fit.axis_point;
                double v = d.dot(fit.axis_dir);
                Vec3 radial = d - fit.axis_dir * v;
                double ang = std::atan2(radial.dot(e2), radial.dot(e1));
                if (!first) {
                    while (ang - prev > kPi) ang -= 2 * kPi;
                    while (ang - prev < -kPi) ang += 2 * kPi;
                }
                first = false;
                prev = ang;
                amin = std::min(amin, ang); amax = std::max(amax, ang);
                vmin = std::min(vmin, v); vmax = std::max(vmax, v);
                mean_dot += nrm[i2].dot(radial.normalized());
            }
            // cell-center samples truncate each end by half a cell
            double stretch = double(g) / double(g - 1);
            c.arc_angle = (amax - amin) * stretch;
            c.axial_length = (vmax - vmin) * stretch;
            c.convexity = mean_dot >= 0 ? 1 : -1;
            out.push_back(c);
        }
    }
    return out;
}

// Concentric cylinder pairs whose radius gap equals the sheet thickness.
inline std::vector<std::pair<int, int>> concentric_bend_pairs(const BrepSolid& s,
                                                              double thickness) {
    std::vector<int> cyls;
    for (int f = 0; f < s.face_count(); ++f)
        if (s.faces[f].surf.kind == SurfaceKind::Cylinder) cyls.push_back(f);
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < cyls.size(); ++i) {
        for (size_t j = i + 1; j < cyls.size(); ++j) {
            const auto& a = s.faces[cyls[i]].surf.cyl;
            const auto& b = s.faces[cyls[j]].surf.cyl;
            if (a.axis.cross(b.axis).norm() > 1e-6) continue;
            Vec3 d = b.origin - a.origin;
            if ((d - a.axis * a.axis.dot(d)).norm() > 1e-3) continue;
            double gap = std::abs(a.radius - b.radius);
            if (std::abs(gap - thickness) > 1e-6 * thickness) continue;
            int inner = a.radius < b.radius ? cyls[i] : cyls[j];
            int outer = a.radius < b.radius ? cyls[j] : cyls[i];
            pairs.push_back({inner, outer});
        }
    }
    return pairs;
}

inline std::vector<SheetRole> label_faces(const BrepSolid& s,
                                          double thickness,
                                          const brep::FaceAdjacencyGraph& aag) {
    int n = s.face_count();
    std::vector<bool> shell(n, false);
    for (const brep::PlanePair& p : brep::opposite_plane_pairs(s))
        if (std::abs(p.distance - thickness) <= 0.05 * thickness) {
            shell[p.a] = true;
            shell[p.b] = true;
        }
    for (auto [inner, outer] : concentric_bend_pairs(s, thickness)) {
        shell[inner] = true;
        shell[outer] = true;
    }
    // propagate across smooth edges within the shell candidates
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    std::vector<std::vector<int>> smooth_adj(n);
    for (const brep::AagEdge& e : aag.edges) {
        if (e.dihedral != Dihedral::Smooth) continue;
        smooth_adj[e.a].push_back(e.b);
        smooth_adj[e.b].push_back(e.a);
    }
    for (int f = 0; f < n; ++f) {
        if (!shell[f] || comp[f] >= 0) continue;
        std::vector<int> stack = {f};
        comp[f] = ncomp;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int nb : smooth_adj[cur]) {
                if (!shell[nb] || comp[nb] >= 0) continue;
                comp[nb] = ncomp;
                stack.push_back(nb);
            }
        }
        ++ncomp;
    }
    if (ncomp != 2)
        throw MalformedSheet("face labelling found " + std::to_string(ncomp) +
                             " shell components, expected 2");
    // top = component holding the largest shell face; near-ties resolve to
    // the smaller face id
    double amax = -1;
    std::vector<double> area(n, 0);
    for (int f = 0; f < n; ++f)
        if (shell[f]) amax = std::max(amax, area[f] = s.face_area(f));
    int top_comp = -1;
    for (int f = 0; f < n; ++f)
        if (shell[f] && area[f] >= amax * (1 - 1e-9)) { top_comp = comp[f]; break; }
    std::vector<SheetRole> roles(n, SheetRole::Side);
    for (int f = 0; f < n; ++f)
        if (shell[f]) roles[f] = comp[f] == top_comp ? SheetRole::Top : SheetRole::Bottom;
    return roles;
}

// ---------------------------------------------------------------------------
// Stage 2: bends (with flange statistics) and holes
// ---------------------------------------------------------------------------

namespace detail {

// Tangent plane neighbors of a cylinder face at its two angular ends.
struct TangentEnds {
    // [0] -> at u_lo, [1] -> at u_hi; plane face id or -1
    std::array<int, 2> planes{-1, -1};
};

inline TangentEnds tangent_planes(const BrepSolid& s, int cyl_face) {
    TangentEnds ends;
    const brep::Face& face = s.faces[cyl_face];
    auto visit = [&](const brep::Loop& loop) {
        for (const brep::EdgeUse& u : loop.uses) {
            const brep::Edge& e = s.edges[u.edge];
            if (e.curve.kind != brep::CurveKind::Line) continue;
            int other = e.faces[0] == cyl_face ? e.faces[1] : e.faces[0];
            if (other < 0 || s.faces[other].surf.kind != SurfaceKind::Plane) continue;
            Vec3 mid = e.at_frac(0.5);
            Vec3 na = s.normal_at(cyl_face, mid);
            Vec3 nb = s.normal_at(other, mid);
            if (na.dot(nb) < std::cos(1.0 * kPi / 180)) continue;
            double u_mid = s.surface_params(cyl_face, mid).first;
            int end = std::abs(u_mid - face.uv_lo.x) < std::abs(u_mid - face.uv_hi.x) ? 0 : 1;
            ends.planes[end] = other;
        }
    };
    visit(face.outer);
    return ends;
}

inline double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                               const Vec3& q2) {
    Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    double a = d1.dot(d1), e = d2.dot(d2), f = d2.dot(r);
    double sc, tc;
    double b = d1.dot(d2), c = d1.dot(r);
    double denom = a * e - b * b;
    sc = denom > 1e-12 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    tc = e > 1e-12 ? std::clamp((b * sc + f) / e, 0.0, 1.0) : 0.0;
    sc = a > 1e-12 ? std::clamp((b * tc - c) / a, 0.0, 1.0) : 0.0;
    return ((p1 + d1 * sc) - (p2 + d2 * tc)).norm();
}

}  // namespace detail

// Flange length aggregates for one side of a bend, measured by rays cast in
// the flange plane from the bend tangency line to the first crossing of the
// face's outer loop. Inner loops (holes) are ignored. K=16 half-step samples.
inline Aggregates flange_stats(const BrepSolid& s, int plane_face, int inner_cyl_face,
                               double axial_lo, double axial_hi) {
    const brep::PlaneGeom& pl = s.faces[plane_face].surf.plane;
    const brep::CylinderGeom& cy = s.faces[inner_cyl_face].surf.cyl;
    // tangency line = projection of the cylinder axis onto the plane
    Vec3 foot0 = cy.origin - pl.normal * pl.normal.dot(cy.origin - pl.origin);
    Vec3 along = cy.axis - pl.normal * pl.normal.dot(cy.axis);
    along = along.normalized();
    // ray direction: away from the bend, toward the face interior
    Vec2 mid_uv = {(s.faces[plane_face].uv_lo.x + s.faces[plane_face].uv_hi.x) / 2,
                   (s.faces[plane_face].uv_lo.y + s.faces[plane_face].uv_hi.y) / 2};
    Vec3 centroid = brep::eval_surface(s.faces[plane_face].surf, mid_uv.x, mid_uv.y).point;
    Vec3 away = centroid - foot0;
    away = away - cy.axis * cy.axis.dot(away);
    if (away.norm() < 1e-9) throw Error("flange ray direction degenerate");
    away = away.normalized();
    auto to2 = [&](const Vec3& p) {
        Vec3 d = p - pl.origin;
        return Vec2{d.dot(pl.axis_u), d.dot(pl.axis_v)};
    };
    Vec2 dir2 = Vec2{away.dot(pl.axis_u), away.dot(pl.axis_v)}.normalized();
    const int kSamples = 16;
    std::vector<double> lengths;
    for (int k = 0; k < kSamples; ++k) {
        double v = axial_lo + (k + 0.5) / kSamples * (axial_hi - axial_lo);
        Vec3 q = foot0 + cy.axis * (v - cy.axis.dot(foot0 - cy.origin));
        auto hit = geom2::first_loop_crossing(s.faces[plane_face].uv.outer, to2(q), dir2);
        if (hit) lengths.push_back(*hit);
    }
    if (int(lengths.size()) < 8)
        throw Error("flange measurement failed: fewer than 8 valid ray samples");
    return aggregates(lengths);
}

inline std::vector<BendFeature> recognize_bends(const BrepSolid& s,
                                                const std::vector<SheetRole>& roles,
                                                double thickness) {
    std::vector<BendFeature> bends;
    for (auto [inner, outer] : concentric_bend_pairs(s, thickness)) {
        if (roles[inner] == SheetRole::Side || roles[outer] == SheetRole::Side) continue;
        if (roles[inner] == roles[outer]) continue;
        auto ends_in = detail::tangent_planes(s, inner);
        auto ends_out = detail::tangent_planes(s, outer);
        // both cylinders need planar tangent neighbors on both angular ends
        if (ends_in.planes[0] < 0 || ends_in.planes[1] < 0 || ends_out.planes[0] < 0 ||
            ends_out.planes[1] < 0)
            continue;
        BendFeature b;
        b.inner_face = inner;
        b.outer_face = outer;
        b.inner_radius = s.faces[inner].surf.cyl.radius;
        b.outer_radius = s.faces[outer].surf.cyl.radius;
        b.bend_angle = s.faces[inner].uv_hi.x - s.faces[inner].uv_lo.x;
        b.length = s.faces[inner].uv_hi.y - s.faces[inner].uv_lo.y;
        // group the tangent planes by side: the inner and outer plane of one
        // side are the parallel pair bounding that flange
        auto pair_up = [&](int pi, const detail::TangentEnds& eo) {
            const Vec3& n = s.faces[pi].surf.plane.normal;
            for (int cand : eo.planes) {
                if (cand >= 0 && (s.faces[cand].surf.plane.normal + n).norm() < 1e-6)
                    return cand;
            }
            // same-normal pairing (orientation may align for obtuse folds)
            for (int cand : eo.planes)
                if (cand >= 0 && s.faces[cand].surf.plane.normal.cross(n).norm() < 1e-6)
                    return cand;
            return -1;
        };
        std::array<std::array<int, 2>, 2> sides;  // [side][inner_plane, outer_plane]
        for (int e = 0; e < 2; ++e) {
            int pi = ends_in.planes[e];
            sides[e] = {pi, pair_up(pi, ends_out)};
        }
        if (sides[0][1] < 0 || sides[1][1] < 0) continue;
        auto rep = [&](const std::array<int, 2>& sd) { return std::min(sd[0], sd[1]); };
        int a = rep(sides[0]) <= rep(sides[1]) ? 0 : 1;
        b.side_a_planes = sides[a];
        b.side_b_planes = sides[1 - a];
        double v_lo = s.faces[inner].uv_lo.y, v_hi = s.faces[inner].uv_hi.y;
        int rep_a = rep(b.side_a_planes);
        int rep_b = rep(b.side_b_planes);
        b.flange_a = flange_stats(s, rep_a, inner, v_lo, v_hi);
        b.flange_b = flange_stats(s, rep_b, inner, v_lo, v_hi);
        // orientation: does the far (side B) flange leave the bend toward the
        // top-surface normal at side A?
        const brep::CylinderGeom& cy = s.faces[inner].surf.cyl;
        int top_a = roles[b.side_a_planes[0]] == SheetRole::Top ? b.side_a_planes[0]
                                                                : b.side_a_planes[1];
        Vec3 n_top = s.faces[top_a].surf.plane.normal;
        int pb = rep_b;
        const brep::PlaneGeom& plb = s.faces[pb].surf.plane;
        Vec3 footb = cy.origin - plb.normal * plb.normal.dot(cy.origin - plb.origin);
        Vec2 mid_uv = {(s.faces[pb].uv_lo.x + s.faces[pb].uv_hi.x) / 2,
                       (s.faces[pb].uv_lo.y + s.faces[pb].uv_hi.y) / 2};
        Vec3 centroid = brep::eval_surface(s.faces[pb].surf, mid_uv.x, mid_uv.y).point;
        Vec3 d_far = centroid - footb;
        d_far = d_far - cy.axis * cy.axis.dot(d_far);
        b.orientation = d_far.dot(n_top) >= 0 ? 1 : -1;
        bends.push_back(b);
    }
    std::sort(bends.begin(), bends.end(),
              [](const BendFeature& x, const BendFeature& y) {
                  return std::min(x.inner_face, x.outer_face) <
                         std::min(y.inner_face, y.outer_face);
              });
    return bends;
}

inline std::vector<HoleFeature> recognize_holes(const BrepSolid& s,
                                                const std::vector<SheetRole>& roles) {
    // group inner loops by their wall face set
    std::map<std::vector<int>, std::vector<int>> groups;  // walls -> host faces
    for (int f = 0; f < s.face_count(); ++f) {
        for (const brep::Loop& l : s.faces[f].inners) {
            std::set<int> walls;
            for (const brep::EdgeUse& u : l.uses) {
                const brep::Edge& e = s.edges[u.edge];
                walls.insert(e.faces[0] == f ? e.faces[1] : e.faces[0]);
            }
            groups[std::vector<int>(walls.begin(), walls.end())].push_back(f);
        }
    }
    std::vector<HoleFeature> holes;
    for (const auto& [walls, hosts] : groups) {
        HoleFeature h;
        h.wall_faces = walls;
        h.host = roles[hosts.front()];
        h.is_side_hole = h.host == SheetRole::Side;
        // circular when every wall face lies on one common cylinder
        bool circular = true;
        const brep::CylinderGeom* ref = nullptr;
        for (int w : walls) {
            if (s.faces[w].surf.kind != SurfaceKind::Cylinder) { circular = false; break; }
            const auto& c = s.faces[w].surf.cyl;
            if (!ref) { ref = &c; continue; }
            Vec3 d = c.origin - ref->origin;
            if (c.axis.cross(ref->axis).norm() > 1e-6 ||
                (d - ref->axis * ref->axis.dot(d)).norm() > 1e-3 ||
                std::abs(c.radius - ref->radius) > 1e-9) {
                circular = false;
                break;
            }
        }
        if (circular && ref) h.diameter = 2 * ref->radius;
        holes.push_back(h);
    }
    return holes;
}

// ---------------------------------------------------------------------------
// Stage 3: relational features and the contour
// ---------------------------------------------------------------------------

inline void recognize_bend_corners(const BrepSolid& s, std::vector<BendFeature>& bends,
                                   double thickness) {
    auto vertex_set = [&](const BendFeature& b) {
        std::set<int> vs;
        for (int f : {b.inner_face, b.outer_face}) {
            auto collect = [&](const brep::Loop& l) {
                for (const brep::EdgeUse& u : l.uses) {
                    vs.insert(s.edges[u.edge].v1);
                    vs.insert(s.edges[u.edge].v2);
                }
            };
            collect(s.faces[f].outer);
            for (const brep::Loop& l : s.faces[f].inners) collect(l);
        }
        return vs;
    };
    auto axis_segment = [&](const BendFeature& b, Vec3& p, Vec3& q) {
        const auto& c = s.faces[b.inner_face].surf.cyl;
        p = c.origin + c.axis * s.faces[b.inner_face].uv_lo.y;
        q = c.origin + c.axis * s.faces[b.inner_face].uv_hi.y;
    };
    for (size_t i = 0; i < bends.size(); ++i) bends[i].corner_partners.clear();
    for (size_t i = 0; i < bends.size(); ++i) {
        auto vi = vertex_set(bends[i]);
        Vec3 pi, qi;
        axis_segment(bends[i], pi, qi);
        for (size_t j = i + 1; j < bends.size(); ++j) {
            auto vj = vertex_set(bends[j]);
            bool shared = false;
            for (int v : vj)
                if (vi.count(v)) { shared = true; break; }
            if (!shared) {
                Vec3 pj, qj;
                axis_segment(bends[j], pj, qj);
                shared = detail::segment_distance(pi, qi, pj, qj) < 2 * thickness;
            }
            if (shared) {
                bends[i].corner_partners.push_back(int(j));
                bends[j].corner_partners.push_back(int(i));
            }
        }
    }
}

inline std::vector<int> outer_contour(const BrepSolid& s,
                                      const std::vector<SheetRole>& roles,
                                      const std::vector<HoleFeature>& holes) {
    std::vector<bool> wall(s.face_count(), false);
    for (const HoleFeature& h : holes)
        for (int f : h.wall_faces) wall[f] = true;
    std::vector<int> out;
    for (int f = 0; f < s.face_count(); ++f)
        if (roles[f] == SheetRole::Side && !wall[f]) out.push_back(f);
    return out;
}

// Ordered cycles of edges between the top shell and contour faces.
inline std::vector<std::vector<int>> contour_cycles(const BrepSolid& s,
                                                    const std::vector<SheetRole>& roles,
                                                    const std::vector<int>& contour) {
    std::vector<bool> is_contour(s.face_count(), false);
    for (int f : contour) is_contour[f] = true;
    std::vector<int> cycle_edges;
    for (size_t e = 0; e < s.edges.size(); ++e) {
        int fa = s.edges[e].faces[0], fb = s.edges[e].faces[1];
        bool ab = roles[fa] == SheetRole::Top && is_contour[fb];
        bool ba = roles[fb] == SheetRole::Top && is_contour[fa];
        if (ab || ba) cycle_edges.push_back(int(e));
    }
    // chain by shared vertices, smallest edge first
    std::map<int, std::vector<int>> by_vertex;
    for (int e : cycle_edges) {
        by_vertex[s.edges[e].v1].push_back(e);
        by_vertex[s.edges[e].v2].push_back(e);
    }
    std::set<int> unused(cycle_edges.begin(), cycle_edges.end());
    std::vector<std::vector<int>> cycles;
    while (!unused.empty()) {
        int start = *unused.begin();
        unused.erase(start);
        std::vector<int> cyc = {start};
        int cur_v = s.edges[start].v2;
        int start_v = s.edges[start].v1;
        while (cur_v != start_v) {
            int next = -1;
            for (int cand : by_vertex[cur_v])
                if (unused.count(cand) && (next < 0 || cand < next)) next = cand;
            if (next < 0) break;  // open chain (degenerate); stop
            unused.erase(next);
            cyc.push_back(next);
            cur_v = s.edges[next].v1 == cur_v ? s.edges[next].v2 : s.edges[next].v1;
        }
        cycles.push_back(cyc);
    }
    return cycles;
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

inline FeatureReport recognize(const BrepSolid& s) {
    FeatureReport rep;
    rep.thickness = brep::sheet_thickness(s);
    rep.cylinders = classify_surfaces(s);
    auto aag = brep::build_aag(s);
    rep.roles = label_faces(s, rep.thickness, aag);
    rep.bends = recognize_bends(s, rep.roles, rep.thickness);
    rep.holes = recognize_holes(s, rep.roles);
    recognize_bend_corners(s, rep.bends, rep.thickness);
    rep.outer_contour = outer_contour(s, rep.roles, rep.holes);
    rep.contour_cycles = contour_cycles(s, rep.roles, rep.outer_contour);
    return rep;
}

// ---------------------------------------------------------------------------
// JSON export
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json aggregates_json(const Aggregates& a) {
    return {{"min", a.min}, {"median", a.median}, {"max", a.max},
            {"mean", a.mean}, {"std", a.std}};
}

inline nlohmann::ordered_json report_json(const FeatureReport& rep) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["units"] = {{"length", "mm"}, {"angle", "rad"}};
    j["conventions"] = {
        {"bend_angle", "inner cylinder arc angle; flat = 0, right angle = pi/2"},
        {"orientation", "+1 when the fold rotates toward the top shell normal at side A"},
        {"side_a", "flange whose planar face has the smaller face id"},
        {"flange_rays", "measured to the outer loop; holes ignored"}};
    j["thickness"] = rep.thickness;
    j["roles"] = nlohmann::ordered_json::array();
    for (size_t f = 0; f < rep.roles.size(); ++f)
        j["roles"].push_back({{"face", f}, {"role", to_string(rep.roles[f])}});
    j["cylinders"] = nlohmann::ordered_json::array();
    for (const CylFeature& c : rep.cylinders)
        j["cylinders"].push_back({{"face", c.face},
                                  {"radius", c.radius},
                                  {"axial_length", c.axial_length},
                                  {"arc_angle", c.arc_angle},
                                  {"convexity", c.convexity},
                                  {"fitted", c.fitted}});
    j["bends"] = nlohmann::ordered_json::array();
    for (const BendFeature& b : rep.bends)
        j["bends"].push_back({{"inner_face", b.inner_face},
                              {"outer_face", b.outer_face},
                              {"inner_radius", b.inner_radius},
                              {"outer_radius", b.outer_radius},
                              {"length", b.length},
                              {"bend_angle", b.bend_angle},
                              {"orientation", b.orientation},
                              {"flange_a", aggregates_json(b.flange_a)},
                              {"flange_b", aggregates_json(b.flange_b)},
                              {"corner_partners", b.corner_partners}});
    j["holes"] = nlohmann::ordered_json::array();
    for (const HoleFeature& h : rep.holes)
        j["holes"].push_back({{"wall_faces", h.wall_faces},
                              {"host", h.host == SheetRole::Side ? "side" : "shell"},
                              {"diameter", h.diameter},
                              {"is_side_hole", h.is_side_hole}});
    j["outer_contour"] = rep.outer_contour;
    j["contour_cycles"] = rep.contour_cycles;
    return j;
}

}  // namespace bendgraph::featrec
