#pragma once

// Resolved boundary representation: evaluable surfaces and curves, face/edge/
// vertex topology with trimmed UV domains, face adjacency graph, and the
// global sheet attributes (thickness, area, bounding box).

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bendgraph/core.hpp"
#include "bendgraph/geom2.hpp"
#include "bendgraph/step.hpp"

namespace bendgraph::brep {

using geom2::Arc2;
using geom2::Curve2;
using geom2::Loop2;
using geom2::Region2;
using geom2::Seg2;

// ---------------------------------------------------------------------------
// B-spline basis (non-rational, de Boor / Cox recursion)
// ---------------------------------------------------------------------------

namespace bspline {

inline int find_span(int num_ctrl, int degree, double u, const std::vector<double>& knots) {
    int lo = degree, hi = num_ctrl;  // valid range [knots[degree], knots[num_ctrl]]
    if (u < knots[lo] - 1e-12 || u > knots[hi] + 1e-12)
        throw Error("b-spline parameter outside knot range");
    if (u >= knots[hi]) return hi - 1;
    int span = lo;
    while (span < hi - 1 && !(u >= knots[span] && u < knots[span + 1])) ++span;
    return span;
}

// Nonzero basis functions and first derivatives at u (degree+1 of each).
inline void basis_with_derivs(int span, double u, int degree,
                              const std::vector<double>& knots,
                              double* basis, double* deriv) {
    std::vector<double> left(degree + 1), right(degree + 1);
    std::vector<std::vector<double>> ndu(degree + 1, std::vector<double>(degree + 1));
    ndu[0][0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0;
        for (int r = 0; r < j; ++r) {
            double tmp = ndu[r][j - 1] / (right[r + 1] + left[j - r]);
            ndu[r][j] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= degree; ++j) basis[j] = ndu[j][degree];
    // first derivative from degree-1 basis
    for (int r = 0; r <= degree; ++r) {
        double d = 0;
        if (r > 0) d += ndu[r - 1][degree - 1] / (knots[span + r] - knots[span + r - degree]);
        if (r < degree)
            d -= ndu[r][degree - 1] / (knots[span + r + 1] - knots[span + r + 1 - degree]);
        deriv[r] = degree * d;
    }
}

}  // namespace bspline

// ---------------------------------------------------------------------------
// Surface and curve geometry
// ---------------------------------------------------------------------------

enum class SurfaceKind { Plane, Cylinder, BSpline };

struct PlaneGeom {
    Vec3 origin;
    Vec3 normal;          // outward of material
    Vec3 axis_u, axis_v;  // in-plane frame, axis_u x axis_v = normal
};

struct CylinderGeom {
    Vec3 origin;           // axis point
    Vec3 axis;             // unit
    Vec3 ref_u, ref_v;     // radial frame, ref_u x ref_v = axis
    double radius = 0;
    double sense = 1;      // outward normal = sense * radial direction
};

struct BSplineGeom {
    int deg_u = 0, deg_v = 0;
    int num_u = 0, num_v = 0;           // control net size
    std::vector<double> knots_u, knots_v;  // expanded by multiplicity
    std::vector<Vec3> ctrl;             // row-major [iu][iv]
    double sense = 1;

    const Vec3& at(int iu, int iv) const { return ctrl[size_t(iu) * num_v + iv]; }
};

struct SurfaceGeom {
    SurfaceKind kind = SurfaceKind::Plane;
    PlaneGeom plane;
    CylinderGeom cyl;
    BSplineGeom bsp;
};

struct SurfaceSample {
    Vec3 point;
    Vec3 normal;  // unit, outward of material
};

inline SurfaceSample eval_surface(const SurfaceGeom& g, double u, double v) {
    switch (g.kind) {
        case SurfaceKind::Plane:
            return {g.plane.origin + u * g.plane.axis_u + v * g.plane.axis_v,
                    g.plane.normal};
        case SurfaceKind::Cylinder: {
            Vec3 radial = std::cos(u) * g.cyl.ref_u + std::sin(u) * g.cyl.ref_v;
            return {g.cyl.origin + g.cyl.radius * radial + v * g.cyl.axis,
                    g.cyl.sense * radial};
        }
        case SurfaceKind::BSpline: {
            const BSplineGeom& b = g.bsp;
            int su = bspline::find_span(b.num_u, b.deg_u, u, b.knots_u);
            int sv = bspline::find_span(b.num_v, b.deg_v, v, b.knots_v);
            std::vector<double> nu(b.deg_u + 1), du(b.deg_u + 1);
            std::vector<double> nv(b.deg_v + 1), dv(b.deg_v + 1);
            bspline::basis_with_derivs(su, u, b.deg_u, b.knots_u, nu.data(), du.data());
            bspline::basis_with_derivs(sv, v, b.deg_v, b.knots_v, nv.data(), dv.data());
            Vec3 p{0, 0, 0}, tu{0, 0, 0}, tv{0, 0, 0};
            for (int i = 0; i <= b.deg_u; ++i) {
                for (int j = 0; j <= b.deg_v; ++j) {
                    const Vec3& c = b.at(su - b.deg_u + i, sv - b.deg_v + j);
                    p += (nu[i] * nv[j]) * c;
                    tu += (du[i] * nv[j]) * c;
                    tv += (nu[i] * dv[j]) * c;
                }
            }
            return {p, (tu.cross(tv)).normalized() * b.sense};
        }
    }
    throw Error("unreachable surface kind");
}

enum class CurveKind { Line, Circle, BSplineCurve };

struct CurveGeom {
    CurveKind kind = CurveKind::Line;
    // line: p(t) = point + t*dir (dir unit, t in mm)
    Vec3 point, dir;
    // circle: p(t) = center + r*(cos t * ref_u + sin t * ref_v)
    Vec3 center, axis, ref_u, ref_v;
    double radius = 0;
    // b-spline curve
    int degree = 0;
    std::vector<double> knots;
    std::vector<Vec3> ctrl;

    Vec3 at(double t) const {
        switch (kind) {
            case CurveKind::Line: return point + t * dir;
            case CurveKind::Circle:
                return center + radius * (std::cos(t) * ref_u + std::sin(t) * ref_v);
            case CurveKind::BSplineCurve: {
                int span = bspline::find_span(int(ctrl.size()), degree, t, knots);
                std::vector<double> n(degree + 1), d(degree + 1);
                bspline::basis_with_derivs(span, t, degree, knots, n.data(), d.data());
                Vec3 p{0, 0, 0};
                for (int i = 0; i <= degree; ++i) p += n[i] * ctrl[span - degree + i];
                return p;
            }
        }
        throw Error("unreachable curve kind");
    }

    Vec3 tangent(double t) const {
        switch (kind) {
            case CurveKind::Line: return dir;
            case CurveKind::Circle:
                return (-std::sin(t) * ref_u + std::cos(t) * ref_v);
            case CurveKind::BSplineCurve: {
                int span = bspline::find_span(int(ctrl.size()), degree, t, knots);
                std::vector<double> n(degree + 1), d(degree + 1);
                bspline::basis_with_derivs(span, t, degree, knots, n.data(), d.data());
                Vec3 g{0, 0, 0};
                for (int i = 0; i <= degree; ++i) g += d[i] * ctrl[span - degree + i];
                return g.normalized();
            }
        }
        throw Error("unreachable curve kind");
    }
};

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

struct EdgeUse {
    int edge = -1;
    bool forward = true;  // traverses the edge v1 -> v2
};

struct Loop {
    std::vector<EdgeUse> uses;
};

struct Edge {
    int v1 = -1, v2 = -1;
    CurveGeom curve;
    double t1 = 0, t2 = 0;  // curve params at v1 and v2 (t2-t1 signed)

    Vec3 at_frac(double s) const { return curve.at(t1 + s * (t2 - t1)); }
    // tangent in the v1->v2 direction
    Vec3 dir_at_frac(double s) const {
        Vec3 g = curve.tangent(t1 + s * (t2 - t1));
        return ((t2 >= t1) ? g : -g).normalized();
    }
    double length() const {
        if (curve.kind == CurveKind::Line) return std::abs(t2 - t1);
        if (curve.kind == CurveKind::Circle) return curve.radius * std::abs(t2 - t1);
        double len = 0;
        Vec3 prev = at_frac(0);
        for (int i = 1; i <= 32; ++i) {
            Vec3 p = at_frac(i / 32.0);
            len += (p - prev).norm();
            prev = p;
        }
        return len;
    }

    std::array<int, 2> faces{-1, -1};
    std::array<bool, 2> face_forward{true, true};
};

struct Face {
    int id = -1;
    SurfaceGeom surf;
    Loop outer;
    std::vector<Loop> inners;
    Region2 uv;        // trimmed domain in surface parameters
    Vec2 uv_lo, uv_hi;
};

struct BrepSolid {
    std::vector<Vec3> vertices;
    std::vector<Edge> edges;
    std::vector<Face> faces;

    int face_count() const { return int(faces.size()); }

    double face_area(int f) const;
    Vec3 face_flux(int f) const;
    Vec3 normal_at(int f, const Vec3& p) const;
    std::pair<double, double> surface_params(int f, const Vec3& p) const;
};

// ---------------------------------------------------------------------------

inline std::pair<double, double> BrepSolid::surface_params(int f, const Vec3& p) const {
    const SurfaceGeom& g = faces[f].surf;
    if (g.kind == SurfaceKind::Plane) {
        Vec3 d = p - g.plane.origin;
        return {d.dot(g.plane.axis_u), d.dot(g.plane.axis_v)};
    }
    if (g.kind == SurfaceKind::Cylinder) {
        Vec3 d = p - g.cyl.origin;
        double v = d.dot(g.cyl.axis);
        double u = std::atan2(d.dot(g.cyl.ref_v), d.dot(g.cyl.ref_u));
        // shift into the face's u-range
        double lo = faces[f].uv_lo.x;
        while (u < lo - 1e-9) u += 2 * kPi;
        while (u > lo + 2 * kPi - 1e-9) u -= 2 * kPi;
        return {u, v};
    }
    // coarse projection for b-spline faces (rare path)
    double bu = 0, bv = 0, best = 1e300;
    for (int i = 0; i <= 24; ++i) {
        for (int j = 0; j <= 24; ++j) {
            double u = faces[f].uv_lo.x + (faces[f].uv_hi.x - faces[f].uv_lo.x) * i / 24.0;
            double v = faces[f].uv_lo.y + (faces[f].uv_hi.y - faces[f].uv_lo.y) * j / 24.0;
            double d2 = (eval_surface(g, u, v).point - p).dot(eval_surface(g, u, v).point - p);
            if (d2 < best) { best = d2; bu = u; bv = v; }
        }
    }
    return {bu, bv};
}

inline Vec3 BrepSolid::normal_at(int f, const Vec3& p) const {
    auto [u, v] = surface_params(f, p);
    return eval_surface(faces[f].surf, u, v).normal;
}

inline double BrepSolid::face_area(int f) const {
    const Face& face = faces[f];
    switch (face.surf.kind) {
        case SurfaceKind::Plane: return face.uv.area();
        case SurfaceKind::Cylinder: return face.surf.cyl.radius * face.uv.area();
        case SurfaceKind::BSpline: {
            // 32x32 Gauss-Legendre over the UV box, masked by the trim region.
            static const std::array<double, 16> gx = {
                0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
                0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
                0.5877157572407623, 0.6630442669302152, 0.7321821187402897,
                0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
                0.9349060759377397, 0.9647622555875064, 0.9856115115452684,
                0.9972638618494816};
            static const std::array<double, 16> gw = {
                0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
                0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
                0.0781938957870703, 0.0723457941088485, 0.0658222227763618,
                0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
                0.0342738629130214, 0.0253920653092621, 0.0162743947309057,
                0.0070186100094701};
            auto nodes = [&](double lo, double hi, int k, double& x, double& w) {
                double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
                int i = k / 2;
                double s = (k % 2) ? gx[i] : -gx[i];
                x = c + h * s;
                w = h * gw[i];
            };
            double area = 0;
            for (int i = 0; i < 32; ++i) {
                for (int j = 0; j < 32; ++j) {
                    double u, wu, v, wv;
                    nodes(face.uv_lo.x, face.uv_hi.x, i, u, wu);
                    nodes(face.uv_lo.y, face.uv_hi.y, j, v, wv);
                    if (!face.uv.contains({u, v})) continue;
                    const BSplineGeom& b = face.surf.bsp;
                    int su = bspline::find_span(b.num_u, b.deg_u, u, b.knots_u);
                    int sv = bspline::find_span(b.num_v, b.deg_v, v, b.knots_v);
                    std::vector<double> nu(b.deg_u + 1), du(b.deg_u + 1);
                    std::vector<double> nv(b.deg_v + 1), dv(b.deg_v + 1);
                    bspline::basis_with_derivs(su, u, b.deg_u, b.knots_u, nu.data(), du.data());
                    bspline::basis_with_derivs(sv, v, b.deg_v, b.knots_v, nv.data(), dv.data());
                    Vec3 tu{0, 0, 0}, tv{0, 0, 0};
                    for (int a = 0; a <= b.deg_u; ++a)
                        for (int c2 = 0; c2 <= b.deg_v; ++c2) {
                            const Vec3& cp = b.at(su - b.deg_u + a, sv - b.deg_v + c2);
                            tu += (du[a] * nv[c2]) * cp;
                            tv += (nu[a] * dv[c2]) * cp;
                        }
                    area += wu * wv * tu.cross(tv).norm();
                }
            }
            return area;
        }
    }
    throw Error("unreachable");
}

inline Vec3 BrepSolid::face_flux(int f) const {
    const Face& face = faces[f];
    if (face.surf.kind == SurfaceKind::Plane)
        return face.surf.plane.normal * face.uv.area();
    if (face.surf.kind == SurfaceKind::Cylinder) {
        // exact when the trimmed domain is its own bounding rectangle
        const CylinderGeom& c = face.surf.cyl;
        double u0 = face.uv_lo.x, u1 = face.uv_hi.x;
        double v0 = face.uv_lo.y, v1 = face.uv_hi.y;
        double rect = (u1 - u0) * (v1 - v0);
        if (std::abs(rect - face.uv.area()) > 1e-9 * std::max(1.0, rect))
            throw Error("flux on non-rectangular cylinder trim unsupported");
        double su = std::sin(u1) - std::sin(u0);
        double cu = std::cos(u1) - std::cos(u0);
        return c.sense * c.radius * (v1 - v0) * (su * c.ref_u - cu * c.ref_v);
    }
    // Gauss fallback
    Vec3 total{0, 0, 0};
    int n = 32;
    double du = (face.uv_hi.x - face.uv_lo.x) / n;
    double dv = (face.uv_hi.y - face.uv_lo.y) / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u = face.uv_lo.x + (i + 0.5) * du;
            double v = face.uv_lo.y + (j + 0.5) * dv;
            if (!face.uv.contains({u, v})) continue;
            auto s0 = eval_surface(face.surf, u, v);
            auto s1 = eval_surface(face.surf, std::min(u + 1e-5, face.uv_hi.x), v);
            auto s2 = eval_surface(face.surf, u, std::min(v + 1e-5, face.uv_hi.y));
            Vec3 tu = (s1.point - s0.point) / 1e-5;
            Vec3 tv = (s2.point - s0.point) / 1e-5;
            total += du * dv * tu.cross(tv).norm() * s0.normal;
        }
    return total;
}

// ---------------------------------------------------------------------------
// Topology finalization (shared by the STEP resolver and the part builder)
// ---------------------------------------------------------------------------

// Trimmed UV domain of a face from its 3-d loops. With normalize=false the
// loops keep their traversal orientation (used to detect reversed loops).
inline void build_face_uv(const BrepSolid& s, Face& face, bool normalize = true) {
    auto map_loop = [&](const Loop& loop) {
        Loop2 out;
        if (face.surf.kind == SurfaceKind::Plane) {
            const PlaneGeom& pl = face.surf.plane;
            auto to2 = [&](const Vec3& p) {
                Vec3 d = p - pl.origin;
                return Vec2{d.dot(pl.axis_u), d.dot(pl.axis_v)};
            };
            for (const EdgeUse& u : loop.uses) {
                const Edge& e = s.edges[u.edge];
                Vec3 pstart = u.forward ? s.vertices[e.v1] : s.vertices[e.v2];
                Vec3 pend = u.forward ? s.vertices[e.v2] : s.vertices[e.v1];
                if (e.curve.kind == CurveKind::Line) {
                    out.curves.push_back(Seg2{to2(pstart), to2(pend)});
                } else if (e.curve.kind == CurveKind::Circle) {
                    Vec2 c2 = to2(e.curve.center);
                    Vec2 s2 = to2(pstart);
                    double a0 = std::atan2(s2.y - c2.y, s2.x - c2.x);
                    double axial = e.curve.axis.dot(pl.normal);
                    double sweep = (e.t2 - e.t1) * (axial >= 0 ? 1.0 : -1.0) *
                                   (u.forward ? 1.0 : -1.0);
                    out.curves.push_back(Arc2{c2, e.curve.radius, a0, sweep});
                } else {
                    for (int i = 0; i < 16; ++i) {
                        double s0 = u.forward ? i / 16.0 : 1 - i / 16.0;
                        double s1 = u.forward ? (i + 1) / 16.0 : 1 - (i + 1) / 16.0;
                        out.curves.push_back(Seg2{to2(e.at_frac(s0)), to2(e.at_frac(s1))});
                    }
                }
            }
        } else if (face.surf.kind == SurfaceKind::Cylinder) {
            const CylinderGeom& cy = face.surf.cyl;
            auto axial = [&](const Vec3& p) { return (p - cy.origin).dot(cy.axis); };
            auto raw_u = [&](const Vec3& p) {
                Vec3 d = p - cy.origin;
                return std::atan2(d.dot(cy.ref_v), d.dot(cy.ref_u));
            };
            const Edge& first = s.edges[loop.uses.front().edge];
            Vec3 p0 = loop.uses.front().forward ? s.vertices[first.v1]
                                                : s.vertices[first.v2];
            double u_cur = raw_u(p0);
            for (const EdgeUse& u : loop.uses) {
                const Edge& e = s.edges[u.edge];
                Vec3 pstart = u.forward ? s.vertices[e.v1] : s.vertices[e.v2];
                Vec3 pend = u.forward ? s.vertices[e.v2] : s.vertices[e.v1];
                if (e.curve.kind == CurveKind::Line) {
                    if (e.curve.dir.cross(cy.axis).norm() > 1e-6)
                        throw Error("cylinder face line edge is not axial");
                    out.curves.push_back(Seg2{{u_cur, axial(pstart)}, {u_cur, axial(pend)}});
                } else if (e.curve.kind == CurveKind::Circle) {
                    double along = e.curve.axis.dot(cy.axis);
                    if (std::abs(std::abs(along) - 1) > 1e-6)
                        throw Error("cylinder face circle edge is not circumferential");
                    double sweep = (e.t2 - e.t1) * (along >= 0 ? 1.0 : -1.0) *
                                   (u.forward ? 1.0 : -1.0);
                    double v0 = axial(pstart);
                    out.curves.push_back(Seg2{{u_cur, v0}, {u_cur + sweep, v0}});
                    u_cur += sweep;
                } else {
                    throw Error("unsupported edge curve on cylinder face");
                }
            }
        }
        return out;
    };

    if (face.surf.kind == SurfaceKind::BSpline) {
        // b-spline faces are taken untrimmed over their knot rectangle
        const BSplineGeom& b = face.surf.bsp;
        double u0 = b.knots_u[b.deg_u], u1 = b.knots_u[b.num_u];
        double v0 = b.knots_v[b.deg_v], v1 = b.knots_v[b.num_v];
        face.uv.outer.curves = {Seg2{{u0, v0}, {u1, v0}}, Seg2{{u1, v0}, {u1, v1}},
                                Seg2{{u1, v1}, {u0, v1}}, Seg2{{u0, v1}, {u0, v0}}};
        face.uv.inners.clear();
    } else {
        face.uv.outer = map_loop(face.outer);
        face.uv.inners.clear();
        for (const Loop& l : face.inners) face.uv.inners.push_back(map_loop(l));
    }
    if (normalize) face.uv.normalize();
    face.uv.bbox(face.uv_lo, face.uv_hi);
}

// Validates loop chains, orients loops canonically (outer counter-clockwise
// with respect to the outward normal, inners clockwise), fills edge
// incidence, checks 2-manifoldness and builds every face's UV domain.
inline void finalize_topology(BrepSolid& s) {
    auto reverse_uses = [](Loop& l) {
        std::reverse(l.uses.begin(), l.uses.end());
        for (EdgeUse& u : l.uses) u.forward = !u.forward;
    };
    for (Face& f : s.faces) {
        if (f.surf.kind == SurfaceKind::BSpline) continue;
        build_face_uv(s, f, /*normalize=*/false);
        if (geom2::signed_area(f.uv.outer) < 0) reverse_uses(f.outer);
        for (size_t i = 0; i < f.inners.size(); ++i)
            if (geom2::signed_area(f.uv.inners[i]) > 0) reverse_uses(f.inners[i]);
    }
    std::vector<int> count(s.edges.size(), 0);
    for (Edge& e : s.edges) e.faces = {-1, -1};
    for (Face& f : s.faces) {
        auto handle = [&](const Loop& loop) {
            if (loop.uses.empty()) throw Error("empty edge loop");
            for (size_t i = 0; i < loop.uses.size(); ++i) {
                const EdgeUse& a = loop.uses[i];
                const EdgeUse& b = loop.uses[(i + 1) % loop.uses.size()];
                int a_end = a.forward ? s.edges[a.edge].v2 : s.edges[a.edge].v1;
                int b_start = b.forward ? s.edges[b.edge].v1 : s.edges[b.edge].v2;
                if (a_end != b_start) throw Error("edge loop is not a closed chain");
                int slot = count[a.edge]++;
                if (slot >= 2) throw Error("non-manifold edge (more than two faces)");
                s.edges[a.edge].faces[slot] = f.id;
                s.edges[a.edge].face_forward[slot] = a.forward;
            }
        };
        handle(f.outer);
        for (const Loop& l : f.inners) handle(l);
    }
    for (size_t i = 0; i < s.edges.size(); ++i)
        if (count[i] != 2)
            throw Error("non-manifold edge (incident face count " +
                        std::to_string(count[i]) + ")");
    for (Face& f : s.faces) build_face_uv(s, f);
}

// ---------------------------------------------------------------------------
// Face adjacency graph
// ---------------------------------------------------------------------------

enum class Dihedral { Convex, Concave, Smooth };

struct AagEdge {
    int a = -1, b = -1;  // a < b
    Dihedral dihedral = Dihedral::Smooth;
};

struct FaceAdjacencyGraph {
    int node_count = 0;
    std::vector<AagEdge> edges;

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(node_count);
        for (const AagEdge& e : edges) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
        return adj;
    }
};

inline FaceAdjacencyGraph build_aag(const BrepSolid& solid,
                                    double smooth_threshold_deg = 1.0) {
    std::map<std::pair<int, int>, Dihedral> pairs;
    double cos_smooth = std::cos(smooth_threshold_deg * kPi / 180.0);
    for (const Edge& e : solid.edges) {
        int fa = e.faces[0], fb = e.faces[1];
        if (fa == fb) continue;
        int a = std::min(fa, fb), b = std::max(fa, fb);
        if (pairs.count({a, b})) continue;
        Vec3 m = e.at_frac(0.5);
        Vec3 na = solid.normal_at(a, m);
        Vec3 nb = solid.normal_at(b, m);
        Dihedral d;
        if (na.dot(nb) >= cos_smooth) {
            d = Dihedral::Smooth;
        } else {
            // tangent as traversed in face a's loop
            bool fwd = (e.faces[0] == a) ? e.face_forward[0] : e.face_forward[1];
            Vec3 t = e.dir_at_frac(0.5) * (fwd ? 1.0 : -1.0);
            d = (na.cross(nb).dot(t) > 0) ? Dihedral::Convex : Dihedral::Concave;
        }
        pairs[{a, b}] = d;
    }
    FaceAdjacencyGraph g;
    g.node_count = solid.face_count();
    for (const auto& [key, d] : pairs) g.edges.push_back({key.first, key.second, d});
    return g;
}

// ---------------------------------------------------------------------------
// Euler-Poincare bookkeeping
// ---------------------------------------------------------------------------

struct EulerCounts {
    int vertices = 0, edges = 0, faces = 0, inner_loops = 0;
    // V - E + F - R = 2(S - G) with one shell
    int genus() const { return 1 - (vertices - edges + faces - inner_loops) / 2; }
    int vef() const { return vertices - edges + faces; }
};

inline EulerCounts euler_counts(const BrepSolid& s) {
    EulerCounts c;
    c.vertices = int(s.vertices.size());
    c.edges = int(s.edges.size());
    c.faces = int(s.faces.size());
    for (const Face& f : s.faces) c.inner_loops += int(f.inners.size());
    return c;
}

// ---------------------------------------------------------------------------
// Global sheet attributes
// ---------------------------------------------------------------------------

struct PlanePair {
    int a = -1, b = -1;
    double distance = 0;
    double weight = 0;  // min of the two face areas
};

// Pairs of parallel plane faces with opposite normals and overlapping
// footprints.
inline std::vector<PlanePair> opposite_plane_pairs(const BrepSolid& s) {
    std::vector<PlanePair> out;
    int n = s.face_count();
    std::vector<double> areas(n, 0);
    for (int i = 0; i < n; ++i)
        if (s.faces[i].surf.kind == SurfaceKind::Plane) areas[i] = s.face_area(i);
    for (int i = 0; i < n; ++i) {
        if (s.faces[i].surf.kind != SurfaceKind::Plane) continue;
        const PlaneGeom& pi = s.faces[i].surf.plane;
        for (int j = i + 1; j < n; ++j) {
            if (s.faces[j].surf.kind != SurfaceKind::Plane) continue;
            const PlaneGeom& pj = s.faces[j].surf.plane;
            if ((pi.normal + pj.normal).norm() > 1e-6) continue;
            double d = (pj.origin - pi.origin).dot(pi.normal);
            // facing each other across material: j must sit on the -normal side
            if (d >= -1e-9) continue;
            // overlap of footprints projected on plane i
            auto project_bbox = [&](int f, Vec2& lo, Vec2& hi) {
                lo = {1e300, 1e300};
                hi = {-1e300, -1e300};
                Vec2 flo, fhi;
                s.faces[f].uv.bbox(flo, fhi);
                const SurfaceGeom& g = s.faces[f].surf;
                for (Vec2 corner : {flo, Vec2{flo.x, fhi.y}, Vec2{fhi.x, flo.y}, fhi}) {
                    Vec3 p = eval_surface(g, corner.x, corner.y).point;
                    Vec3 dd = p - pi.origin;
                    Vec2 q{dd.dot(pi.axis_u), dd.dot(pi.axis_v)};
                    lo.x = std::min(lo.x, q.x); lo.y = std::min(lo.y, q.y);
                    hi.x = std::max(hi.x, q.x); hi.y = std::max(hi.y, q.y);
                }
            };
            Vec2 alo, ahi, blo, bhi;
            project_bbox(i, alo, ahi);
            project_bbox(j, blo, bhi);
            double ox = std::min(ahi.x, bhi.x) - std::max(alo.x, blo.x);
            double oy = std::min(ahi.y, bhi.y) - std::max(alo.y, blo.y);
            if (ox <= 1e-9 || oy <= 1e-9) continue;
            out.push_back({i, j, -d, std::min(areas[i], areas[j])});
        }
    }
    return out;
}

struct GlobalAttrs {
    double thickness = 0;
    double total_area = 0;
    double bbox_volume = 0;
    Vec3 bbox_lo, bbox_hi;
};

inline double sheet_thickness(const BrepSolid& s) {
    auto pairs = opposite_plane_pairs(s);
    if (pairs.empty()) throw Error("sheet thickness undeterminable: no opposite plane pair");
    // area-weighted mode over 1e-3 mm bins
    std::map<long long, std::pair<double, double>> bins;  // bin -> (weight, weighted d)
    for (const PlanePair& p : pairs) {
        long long bin = llround(p.distance / 1e-3);
        bins[bin].first += p.weight;
        bins[bin].second += p.weight * p.distance;
    }
    long long best_bin = 0;
    double best_weight = -1;
    for (const auto& [bin, acc] : bins) {
        if (acc.first > best_weight + 1e-12 ||
            (std::abs(acc.first - best_weight) <= 1e-12 && bin < best_bin)) {
            best_weight = acc.first;
            best_bin = bin;
        }
    }
    const auto& acc = bins[best_bin];
    return acc.second / acc.first;
}

inline GlobalAttrs global_attributes(const BrepSolid& s) {
    GlobalAttrs g;
    g.thickness = sheet_thickness(s);
    for (int f = 0; f < s.face_count(); ++f) g.total_area += s.face_area(f);

    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    auto take = [&](const Vec3& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    };
    for (const Vec3& v : s.vertices) take(v);
    for (const Edge& e : s.edges) {
        if (e.curve.kind == CurveKind::Circle) {
            // axis-aligned extremes of the arc
            for (int axis = 0; axis < 3; ++axis) {
                double cu = e.curve.ref_u[axis], cv = e.curve.ref_v[axis];
                if (std::abs(cu) < 1e-300 && std::abs(cv) < 1e-300) continue;
                double t_ext = std::atan2(cv, cu);
                for (double t : {t_ext, t_ext + kPi}) {
                    double t0 = std::min(e.t1, e.t2), t1 = std::max(e.t1, e.t2);
                    while (t > t1) t -= 2 * kPi;
                    while (t < t0) t += 2 * kPi;
                    if (t <= t1) take(e.curve.at(t));
                }
            }
        } else if (e.curve.kind == CurveKind::BSplineCurve) {
            for (int i = 0; i <= 16; ++i) take(e.at_frac(i / 16.0));
        }
    }
    for (const Face& f : s.faces)
        if (f.surf.kind == SurfaceKind::BSpline)
            for (const Vec3& cp : f.surf.bsp.ctrl) take(cp);
    g.bbox_lo = lo;
    g.bbox_hi = hi;
    g.bbox_volume = std::max(0.0, (hi.x - lo.x)) * std::max(0.0, (hi.y - lo.y)) *
                    std::max(0.0, (hi.z - lo.z));
    return g;
}

}  // namespace bendgraph::brep
