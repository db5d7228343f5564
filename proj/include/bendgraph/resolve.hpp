#pragma once

// Resolution of a parsed STEP model into an evaluable BrepSolid.

#include <map>
#include <string>
#include <vector>

#include "bendgraph/brep.hpp"
#include "bendgraph/step.hpp"

namespace bendgraph::brep {

namespace detail {

struct Frame {
    Vec3 origin, x, y, z;
};

class Resolver {
public:
    explicit Resolver(const step::StepModel& m) : m_(m) {}

    BrepSolid resolve() {
        auto solids = m_.of_type("MANIFOLD_SOLID_BREP");
        if (solids.size() != 1)
            throw Error("expected exactly one MANIFOLD_SOLID_BREP, found " +
                        std::to_string(solids.size()));
        const auto& shell_inst = m_.at(solids[0]->args.at(1).as_ref());
        if (shell_inst.entity_type != "CLOSED_SHELL")
            throw Error("MANIFOLD_SOLID_BREP outer is not a CLOSED_SHELL");
        for (const step::Value& fref : shell_inst.args.at(1).as_list())
            resolve_face(fref.as_ref());
        finalize_topology(solid_);
        return std::move(solid_);
    }

    SurfaceGeom resolve_surface(long long id) {
        const auto& inst = m_.at(id);
        SurfaceGeom g;
        if (inst.entity_type == "PLANE") {
            Frame f = frame_of(inst.args.at(1).as_ref());
            g.kind = SurfaceKind::Plane;
            g.plane = {f.origin, f.z, f.x, f.y};
        } else if (inst.entity_type == "CYLINDRICAL_SURFACE") {
            Frame f = frame_of(inst.args.at(1).as_ref());
            g.kind = SurfaceKind::Cylinder;
            g.cyl = {f.origin, f.z, f.x, f.y, inst.args.at(2).as_real(), 1.0};
            if (g.cyl.radius <= 0) throw Error("cylinder radius must be positive");
        } else if (inst.entity_type == "B_SPLINE_SURFACE_WITH_KNOTS") {
            g.kind = SurfaceKind::BSpline;
            g.bsp = resolve_bspline_surface(inst);
        } else {
            throw Error("unsupported surface type " + inst.entity_type);
        }
        return g;
    }

private:
    Vec3 point_of(long long id) {
        const auto& inst = m_.at(id);
        if (inst.entity_type != "CARTESIAN_POINT")
            throw Error("expected CARTESIAN_POINT, got " + inst.entity_type);
        const auto& xs = inst.args.at(1).as_list();
        return {xs.at(0).as_real(), xs.at(1).as_real(), xs.at(2).as_real()};
    }

    Vec3 dir_of(long long id) {
        const auto& inst = m_.at(id);
        if (inst.entity_type != "DIRECTION")
            throw Error("expected DIRECTION, got " + inst.entity_type);
        const auto& xs = inst.args.at(1).as_list();
        return Vec3{xs.at(0).as_real(), xs.at(1).as_real(), xs.at(2).as_real()}.normalized();
    }

    Frame frame_of(long long id) {
        const auto& inst = m_.at(id);
        if (inst.entity_type != "AXIS2_PLACEMENT_3D")
            throw Error("expected AXIS2_PLACEMENT_3D, got " + inst.entity_type);
        Frame f;
        f.origin = point_of(inst.args.at(1).as_ref());
        f.z = inst.args.at(2).kind == step::Value::Kind::Ref
                  ? dir_of(inst.args.at(2).as_ref())
                  : Vec3{0, 0, 1};
        Vec3 x_hint = inst.args.at(3).kind == step::Value::Kind::Ref
                          ? dir_of(inst.args.at(3).as_ref())
                          : any_perpendicular(f.z);
        Vec3 x = x_hint - f.z * f.z.dot(x_hint);
        if (x.norm() < 1e-9) x = any_perpendicular(f.z);
        f.x = x.normalized();
        f.y = f.z.cross(f.x);
        return f;
    }

    BSplineGeom resolve_bspline_surface(const step::StepInstance& inst) {
        BSplineGeom b;
        b.deg_u = int(inst.args.at(1).as_int());
        b.deg_v = int(inst.args.at(2).as_int());
        const auto& rows = inst.args.at(3).as_list();
        b.num_u = int(rows.size());
        b.num_v = int(rows.at(0).as_list().size());
        for (const auto& row : rows) {
            const auto& cols = row.as_list();
            if (int(cols.size()) != b.num_v)
                throw Error("ragged b-spline control net");
            for (const auto& cp : cols) b.ctrl.push_back(point_of(cp.as_ref()));
        }
        auto expand = [](const std::vector<step::Value>& mults,
                         const std::vector<step::Value>& knots) {
            std::vector<double> out;
            for (size_t i = 0; i < knots.size(); ++i)
                for (long long k = 0; k < mults.at(i).as_int(); ++k)
                    out.push_back(knots[i].as_real());
            return out;
        };
        b.knots_u = expand(inst.args.at(8).as_list(), inst.args.at(10).as_list());
        b.knots_v = expand(inst.args.at(9).as_list(), inst.args.at(11).as_list());
        if (int(b.knots_u.size()) != b.num_u + b.deg_u + 1 ||
            int(b.knots_v.size()) != b.num_v + b.deg_v + 1)
            throw Error("b-spline knot vector size mismatch");
        return b;
    }

    CurveGeom resolve_curve(long long id) {
        const auto& inst = m_.at(id);
        CurveGeom c;
        if (inst.entity_type == "LINE") {
            c.kind = CurveKind::Line;
            c.point = point_of(inst.args.at(1).as_ref());
            const auto& vec = m_.at(inst.args.at(2).as_ref());
            if (vec.entity_type != "VECTOR") throw Error("LINE direction must be a VECTOR");
            c.dir = dir_of(vec.args.at(1).as_ref());
        } else if (inst.entity_type == "CIRCLE") {
            c.kind = CurveKind::Circle;
            Frame f = frame_of(inst.args.at(1).as_ref());
            c.center = f.origin;
            c.axis = f.z;
            c.ref_u = f.x;
            c.ref_v = f.y;
            c.radius = inst.args.at(2).as_real();
            if (c.radius <= 0) throw Error("circle radius must be positive");
        } else if (inst.entity_type == "B_SPLINE_CURVE_WITH_KNOTS") {
            c.kind = CurveKind::BSplineCurve;
            c.degree = int(inst.args.at(1).as_int());
            for (const auto& cp : inst.args.at(2).as_list())
                c.ctrl.push_back(point_of(cp.as_ref()));
            const auto& mults = inst.args.at(6).as_list();
            const auto& knots = inst.args.at(7).as_list();
            for (size_t i = 0; i < knots.size(); ++i)
                for (long long k = 0; k < mults.at(i).as_int(); ++k)
                    c.knots.push_back(knots[i].as_real());
            if (c.knots.size() != c.ctrl.size() + c.degree + 1)
                throw Error("b-spline curve knot vector size mismatch");
        } else {
            throw Error("unsupported curve type " + inst.entity_type);
        }
        return c;
    }

    int vertex_index(long long vp_id) {
        auto it = vertex_ids_.find(vp_id);
        if (it != vertex_ids_.end()) return it->second;
        const auto& inst = m_.at(vp_id);
        if (inst.entity_type != "VERTEX_POINT")
            throw Error("expected VERTEX_POINT, got " + inst.entity_type);
        int idx = int(solid_.vertices.size());
        solid_.vertices.push_back(point_of(inst.args.at(1).as_ref()));
        vertex_ids_.emplace(vp_id, idx);
        return idx;
    }

    int edge_index(long long ec_id) {
        auto it = edge_ids_.find(ec_id);
        if (it != edge_ids_.end()) return it->second;
        const auto& inst = m_.at(ec_id);
        if (inst.entity_type != "EDGE_CURVE")
            throw Error("expected EDGE_CURVE, got " + inst.entity_type);
        Edge e;
        e.v1 = vertex_index(inst.args.at(1).as_ref());
        e.v2 = vertex_index(inst.args.at(2).as_ref());
        e.curve = resolve_curve(inst.args.at(3).as_ref());
        bool same_sense = inst.args.at(4).as_bool();
        const Vec3& p1 = solid_.vertices[e.v1];
        const Vec3& p2 = solid_.vertices[e.v2];
        switch (e.curve.kind) {
            case CurveKind::Line: {
                e.t1 = (p1 - e.curve.point).dot(e.curve.dir);
                e.t2 = (p2 - e.curve.point).dot(e.curve.dir);
                break;
            }
            case CurveKind::Circle: {
                auto angle = [&](const Vec3& p) {
                    Vec3 d = p - e.curve.center;
                    return std::atan2(d.dot(e.curve.ref_v), d.dot(e.curve.ref_u));
                };
                double a1 = angle(p1), a2 = angle(p2);
                double sweep;
                if (e.v1 == e.v2) {
                    sweep = same_sense ? 2 * kPi : -2 * kPi;
                } else if (same_sense) {
                    sweep = a2 - a1;
                    while (sweep <= 1e-12) sweep += 2 * kPi;
                } else {
                    sweep = a2 - a1;
                    while (sweep >= -1e-12) sweep -= 2 * kPi;
                }
                e.t1 = a1;
                e.t2 = a1 + sweep;
                break;
            }
            case CurveKind::BSplineCurve: {
                e.t1 = e.curve.knots[e.curve.degree];
                e.t2 = e.curve.knots[e.curve.ctrl.size()];
                if (!same_sense) std::swap(e.t1, e.t2);
                break;
            }
        }
        for (double s : {0.0, 1.0}) {
            const Vec3& expect = s == 0.0 ? p1 : p2;
            if ((e.at_frac(s) - expect).norm() > 1e-6)
                throw Error("edge endpoints inconsistent with curve geometry");
        }
        int idx = int(solid_.edges.size());
        solid_.edges.push_back(std::move(e));
        edge_ids_.emplace(ec_id, idx);
        return idx;
    }

    Loop resolve_loop(long long bound_id, bool& is_outer) {
        const auto& bound = m_.at(bound_id);
        if (bound.entity_type != "FACE_BOUND" && bound.entity_type != "FACE_OUTER_BOUND")
            throw Error("expected FACE_BOUND, got " + bound.entity_type);
        is_outer = bound.entity_type == "FACE_OUTER_BOUND";
        const auto& loop_inst = m_.at(bound.args.at(1).as_ref());
        if (loop_inst.entity_type != "EDGE_LOOP")
            throw Error("expected EDGE_LOOP, got " + loop_inst.entity_type);
        bool bound_orientation = bound.args.at(2).as_bool();
        Loop loop;
        for (const auto& oe_ref : loop_inst.args.at(1).as_list()) {
            const auto& oe = m_.at(oe_ref.as_ref());
            if (oe.entity_type != "ORIENTED_EDGE")
                throw Error("expected ORIENTED_EDGE, got " + oe.entity_type);
            EdgeUse use;
            use.edge = edge_index(oe.args.at(3).as_ref());
            use.forward = oe.args.at(4).as_bool();
            loop.uses.push_back(use);
        }
        if (!bound_orientation) {
            std::reverse(loop.uses.begin(), loop.uses.end());
            for (EdgeUse& u : loop.uses) u.forward = !u.forward;
        }
        return loop;
    }

    void resolve_face(long long id) {
        const auto& inst = m_.at(id);
        if (inst.entity_type != "ADVANCED_FACE")
            throw Error("shell member is not an ADVANCED_FACE: " + inst.entity_type);
        Face face;
        face.id = int(solid_.faces.size());
        face.surf = resolve_surface(inst.args.at(2).as_ref());
        if (!inst.args.at(3).as_bool()) {
            // fold reversed sense into the stored geometry
            switch (face.surf.kind) {
                case SurfaceKind::Plane:
                    face.surf.plane.normal = -face.surf.plane.normal;
                    face.surf.plane.axis_v = -face.surf.plane.axis_v;
                    break;
                case SurfaceKind::Cylinder: face.surf.cyl.sense = -1; break;
                case SurfaceKind::BSpline: face.surf.bsp.sense = -1; break;
            }
        }
        bool have_outer = false;
        std::vector<Loop> loops;
        std::vector<bool> outer_flags;
        for (const auto& bref : inst.args.at(1).as_list()) {
            bool is_outer = false;
            loops.push_back(resolve_loop(bref.as_ref(), is_outer));
            outer_flags.push_back(is_outer);
            if (is_outer) {
                if (have_outer) throw Error("face has multiple outer bounds");
                have_outer = true;
            }
        }
        if (!have_outer) {
            if (loops.size() == 1) {
                outer_flags[0] = true;
            } else {
                throw Error("face with multiple bounds lacks FACE_OUTER_BOUND");
            }
        }
        for (size_t i = 0; i < loops.size(); ++i) {
            if (outer_flags[i]) face.outer = loops[i];
            else face.inners.push_back(loops[i]);
        }
        solid_.faces.push_back(std::move(face));
    }

    const step::StepModel& m_;
    BrepSolid solid_;
    std::map<long long, int> vertex_ids_;
    std::map<long long, int> edge_ids_;
};

}  // namespace detail

inline BrepSolid resolve_solid(const step::StepModel& model) {
    return detail::Resolver(model).resolve();
}

// Resolve a single surface instance (used for standalone geometry checks).
inline SurfaceGeom resolve_surface(const step::StepModel& model, long long id) {
    return detail::Resolver(model).resolve_surface(id);
}

}  // namespace bendgraph::brep
