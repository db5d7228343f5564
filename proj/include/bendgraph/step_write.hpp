#pragma once

// Part 21 emission for analytic (plane/cylinder, line/circle) B-rep solids.

#include <string>
#include <vector>

#include "bendgraph/brep.hpp"
#include "bendgraph/core.hpp"

namespace bendgraph::step {

namespace detail {

class Writer {
public:
    explicit Writer(const brep::BrepSolid& s, const std::string& name)
        : s_(s), name_(name) {}

    std::string write() {
        body_.clear();
        next_id_ = 1;
        std::vector<int> vertex_ids(s_.vertices.size());
        for (size_t i = 0; i < s_.vertices.size(); ++i) {
            int p = cartesian_point(s_.vertices[i]);
            vertex_ids[i] = emit("VERTEX_POINT", "''," + ref(p));
        }
        std::vector<int> edge_ids(s_.edges.size());
        for (size_t i = 0; i < s_.edges.size(); ++i) {
            const brep::Edge& e = s_.edges[i];
            int curve;
            if (e.curve.kind == brep::CurveKind::Line) {
                int p = cartesian_point(e.curve.point);
                int d = direction(e.curve.dir);
                int v = emit("VECTOR", "''," + ref(d) + ",1.");
                curve = emit("LINE", "''," + ref(p) + "," + ref(v));
            } else if (e.curve.kind == brep::CurveKind::Circle) {
                int pl = placement(e.curve.center, e.curve.axis, e.curve.ref_u);
                curve = emit("CIRCLE", "''," + ref(pl) + "," + real(e.curve.radius));
            } else {
                throw Error("unsupported curve type in solid: b-spline");
            }
            if (e.t2 < e.t1) throw Error("writer expects edges parameterized forward");
            edge_ids[i] = emit("EDGE_CURVE", "''," + ref(vertex_ids[e.v1]) + "," +
                                                 ref(vertex_ids[e.v2]) + "," + ref(curve) +
                                                 ",.T.");
        }
        std::vector<int> face_ids;
        for (const brep::Face& f : s_.faces) {
            int surf;
            bool same_sense = true;
            if (f.surf.kind == brep::SurfaceKind::Plane) {
                const auto& p = f.surf.plane;
                surf = emit("PLANE", "''," + ref(placement(p.origin, p.normal, p.axis_u)));
            } else if (f.surf.kind == brep::SurfaceKind::Cylinder) {
                const auto& c = f.surf.cyl;
                surf = emit("CYLINDRICAL_SURFACE",
                            "''," + ref(placement(c.origin, c.axis, c.ref_u)) + "," +
                                real(c.radius));
                same_sense = c.sense > 0;
            } else {
                throw Error("unsupported surface type in solid: b-spline");
            }
            std::string bounds;
            bounds += ref(bound(f.outer, edge_ids, true));
            for (const brep::Loop& l : f.inners)
                bounds += "," + ref(bound(l, edge_ids, false));
            face_ids.push_back(emit("ADVANCED_FACE", "'',(" + bounds + ")," + ref(surf) +
                                                         (same_sense ? ",.T." : ",.F.")));
        }
        std::string face_list;
        for (size_t i = 0; i < face_ids.size(); ++i)
            face_list += (i ? "," : "") + ref(face_ids[i]);
        int shell = emit("CLOSED_SHELL", "'',(" + face_list + ")");
        int solid = emit("MANIFOLD_SOLID_BREP", "''," + ref(shell));
        int ctx = emit("GEOMETRIC_REPRESENTATION_CONTEXT", "'3','',3");
        emit("ADVANCED_BREP_SHAPE_REPRESENTATION",
             "'',(" + ref(solid) + ")," + ref(ctx));

        std::string out;
        out += "ISO-10303-21;\n";
        out += "HEADER;\n";
        out += "FILE_DESCRIPTION(('sheet metal part'),'2;1');\n";
        out += "FILE_NAME('" + name_ +
               "','2024-01-01T00:00:00',(''),(''),'bendgraph','bendgraph','');\n";
        out += "FILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));\n";
        out += "ENDSEC;\n";
        out += "DATA;\n";
        out += body_;
        out += "ENDSEC;\n";
        out += "END-ISO-10303-21;\n";
        return out;
    }

private:
    static std::string ref(int id) { return "#" + std::to_string(id); }
    static std::string real(double x) { return format_step_real(x); }
    static std::string triple(const Vec3& v) {
        return "(" + real(v.x) + "," + real(v.y) + "," + real(v.z) + ")";
    }

    int emit(const std::string& type, const std::string& args) {
        int id = next_id_++;
        body_ += "#" + std::to_string(id) + "=" + type + "(" + args + ");\n";
        return id;
    }

    int cartesian_point(const Vec3& p) { return emit("CARTESIAN_POINT", "''," + triple(p)); }
    int direction(const Vec3& d) { return emit("DIRECTION", "''," + triple(d)); }

    int placement(const Vec3& origin, const Vec3& z, const Vec3& x) {
        int p = cartesian_point(origin);
        int dz = direction(z);
        int dx = direction(x);
        return emit("AXIS2_PLACEMENT_3D", "''," + ref(p) + "," + ref(dz) + "," + ref(dx));
    }

    int bound(const brep::Loop& loop, const std::vector<int>& edge_ids, bool outer) {
        std::string uses;
        for (size_t i = 0; i < loop.uses.size(); ++i) {
            const brep::EdgeUse& u = loop.uses[i];
            int oe = emit("ORIENTED_EDGE", "'',*,*," + ref(edge_ids[u.edge]) +
                                               (u.forward ? ",.T." : ",.F."));
            uses += (i ? "," : "") + ref(oe);
        }
        int el = emit("EDGE_LOOP", "'',(" + uses + ")");
        return emit(outer ? "FACE_OUTER_BOUND" : "FACE_BOUND", "''," + ref(el) + ",.T.");
    }

    const brep::BrepSolid& s_;
    std::string name_;
    std::string body_;
    int next_id_ = 1;
};

}  // namespace detail

inline std::string write_step(const brep::BrepSolid& solid,
                              const std::string& part_name = "part") {
    return detail::Writer(solid, part_name).write();
}

}  // namespace bendgraph::step
