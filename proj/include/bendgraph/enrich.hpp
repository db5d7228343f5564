#pragma once

// Manufacturing-feature-enriched attributed adjacency graph: per-face UV
// sample grids, the 28-slot manufacturing feature vector, global attributes,
// and the JSON / binary exports.

#include <array>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bendgraph/brep.hpp"
#include "bendgraph/featrec.hpp"

namespace bendgraph::enrich {

using brep::BrepSolid;

// ---------------------------------------------------------------------------
// UV sample grid: 7 channels (x,y,z, nx,ny,nz, trimming mask) on a GxG grid
// of cell centers over the face's UV bounding rectangle.
// ---------------------------------------------------------------------------

struct UvGrid {
    int g = 0;
    std::vector<double> data;  // [channel][i][j], 7*g*g

    double& at(int c, int i, int j) { return data[(size_t(c) * g + i) * g + j]; }
    double at(int c, int i, int j) const { return data[(size_t(c) * g + i) * g + j]; }
};

inline UvGrid sample_uv_grid(const BrepSolid& s, int face, int g) {
    const brep::Face& f = s.faces[face];
    double du = f.uv_hi.x - f.uv_lo.x, dv = f.uv_hi.y - f.uv_lo.y;
    if (!(du > 0) || !(dv > 0) || !(f.uv.area() > 0))
        throw Error("face has an empty trimmed region");
    UvGrid grid;
    grid.g = g;
    grid.data.assign(size_t(7) * g * g, 0.0);
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            double u = f.uv_lo.x + du * (i + 0.5) / g;
            double v = f.uv_lo.y + dv * (j + 0.5) / g;
            if (!f.uv.contains({u, v})) continue;
            auto smp = brep::eval_surface(f.surf, u, v);
            grid.at(0, i, j) = smp.point.x;
            grid.at(1, i, j) = smp.point.y;
            grid.at(2, i, j) = smp.point.z;
            grid.at(3, i, j) = smp.normal.x;
            grid.at(4, i, j) = smp.normal.y;
            grid.at(5, i, j) = smp.normal.z;
            grid.at(6, i, j) = 1.0;
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// 28-slot manufacturing feature vector
// ---------------------------------------------------------------------------

constexpr int kMfWidth = 28;
using MfVector = std::array<double, kMfWidth>;

// Slot layout (schema version 1):
//   0..2   role one-hot (top, bottom, side)
//   3      is_cylindrical
//   4      convexity (+1 / -1 / 0)
//   5..7   cylinder radius, axial length, arc angle
//   8      is_bend
//   9      bend orientation (+1 / -1 / 0)
//   10..13 inner radius, outer radius, bend length, bend angle
//   14..18 flange A min, median, max, mean, std
//   19..23 flange B min, median, max, mean, std
//   24     is_hole_wall
//   25     is_side_hole wall
//   26     on_outer_contour
//   27     has_bend_corner
inline MfVector mf_vector(int face, const featrec::FeatureReport& rep) {
    MfVector m{};
    switch (rep.roles[face]) {
        case SheetRole::Top: m[0] = 1; break;
        case SheetRole::Bottom: m[1] = 1; break;
        case SheetRole::Side: m[2] = 1; break;
    }
    if (const featrec::CylFeature* c = rep.cylinder_of(face)) {
        m[3] = 1;
        m[4] = c->convexity;
        m[5] = c->radius;
        m[6] = c->axial_length;
        m[7] = c->arc_angle;
    }
    for (const featrec::BendFeature& b : rep.bends) {
        if (b.inner_face != face && b.outer_face != face) continue;
        m[8] = 1;
        m[9] = b.orientation;
        m[10] = b.inner_radius;
        m[11] = b.outer_radius;
        m[12] = b.length;
        m[13] = b.bend_angle;
        const Aggregates& a = b.flange_a;
        m[14] = a.min; m[15] = a.median; m[16] = a.max; m[17] = a.mean; m[18] = a.std;
        const Aggregates& bb = b.flange_b;
        m[19] = bb.min; m[20] = bb.median; m[21] = bb.max; m[22] = bb.mean; m[23] = bb.std;
        if (!b.corner_partners.empty()) m[27] = 1;
        break;
    }
    for (const featrec::HoleFeature& h : rep.holes) {
        for (int w : h.wall_faces) {
            if (w != face) continue;
            m[24] = 1;
            if (h.is_side_hole) m[25] = 1;
        }
    }
    for (int f : rep.outer_contour)
        if (f == face) m[26] = 1;
    return m;
}

// ---------------------------------------------------------------------------
// Enriched graph
// ---------------------------------------------------------------------------

struct EnrichedGraph {
    int grid = 0;
    std::vector<int> face_ids;
    std::vector<UvGrid> grids;
    std::vector<MfVector> mf;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> dihedral;  // per edge: 0 convex, 1 concave, 2 smooth
    std::array<double, 3> globals{};  // thickness, total area, bbox volume
    bool has_label = false;
    double label = 0;

    int node_count() const { return int(face_ids.size()); }
    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(face_ids.size());
        for (auto [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        return adj;
    }
};

inline EnrichedGraph assemble_graph(const BrepSolid& s,
                                    const featrec::FeatureReport& rep, int g,
                                    bool with_mf = true) {
    EnrichedGraph out;
    out.grid = g;
    for (int f = 0; f < s.face_count(); ++f) {
        out.face_ids.push_back(f);
        out.grids.push_back(sample_uv_grid(s, f, g));
        out.mf.push_back(with_mf ? mf_vector(f, rep) : MfVector{});
    }
    auto aag = brep::build_aag(s);
    for (const brep::AagEdge& e : aag.edges) {
        out.edges.push_back({e.a, e.b});
        out.dihedral.push_back(e.dihedral == brep::Dihedral::Convex ? 0
                               : e.dihedral == brep::Dihedral::Concave ? 1 : 2);
    }
    auto ga = brep::global_attributes(s);
    out.globals = {ga.thickness, ga.total_area, ga.bbox_volume};
    return out;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

inline const char* dihedral_name(int d) {
    return d == 0 ? "convex" : d == 1 ? "concave" : "smooth";
}

// Plain AAG export: {nodes:[{id, surface_kind, area}], edges:[{a, b, dihedral}]}
inline nlohmann::ordered_json aag_json(const BrepSolid& s) {
    auto aag = brep::build_aag(s);
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (int f = 0; f < s.face_count(); ++f) {
        const char* kind = s.faces[f].surf.kind == brep::SurfaceKind::Plane ? "plane"
                           : s.faces[f].surf.kind == brep::SurfaceKind::Cylinder
                               ? "cylinder"
                               : "bspline";
        j["nodes"].push_back({{"id", f}, {"surface_kind", kind}, {"area", s.face_area(f)}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const brep::AagEdge& e : aag.edges)
        j["edges"].push_back({{"a", e.a},
                              {"b", e.b},
                              {"dihedral", e.dihedral == brep::Dihedral::Convex ? "convex"
                                           : e.dihedral == brep::Dihedral::Concave
                                               ? "concave"
                                               : "smooth"}});
    return j;
}

inline nlohmann::ordered_json graph_json(const EnrichedGraph& g) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["grid"] = g.grid;
    j["nodes"] = nlohmann::ordered_json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        nlohmann::ordered_json node;
        node["face_id"] = g.face_ids[i];
        node["uv_grid"] = {{"shape", {7, g.grid, g.grid}}, {"data", g.grids[i].data}};
        node["mf"] = g.mf[i];
        j["nodes"].push_back(std::move(node));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (size_t e = 0; e < g.edges.size(); ++e)
        j["edges"].push_back({{"a", g.edges[e].first},
                              {"b", g.edges[e].second},
                              {"dihedral", dihedral_name(g.dihedral[e])}});
    j["globals"] = g.globals;
    if (g.has_label) j["label"] = g.label;
    else j["label"] = nullptr;
    return j;
}

// Binary export, little-endian 32-bit floats, magic "BGR1":
//   magic[4] u32:version u32:nodes u32:grid u32:edges
//   u8:has_label f32:label f32:globals[3]
//   nodes * { u32:face_id f32:uv[7*G*G] f32:mf[28] }
//   edges * { u32:a u32:b u8:dihedral }
inline std::string write_bgr(const EnrichedGraph& g) {
    std::string out;
    auto put_u32 = [&](uint32_t v) { out.append(reinterpret_cast<char*>(&v), 4); };
    auto put_u8 = [&](uint8_t v) { out.push_back(char(v)); };
    auto put_f32 = [&](double d) {
        float f = float(d);
        out.append(reinterpret_cast<char*>(&f), 4);
    };
    out += "BGR1";
    put_u32(1);
    put_u32(uint32_t(g.node_count()));
    put_u32(uint32_t(g.grid));
    put_u32(uint32_t(g.edges.size()));
    put_u8(g.has_label ? 1 : 0);
    put_f32(g.label);
    for (double x : g.globals) put_f32(x);
    for (int i = 0; i < g.node_count(); ++i) {
        put_u32(uint32_t(g.face_ids[i]));
        for (double x : g.grids[i].data) put_f32(x);
        for (double x : g.mf[i]) put_f32(x);
    }
    for (size_t e = 0; e < g.edges.size(); ++e) {
        put_u32(uint32_t(g.edges[e].first));
        put_u32(uint32_t(g.edges[e].second));
        put_u8(uint8_t(g.dihedral[e]));
    }
    return out;
}

inline EnrichedGraph read_bgr(const std::string& bytes) {
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (pos + n > bytes.size()) throw Error("truncated BGR1 stream");
    };
    auto get_u32 = [&]() {
        need(4);
        uint32_t v;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    };
    auto get_u8 = [&]() { need(1); return uint8_t(bytes[pos++]); };
    auto get_f32 = [&]() {
        need(4);
        float f;
        std::memcpy(&f, bytes.data() + pos, 4);
        pos += 4;
        return double(f);
    };
    need(4);
    if (bytes.compare(0, 4, "BGR1") != 0) throw Error("bad BGR1 magic");
    pos = 4;
    if (get_u32() != 1) throw Error("unsupported BGR1 version");
    EnrichedGraph g;
    uint32_t nodes = get_u32();
    g.grid = int(get_u32());
    uint32_t edges = get_u32();
    g.has_label = get_u8() != 0;
    g.label = get_f32();
    for (double& x : g.globals) x = get_f32();
    for (uint32_t i = 0; i < nodes; ++i) {
        g.face_ids.push_back(int(get_u32()));
        UvGrid grid;
        grid.g = g.grid;
        grid.data.resize(size_t(7) * g.grid * g.grid);
        for (double& x : grid.data) x = get_f32();
        g.grids.push_back(std::move(grid));
        MfVector m;
        for (double& x : m) x = get_f32();
        g.mf.push_back(m);
    }
    for (uint32_t e = 0; e < edges; ++e) {
        int a = int(get_u32());
        int b = int(get_u32());
        g.edges.push_back({a, b});
        g.dihedral.push_back(int(get_u8()));
    }
    return g;
}

}  // namespace bendgraph::enrich
