#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "bendgraph/resolve.hpp"
#include "bendgraph/step_write.hpp"
#include "support/fixtures.hpp"

using namespace bendgraph;
using Catch::Approx;

TEST_CASE("plate resolves to six planar faces with outward normals") {
    auto solid = brep::resolve_solid(
        step::parse_step(step::write_step(fixtures::plate().solid, "p")));
    REQUIRE(solid.face_count() == 6);
    for (const auto& f : solid.faces) CHECK(f.surf.kind == brep::SurfaceKind::Plane);
    // outward orientation: flux of constant fields vanishes over a closed shell
    Vec3 flux{0, 0, 0};
    double area = 0;
    for (int f = 0; f < solid.face_count(); ++f) {
        flux += solid.face_flux(f);
        area += solid.face_area(f);
    }
    CHECK(flux.norm() < 1e-6 * area);
}

TEST_CASE("L-bracket resolves to 4+2+4 faces with one convex and one concave cylinder") {
    auto solid = brep::resolve_solid(
        step::parse_step(step::write_step(fixtures::lbracket().solid, "L")));
    REQUIRE(solid.face_count() == 10);
    int planes = 0, convex = 0, concave = 0;
    for (const auto& f : solid.faces) {
        if (f.surf.kind == brep::SurfaceKind::Plane) ++planes;
        else if (f.surf.cyl.sense > 0) ++convex;
        else ++concave;
    }
    CHECK(planes == 8);
    CHECK(convex == 1);
    CHECK(concave == 1);
}

TEST_CASE("multiple solids rejected") {
    auto text = step::write_step(fixtures::plate().solid, "p");
    // duplicate the MANIFOLD_SOLID_BREP record under a fresh id
    auto pos = text.find("=MANIFOLD_SOLID_BREP");
    REQUIRE(pos != std::string::npos);
    auto line_start = text.rfind('\n', pos) + 1;
    auto line_end = text.find('\n', pos);
    std::string line = text.substr(line_start, line_end - line_start);
    std::string dup = "#9001" + line.substr(line.find('='));
    text.insert(text.find("ENDSEC;\nEND-ISO"), dup + "\n");
    CHECK_THROWS_WITH(brep::resolve_solid(step::parse_step(text)),
                      Catch::Matchers::ContainsSubstring("exactly one MANIFOLD_SOLID_BREP"));
}

TEST_CASE("non-manifold shell rejected") {
    auto text = step::write_step(fixtures::plate().solid, "p");
    // drop one face from the closed shell
    auto pos = text.find("=CLOSED_SHELL");
    REQUIRE(pos != std::string::npos);
    auto inner = text.find('(', text.find('(', pos) + 1);  // the face list
    auto comma = text.find(',', inner + 1);
    text.erase(inner + 1, comma - inner);  // remove the first face reference
    CHECK_THROWS_WITH(brep::resolve_solid(step::parse_step(text)),
                      Catch::Matchers::ContainsSubstring("non-manifold"));
}

TEST_CASE("eval_surface on a plane is the affine map") {
    brep::SurfaceGeom g;
    g.kind = brep::SurfaceKind::Plane;
    g.plane = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    auto s = brep::eval_surface(g, 1, 2);
    CHECK((s.point - Vec3{1, 2, 0}).norm() == 0.0);
    CHECK((s.normal - Vec3{0, 0, 1}).norm() == 0.0);
}

TEST_CASE("eval_surface on a cylinder: angular u, axial v, outward normal") {
    brep::SurfaceGeom g;
    g.kind = brep::SurfaceKind::Cylinder;
    g.cyl = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}, 5.0, 1.0};
    auto s = brep::eval_surface(g, kPi / 2, 3);
    CHECK((s.point - Vec3{0, 5, 3}).norm() < 1e-12);
    CHECK((s.normal - Vec3{0, 1, 0}).norm() < 1e-12);
}

TEST_CASE("b-spline patch reproduces the analytic cylinder quadrant") {
    auto patch = fixtures::cylinder_quadrant_patch(5.0, 4.0);
    brep::SurfaceGeom g;
    g.kind = brep::SurfaceKind::BSpline;
    g.bsp = patch;
    double worst = 0;
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 4; ++j) {
            double u = i / 20.0, v = j / 4.0;
            auto s = brep::eval_surface(g, u, v);
            double theta = u * kPi / 2;
            Vec3 exact{5 * std::cos(theta), 5 * std::sin(theta), v * 4.0};
            worst = std::max(worst, (s.point - exact).norm());
            CHECK(std::abs(s.normal.norm() - 1) < 1e-12);
        }
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("b-spline surface parses from STEP and evaluates identically") {
    auto patch = fixtures::cylinder_quadrant_patch(5.0, 4.0, 4);
    // emit the patch as a standalone entity set
    std::ostringstream d;
    int id = 1;
    std::vector<int> cp_ids;
    for (const Vec3& p : patch.ctrl) {
        d << "#" << id << "=CARTESIAN_POINT('',(" << format_step_real(p.x) << ","
          << format_step_real(p.y) << "," << format_step_real(p.z) << "));\n";
        cp_ids.push_back(id++);
    }
    int surf_id = id;
    d << "#" << surf_id << "=B_SPLINE_SURFACE_WITH_KNOTS('',2,1,(";
    for (int i = 0; i < patch.num_u; ++i) {
        d << (i ? "," : "") << "(";
        for (int j = 0; j < patch.num_v; ++j)
            d << (j ? "," : "") << "#" << cp_ids[i * patch.num_v + j];
        d << ")";
    }
    d << "),.UNSPECIFIED.,.F.,.F.,.F.,(3,1,1,1,3),(2,2),(0.,0.25,0.5,0.75,1.),(0.,1.),"
         ".UNSPECIFIED.);\n";
    std::string text =
        "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION((''),'2;1');\n"
        "FILE_NAME('b','2024-01-01T00:00:00',(''),(''),'','','');\n"
        "FILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));\nENDSEC;\nDATA;\n" +
        d.str() + "ENDSEC;\nEND-ISO-10303-21;\n";
    auto model = step::parse_step(text);
    auto geom = brep::resolve_surface(model, surf_id);
    REQUIRE(geom.kind == brep::SurfaceKind::BSpline);
    brep::SurfaceGeom direct;
    direct.kind = brep::SurfaceKind::BSpline;
    direct.bsp = patch;
    for (double u : {0.1, 0.5, 0.9})
        for (double v : {0.0, 0.7}) {
            auto a = brep::eval_surface(geom, u, v);
            auto b = brep::eval_surface(direct, u, v);
            CHECK((a.point - b.point).norm() < 1e-12);
        }
}

TEST_CASE("b-spline parameter outside the knot range is rejected") {
    auto patch = fixtures::cylinder_quadrant_patch(5.0, 4.0, 4);
    brep::SurfaceGeom g;
    g.kind = brep::SurfaceKind::BSpline;
    g.bsp = patch;
    CHECK_THROWS_WITH(brep::eval_surface(g, 1.5, 0.5),
                      Catch::Matchers::ContainsSubstring("knot range"));
}

TEST_CASE("aag: box all convex, L-bracket has four smooth tangencies") {
    auto box = fixtures::plate();
    auto aag = brep::build_aag(box.solid);
    CHECK(aag.node_count == 6);
    CHECK(aag.edges.size() == 12);
    for (const auto& e : aag.edges) CHECK(e.dihedral == brep::Dihedral::Convex);

    auto l = fixtures::lbracket();
    auto aag2 = brep::build_aag(l.solid);
    CHECK(aag2.node_count == 10);
    CHECK(aag2.edges.size() == 24);
    int smooth = 0;
    for (const auto& e : aag2.edges) smooth += e.dihedral == brep::Dihedral::Smooth;
    CHECK(smooth == 4);
    CHECK(int(aag2.edges.size()) == fixtures::brute_force_adjacent_pairs(l.solid));
}

TEST_CASE("concave dihedral at the corner notch") {
    auto part = fixtures::corner_part();
    auto aag = brep::build_aag(part.solid);
    int concave = 0;
    for (const auto& e : aag.edges) concave += e.dihedral == brep::Dihedral::Concave;
    CHECK(concave >= 1);  // the shared cap edge at the notch
}

TEST_CASE("holed plate: seven-ish faces, connected graph, euler bookkeeping") {
    auto part = fixtures::holed_plate();
    auto solid = brep::resolve_solid(
        step::parse_step(step::write_step(part.solid, "h")));
    CHECK(solid.face_count() == 8);  // 6 plate + 2 hole wall halves
    auto aag = brep::build_aag(solid);
    // connectivity
    std::vector<int> seen(aag.node_count, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    auto adj = aag.adjacency();
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (int nb : adj[cur])
            if (!seen[nb]) { seen[nb] = 1; stack.push_back(nb); }
    }
    for (int s : seen) CHECK(s == 1);
    auto ec = brep::euler_counts(solid);
    CHECK(ec.vef() - ec.inner_loops == 2 - 2 * 1);
    CHECK(ec.inner_loops == 2);
}

TEST_CASE("global attributes of the 100x50x2 plate") {
    auto ga = brep::global_attributes(fixtures::plate().solid);
    CHECK(ga.thickness == Approx(2.0).epsilon(1e-12));
    CHECK(ga.total_area == Approx(10600.0).epsilon(1e-12));
    CHECK(ga.bbox_volume == Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("thickness of the L-bracket and bbox including the bend bulge") {
    auto part = fixtures::lbracket();
    auto ga = brep::global_attributes(part.solid);
    CHECK(ga.thickness == Approx(2.0).epsilon(1e-9));
    CHECK(ga.total_area == Approx(part.gt.total_area).epsilon(1e-9));
}

TEST_CASE("thickness undeterminable without an opposite plane pair") {
    auto patch = fixtures::cylinder_quadrant_patch(5.0, 4.0, 4);
    auto solid = fixtures::patch_only_solid(patch);
    CHECK_THROWS_WITH(brep::sheet_thickness(solid),
                      Catch::Matchers::ContainsSubstring("undeterminable"));
}

TEST_CASE("euler counts across fixtures") {
    for (const auto& part : {fixtures::plate(), fixtures::lbracket(),
                             fixtures::uchannel(), fixtures::corner_part()}) {
        auto ec = brep::euler_counts(part.solid);
        CHECK(ec.vef() == 2);
        CHECK(ec.inner_loops == 0);
        CHECK(ec.genus() == 0);
    }
}

TEST_CASE("surface normals are unit length at random parameters") {
    auto part = fixtures::uchannel();
    std::mt19937_64 rng(11);
    for (const auto& f : part.solid.faces) {
        std::uniform_real_distribution<double> du(f.uv_lo.x, f.uv_hi.x);
        std::uniform_real_distribution<double> dv(f.uv_lo.y, f.uv_hi.y);
        for (int k = 0; k < 100; ++k) {
            auto s = brep::eval_surface(f.surf, du(rng), dv(rng));
            CHECK(std::abs(s.normal.norm() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("flux vanishes over every fixture shell") {
    for (const auto& part : {fixtures::plate(), fixtures::lbracket(),
                             fixtures::uchannel(), fixtures::corner_part(),
                             fixtures::holed_plate()}) {
        Vec3 flux{0, 0, 0};
        double area = 0;
        for (int f = 0; f < part.solid.face_count(); ++f) {
            flux += part.solid.face_flux(f);
            area += part.solid.face_area(f);
        }
        CHECK(flux.norm() < 1e-6 * area);
    }
}
