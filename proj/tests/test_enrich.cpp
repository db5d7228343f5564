#include <catch2/catch_amalgamated.hpp>

#include "bendgraph/enrich.hpp"
#include "support/fixtures.hpp"

using namespace bendgraph;
using Catch::Approx;

TEST_CASE("uv grid of a full rectangular planar face is fully masked") {
    auto part = fixtures::plate();
    auto grid = enrich::sample_uv_grid(part.solid, 0, 10);
    int inside = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) inside += grid.at(6, i, j) > 0.5;
    CHECK(inside == 100);
    // point and normal channels populated, normals unit where masked
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            Vec3 n{grid.at(3, i, j), grid.at(4, i, j), grid.at(5, i, j)};
            CHECK(std::abs(n.norm() - 1.0) < 1e-9);
        }
}

TEST_CASE("uv grid mask fraction approximates the trimmed area fraction") {
    // the L-bracket profile face is an L-shaped region with arc fillets
    auto part = fixtures::lbracket();
    int profile_face = -1;
    for (int f = 0; f < part.solid.face_count(); ++f) {
        const auto& face = part.solid.faces[f];
        if (face.surf.kind != brep::SurfaceKind::Plane) continue;
        if (std::abs(std::abs(face.surf.plane.normal.y) - 1.0) < 1e-9) {
            profile_face = f;
            break;
        }
    }
    REQUIRE(profile_face >= 0);
    const auto& face = part.solid.faces[profile_face];
    double bbox_area = (face.uv_hi.x - face.uv_lo.x) * (face.uv_hi.y - face.uv_lo.y);
    double region_fraction = face.uv.area() / bbox_area;
    const int g = 24;
    auto grid = enrich::sample_uv_grid(part.solid, profile_face, g);
    int inside = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) inside += grid.at(6, i, j) > 0.5;
    double mask_fraction = double(inside) / (g * g);
    CHECK(mask_fraction == Approx(region_fraction).margin(2.0 / g));
}

TEST_CASE("annular trim: samples inside the hole are masked out") {
    auto part = fixtures::holed_plate();
    // face 0 is the first flange face and hosts the hole's inner loop
    REQUIRE(part.solid.faces[0].inners.size() == 1);
    const int g = 32;
    auto grid = enrich::sample_uv_grid(part.solid, 0, g);
    const auto& face = part.solid.faces[0];
    int masked_in_hole = 0, total_in_hole = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double u = face.uv_lo.x + (face.uv_hi.x - face.uv_lo.x) * (i + 0.5) / g;
            double v = face.uv_lo.y + (face.uv_hi.y - face.uv_lo.y) * (j + 0.5) / g;
            Vec3 p = brep::eval_surface(face.surf, u, v).point;
            // hole at s_along=50, y=25, radius 5 on the first flange
            double dist = std::hypot(p.x - 50.0, p.y - 25.0);
            if (dist < 4.5) {
                ++total_in_hole;
                masked_in_hole += grid.at(6, i, j) < 0.5;
            }
        }
    REQUIRE(total_in_hole > 0);
    CHECK(masked_in_hole == total_in_hole);
}

TEST_CASE("mf vector layout for characteristic faces") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);

    SECTION("plate-like top flange face") {
        auto pl = fixtures::plate();
        auto rep2 = featrec::recognize(pl.solid);
        int top = -1;
        for (size_t f = 0; f < rep2.roles.size(); ++f)
            if (rep2.roles[f] == SheetRole::Top) top = int(f);
        auto m = enrich::mf_vector(top, rep2);
        CHECK(m[0] == 1);
        CHECK(m[1] == 0);
        CHECK(m[2] == 0);
        for (int k = 3; k < 28; ++k) CHECK(m[k] == 0);
    }

    SECTION("inner bend face carries cylinder, bend and flange slots") {
        REQUIRE(rep.bends.size() == 1);
        int inner = rep.bends[0].inner_face;
        auto m = enrich::mf_vector(inner, rep);
        CHECK(m[0] + m[1] + m[2] == 1);
        CHECK(m[2] == 0);  // a shell face, not a side face
        CHECK(m[3] == 1);
        CHECK(m[4] == -1);
        CHECK(m[5] == Approx(4.0));
        CHECK(m[6] == Approx(30.0));
        CHECK(m[7] == Approx(kPi / 2));
        CHECK(m[8] == 1);
        CHECK((m[9] == 1 || m[9] == -1));
        CHECK(m[10] == Approx(4.0));
        CHECK(m[11] == Approx(6.0));
        CHECK(m[12] == Approx(30.0));
        CHECK(m[13] == Approx(kPi / 2));
        for (int k : {14, 15, 16, 17, 19, 20, 21, 22})
            CHECK(m[k] == Approx(44.0).epsilon(1e-9));
        CHECK(m[18] == Approx(0.0).margin(1e-9));  // std of a constant flange
        CHECK(m[23] == Approx(0.0).margin(1e-9));
        CHECK(m[24] == 0);
        CHECK(m[26] == 0);
        CHECK(m[27] == 0);
    }

    SECTION("hole wall face") {
        auto hp = fixtures::holed_plate();
        auto rep3 = featrec::recognize(hp.solid);
        REQUIRE(rep3.holes.size() == 1);
        int wall = rep3.holes[0].wall_faces[0];
        auto m = enrich::mf_vector(wall, rep3);
        CHECK(m[2] == 1);   // side role
        CHECK(m[3] == 1);
        CHECK(m[4] == -1);
        CHECK(m[5] == Approx(5.0));
        CHECK(m[8] == 0);
        CHECK(m[10] == 0);
        CHECK(m[24] == 1);
        CHECK(m[25] == 0);
        CHECK(m[26] == 0);
    }
}

TEST_CASE("zero-consistency: continuous slots imply their boolean gate") {
    for (const auto& part : {fixtures::lbracket(), fixtures::uchannel(),
                             fixtures::corner_part(), fixtures::holed_plate()}) {
        auto rep = featrec::recognize(part.solid);
        for (int f = 0; f < part.solid.face_count(); ++f) {
            auto m = enrich::mf_vector(f, rep);
            CHECK(m[0] + m[1] + m[2] == 1);
            if (m[5] != 0 || m[6] != 0 || m[7] != 0) CHECK(m[3] == 1);
            bool bend_slot = false;
            for (int k = 10; k <= 23; ++k) bend_slot |= m[k] != 0;
            if (bend_slot) CHECK(m[8] == 1);
            if (m[25] != 0) CHECK(m[24] == 1);
        }
    }
}

TEST_CASE("assembled graph: nodes, edges, globals and width law") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);
    auto g = enrich::assemble_graph(lb.solid, rep, 10);
    CHECK(g.node_count() == 10);
    CHECK(g.edges.size() == 24);
    CHECK(g.globals[0] == Approx(2.0));
    CHECK(g.globals[1] == Approx(lb.gt.total_area).epsilon(1e-9));
    for (int i = 0; i < g.node_count(); ++i) {
        CHECK(g.grids[i].data.size() == 7 * 10 * 10);
        CHECK(g.mf[i].size() == 28);
    }

    auto pl = fixtures::plate();
    auto repp = featrec::recognize(pl.solid);
    auto gp = enrich::assemble_graph(pl.solid, repp, 10);
    CHECK(gp.node_count() == 6);
    CHECK(gp.edges.size() == 12);
}

TEST_CASE("mf ablation zeroes vectors without touching the structure") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);
    auto with = enrich::assemble_graph(lb.solid, rep, 8, true);
    auto without = enrich::assemble_graph(lb.solid, rep, 8, false);
    CHECK(with.edges == without.edges);
    CHECK(with.face_ids == without.face_ids);
    CHECK(with.globals == without.globals);
    bool any_nonzero = false;
    for (const auto& m : with.mf)
        for (double x : m) any_nonzero |= x != 0;
    CHECK(any_nonzero);
    for (size_t i = 0; i < without.mf.size(); ++i) {
        for (double x : without.mf[i]) CHECK(x == 0.0);
        CHECK(without.grids[i].data == with.grids[i].data);
    }
}

TEST_CASE("exports are deterministic and the binary round-trips") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);
    auto g1 = enrich::assemble_graph(lb.solid, rep, 6);
    auto g2 = enrich::assemble_graph(lb.solid, rep, 6);
    g1.has_label = g2.has_label = true;
    g1.label = g2.label = 12.5;
    CHECK(enrich::graph_json(g1).dump() == enrich::graph_json(g2).dump());
    auto b1 = enrich::write_bgr(g1);
    auto b2 = enrich::write_bgr(g2);
    CHECK(b1 == b2);
    CHECK(b1.substr(0, 4) == "BGR1");
    auto back = enrich::read_bgr(b1);
    CHECK(back.node_count() == g1.node_count());
    CHECK(back.grid == 6);
    CHECK(back.edges == g1.edges);
    CHECK(back.has_label);
    CHECK(back.label == Approx(12.5));
    for (int i = 0; i < back.node_count(); ++i)
        for (size_t k = 0; k < back.grids[i].data.size(); ++k)
            CHECK(back.grids[i].data[k] == Approx(g1.grids[i].data[k]).margin(1e-6));
}

TEST_CASE("aag json export shape") {
    auto lb = fixtures::lbracket();
    auto j = enrich::aag_json(lb.solid);
    CHECK(j["nodes"].size() == 10);
    CHECK(j["edges"].size() == 24);
    CHECK(j["nodes"][0].contains("surface_kind"));
    CHECK(j["edges"][0].contains("dihedral"));
}
