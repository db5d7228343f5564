#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bendgraph/featrec.hpp"
#include "support/fixtures.hpp"

using namespace bendgraph;
using Catch::Approx;

TEST_CASE("classify: L-bracket yields the two bend cylinders") {
    auto part = fixtures::lbracket();
    auto cyls = featrec::classify_surfaces(part.solid);
    REQUIRE(cyls.size() == 2);
    const auto* inner = &cyls[0];
    const auto* outer = &cyls[1];
    if (inner->radius > outer->radius) std::swap(inner, outer);
    CHECK(inner->radius == Approx(4.0).epsilon(1e-12));
    CHECK(inner->convexity == -1);
    CHECK(outer->radius == Approx(6.0).epsilon(1e-12));
    CHECK(outer->convexity == 1);
    for (const auto* c : {inner, outer}) {
        CHECK(c->arc_angle == Approx(kPi / 2).epsilon(1e-12));
        CHECK(c->axial_length == Approx(30.0).epsilon(1e-12));
    }
}

TEST_CASE("classify: box has no cylinders") {
    CHECK(featrec::classify_surfaces(fixtures::plate().solid).empty());
}

TEST_CASE("classify: sampled b-spline patch is recognized as a cylinder") {
    auto patch = fixtures::cylinder_quadrant_patch(10.0, 6.0);
    auto solid = fixtures::patch_only_solid(patch);
    auto cyls = featrec::classify_surfaces(solid);
    REQUIRE(cyls.size() == 1);
    CHECK(cyls[0].fitted);
    CHECK(cyls[0].radius == Approx(10.0).margin(1e-3));
    CHECK(cyls[0].arc_angle == Approx(kPi / 2).margin(0.05));
    CHECK(cyls[0].axial_length == Approx(6.0).margin(0.05));
}

TEST_CASE("fit_cylinder: exact samples recover radius and axis") {
    std::vector<Vec3> pts, nrm;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 4; ++j) {
            double a = 0.15 * i, z = 1.5 * j;
            pts.push_back({5 * std::cos(a), 5 * std::sin(a), z});
            nrm.push_back({std::cos(a), std::sin(a), 0});
        }
    auto fit = featrec::fit_cylinder(pts, nrm);
    REQUIRE(fit.is_cylinder);
    CHECK(fit.radius == Approx(5.0).margin(1e-9));
    CHECK(std::abs(fit.axis_dir.dot(Vec3{0, 0, 1})) == Approx(1.0).margin(1e-9));
}

TEST_CASE("fit_cylinder: planar samples give a planar verdict") {
    std::vector<Vec3> pts, nrm;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            pts.push_back({double(i), double(j), 0});
            nrm.push_back({0, 0, 1});
        }
    auto fit = featrec::fit_cylinder(pts, nrm);
    CHECK(fit.is_planar);
    CHECK_FALSE(fit.is_cylinder);
}

TEST_CASE("fit_cylinder: jittered samples stay within 1e-3") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> jitter(0.0, 1e-4);
    std::vector<Vec3> pts, nrm;
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 4; ++j) {
            double a = 0.1 * i, z = 2.0 * j;
            Vec3 radial{std::cos(a), std::sin(a), 0};
            pts.push_back(Vec3{5 * std::cos(a), 5 * std::sin(a), z} +
                          radial * jitter(rng));
            nrm.push_back(radial);
        }
    auto fit = featrec::fit_cylinder(pts, nrm);
    REQUIRE(fit.is_cylinder);
    CHECK(fit.radius == Approx(5.0).margin(1e-3));
}

TEST_CASE("fit_cylinder is rigid-motion equivariant") {
    std::vector<Vec3> pts, nrm;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 3; ++j) {
            double a = 0.17 * i, z = 2.0 * j;
            pts.push_back({7 * std::cos(a), 7 * std::sin(a), z});
            nrm.push_back({std::cos(a), std::sin(a), 0});
        }
    auto base = featrec::fit_cylinder(pts, nrm);
    // rotate about x by 0.7, then translate
    double c = std::cos(0.7), s = std::sin(0.7);
    auto rot = [&](const Vec3& v) { return Vec3{v.x, c * v.y - s * v.z, s * v.y + c * v.z}; };
    Vec3 shift{3, -2, 5};
    std::vector<Vec3> pts2, nrm2;
    for (size_t i = 0; i < pts.size(); ++i) {
        pts2.push_back(rot(pts[i]) + shift);
        nrm2.push_back(rot(nrm[i]));
    }
    auto moved = featrec::fit_cylinder(pts2, nrm2);
    REQUIRE(moved.is_cylinder);
    CHECK(moved.radius == Approx(base.radius).margin(1e-9));
    CHECK(std::abs(moved.axis_dir.dot(rot(base.axis_dir))) == Approx(1.0).margin(1e-9));
}

TEST_CASE("labels: plate and L-bracket partition, cube fails loudly") {
    auto pl = fixtures::plate();
    auto rep = featrec::recognize(pl.solid);
    int top = 0, bottom = 0, side = 0;
    for (auto r : rep.roles) (r == SheetRole::Top ? top : r == SheetRole::Bottom ? bottom : side)++;
    CHECK(top == 1);
    CHECK(bottom == 1);
    CHECK(side == 4);

    auto lb = fixtures::lbracket();
    auto rep2 = featrec::recognize(lb.solid);
    top = bottom = side = 0;
    for (auto r : rep2.roles)
        (r == SheetRole::Top ? top : r == SheetRole::Bottom ? bottom : side)++;
    CHECK(top == 3);
    CHECK(bottom == 3);
    CHECK(side == 4);

    builder::ChainPartSpec cube;
    cube.thickness = 50;
    cube.width = 50;
    cube.flange_lens = {50};
    auto solid = builder::build_chain_part(cube).solid;
    CHECK_THROWS_AS(featrec::recognize(solid), featrec::MalformedSheet);
}

TEST_CASE("role partition property: removing side faces separates the shells") {
    for (const auto& part : {fixtures::lbracket(), fixtures::uchannel(),
                             fixtures::corner_part()}) {
        auto rep = featrec::recognize(part.solid);
        auto aag = brep::build_aag(part.solid);
        // walk only across top/bottom faces through non-smooth edges: the two
        // shells must stay apart except via smooth bend tangencies
        auto adj = aag.adjacency();
        int n = part.solid.face_count();
        int top_seed = -1;
        for (int f = 0; f < n; ++f)
            if (rep.roles[f] == SheetRole::Top) { top_seed = f; break; }
        std::vector<int> seen(n, 0);
        std::vector<int> stack = {top_seed};
        seen[top_seed] = 1;
        std::map<std::pair<int, int>, brep::Dihedral> dihedrals;
        for (const auto& e : aag.edges) dihedrals[{e.a, e.b}] = e.dihedral;
        auto edge_smooth = [&](int a, int b) {
            auto it = dihedrals.find({std::min(a, b), std::max(a, b)});
            return it != dihedrals.end() && it->second == brep::Dihedral::Smooth;
        };
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int nb : adj[cur]) {
                if (rep.roles[nb] == SheetRole::Side) continue;
                if (edge_smooth(cur, nb)) continue;  // bend tangencies excluded
                if (!seen[nb]) { seen[nb] = 1; stack.push_back(nb); }
            }
        }
        for (int f = 0; f < n; ++f)
            if (seen[f]) CHECK(rep.roles[f] == SheetRole::Top);
    }
}

TEST_CASE("bends: L-bracket, plate, U-channel") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);
    REQUIRE(rep.bends.size() == 1);
    const auto& b = rep.bends[0];
    CHECK(b.inner_radius == Approx(4.0).epsilon(1e-9));
    CHECK(b.outer_radius == Approx(6.0).epsilon(1e-9));
    CHECK(b.length == Approx(30.0).epsilon(1e-9));
    CHECK(b.bend_angle == Approx(kPi / 2).epsilon(1e-9));
    CHECK(b.outer_radius - b.inner_radius == Approx(rep.thickness).epsilon(1e-6));
    for (auto agg : {b.flange_a, b.flange_b}) {
        CHECK(agg.min == Approx(44.0).epsilon(1e-9));
        CHECK(agg.median == Approx(44.0).epsilon(1e-9));
        CHECK(agg.max == Approx(44.0).epsilon(1e-9));
        CHECK(agg.mean == Approx(44.0).epsilon(1e-9));
        CHECK(agg.std == Approx(0.0).margin(1e-9));
    }

    CHECK(featrec::recognize(fixtures::plate().solid).bends.empty());

    auto u = fixtures::uchannel();
    auto rep2 = featrec::recognize(u.solid);
    REQUIRE(rep2.bends.size() == 2);
    CHECK(rep2.bends[0].orientation == 1);
    CHECK(rep2.bends[1].orientation == 1);
}

TEST_CASE("flange length against the brute-force ray oracle") {
    auto lb = fixtures::lbracket();
    auto rep = featrec::recognize(lb.solid);
    REQUIRE(rep.bends.size() == 1);
    const auto& b = rep.bends[0];
    int plane_face = std::min(b.side_a_planes[0], b.side_a_planes[1]);
    const auto& face = lb.solid.faces[plane_face];
    const auto& cy = lb.solid.faces[b.inner_face].surf.cyl;
    const auto& pl = face.surf.plane;
    Vec3 foot = cy.origin - pl.normal * pl.normal.dot(cy.origin - pl.origin);
    Vec2 mid{(face.uv_lo.x + face.uv_hi.x) / 2, (face.uv_lo.y + face.uv_hi.y) / 2};
    Vec3 centroid = brep::eval_surface(face.surf, mid.x, mid.y).point;
    Vec3 away = centroid - foot;
    away = (away - cy.axis * cy.axis.dot(away)).normalized();
    auto to2 = [&](const Vec3& p) {
        Vec3 d = p - pl.origin;
        return Vec2{d.dot(pl.axis_u), d.dot(pl.axis_v)};
    };
    Vec2 dir2 = Vec2{away.dot(pl.axis_u), away.dot(pl.axis_v)}.normalized();
    double v_lo = lb.solid.faces[b.inner_face].uv_lo.y;
    double v_hi = lb.solid.faces[b.inner_face].uv_hi.y;
    for (int k = 0; k < 16; ++k) {
        double v = v_lo + (k + 0.5) / 16 * (v_hi - v_lo);
        Vec3 q = foot + cy.axis * (v - cy.axis.dot(foot - cy.origin));
        double oracle = fixtures::brute_force_first_crossing(face.uv.outer, to2(q), dir2);
        CHECK(oracle == Approx(44.0).epsilon(1e-6));
    }
    CHECK(b.flange_a.mean == Approx(44.0).epsilon(1e-9));
}

TEST_CASE("tapered flange matches the closed-form affine aggregates") {
    builder::ChainPartSpec s;
    s.thickness = 2;
    s.width = 30;  // bend length 30
    s.flange_lens = {44, 20};
    s.last_len_at_w = 40;  // taper 20 -> 40
    s.bends = {{4, kPi / 2}};
    auto part = builder::build_chain_part(s);
    auto rep = featrec::recognize(part.solid);
    REQUIRE(rep.bends.size() == 1);
    const auto& agg = rep.bends[0].flange_b;  // the tapered end flange
    double delta = (40.0 - 20.0) * 0.5 / 16;
    CHECK(agg.min == Approx(20 + delta).epsilon(1e-9));
    CHECK(agg.max == Approx(40 - delta).epsilon(1e-9));
    CHECK(agg.mean == Approx(30.0).epsilon(1e-6));
    std::vector<double> xs;
    for (int k = 0; k < 16; ++k) xs.push_back(20 + 20 * (k + 0.5) / 16);
    auto expected = aggregates(xs);
    CHECK(agg.std == Approx(expected.std).epsilon(1e-9));
    CHECK(agg.median == Approx(expected.median).epsilon(1e-9));
}

TEST_CASE("through-hole on the ray path does not perturb flange statistics") {
    builder::ChainPartSpec base;
    base.thickness = 2;
    base.width = 30;
    base.flange_lens = {44, 44};
    base.bends = {{4, kPi / 2}};
    auto clean = builder::build_chain_part(base);
    base.holes = {{0, 20, 15, 4}};  // squarely on the ray path mid-width
    auto holed = builder::build_chain_part(base);
    auto rep_clean = featrec::recognize(clean.solid);
    auto rep_holed = featrec::recognize(holed.solid);
    REQUIRE(rep_holed.bends.size() == 1);
    for (auto pick : {std::make_pair(rep_clean.bends[0].flange_a,
                                     rep_holed.bends[0].flange_a),
                      std::make_pair(rep_clean.bends[0].flange_b,
                                     rep_holed.bends[0].flange_b)}) {
        CHECK(pick.first.min == Approx(pick.second.min).epsilon(1e-12));
        CHECK(pick.first.max == Approx(pick.second.max).epsilon(1e-12));
        CHECK(pick.first.mean == Approx(pick.second.mean).epsilon(1e-12));
    }
}

TEST_CASE("holes: drilled plate, clean plate, side tunnel") {
    auto holed = fixtures::holed_plate();
    auto rep = featrec::recognize(holed.solid);
    REQUIRE(rep.holes.size() == 1);
    CHECK(rep.holes[0].diameter == Approx(10.0).epsilon(1e-12));
    CHECK_FALSE(rep.holes[0].is_side_hole);
    CHECK(rep.holes[0].host != SheetRole::Side);

    CHECK(featrec::recognize(fixtures::plate().solid).holes.empty());

    builder::ChainPartSpec s;
    s.thickness = 3;
    s.width = 40;
    s.flange_lens = {60};
    s.tunnels = {{0, 30, 0.8}};
    auto part = builder::build_chain_part(s);
    auto rep2 = featrec::recognize(part.solid);
    REQUIRE(rep2.holes.size() == 1);
    CHECK(rep2.holes[0].is_side_hole);
    CHECK(rep2.holes[0].host == SheetRole::Side);
    CHECK(rep2.holes[0].diameter == Approx(1.6).epsilon(1e-12));
}

TEST_CASE("bend corners: perpendicular flaps partner, distant parallels do not") {
    auto corner = fixtures::corner_part();
    auto rep = featrec::recognize(corner.solid);
    REQUIRE(rep.bends.size() == 2);
    CHECK(rep.bends[0].corner_partners == std::vector<int>{1});
    CHECK(rep.bends[1].corner_partners == std::vector<int>{0});

    builder::ChainPartSpec far_apart;
    far_apart.thickness = 2;
    far_apart.width = 30;
    far_apart.flange_lens = {30, 100, 30};
    far_apart.bends = {{4, kPi / 2}, {4, kPi / 2}};
    auto part = builder::build_chain_part(far_apart);
    auto rep2 = featrec::recognize(part.solid);
    REQUIRE(rep2.bends.size() == 2);
    CHECK(rep2.bends[0].corner_partners.empty());
    CHECK(rep2.bends[1].corner_partners.empty());

    auto lb = featrec::recognize(fixtures::lbracket().solid);
    CHECK(lb.bends[0].corner_partners.empty());
}

TEST_CASE("corner relation is symmetric and irreflexive over random parts") {
    for (const auto& part : {fixtures::uchannel(), fixtures::corner_part()}) {
        auto rep = featrec::recognize(part.solid);
        for (size_t i = 0; i < rep.bends.size(); ++i) {
            for (int p : rep.bends[i].corner_partners) {
                CHECK(p != int(i));
                const auto& back = rep.bends[p].corner_partners;
                CHECK(std::find(back.begin(), back.end(), int(i)) != back.end());
            }
        }
    }
}

TEST_CASE("outer contour excludes hole walls") {
    auto plate = featrec::recognize(fixtures::plate().solid);
    CHECK(plate.outer_contour.size() == 4);

    auto holed = featrec::recognize(fixtures::holed_plate().solid);
    CHECK(holed.outer_contour.size() == 4);
    for (int f : holed.outer_contour)
        for (const auto& h : holed.holes)
            for (int w : h.wall_faces) CHECK(f != w);

    auto lb = featrec::recognize(fixtures::lbracket().solid);
    CHECK(lb.outer_contour.size() == 4);
    CHECK(lb.contour_cycles.size() >= 1);
}

TEST_CASE("report json carries schema and conventions") {
    auto rep = featrec::recognize(fixtures::lbracket().solid);
    auto j = featrec::report_json(rep);
    CHECK(j["schema_version"] == 1);
    CHECK(j["units"]["length"] == "mm");
    CHECK(j["conventions"].contains("bend_angle"));
    CHECK(j["bends"].size() == 1);
    CHECK(j["thickness"] == Approx(2.0));
}
