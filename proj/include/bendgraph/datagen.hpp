#pragma once

// Synthetic sheet-metal part generator with exact ground truth, deterministic
// labels, dataset building with manifests, and the recognizer-vs-ground-truth
// validation oracle.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bendgraph/builder.hpp"
#include "bendgraph/featrec.hpp"
#include "bendgraph/step_write.hpp"

namespace bendgraph::datagen {

using builder::BuiltPart;
using builder::ChainPartSpec;
using builder::CornerPartSpec;
using builder::GroundTruth;

enum class Profile { Plain, Holes, Corners, Tapered };

inline Profile profile_from_string(const std::string& s) {
    if (s == "plain") return Profile::Plain;
    if (s == "holes") return Profile::Holes;
    if (s == "corners") return Profile::Corners;
    if (s == "tapered") return Profile::Tapered;
    throw Error("unknown profile: " + s);
}

inline const char* to_string(Profile p) {
    switch (p) {
        case Profile::Plain: return "plain";
        case Profile::Holes: return "holes";
        case Profile::Corners: return "corners";
        case Profile::Tapered: return "tapered";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Spec sampling
// ---------------------------------------------------------------------------

struct PartSpec {
    Profile profile = Profile::Plain;
    bool is_corner = false;
    ChainPartSpec chain;
    CornerPartSpec corner;
    std::uint64_t seed = 0;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Keep sampled values clear of a decision threshold (relative margin).
inline bool near_threshold(double value, double threshold, double margin = 0.1) {
    return std::abs(value - threshold) < margin * threshold;
}

// Pairwise clearance of non-adjacent midline elements; arcs tessellated.
inline bool chain_clear(const ChainPartSpec& spec, double min_gap) {
    struct Piece {
        std::vector<Vec2> pts;
    };
    std::vector<Piece> pieces;
    Vec2 m{0, 0}, d{1, 0};
    int n = int(spec.bends.size());
    for (int j = 0; j <= n; ++j) {
        Piece seg;
        seg.pts = {m, m + d * spec.flange_lens[j]};
        pieces.push_back(seg);
        m = m + d * spec.flange_lens[j];
        if (j < n) {
            double R = spec.bends[j].inner_radius + spec.thickness / 2;
            double a = spec.bends[j].angle;
            Vec2 nrm = a > 0 ? d.perp() : -d.perp();
            Vec2 c = m + nrm * R;
            Piece arc;
            for (int k = 0; k <= 32; ++k)
                arc.pts.push_back(c + (m - c).rotated(a * k / 32.0));
            m = c + (m - c).rotated(a);
            d = d.rotated(a);
            pieces.push_back(arc);
        }
    }
    auto seg_dist = [](Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2) {
        auto pt_seg = [](Vec2 p, Vec2 s1, Vec2 s2) {
            Vec2 d2 = s2 - s1;
            double L2 = d2.dot(d2);
            double t = L2 > 1e-12 ? std::clamp((p - s1).dot(d2) / L2, 0.0, 1.0) : 0.0;
            return (p - (s1 + d2 * t)).norm();
        };
        return std::min(std::min(pt_seg(a1, b1, b2), pt_seg(a2, b1, b2)),
                        std::min(pt_seg(b1, a1, a2), pt_seg(b2, a1, a2)));
    };
    for (size_t i = 0; i < pieces.size(); ++i) {
        for (size_t j = i + 2; j < pieces.size(); ++j) {
            for (size_t a = 0; a + 1 < pieces[i].pts.size(); ++a)
                for (size_t b = 0; b + 1 < pieces[j].pts.size(); ++b)
                    if (seg_dist(pieces[i].pts[a], pieces[i].pts[a + 1], pieces[j].pts[b],
                                 pieces[j].pts[b + 1]) < min_gap)
                        return false;
        }
    }
    return true;
}

inline bool chain_acceptable(const ChainPartSpec& spec) {
    double t = spec.thickness;
    if (!chain_clear(spec, 2.5 * t)) return false;
    // margins around label thresholds and the corner-distance rule
    int n = int(spec.bends.size());
    for (int k = 0; k < n; ++k) {
        double thresh = 4 * (spec.bends[k].inner_radius + t);
        for (double f : {spec.flange_lens[k], spec.flange_lens[k + 1],
                         k == n - 1 ? spec.last_len(1.0) : spec.flange_lens[k + 1]})
            if (near_threshold(f, thresh) || near_threshold(f, 3 * t)) return false;
    }
    // bend axis distances: clear of both 2t (corner rule) and 6t (collision)
    std::vector<Vec2> centers;
    {
        Vec2 m{0, 0}, d{1, 0};
        for (int j = 0; j <= n; ++j) {
            m = m + d * spec.flange_lens[j];
            if (j < n) {
                double R = spec.bends[j].inner_radius + t / 2;
                double a = spec.bends[j].angle;
                Vec2 c = m + (a > 0 ? d.perp() : -d.perp()) * R;
                centers.push_back(c);
                m = c + (m - c).rotated(a);
                d = d.rotated(a);
            }
        }
    }
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j) {
            double dist = (centers[i] - centers[j]).norm();
            if (near_threshold(dist, 2 * t) || near_threshold(dist, 6 * t)) return false;
        }
    return true;
}

}  // namespace detail

inline PartSpec sample_spec(std::uint64_t seed, Profile profile) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::mt19937_64 rng(mix_seed(seed, 0x53504543u + attempt));
        PartSpec spec;
        spec.profile = profile;
        spec.seed = seed;
        double t = detail::uniform(rng, 1.0, 5.0);
        if (profile == Profile::Corners) {
            spec.is_corner = true;
            CornerPartSpec& c = spec.corner;
            c.thickness = t;
            double r = detail::uniform(rng, std::max(1.0, 0.5 * t), std::min(8.0, 4 * t));
            c.inner_radius = r;
            double cc = r + t;
            c.base_x = cc + detail::uniform(rng, 12, 90);
            c.base_y = cc + detail::uniform(rng, 12, 90);
            c.flap_height_1 = cc + detail::uniform(rng, 8, 50);
            c.flap_height_2 = cc + detail::uniform(rng, 8, 50);
            bool ok = true;
            for (double f : {c.base_x - cc, c.base_y - cc, c.flap_height_1 - cc,
                             c.flap_height_2 - cc})
                if (detail::near_threshold(f, 4 * cc) || detail::near_threshold(f, 3 * t))
                    ok = false;
            if (ok) return spec;
            continue;
        }
        ChainPartSpec& ch = spec.chain;
        ch.thickness = t;
        ch.width = detail::uniform(rng, 20, 120);
        int n = detail::uniform_int(rng, 1, profile == Profile::Plain ? 8 : 5);
        double fmin = std::max(4.0, 1.3 * t);
        for (int j = 0; j <= n; ++j)
            ch.flange_lens.push_back(detail::uniform(rng, fmin, 80.0));
        for (int k = 0; k < n; ++k) {
            builder::BendParam b;
            b.inner_radius = detail::uniform(rng, std::max(1.0, 0.5 * t), std::min(8.0, 4 * t));
            double mag = detail::uniform(rng, kPi / 6, 3 * kPi / 4);
            b.angle = (detail::uniform_int(rng, 0, 1) ? 1 : -1) * mag;
            ch.bends.push_back(b);
        }
        if (profile == Profile::Tapered) {
            double u = detail::uniform(rng, 0.45, 1.6);
            ch.last_len_at_w = std::max(fmin, ch.flange_lens.back() * u);
            if (std::abs(ch.last_len_at_w - ch.flange_lens.back()) < 2.0) continue;
        }
        if (profile == Profile::Holes) {
            int holes = detail::uniform_int(rng, 1, 3);
            std::vector<std::pair<double, double>> used;  // per-flange s intervals
            for (int h = 0; h < holes; ++h) {
                int fl = detail::uniform_int(rng, 0, n);
                double len = ch.flange_lens[fl];
                if (fl == int(ch.flange_lens.size()) - 1 && ch.last_len_at_w > 0)
                    len = std::min(len, ch.last_len_at_w);
                double margin = std::max(2.0, 0.6 * t);
                double rad_hi = std::min({6.0, (len - 2 * margin) / 4, (ch.width - 2 * margin) / 4});
                if (rad_hi < 1.0) continue;
                builder::ShellHole sh;
                sh.flange = fl;
                sh.radius = detail::uniform(rng, 1.0, rad_hi);
                sh.s_along = detail::uniform(rng, margin + sh.radius, len - margin - sh.radius);
                sh.y_center =
                    detail::uniform(rng, margin + sh.radius, ch.width - margin - sh.radius);
                bool clash = false;
                for (const builder::ShellHole& other : ch.holes)
                    if (other.flange == fl &&
                        std::abs(other.s_along - sh.s_along) < 2 * (other.radius + sh.radius))
                        clash = true;
                if (!clash) ch.holes.push_back(sh);
            }
            if (detail::uniform_int(rng, 0, 1) == 1 && t >= 1.6) {
                int fl = detail::uniform_int(rng, 0, n);
                double len = ch.flange_lens[fl];
                builder::TunnelHole th;
                th.flange = fl;
                th.radius = std::min(0.3 * t, 1.2);
                double margin = std::max(2.0, 2 * th.radius);
                if (len > 2 * (margin + th.radius)) {
                    th.s_along = detail::uniform(rng, margin + th.radius, len - margin - th.radius);
                    bool clash = false;
                    for (const builder::ShellHole& other : ch.holes)
                        if (other.flange == fl &&
                            std::abs(other.s_along - th.s_along) <
                                2 * (other.radius + th.radius) + 2)
                            clash = true;
                    if (!clash) ch.tunnels.push_back(th);
                }
            }
            if (ch.holes.empty() && ch.tunnels.empty()) continue;
        }
        if (detail::chain_acceptable(ch)) return spec;
    }
    throw Error("sample_spec: no realizable spec after 1000 attempts");
}

// ---------------------------------------------------------------------------
// Realization and labels
// ---------------------------------------------------------------------------

struct RealizedPart {
    BuiltPart part;
    std::string step_text;
};

inline RealizedPart realize(const PartSpec& spec, const std::string& name = "part") {
    RealizedPart out;
    out.part = spec.is_corner ? builder::build_corner_part(spec.corner)
                              : builder::build_chain_part(spec.chain);
    out.step_text = step::write_step(out.part.solid, name);
    return out;
}

inline double bend_min_flange(const builder::GtBend& b) {
    return std::min(std::min(b.flange_a0, b.flange_a1),
                    std::min(b.flange_b0, b.flange_b1));
}

// Deterministic synthetic bending time in seconds; noise_sigma = 0 gives the
// exact formula value.
inline double label_time(const GroundTruth& gt, std::uint64_t seed,
                         double noise_sigma = 1.0) {
    double t = 3.0;
    for (const builder::GtBend& b : gt.bends) {
        t += 4.0;
        t += 2.0 * (b.length / 1000.0);
        if (!b.corner_partners.empty()) t += 3.0;
        if (bend_min_flange(b) < 3.0 * gt.thickness) t += 1.5;
    }
    t += 0.002 * std::sqrt(gt.total_area);
    if (noise_sigma > 0) {
        std::mt19937_64 rng(mix_seed(seed, 0x54494d45u));
        t += std::normal_distribution<double>(0.0, noise_sigma)(rng);
    }
    return std::max(3.0, t);
}

// Tooling-collision proxy: tight flange relative to the bend geometry, or
// opposite-direction bends too close together.
inline int label_collision(const GroundTruth& gt) {
    for (const builder::GtBend& b : gt.bends)
        if (bend_min_flange(b) < 4.0 * (b.inner_radius + gt.thickness)) return 1;
    for (size_t i = 0; i < gt.bends.size(); ++i) {
        for (size_t j = i + 1; j < gt.bends.size(); ++j) {
            const auto& a = gt.bends[i];
            const auto& b = gt.bends[j];
            if (a.orientation == b.orientation) continue;
            double dist = featrec::detail::segment_distance(
                a.axis_point + a.axis_dir * a.axis_v0, a.axis_point + a.axis_dir * a.axis_v1,
                b.axis_point + b.axis_dir * b.axis_v0, b.axis_point + b.axis_dir * b.axis_v1);
            if (dist < 6.0 * gt.thickness) return 1;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Ground truth JSON
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json gt_json(const GroundTruth& gt) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["thickness"] = gt.thickness;
    j["total_area"] = gt.total_area;
    j["roles"] = nlohmann::ordered_json::array();
    for (auto r : gt.roles) j["roles"].push_back(to_string(r));
    j["bends"] = nlohmann::ordered_json::array();
    for (const builder::GtBend& b : gt.bends)
        j["bends"].push_back({{"inner_face", b.inner_face},
                              {"outer_face", b.outer_face},
                              {"inner_radius", b.inner_radius},
                              {"outer_radius", b.outer_radius},
                              {"length", b.length},
                              {"angle", b.angle},
                              {"orientation", b.orientation},
                              {"flange_a", {b.flange_a0, b.flange_a1}},
                              {"flange_b", {b.flange_b0, b.flange_b1}},
                              {"corner_partners", b.corner_partners},
                              {"axis_point", {b.axis_point.x, b.axis_point.y, b.axis_point.z}},
                              {"axis_dir", {b.axis_dir.x, b.axis_dir.y, b.axis_dir.z}},
                              {"axis_range", {b.axis_v0, b.axis_v1}}});
    j["holes"] = nlohmann::ordered_json::array();
    for (const builder::GtHole& h : gt.holes)
        j["holes"].push_back({{"wall_faces", h.wall_faces},
                              {"side_hole", h.side_hole},
                              {"diameter", h.diameter}});
    j["contour_faces"] = gt.contour_faces;
    return j;
}

inline GroundTruth gt_from_json(const nlohmann::json& j) {
    GroundTruth gt;
    gt.thickness = j.at("thickness").get<double>();
    gt.total_area = j.at("total_area").get<double>();
    for (const auto& r : j.at("roles")) {
        std::string s = r.get<std::string>();
        gt.roles.push_back(s == "top" ? SheetRole::Top
                           : s == "bottom" ? SheetRole::Bottom : SheetRole::Side);
    }
    for (const auto& b : j.at("bends")) {
        builder::GtBend gb;
        gb.inner_face = b.at("inner_face").get<int>();
        gb.outer_face = b.at("outer_face").get<int>();
        gb.inner_radius = b.at("inner_radius").get<double>();
        gb.outer_radius = b.at("outer_radius").get<double>();
        gb.length = b.at("length").get<double>();
        gb.angle = b.at("angle").get<double>();
        gb.orientation = b.at("orientation").get<int>();
        gb.flange_a0 = b.at("flange_a")[0].get<double>();
        gb.flange_a1 = b.at("flange_a")[1].get<double>();
        gb.flange_b0 = b.at("flange_b")[0].get<double>();
        gb.flange_b1 = b.at("flange_b")[1].get<double>();
        gb.corner_partners = b.at("corner_partners").get<std::vector<int>>();
        auto ap = b.at("axis_point");
        gb.axis_point = {ap[0].get<double>(), ap[1].get<double>(), ap[2].get<double>()};
        auto ad = b.at("axis_dir");
        gb.axis_dir = {ad[0].get<double>(), ad[1].get<double>(), ad[2].get<double>()};
        gb.axis_v0 = b.at("axis_range")[0].get<double>();
        gb.axis_v1 = b.at("axis_range")[1].get<double>();
        gt.bends.push_back(gb);
    }
    for (const auto& h : j.at("holes")) {
        builder::GtHole gh;
        gh.wall_faces = h.at("wall_faces").get<std::vector<int>>();
        gh.side_hole = h.at("side_hole").get<bool>();
        gh.diameter = h.at("diameter").get<double>();
        gt.holes.push_back(gh);
    }
    gt.contour_faces = j.at("contour_faces").get<std::vector<int>>();
    return gt;
}

// ---------------------------------------------------------------------------
// Recognition vs ground truth
// ---------------------------------------------------------------------------

// All discrepancies between a recognition report and exact ground truth.
// Relative tolerance 1e-6 on continuous properties.
inline std::vector<std::string> validate_part(const featrec::FeatureReport& rep,
                                              const GroundTruth& gt) {
    std::vector<std::string> fails;
    auto rel_ok = [](double got, double want) {
        return std::abs(got - want) <= 1e-6 * std::max(1.0, std::abs(want));
    };
    if (!rel_ok(rep.thickness, gt.thickness)) fails.push_back("thickness mismatch");
    if (rep.roles.size() != gt.roles.size()) {
        fails.push_back("face count mismatch");
        return fails;
    }
    for (size_t f = 0; f < gt.roles.size(); ++f)
        if (rep.roles[f] != gt.roles[f]) {
            fails.push_back("role mismatch on face " + std::to_string(f));
            break;
        }
    // bends: exact face-set match
    if (rep.bends.size() != gt.bends.size())
        fails.push_back("bend count: got " + std::to_string(rep.bends.size()) +
                        " want " + std::to_string(gt.bends.size()));
    std::vector<int> match(gt.bends.size(), -1);
    for (size_t i = 0; i < gt.bends.size(); ++i) {
        for (size_t k = 0; k < rep.bends.size(); ++k)
            if (rep.bends[k].inner_face == gt.bends[i].inner_face &&
                rep.bends[k].outer_face == gt.bends[i].outer_face)
                match[i] = int(k);
        if (match[i] < 0) {
            fails.push_back("bend " + std::to_string(i) + " face set not recognized");
            continue;
        }
        const featrec::BendFeature& rb = rep.bends[match[i]];
        const builder::GtBend& gb = gt.bends[i];
        if (!rel_ok(rb.inner_radius, gb.inner_radius) ||
            !rel_ok(rb.outer_radius, gb.outer_radius))
            fails.push_back("bend " + std::to_string(i) + " radius mismatch");
        if (!rel_ok(rb.bend_angle, gb.angle))
            fails.push_back("bend " + std::to_string(i) + " angle mismatch");
        if (!rel_ok(rb.length, gb.length))
            fails.push_back("bend " + std::to_string(i) + " length mismatch");
        if (rb.orientation != gb.orientation)
            fails.push_back("bend " + std::to_string(i) + " orientation mismatch");
        auto expect_aggr = [&](double f0, double f1) {
            std::vector<double> xs;
            for (int k = 0; k < 16; ++k) xs.push_back(f0 + (f1 - f0) * (k + 0.5) / 16.0);
            return aggregates(xs);
        };
        auto check_aggr = [&](const Aggregates& got, const Aggregates& want,
                              const char* side) {
            if (!rel_ok(got.min, want.min) || !rel_ok(got.median, want.median) ||
                !rel_ok(got.max, want.max) || !rel_ok(got.mean, want.mean) ||
                !rel_ok(got.std, want.std))
                fails.push_back("bend " + std::to_string(i) + " flange " + side +
                                " stats mismatch");
        };
        check_aggr(rb.flange_a, expect_aggr(gb.flange_a0, gb.flange_a1), "A");
        check_aggr(rb.flange_b, expect_aggr(gb.flange_b0, gb.flange_b1), "B");
        std::set<int> got_partners, want_partners;
        for (int p : rb.corner_partners) got_partners.insert(p);
        for (int p : gb.corner_partners) want_partners.insert(p);
        if (got_partners != want_partners)
            fails.push_back("bend " + std::to_string(i) + " corner partners mismatch");
    }
    // holes: wall face sets
    if (rep.holes.size() != gt.holes.size())
        fails.push_back("hole count mismatch");
    for (const builder::GtHole& gh : gt.holes) {
        std::set<int> want(gh.wall_faces.begin(), gh.wall_faces.end());
        bool found = false;
        for (const featrec::HoleFeature& rh : rep.holes) {
            std::set<int> got(rh.wall_faces.begin(), rh.wall_faces.end());
            if (got != want) continue;
            found = true;
            if (rh.is_side_hole != gh.side_hole) fails.push_back("hole side flag mismatch");
            if (!rel_ok(rh.diameter, gh.diameter)) fails.push_back("hole diameter mismatch");
        }
        if (!found) fails.push_back("hole wall set not recognized");
    }
    std::set<int> got_contour(rep.outer_contour.begin(), rep.outer_contour.end());
    std::set<int> want_contour(gt.contour_faces.begin(), gt.contour_faces.end());
    if (got_contour != want_contour) fails.push_back("outer contour mismatch");
    return fails;
}

// Exact Euler-Poincare bookkeeping for a generated part with h through-holes:
// every part satisfies V - E + F - R = 2 - 2h with R = 2h.
inline std::vector<std::string> euler_check(const brep::BrepSolid& solid, int holes) {
    std::vector<std::string> fails;
    brep::EulerCounts ec = brep::euler_counts(solid);
    if (ec.inner_loops != 2 * holes)
        fails.push_back("inner loop count " + std::to_string(ec.inner_loops) +
                        " != 2*holes " + std::to_string(2 * holes));
    if (ec.vef() - ec.inner_loops != 2 - 2 * holes)
        fails.push_back("Euler-Poincare violated: V-E+F-R = " +
                        std::to_string(ec.vef() - ec.inner_loops) + " != " +
                        std::to_string(2 - 2 * holes));
    return fails;
}

// ---------------------------------------------------------------------------
// Dataset building
// ---------------------------------------------------------------------------

struct PartRecord {
    int id = 0;
    std::string step_path;
    std::string gt_path;
    double time_s = 0;
    int collision = 0;
    std::string split;
};

struct Manifest {
    std::vector<PartRecord> parts;
    std::string root;  // directory of the manifest file
};

inline std::vector<std::string> split_tags(int n, std::uint64_t seed,
                                           double ftrain = 0.8, double fval = 0.1) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(mix_seed(seed, 0x53504c49u));
    std::shuffle(order.begin(), order.end(), rng);
    int n_train = int(ftrain * n);
    int n_val = int(fval * n);
    std::vector<std::string> tags(n);
    for (int k = 0; k < n; ++k)
        tags[order[k]] = k < n_train ? "train" : (k < n_train + n_val ? "val" : "test");
    return tags;
}

// Generates n parts (profile mix cycling, collision classes balanced by
// construction), writes STEP + ground truth + manifest.jsonl into out_dir.
inline Manifest build_dataset(int n, std::uint64_t seed,
                              const std::vector<Profile>& mix,
                              const std::string& out_dir) {
    if (mix.empty()) throw Error("profile mix must not be empty");
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "parts");
    Manifest man;
    man.root = out_dir;
    auto tags = split_tags(n, seed);
    std::ofstream mf(fs::path(out_dir) / "manifest.jsonl");
    if (!mf) throw Error("cannot write manifest in " + out_dir);
    for (int i = 0; i < n; ++i) {
        Profile profile = mix[i % mix.size()];
        int target = i % 2;  // balanced collision classes
        RealizedPart rp;
        double time_s = 0;
        int collision = -1;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::uint64_t part_seed = mix_seed(seed, std::uint64_t(i) * 1009 + attempt);
            PartSpec spec = sample_spec(part_seed, profile);
            RealizedPart cand = realize(spec, "part_" + std::to_string(i));
            int c = label_collision(cand.part.gt);
            if (c != target) continue;
            rp = std::move(cand);
            collision = c;
            time_s = label_time(rp.part.gt, part_seed);
            break;
        }
        if (collision < 0)
            throw Error("could not balance collision class for part " + std::to_string(i));
        char base[32];
        std::snprintf(base, sizeof base, "parts/%05d", i);
        PartRecord rec;
        rec.id = i;
        rec.step_path = std::string(base) + ".step";
        rec.gt_path = std::string(base) + ".gt.json";
        rec.time_s = time_s;
        rec.collision = collision;
        rec.split = tags[i];
        {
            std::ofstream f(fs::path(out_dir) / rec.step_path, std::ios::binary);
            f << rp.step_text;
        }
        {
            std::ofstream f(fs::path(out_dir) / rec.gt_path);
            f << gt_json(rp.part.gt).dump(2) << "\n";
        }
        nlohmann::ordered_json row = {{"id", rec.id},
                                      {"step_path", rec.step_path},
                                      {"gt_path", rec.gt_path},
                                      {"time_s", rec.time_s},
                                      {"collision", rec.collision},
                                      {"split", rec.split}};
        mf << row.dump() << "\n";
        man.parts.push_back(std::move(rec));
    }
    return man;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    Manifest man;
    man.root = std::filesystem::path(path).parent_path().string();
    if (man.root.empty()) man.root = ".";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        PartRecord rec;
        rec.id = j.at("id").get<int>();
        rec.step_path = j.at("step_path").get<std::string>();
        rec.gt_path = j.at("gt_path").get<std::string>();
        rec.time_s = j.at("time_s").get<double>();
        rec.collision = j.at("collision").get<int>();
        rec.split = j.at("split").get<std::string>();
        man.parts.push_back(std::move(rec));
    }
    return man;
}

}  // namespace bendgraph::datagen
