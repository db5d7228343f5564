#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bendgraph/step_write.hpp"
#include "support/fixtures.hpp"

#ifndef BENDGRAPH_BIN
#error "BENDGRAPH_BIN must point at the CLI executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + std::string(BENDGRAPH_BIN) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "bendgraph_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_fixture(const bendgraph::builder::BuiltPart& part, const char* name) {
    auto path = work_dir() / name;
    std::ofstream f(path, std::ios::binary);
    f << bendgraph::step::write_step(part.solid, name);
    return path.string();
}

}  // namespace

TEST_CASE("inspect: plate summary with euler block") {
    auto path = write_fixture(fixtures::plate(), "plate.step");
    auto r = run("inspect " + path);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["faces"] == 6);
    CHECK(j["edges"] == 12);
    CHECK(j["vertices"] == 8);
    CHECK(j["euler"]["v_e_f"] == 2);
    CHECK(j["thickness"].get<double>() == Catch::Approx(2.0));
}

TEST_CASE("inspect: L-bracket counts") {
    auto path = write_fixture(fixtures::lbracket(), "lb.step");
    auto r = run("inspect " + path);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["faces"] == 10);
    CHECK(j["edges"] == 24);
    CHECK(j["surface_kinds"]["cylinder"] == 2);
}

TEST_CASE("inspect: garbage file exits 2") {
    auto path = work_dir() / "garbage.step";
    std::ofstream(path) << "this is not a step file";
    auto r = run("inspect " + path.string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("recognize: L-bracket report, cube exits 2") {
    auto path = write_fixture(fixtures::lbracket(), "lb2.step");
    auto r = run("recognize " + path);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    REQUIRE(j["bends"].size() == 1);
    CHECK(j["bends"][0]["inner_radius"].get<double>() == Catch::Approx(4.0));

    bendgraph::builder::ChainPartSpec cube;
    cube.thickness = 50;
    cube.width = 50;
    cube.flange_lens = {50};
    auto cube_part = bendgraph::builder::build_chain_part(cube);
    auto cube_path = write_fixture(cube_part, "cube.step");
    auto rc = run("recognize " + cube_path);
    CHECK(rc.exit_code == 2);
}

TEST_CASE("graph: widths, ablation, binary export, bad path") {
    auto path = write_fixture(fixtures::plate(), "plate2.step");
    auto r = run("graph " + path + " --grid 6");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    REQUIRE(j["nodes"].size() == 6);
    for (const auto& node : j["nodes"]) {
        CHECK(node["uv_grid"]["data"].size() == 7 * 6 * 6);
        CHECK(node["mf"].size() == 28);
    }
    CHECK(j["globals"].size() == 3);

    auto r2 = run("graph " + path + " --grid 6 --no-mf");
    auto j2 = json::parse(r2.out);
    for (const auto& node : j2["nodes"])
        for (double x : node["mf"]) CHECK(x == 0.0);

    auto bgr = (work_dir() / "plate.bgr").string();
    auto r3 = run("graph " + path + " --grid 6 --out " + bgr);
    REQUIRE(r3.exit_code == 0);
    std::ifstream f(bgr, std::ios::binary);
    std::array<char, 4> magic;
    f.read(magic.data(), 4);
    CHECK(std::string(magic.data(), 4) == "BGR1");

    CHECK(run("graph /nonexistent/file.step").exit_code == 2);
}

TEST_CASE("gen + validate: clean corpus passes, corrupted part fails") {
    auto dir = (work_dir() / "corpus").string();
    fs::remove_all(dir);
    auto r = run("gen --n 10 --seed 5 --profile mixed --out " + dir);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["parts"] == 10);
    CHECK(j["splits"]["train"] == 8);
    CHECK(j["splits"]["val"] == 1);
    CHECK(j["splits"]["test"] == 1);
    CHECK(j["collision_positive"] == 5);

    auto manifest = dir + "/manifest.jsonl";
    auto rv = run("validate --manifest " + manifest);
    REQUIRE(rv.exit_code == 0);
    auto jv = json::parse(rv.out);
    CHECK(jv["accuracy_pct"].get<double>() == 100.0);
    CHECK(jv["failures"].empty());

    // corrupt one STEP file: that part is listed and the exit code is 1
    {
        std::ofstream f(dir + "/parts/00003.step", std::ios::trunc);
        f << "garbage";
    }
    auto rbad = run("validate --manifest " + manifest);
    CHECK(rbad.exit_code == 1);
    auto jbad = json::parse(rbad.out);
    REQUIRE(jbad["failures"].size() == 1);
    CHECK(jbad["failures"][0]["id"] == 3);

    // empty manifest: usage/input error
    auto empty = (work_dir() / "empty.jsonl").string();
    std::ofstream(empty).close();
    CHECK(run("validate --manifest " + empty).exit_code == 2);
}

TEST_CASE("gen is deterministic for a fixed seed") {
    auto d1 = (work_dir() / "det1").string();
    auto d2 = (work_dir() / "det2").string();
    fs::remove_all(d1);
    fs::remove_all(d2);
    REQUIRE(run("gen --n 6 --seed 11 --out " + d1).exit_code == 0);
    REQUIRE(run("gen --n 6 --seed 11 --out " + d2).exit_code == 0);
    auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(read(d1 + "/manifest.jsonl") == read(d2 + "/manifest.jsonl"));
    for (int i = 0; i < 6; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "/parts/%05d.step", i);
        CHECK(read(d1 + name) == read(d2 + name));
    }
}

TEST_CASE("config precedence: command line over environment over file") {
    auto cfg = (work_dir() / "gen.cfg").string();
    std::ofstream(cfg) << "# corpus settings\nseed = 3\nn = 4\n";
    auto base3 = (work_dir() / "p_seed3").string();
    auto base7 = (work_dir() / "p_seed7").string();
    auto base9 = (work_dir() / "p_seed9").string();
    fs::remove_all(base3);
    fs::remove_all(base7);
    fs::remove_all(base9);
    REQUIRE(run("gen --seed 3 --n 4 --out " + base3).exit_code == 0);
    REQUIRE(run("gen --seed 7 --n 4 --out " + base7).exit_code == 0);
    REQUIRE(run("gen --seed 9 --n 4 --out " + base9).exit_code == 0);
    auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    // file layer only
    auto from_file = (work_dir() / "layer_file").string();
    fs::remove_all(from_file);
    REQUIRE(run("gen --config " + cfg + " --out " + from_file).exit_code == 0);
    CHECK(read(from_file + "/manifest.jsonl") == read(base3 + "/manifest.jsonl"));

    // environment beats the file
    auto from_env = (work_dir() / "layer_env").string();
    fs::remove_all(from_env);
    REQUIRE(run("gen --config " + cfg + " --out " + from_env,
                "BENDGRAPH_SEED=7").exit_code == 0);
    CHECK(read(from_env + "/manifest.jsonl") == read(base7 + "/manifest.jsonl"));

    // command line beats both
    auto from_cli = (work_dir() / "layer_cli").string();
    fs::remove_all(from_cli);
    REQUIRE(run("gen --config " + cfg + " --seed 9 --out " + from_cli,
                "BENDGRAPH_SEED=7").exit_code == 0);
    CHECK(read(from_cli + "/manifest.jsonl") == read(base9 + "/manifest.jsonl"));
}

TEST_CASE("help lists every subcommand and flags") {
    auto r = run("--help");
    CHECK(r.exit_code == 0);
    for (const char* name :
         {"inspect", "recognize", "graph", "gen", "train", "eval", "validate"})
        CHECK(r.out.find(name) != std::string::npos);
    auto rt = run("train --help");
    CHECK(rt.exit_code == 0);
    for (const char* flag : {"--manifest", "--task", "--no-mf", "--seed", "--lr",
                             "--batch", "--patience", "--out"})
        CHECK(rt.out.find(flag) != std::string::npos);
}

TEST_CASE("train and eval on a small corpus") {
    auto dir = (work_dir() / "train_corpus").string();
    fs::remove_all(dir);
    REQUIRE(run("gen --n 12 --seed 21 --profile plain --out " + dir).exit_code == 0);
    auto ckpt = (work_dir() / "m.bgck").string();
    auto hist = (work_dir() / "m.history.csv").string();
    auto r = run("train --manifest " + dir + "/manifest.jsonl --task time --seed 1 " +
                 "--grid 4 --encoder-mid 8 --max-epochs 4 --threads 1 --out " + ckpt +
                 " --history " + hist);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["epochs_run"] == 4);
    std::ifstream h(hist);
    std::string line;
    std::getline(h, line);
    CHECK(line == "epoch,train_loss,val_loss");
    int rows = 0;
    while (std::getline(h, line)) ++rows;
    CHECK(rows == 4);

    auto re = run("eval --ckpt " + ckpt + " --manifest " + dir +
                  "/manifest.jsonl --split test");
    REQUIRE(re.exit_code == 0);
    auto je = json::parse(re.out);
    CHECK(je["metrics"].contains("mae_s"));
    CHECK(je["baseline"].contains("train_mean_s"));
    CHECK(je["baseline"].contains("train_median_s"));
}
