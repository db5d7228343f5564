// bendgraph command line: inspect | recognize | graph | gen | train | eval |
// validate. JSON results go to standard output, diagnostics to standard
// error. Exit codes: 0 success, 1 validation failure, 2 usage/input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bendgraph/config.hpp"
#include "bendgraph/dataset.hpp"
#include "bendgraph/datagen.hpp"
#include "bendgraph/enrich.hpp"
#include "bendgraph/featrec.hpp"
#include "bendgraph/nn.hpp"
#include "bendgraph/resolve.hpp"
#include "bendgraph/step_write.hpp"

namespace fs = std::filesystem;
using namespace bendgraph;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;

struct CommonArgs {
    std::string config_path;
};

config::Layers make_layers(const CommonArgs& common) {
    if (common.config_path.empty()) return config::Layers({});
    return config::Layers(config::read_config_file(common.config_path));
}

void log_resolved(const config::Layers& layers, const std::string& command) {
    std::cerr << "resolved_config " << layers.resolved_json(command).dump() << "\n";
}

void emit(const ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write " + out_path);
        f << j.dump(2) << "\n";
    }
}

brep::BrepSolid load_solid(const std::string& path) {
    auto model = step::parse_step(dataset::read_file(path));
    return brep::resolve_solid(model);
}

// ---------------------------------------------------------------------------

int cmd_inspect(const std::string& path) {
    auto solid = load_solid(path);
    auto ec = brep::euler_counts(solid);
    ordered_json j;
    j["faces"] = ec.faces;
    j["edges"] = ec.edges;
    j["vertices"] = ec.vertices;
    j["inner_loops"] = ec.inner_loops;
    j["euler"] = {{"v_e_f", ec.vef()},
                  {"v_e_f_minus_rings", ec.vef() - ec.inner_loops},
                  {"genus", ec.genus()}};
    int planes = 0, cyls = 0, bsp = 0;
    for (const auto& f : solid.faces) {
        if (f.surf.kind == brep::SurfaceKind::Plane) ++planes;
        else if (f.surf.kind == brep::SurfaceKind::Cylinder) ++cyls;
        else ++bsp;
    }
    j["surface_kinds"] = {{"plane", planes}, {"cylinder", cyls}, {"bspline", bsp}};
    try {
        auto ga = brep::global_attributes(solid);
        j["thickness"] = ga.thickness;
        j["total_area"] = ga.total_area;
        j["bbox_volume"] = ga.bbox_volume;
    } catch (const Error& e) {
        j["thickness"] = nullptr;
        std::cerr << "note: " << e.what() << "\n";
    }
    emit(j, "");
    return kExitOk;
}

int cmd_recognize(const std::string& path, const std::string& out) {
    auto solid = load_solid(path);
    auto rep = featrec::recognize(solid);
    emit(featrec::report_json(rep), out);
    return kExitOk;
}

int cmd_graph(const std::string& path, int grid, bool no_mf, const std::string& out) {
    auto solid = load_solid(path);
    auto rep = featrec::recognize(solid);
    auto g = enrich::assemble_graph(solid, rep, grid, !no_mf);
    if (!out.empty() && out.ends_with(".bgr")) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw Error("cannot write " + out);
        f << enrich::write_bgr(g);
        std::cerr << "wrote " << out << "\n";
    } else {
        emit(enrich::graph_json(g), out);
    }
    return kExitOk;
}

int cmd_gen(int n, std::uint64_t seed, const std::string& profiles,
            const std::string& out_dir) {
    std::vector<datagen::Profile> mix;
    if (profiles == "mixed") {
        mix = {datagen::Profile::Plain, datagen::Profile::Holes,
               datagen::Profile::Corners, datagen::Profile::Tapered};
    } else {
        std::stringstream ss(profiles);
        std::string tok;
        while (std::getline(ss, tok, ',')) mix.push_back(datagen::profile_from_string(tok));
    }
    auto man = datagen::build_dataset(n, seed, mix, out_dir);
    int train = 0, val = 0, test = 0;
    for (const auto& p : man.parts)
        (p.split == "train" ? train : p.split == "val" ? val : test)++;
    ordered_json j;
    j["manifest"] = (fs::path(out_dir) / "manifest.jsonl").string();
    j["parts"] = int(man.parts.size());
    j["splits"] = {{"train", train}, {"val", val}, {"test", test}};
    int collisions = 0;
    for (const auto& p : man.parts) collisions += p.collision;
    j["collision_positive"] = collisions;
    emit(j, "");
    return kExitOk;
}

int cmd_train(const std::string& manifest_path, const std::string& task_name,
              bool no_mf, const nn::ModelConfig& mcfg, const nn::TrainConfig& tcfg,
              const std::string& out, const std::string& history) {
    auto man = datagen::load_manifest(manifest_path);
    if (man.parts.empty()) throw Error("manifest is empty: " + manifest_path);
    dataset::Task task = dataset::task_from_string(task_name);
    nn::TrainConfig tc = tcfg;
    tc.classification = task == dataset::Task::Collision;
    auto ds = dataset::load_graph_dataset(man, task, mcfg.grid, !no_mf);
    auto res = nn::train(ds, mcfg, tc);
    nn::save_checkpoint(out, res.model, tc, res.best_val, res.best_epoch);
    if (!history.empty()) {
        std::ofstream h(history);
        if (!h) throw Error("cannot write " + history);
        h << "epoch,train_loss,val_loss\n";
        for (const auto& r : res.history)
            h << r.epoch << "," << format_double(r.train_loss) << ","
              << format_double(r.val_loss) << "\n";
    }
    ordered_json j;
    j["checkpoint"] = out;
    j["epochs_run"] = res.stopped_epoch;
    j["best_epoch"] = res.best_epoch;
    j["best_val_loss"] = res.best_val;
    j["parameters"] = res.model.params.total();
    emit(j, "");
    return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& manifest_path,
             const std::string& split, bool no_mf) {
    auto lc = nn::load_checkpoint(ckpt_path);
    auto man = datagen::load_manifest(manifest_path);
    if (man.parts.empty()) throw Error("manifest is empty: " + manifest_path);
    dataset::Task task =
        lc.tcfg.classification ? dataset::Task::Collision : dataset::Task::Time;
    auto ds = dataset::load_graph_dataset(man, task, lc.model.cfg.grid, !no_mf);
    int tag = dataset::split_tag(split);
    auto idx = ds.indices(tag);
    if (idx.empty()) throw Error("split '" + split + "' is empty");
    auto metrics = nn::evaluate(lc.model, ds, idx, lc.tcfg.classification);
    std::vector<double> train_labels, split_labels;
    for (int i : ds.indices(0)) train_labels.push_back(ds.graphs[i].label);
    for (int i : idx) split_labels.push_back(ds.graphs[i].label);
    auto base = nn::baseline_predict(train_labels, split_labels);
    ordered_json j;
    j["split"] = split;
    j["count"] = idx.size();
    if (lc.tcfg.classification) {
        j["metrics"] = {{"accuracy_pct", metrics.accuracy}};
        j["baseline"] = {{"accuracy_pct", 50.0}, {"note", "class distribution (50/50)"}};
    } else {
        j["metrics"] = {{"rmse_s", metrics.rmse},
                        {"mae_s", metrics.mae},
                        {"mape_pct", metrics.mape}};
        j["baseline"] = {{"predictor", "train mean"},
                         {"train_mean_s", base.mean},
                         {"train_median_s", base.median},
                         {"rmse_s", base.metrics.rmse},
                         {"mae_s", base.metrics.mae},
                         {"mape_pct", base.metrics.mape}};
    }
    emit(j, "");
    return kExitOk;
}

int cmd_validate(const std::string& manifest_path) {
    auto man = datagen::load_manifest(manifest_path);
    if (man.parts.empty()) throw Error("manifest is empty: " + manifest_path);
    ordered_json failures = ordered_json::array();
    int passed = 0;
    int bend_face_matches = 0, bends_total = 0;
    for (const auto& rec : man.parts) {
        std::vector<std::string> msgs;
        try {
            auto solid = load_solid((fs::path(man.root) / rec.step_path).string());
            auto gt = datagen::gt_from_json(
                nlohmann::json::parse(dataset::read_file((fs::path(man.root) / rec.gt_path).string())));
            auto rep = featrec::recognize(solid);
            msgs = datagen::validate_part(rep, gt);
            auto euler = datagen::euler_check(solid, gt.through_holes());
            msgs.insert(msgs.end(), euler.begin(), euler.end());
            bends_total += int(gt.bends.size());
            for (const auto& gb : gt.bends)
                for (const auto& rb : rep.bends)
                    if (rb.inner_face == gb.inner_face && rb.outer_face == gb.outer_face) {
                        ++bend_face_matches;
                        break;
                    }
        } catch (const std::exception& e) {
            msgs.push_back(e.what());
        }
        if (msgs.empty()) {
            ++passed;
        } else {
            failures.push_back({{"id", rec.id}, {"messages", msgs}});
        }
    }
    ordered_json j;
    j["parts"] = int(man.parts.size());
    j["passed"] = passed;
    j["accuracy_pct"] = 100.0 * passed / double(man.parts.size());
    j["bend_face_sets"] = {{"matched", bend_face_matches}, {"total", bends_total}};
    j["failures"] = failures;
    emit(j, "");
    return failures.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheet-metal B-rep feature recognition and bending-effort learning"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonArgs common;
    app.add_option("--config", common.config_path, "key=value config file")
        ->expected(1);

    std::string path, out, manifest, ckpt, task = "time", split = "test";
    std::string profiles = "mixed";
    int n = 100, grid = 10, encoder_mid = 32, threads = 0;
    std::uint64_t seed = 0;
    bool no_mf = false;
    double lr = 1e-4;
    int batch = 32, patience = 50, max_epochs = 1000;
    std::string history;

    auto* c_inspect = app.add_subcommand("inspect", "topology and geometry summary");
    c_inspect->add_option("path", path, "STEP file")->required();

    auto* c_recognize = app.add_subcommand("recognize", "manufacturing feature report");
    c_recognize->add_option("path", path, "STEP file")->required();
    auto* rec_out = c_recognize->add_option("--out", out, "write the report here");

    auto* c_graph = app.add_subcommand("graph", "enriched graph export");
    c_graph->add_option("path", path, "STEP file")->required();
    auto* g_grid = c_graph->add_option("--grid", grid, "UV samples per axis");
    auto* g_nomf = c_graph->add_flag("--no-mf", no_mf, "zero the MF vectors");
    auto* g_out = c_graph->add_option("--out", out, ".json or .bgr output path");

    auto* c_gen = app.add_subcommand("gen", "generate a synthetic corpus");
    auto* gen_n = c_gen->add_option("--n", n, "number of parts");
    auto* gen_seed = c_gen->add_option("--seed", seed, "corpus seed");
    auto* gen_prof = c_gen->add_option("--profile", profiles,
                                       "mixed or comma list of plain,holes,corners,tapered");
    c_gen->add_option("--out", out, "output directory")->required();

    auto* c_train = app.add_subcommand("train", "train a model from a manifest");
    c_train->add_option("--manifest", manifest, "manifest.jsonl")->required();
    auto* tr_task = c_train->add_option("--task", task, "time | collision");
    auto* tr_nomf = c_train->add_flag("--no-mf", no_mf, "zero the MF vectors");
    auto* tr_seed = c_train->add_option("--seed", seed, "training seed");
    auto* tr_grid = c_train->add_option("--grid", grid, "UV samples per axis");
    auto* tr_mid = c_train->add_option("--encoder-mid", encoder_mid,
                                       "encoder middle channels");
    auto* tr_lr = c_train->add_option("--lr", lr, "Adam learning rate");
    auto* tr_batch = c_train->add_option("--batch", batch, "batch size");
    auto* tr_pat = c_train->add_option("--patience", patience, "early stopping patience");
    auto* tr_epochs = c_train->add_option("--max-epochs", max_epochs, "epoch cap");
    auto* tr_threads = c_train->add_option("--threads", threads, "worker threads");
    c_train->add_option("--out", ckpt, "checkpoint path")->required();
    auto* tr_hist = c_train->add_option("--history", history, "per-epoch loss CSV");

    auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint");
    c_eval->add_option("--ckpt", ckpt, "checkpoint path")->required();
    c_eval->add_option("--manifest", manifest, "manifest.jsonl")->required();
    auto* ev_split = c_eval->add_option("--split", split, "train | val | test");
    auto* ev_nomf = c_eval->add_flag("--no-mf", no_mf, "zero the MF vectors");

    auto* c_validate = app.add_subcommand("validate",
                                          "recognizer vs ground truth over a corpus");
    c_validate->add_option("--manifest", manifest, "manifest.jsonl")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        config::Layers layers = make_layers(common);
        if (c_inspect->parsed()) {
            log_resolved(layers, "inspect");
            return cmd_inspect(path);
        }
        if (c_recognize->parsed()) {
            layers.apply("out", rec_out->count() > 0, out);
            log_resolved(layers, "recognize");
            return cmd_recognize(path, out);
        }
        if (c_graph->parsed()) {
            layers.apply("grid", g_grid->count() > 0, grid);
            layers.apply("no-mf", g_nomf->count() > 0, no_mf);
            layers.apply("out", g_out->count() > 0, out);
            log_resolved(layers, "graph");
            return cmd_graph(path, grid, no_mf, out);
        }
        if (c_gen->parsed()) {
            layers.apply("n", gen_n->count() > 0, n);
            layers.apply("seed", gen_seed->count() > 0, seed);
            layers.apply("profile", gen_prof->count() > 0, profiles);
            log_resolved(layers, "gen");
            return cmd_gen(n, seed, profiles, out);
        }
        if (c_train->parsed()) {
            layers.apply("task", tr_task->count() > 0, task);
            layers.apply("no-mf", tr_nomf->count() > 0, no_mf);
            layers.apply("seed", tr_seed->count() > 0, seed);
            layers.apply("grid", tr_grid->count() > 0, grid);
            layers.apply("encoder-mid", tr_mid->count() > 0, encoder_mid);
            layers.apply("lr", tr_lr->count() > 0, lr);
            layers.apply("batch", tr_batch->count() > 0, batch);
            layers.apply("patience", tr_pat->count() > 0, patience);
            layers.apply("max-epochs", tr_epochs->count() > 0, max_epochs);
            layers.apply("threads", tr_threads->count() > 0, threads);
            layers.apply("history", tr_hist->count() > 0, history);
            log_resolved(layers, "train");
            nn::ModelConfig mcfg;
            mcfg.grid = grid;
            mcfg.encoder_mid = encoder_mid;
            mcfg.seed = seed;
            nn::TrainConfig tcfg;
            tcfg.lr = lr;
            tcfg.batch_size = batch;
            tcfg.patience = patience;
            tcfg.max_epochs = max_epochs;
            tcfg.seed = seed;
            tcfg.threads = threads;
            return cmd_train(manifest, task, no_mf, mcfg, tcfg, ckpt, history);
        }
        if (c_eval->parsed()) {
            layers.apply("split", ev_split->count() > 0, split);
            layers.apply("no-mf", ev_nomf->count() > 0, no_mf);
            log_resolved(layers, "eval");
            return cmd_eval(ckpt, manifest, split, no_mf);
        }
        if (c_validate->parsed()) {
            log_resolved(layers, "validate");
            return cmd_validate(manifest);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
