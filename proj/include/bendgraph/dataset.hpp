#pragma once

// Manifest-driven dataset assembly: STEP file -> resolved solid -> feature
// report -> enriched graph with the task label and split tag.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bendgraph/datagen.hpp"
#include "bendgraph/nn.hpp"
#include "bendgraph/resolve.hpp"

namespace bendgraph::dataset {

enum class Task { Time, Collision };

inline Task task_from_string(const std::string& s) {
    if (s == "time") return Task::Time;
    if (s == "collision") return Task::Collision;
    throw Error("unknown task: " + s + " (expected time or collision)");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline int split_tag(const std::string& s) {
    if (s == "train") return 0;
    if (s == "val") return 1;
    if (s == "test") return 2;
    throw Error("unknown split tag: " + s);
}

inline nn::Dataset load_graph_dataset(const datagen::Manifest& man, Task task, int grid,
                                      bool with_mf) {
    nn::Dataset ds;
    namespace fs = std::filesystem;
    for (const datagen::PartRecord& rec : man.parts) {
        std::string path = (fs::path(man.root) / rec.step_path).string();
        auto model = step::parse_step(read_file(path));
        auto solid = brep::resolve_solid(model);
        auto rep = featrec::recognize(solid);
        auto g = enrich::assemble_graph(solid, rep, grid, with_mf);
        g.has_label = true;
        g.label = task == Task::Time ? rec.time_s : double(rec.collision);
        ds.graphs.push_back(std::move(g));
        ds.split.push_back(split_tag(rec.split));
    }
    return ds;
}

}  // namespace bendgraph::dataset
