#pragma once

// Layered run configuration: command line > BENDGRAPH_* environment >
// key=value config file > built-in default. Every run logs the fully
// resolved configuration for reproducibility.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bendgraph/core.hpp"

namespace bendgraph::config {

inline std::string env_key(const std::string& key) {
    std::string out = "BENDGRAPH_";
    for (char c : key)
        out.push_back(c == '-' || c == '.' ? '_' : char(std::toupper((unsigned char)c)));
    return out;
}

// key=value lines; '#' starts a comment; whitespace around tokens ignored.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

class Layers {
public:
    explicit Layers(std::map<std::string, std::string> file_values)
        : file_(std::move(file_values)) {}

    // cli_set: the option was given on the command line (highest layer).
    template <typename T>
    void apply(const std::string& key, bool cli_set, T& value) {
        std::string source = "default";
        if (cli_set) {
            source = "cli";
        } else if (const char* e = std::getenv(env_key(key).c_str())) {
            parse_into(e, value, key);
            source = "env";
        } else if (auto it = file_.find(key); it != file_.end()) {
            parse_into(it->second, value, key);
            source = "file";
        }
        resolved_[key] = {to_json(value), source};
    }

    nlohmann::ordered_json resolved_json(const std::string& command) const {
        nlohmann::ordered_json j;
        j["command"] = command;
        for (const auto& [k, v] : resolved_) {
            j[k] = v.first;
            j[k + ".source"] = v.second;
        }
        return j;
    }

private:
    template <typename T>
    static void parse_into(const std::string& s, T& value, const std::string& key) {
        if constexpr (std::is_same_v<T, std::string>) {
            value = s;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (s == "1" || s == "true" || s == "yes") value = true;
            else if (s == "0" || s == "false" || s == "no") value = false;
            else throw Error("bad boolean for " + key + ": " + s);
        } else {
            std::istringstream ss(s);
            ss >> value;
            if (ss.fail()) throw Error("bad value for " + key + ": " + s);
        }
    }

    template <typename T>
    static nlohmann::json to_json(const T& v) {
        return v;
    }

    std::map<std::string, std::string> file_;
    std::map<std::string, std::pair<nlohmann::json, std::string>> resolved_;
};

}  // namespace bendgraph::config
