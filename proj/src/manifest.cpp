#include "hienet/manifest.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hienet/rng.hpp"

namespace hienet {

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void add_input(RunManifest& m, const std::string& path) {
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash_file(path)));
    m.inputs.emplace_back(path, hex);
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "hienet";
    j["version"] = "0.1.0";
    j["command"] = m.command;
    j["seed"] = m.seed;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : m.config) cfg[k] = v;
    j["config"] = std::move(cfg);
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [p, h] : m.inputs) {
        nlohmann::json e;
        e["path"] = p;
        e["fnv1a64"] = h;
        inputs.push_back(std::move(e));
    }
    j["inputs"] = std::move(inputs);
    j["outputs"] = m.outputs;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace hienet
