#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hienet {

// Reproducibility record emitted by every CLI run: the seed, the full config
// snapshot, content hashes of the inputs, and the declared outputs.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a64 hex
    std::vector<std::string> outputs;
};

std::uint64_t hash_file(const std::string& path);

void add_input(RunManifest& m, const std::string& path);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace hienet
