#ifndef BDARMA_MANIFEST_HPP
#define BDARMA_MANIFEST_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdarma/config.hpp"
#include "bdarma/errors.hpp"

namespace bdarma {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_bytes(bytes);
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Reproducibility record written beside every command's outputs. Contains no
// wall-clock fields, so reruns are byte-identical.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string engine;
    int threads = 1;
    std::uint64_t config_hash = 0;
    std::map<std::string, std::string> inputs;  // path -> content hash
    std::vector<std::string> outputs;
    std::map<std::string, std::string> extra;

    void add_input(const std::string& path) { inputs[path] = hex64(fnv1a_file(path)); }

    void write(const std::string& path) const {
        nlohmann::ordered_json j;
        j["tool"] = "bdarma";
        j["version"] = kToolVersion;
        j["command"] = command;
        j["seed"] = seed;
        j["engine"] = engine;
        j["threads"] = threads;
        j["config_hash"] = hex64(config_hash);
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        for (const auto& [k, v] : extra) j[k] = v;
        std::ofstream out(path);
        if (!out) throw data_error("cannot open " + path + " for writing");
        out << j.dump(2) << "\n";
    }
};

} // namespace bdarma

#endif
