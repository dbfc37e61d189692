#ifndef BDARMA_CONFIG_HPP
#define BDARMA_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bdarma/errors.hpp"

namespace bdarma {

// Flat key-value run configuration:
//   # comment
//   key = value
// Keys are dotted lowercase paths. Values keep their exact text, so a file
// loads and saves without loss.
class Config {
  public:
    Config() = default;

    static Config parse_text(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::stringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            std::string s = line;
            if (!s.empty() && s.back() == '\r') s.pop_back();
            const auto hash = s.find('#');
            if (hash != std::string::npos) s = s.substr(0, hash);
            const auto first = s.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": expected key = value");
            auto trim = [](std::string v) {
                v.erase(0, v.find_first_not_of(" \t"));
                v.erase(v.find_last_not_of(" \t") + 1);
                return v;
            };
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
            if (cfg.index_.count(key))
                throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key " +
                                   key);
            cfg.index_[key] = cfg.items_.size();
            cfg.items_.emplace_back(key, value);
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw config_error("cannot open " + path + " for writing");
        out << text();
    }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : items_) out += k + " = " + v + "\n";
        return out;
    }

    bool has(const std::string& key) const { return index_.count(key) != 0; }

    const std::string& raw(const std::string& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) throw config_error("missing config key: " + key);
        return items_[it->second].second;
    }

    std::string get_string(const std::string& key) const { return raw(key); }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? raw(key) : fallback;
    }

    int get_int(const std::string& key) const { return parse_int(key, raw(key)); }
    int get_int(const std::string& key, int fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::uint64_t get_uint64(const std::string& key) const {
        try {
            return std::stoull(raw(key));
        } catch (const std::exception&) {
            throw config_error("config key " + key + " is not an unsigned integer: " + raw(key));
        }
    }
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_uint64(key) : fallback;
    }

    double get_double(const std::string& key) const {
        try {
            return std::stod(raw(key));
        } catch (const std::exception&) {
            throw config_error("config key " + key + " is not a number: " + raw(key));
        }
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    bool get_bool(const std::string& key) const {
        const std::string& v = raw(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw config_error("config key " + key + " is not a boolean: " + v);
    }
    bool get_bool(const std::string& key, bool fallback) const {
        return has(key) ? get_bool(key) : fallback;
    }

    void set(const std::string& key, const std::string& value) {
        const auto it = index_.find(key);
        if (it != index_.end()) {
            items_[it->second].second = value;
        } else {
            index_[key] = items_.size();
            items_.emplace_back(key, value);
        }
    }

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

    // Keys with a given prefix, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : items_)
            if (k.rfind(prefix, 0) == 0) out.push_back(k);
        return out;
    }

  private:
    static int parse_int(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            const int n = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            throw config_error("config key " + key + " is not an integer: " + v);
        }
    }

    std::vector<std::pair<std::string, std::string>> items_;
    std::map<std::string, size_t> index_;
};

// FNV-1a over the canonical serialized text: stable across reordering of the
// original file because keys are hashed in sorted order.
inline std::uint64_t config_hash(const Config& cfg) {
    std::vector<std::pair<std::string, std::string>> items(cfg.items().begin(),
                                                           cfg.items().end());
    std::sort(items.begin(), items.end());
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& [k, v] : items) {
        mix(k);
        mix(v);
    }
    return h;
}

} // namespace bdarma

#endif
