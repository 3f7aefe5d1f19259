#include "cli/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bvarfsv/errors.hpp"

#ifndef BVARFSV_BUILD_ID
#define BVARFSV_BUILD_ID "unknown"
#endif

namespace bvarfsv::cli {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

namespace {

template <typename T>
T typed_get(const json& j, const std::string& key, T fallback, const char* what) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' must be " + what);
    }
}

} // namespace

double get_num(const json& j, const std::string& key, double fallback) {
    return typed_get<double>(j, key, fallback, "a number");
}

Eigen::Index get_count(const json& j, const std::string& key, Eigen::Index fallback) {
    const auto v = typed_get<std::int64_t>(j, key, fallback, "an integer");
    return static_cast<Eigen::Index>(v);
}

std::uint64_t get_seed(const json& j, const std::string& key, std::uint64_t fallback) {
    return typed_get<std::uint64_t>(j, key, fallback, "a nonnegative integer");
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    return typed_get<bool>(j, key, fallback, "true or false");
}

std::string get_str(const json& j, const std::string& key, const std::string& fallback) {
    return typed_get<std::string>(j, key, fallback, "a string");
}

std::string require_str(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config key '" + key + "' is required");
    return get_str(j, key, "");
}

std::vector<Eigen::Index> get_count_list(const json& j, const std::string& key,
                                         std::vector<Eigen::Index> fallback) {
    if (!j.contains(key)) return fallback;
    try {
        const auto v = j.at(key).get<std::vector<std::int64_t>>();
        return {v.begin(), v.end()};
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' must be a list of integers");
    }
}

std::vector<std::string> get_str_list(const json& j, const std::string& key,
                                      std::vector<std::string> fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' must be a list of strings");
    }
}

ShrinkageConfig parse_shrinkage(const json& j) {
    ShrinkageConfig s;
    const std::string kind = get_str(j, "kind", "dl");
    if (kind == "dl") {
        s.kind = ShrinkageKind::DirichletLaplace;
        s.hyper = get_num(j, "hyper", 0.5);
    } else if (kind == "ng") {
        s.kind = ShrinkageKind::NormalGamma;
        s.hyper = get_num(j, "hyper", 1.0);
    } else if (kind == "minnesota") {
        s.kind = ShrinkageKind::Minnesota;
        s.hyper = get_num(j, "hyper", 1e-3);
    } else {
        throw ConfigError("shrinkage kind '" + kind + "' is not one of dl, ng, minnesota");
    }
    if (!(s.hyper > 0.0)) throw ConfigError("shrinkage hyper must be positive");
    return s;
}

json shrinkage_to_json(const ShrinkageConfig& s) {
    const char* kind = "dl";
    if (s.kind == ShrinkageKind::NormalGamma) kind = "ng";
    if (s.kind == ShrinkageKind::Minnesota) kind = "minnesota";
    return json{{"kind", kind}, {"hyper", s.hyper}};
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& resolved) {
    const json manifest{{"command", command}, {"build", build_id()}, {"config", resolved}};
    std::ofstream out(out_dir + "/manifest.json");
    if (!out) throw ConfigError("cannot write manifest in " + out_dir);
    out << manifest.dump(2) << '\n';
}

std::string build_id() { return BVARFSV_BUILD_ID; }

std::string g15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

} // namespace bvarfsv::cli
