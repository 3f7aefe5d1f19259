#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

#include "bvarfsv/engine.hpp"

namespace bvarfsv::cli {

using nlohmann::json;

// Parse a JSON config file; empty path gives an empty object. Parse problems
// surface as ConfigError naming the file.
json load_config(const std::string& path);

// Typed lookups that report the offending key on a type mismatch.
double get_num(const json& j, const std::string& key, double fallback);
Eigen::Index get_count(const json& j, const std::string& key, Eigen::Index fallback);
std::uint64_t get_seed(const json& j, const std::string& key, std::uint64_t fallback);
bool get_bool(const json& j, const std::string& key, bool fallback);
std::string get_str(const json& j, const std::string& key, const std::string& fallback);
std::string require_str(const json& j, const std::string& key);
std::vector<Eigen::Index> get_count_list(const json& j, const std::string& key,
                                         std::vector<Eigen::Index> fallback);
std::vector<std::string> get_str_list(const json& j, const std::string& key,
                                      std::vector<std::string> fallback);

// {"kind": "dl" | "ng" | "minnesota", "hyper": x}
ShrinkageConfig parse_shrinkage(const json& j);
json shrinkage_to_json(const ShrinkageConfig& s);

void ensure_dir(const std::string& dir);

// Deterministic run record: command, build id, and the fully resolved
// configuration. Never contains timestamps, so reruns are byte-identical.
void write_manifest(const std::string& out_dir, const std::string& command, const json& resolved);

std::string build_id();

// shortest-width decimal with 15 significant digits
std::string g15(double x);

} // namespace bvarfsv::cli
