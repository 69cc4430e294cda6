#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtswarm/engine.hpp"
#include "dtswarm/environment.hpp"

namespace dtswarm {

/// Malformed input: bad JSON syntax, wrong types, unknown keys or names.
class ConfigParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct SweepSpec {
  std::vector<Mode> modes;
  std::vector<int> agents;
  int runs = 1;
  std::uint64_t seed_base = 1;
  std::string out = "out";

  /// Throws ConfigError.
  void validate() const;
};

struct ParsedConfig {
  ScenarioConfig scenario;
  SweepSpec sweep;
  /// Map file resolved against the config file's directory.
  std::filesystem::path map_file;
};

/// Reads a scenario/sweep document. Every omitted field takes its default;
/// sweep lists default to the scenario's mode and agent count.
ParsedConfig parse_config(const std::filesystem::path& path);
ParsedConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

MapSpec load_map_spec(const std::filesystem::path& path);
MapSpec map_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const MapSpec& spec);

/// Every parameter, defaults included.
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const SweepSpec& sweep);

/// FNV-1a over the canonical JSON of the config (seed excluded) and the map.
std::string config_hash(const ScenarioConfig& config, const MapSpec& map);

}  // namespace dtswarm
