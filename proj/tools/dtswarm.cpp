// Batch front end: one run, or a sweep over modes x agent counts x seeds.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dtswarm/config.hpp"
#include "dtswarm/radio.hpp"
#include "dtswarm/sweep.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::string config;
  std::string map;
  std::vector<std::string> modes;
  std::vector<int> agents;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_rounds;
  std::string out;
  std::string per_field;
  int jobs = 1;
  bool no_timeseries = false;
  bool quiet = false;
};

dtswarm::ParsedConfig load(const Overrides& o) {
  using namespace dtswarm;
  ParsedConfig parsed;
  if (!o.config.empty()) {
    parsed = parse_config(o.config);
  } else if (!o.map.empty()) {
    parsed = parse_config_text(nlohmann::json{{"map", o.map}}.dump());
  } else {
    throw ConfigError("either --config or --map is required");
  }
  if (!o.map.empty()) {
    parsed.scenario.map_path = o.map;
    parsed.map_file = o.map;
  }
  ScenarioConfig& c = parsed.scenario;
  SweepSpec& s = parsed.sweep;
  if (!o.modes.empty()) {
    s.modes.clear();
    for (const std::string& m : o.modes) {
      try {
        s.modes.push_back(parse_mode(m));
      } catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("parse-error: --mode: ") + e.what());
      }
    }
    c.mode = s.modes.front();
  }
  if (!o.agents.empty()) {
    s.agents = o.agents;
    c.n_agents = s.agents.front();
  }
  if (o.runs) s.runs = *o.runs;
  if (o.seed) {
    s.seed_base = *o.seed;
    c.seed = *o.seed;
  }
  if (o.max_rounds) c.max_rounds = *o.max_rounds;
  if (!o.out.empty()) s.out = o.out;
  c.validate();
  s.validate();
  return parsed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital-twin swarm search simulator"};
  Overrides o;
  app.add_option("--config", o.config, "Scenario/sweep JSON file");
  app.add_option("--map", o.map, "Map JSON file (overrides the config's map)");
  app.add_option("--mode", o.modes, "Modes to run: P2P DT1 DT2 RW1 RW2")->delimiter(',');
  app.add_option("--agents", o.agents, "Agent counts")->delimiter(',');
  app.add_option("--runs", o.runs, "Monte Carlo runs per cell");
  app.add_option("--seed", o.seed, "Seed base");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--max-rounds", o.max_rounds, "Round limit per run");
  app.add_option("--export-per-field", o.per_field, "Write the PER grid to this CSV");
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-timeseries", o.no_timeseries, "Skip timeseries.csv");
  app.add_flag("-q,--quiet", o.quiet, "No progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  dtswarm::ParsedConfig parsed;
  dtswarm::MapSpec map_spec;
  std::shared_ptr<const dtswarm::World> world;
  try {
    parsed = load(o);
    map_spec = dtswarm::load_map_spec(parsed.map_file);
    world = dtswarm::make_world(map_spec, parsed.scenario.radio);
  } catch (const dtswarm::ConfigError& e) {
    std::cerr << "dtswarm: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dtswarm::MapError& e) {
    std::cerr << "dtswarm: map: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "dtswarm: " << e.what() << '\n';
    return kExitConfig;
  }

  nlohmann::json echo = dtswarm::to_json(parsed.scenario);
  echo["sweep"] = dtswarm::to_json(parsed.sweep);
  std::cout << echo.dump(2) << std::endl;

  try {
    if (!o.per_field.empty()) {
      std::ofstream per(o.per_field, std::ios::binary | std::ios::trunc);
      if (!per) throw dtswarm::IoError("cannot write '" + o.per_field + "'");
      dtswarm::write_field_csv(world->field, per);
      if (!per) throw dtswarm::IoError("write to '" + o.per_field + "' failed");
    }
    dtswarm::SweepOptions options;
    options.jobs = o.jobs;
    options.write_timeseries = !o.no_timeseries;
    options.progress = o.quiet ? nullptr : &std::cerr;
    const std::size_t rows = dtswarm::run_sweep(world, parsed.scenario, parsed.sweep, options);
    if (!o.quiet) std::cerr << "wrote " << rows << " rows to " << parsed.sweep.out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "dtswarm: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
