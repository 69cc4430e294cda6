#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dtswarm/engine.hpp"
#include "dtswarm/environment.hpp"
#include "dtswarm/radio.hpp"

namespace testing {

inline dtswarm::MapSpec open_spec(double width = 600.0, double height = 600.0, double cell = 5.0) {
  dtswarm::MapSpec spec;
  spec.width_m = width;
  spec.height_m = height;
  spec.cell_size_m = cell;
  spec.target = {width / 2 + 20.0, height / 2 - 15.0};
  spec.base_station = {width / 2, height / 2};
  return spec;
}

inline dtswarm::WorldMap open_map(double width = 600.0, double height = 600.0, double cell = 5.0) {
  return dtswarm::build_map(open_spec(width, height, cell));
}

/// World with a uniform PER so traffic is exactly predictable.
inline std::shared_ptr<dtswarm::World> uniform_world(const dtswarm::MapSpec& spec, double per) {
  auto w = std::make_shared<dtswarm::World>();
  w->map = dtswarm::build_map(spec);
  w->field = dtswarm::RadioField::uniform(w->map, per);
  return w;
}

inline std::filesystem::path source_dir() { return DTSWARM_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dtswarm_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
