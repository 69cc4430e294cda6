#include "dtswarm/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dtswarm {

using nlohmann::json;

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

/// Strict reader over one JSON object: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigParseError("parse-error: field '" + (path_.empty() ? "<root>" : path_) +
                             "' must be an object");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* take(const std::string& key) {
    if (!obj_.contains(key)) return nullptr;
    seen_.insert(key);
    return &obj_.at(key);
  }

  void number(const std::string& key, double& out) {
    if (const json* j = take(key)) {
      if (!j->is_number()) fail(key, "a number");
      out = j->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_integer()) fail(key, "an integer");
      out = j->get<int>();
    }
  }

  void size(const std::string& key, std::size_t& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_unsigned()) fail(key, "a non-negative integer");
      out = j->get<std::size_t>();
    }
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_unsigned()) fail(key, "a non-negative integer");
      out = j->get<std::uint64_t>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* j = take(key)) {
      if (!j->is_string()) fail(key, "a string");
      out = j->get<std::string>();
    }
  }

  ObjectReader child(const std::string& key) {
    static const json kEmpty = json::object();
    const json* j = take(key);
    return ObjectReader(j ? *j : kEmpty, join_path(path_, key));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& expected) const {
    throw ConfigParseError("parse-error: field '" + join_path(path_, key) + "' must be " +
                           expected);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) {
        throw ConfigParseError("parse-error: unknown field '" + join_path(path_, key) + "'");
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size() + 1; ++i) {
      if (i > 0 && text[i - 1] == '\n') {
        ++line;
        col = 1;
      } else if (i > 0) {
        ++col;
      }
    }
    std::ostringstream os;
    os << "parse-error: " << source << ":" << line << ":" << col << ": invalid JSON";
    throw ConfigParseError(os.str());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Vec2 read_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigParseError("parse-error: field '" + field + "' must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Rect> read_rects(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigParseError("parse-error: field '" + field + "' must be a list");
  std::vector<Rect> rects;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& r = j[i];
    if (!r.is_array() || r.size() != 4 ||
        !std::all_of(r.begin(), r.end(), [](const json& v) { return v.is_number(); })) {
      throw ConfigParseError("parse-error: field '" + field + "[" + std::to_string(i) +
                             "]' must be [x_min, y_min, x_max, y_max]");
    }
    rects.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                     r[3].get<double>()});
  }
  return rects;
}

json rects_to_json(const std::vector<Rect>& rects) {
  json out = json::array();
  for (const Rect& r : rects) out.push_back({r.x_min, r.y_min, r.x_max, r.y_max});
  return out;
}

Mode read_mode(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigParseError("parse-error: field '" + field + "' must be a string");
  try {
    return parse_mode(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError("parse-error: field '" + field + "': " + e.what());
  }
}

}  // namespace

void SweepSpec::validate() const {
  if (modes.empty()) throw ConfigError("sweep.modes must be non-empty");
  if (agents.empty()) throw ConfigError("sweep.agents must be non-empty");
  for (int n : agents) {
    if (n < 1) throw ConfigError("n_agents >= 1");
  }
  if (runs < 1) throw ConfigError("sweep.runs >= 1");
  if (out.empty()) throw ConfigError("sweep.out must be non-empty");
}

ParsedConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_text(text, "config");
  ObjectReader root(doc, "");
  ParsedConfig parsed;
  ScenarioConfig& c = parsed.scenario;

  if (!root.has("map")) throw ConfigParseError("parse-error: missing field 'map'");
  root.string("map", c.map_path);
  if (const json* m = root.take("mode")) c.mode = read_mode(*m, "mode");
  root.integer("n_agents", c.n_agents);
  root.unsigned64("seed", c.seed);
  root.integer("max_rounds", c.max_rounds);
  root.number("convergence_radius_m", c.convergence_radius_m);
  root.number("convergence_fraction", c.convergence_fraction);
  root.number("sigma_m", c.sigma_m);

  ObjectReader pso = root.child("pso");
  pso.number("inertia", c.pso.inertia);
  pso.number("cognitive", c.pso.cognitive);
  pso.number("social", c.pso.social);
  pso.number("v_max_m", c.pso.v_max);
  pso.integer("stuck_threshold", c.pso.stuck_threshold);
  pso.number("stagnation_radius_m", c.pso.stagnation_radius);
  pso.number("random_walk_step_m", c.pso.random_walk_step);
  pso.finish();

  ObjectReader radio = root.child("radio");
  radio.number("ref_loss_db", c.radio.ref_loss_db);
  radio.number("path_loss_exponent", c.radio.path_loss_exponent);
  radio.number("wall_penetration_db", c.radio.wall_penetration_db);
  radio.number("per_curve_midpoint_db", c.radio.per_curve_midpoint_db);
  radio.number("per_curve_slope_db", c.radio.per_curve_slope_db);
  radio.finish();

  ObjectReader avoid = root.child("avoidance");
  avoid.integer("sector_count", c.avoidance.sector_count);
  avoid.number("threshold", c.avoidance.threshold);
  avoid.integer("safety_margin_sectors", c.avoidance.safety_margin_sectors);
  avoid.integer("ray_count", c.avoidance.ray_count);
  avoid.number("max_range_m", c.avoidance.max_range_m);
  avoid.finish();

  ObjectReader planner = root.child("planner");
  planner.number("replan_threshold_m", c.planner.replan_threshold_m);
  planner.size("waypoint_lookahead", c.planner.waypoint_lookahead);
  planner.finish();

  SweepSpec& s = parsed.sweep;
  s.modes = {c.mode};
  s.agents = {c.n_agents};
  s.seed_base = c.seed;
  ObjectReader sweep = root.child("sweep");
  if (const json* modes = sweep.take("modes")) {
    if (!modes->is_array()) sweep.fail("modes", "a list of mode names");
    s.modes.clear();
    for (std::size_t i = 0; i < modes->size(); ++i) {
      s.modes.push_back(read_mode((*modes)[i], "sweep.modes[" + std::to_string(i) + "]"));
    }
  }
  if (const json* agents = sweep.take("agents")) {
    if (!agents->is_array() ||
        !std::all_of(agents->begin(), agents->end(),
                     [](const json& v) { return v.is_number_integer(); })) {
      sweep.fail("agents", "a list of integers");
    }
    s.agents = agents->get<std::vector<int>>();
  }
  sweep.integer("runs", s.runs);
  sweep.unsigned64("seed_base", s.seed_base);
  sweep.string("out", s.out);
  sweep.finish();
  root.finish();

  parsed.map_file = base_dir / c.map_path;
  c.validate();
  s.validate();
  return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(read_file(path), path.parent_path());
}

MapSpec map_spec_from_json(const json& doc) {
  ObjectReader root(doc, "");
  MapSpec spec;
  root.number("width_m", spec.width_m);
  root.number("height_m", spec.height_m);
  root.number("cell_size_m", spec.cell_size_m);
  const json* target = root.take("target");
  const json* base = root.take("base_station");
  if (!target) throw ConfigParseError("parse-error: missing field 'target'");
  if (!base) throw ConfigParseError("parse-error: missing field 'base_station'");
  spec.target = read_point(*target, "target");
  spec.base_station = read_point(*base, "base_station");
  if (const json* obs = root.take("obstacles")) spec.obstacles.rects = read_rects(*obs, "obstacles");
  if (const json* spawn = root.take("spawn_region")) {
    spec.spawn_region = read_rects(*spawn, "spawn_region");
  }
  if (const json* name = root.take("name"); name && !name->is_string()) {
    root.fail("name", "a string");
  }
  root.finish();
  return spec;
}

MapSpec load_map_spec(const std::filesystem::path& path) {
  return map_spec_from_json(parse_text(read_file(path), path.string()));
}

json to_json(const MapSpec& spec) {
  return {
      {"width_m", spec.width_m},
      {"height_m", spec.height_m},
      {"cell_size_m", spec.cell_size_m},
      {"target", {spec.target.x, spec.target.y}},
      {"base_station", {spec.base_station.x, spec.base_station.y}},
      {"obstacles", rects_to_json(spec.obstacles.rects)},
      {"spawn_region", rects_to_json(spec.spawn_region)},
  };
}

json to_json(const ScenarioConfig& c) {
  return {
      {"map", c.map_path},
      {"mode", std::string(to_string(c.mode))},
      {"n_agents", c.n_agents},
      {"seed", c.seed},
      {"max_rounds", c.max_rounds},
      {"convergence_radius_m", c.convergence_radius_m},
      {"convergence_fraction", c.convergence_fraction},
      {"sigma_m", c.sigma_m},
      {"pso",
       {{"inertia", c.pso.inertia},
        {"cognitive", c.pso.cognitive},
        {"social", c.pso.social},
        {"v_max_m", c.pso.v_max},
        {"stuck_threshold", c.pso.stuck_threshold},
        {"stagnation_radius_m", c.pso.stagnation_radius},
        {"random_walk_step_m", c.pso.random_walk_step}}},
      {"radio",
       {{"ref_loss_db", c.radio.ref_loss_db},
        {"path_loss_exponent", c.radio.path_loss_exponent},
        {"wall_penetration_db", c.radio.wall_penetration_db},
        {"per_curve_midpoint_db", c.radio.per_curve_midpoint_db},
        {"per_curve_slope_db", c.radio.per_curve_slope_db}}},
      {"avoidance",
       {{"sector_count", c.avoidance.sector_count},
        {"threshold", c.avoidance.threshold},
        {"safety_margin_sectors", c.avoidance.safety_margin_sectors},
        {"ray_count", c.avoidance.ray_count},
        {"max_range_m", c.avoidance.max_range_m}}},
      {"planner",
       {{"replan_threshold_m", c.planner.replan_threshold_m},
        {"waypoint_lookahead", c.planner.waypoint_lookahead}}},
  };
}

json to_json(const SweepSpec& s) {
  json modes = json::array();
  for (Mode m : s.modes) modes.push_back(std::string(to_string(m)));
  return {{"modes", modes},
          {"agents", s.agents},
          {"runs", s.runs},
          {"seed_base", s.seed_base},
          {"out", s.out}};
}

std::string config_hash(const ScenarioConfig& config, const MapSpec& map) {
  json doc = to_json(config);
  doc.erase("seed");
  doc.erase("map");
  doc["map_spec"] = to_json(map);
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dtswarm
