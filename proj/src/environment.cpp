#include "dtswarm/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace dtswarm {

namespace {

bool valid_rect(const Rect& r, double width, double height) {
  return r.x_min < r.x_max && r.y_min < r.y_max && r.x_min >= 0.0 && r.y_min >= 0.0 &&
         r.x_max <= width && r.y_max <= height;
}

std::string describe(const Rect& r) {
  std::ostringstream os;
  os << "(" << r.x_min << ", " << r.y_min << ", " << r.x_max << ", " << r.y_max << ")";
  return os.str();
}

}  // namespace

std::size_t WorldMap::obstacle_cell_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1));
}

Vec2 WorldMap::clamp(Vec2 p) const {
  return {std::clamp(p.x, 0.0, std::nextafter(width_, 0.0)),
          std::clamp(p.y, 0.0, std::nextafter(height_, 0.0))};
}

WorldMap build_map(const MapSpec& spec) {
  using Kind = MapError::Kind;
  if (!(spec.width_m > 0.0) || !(spec.height_m > 0.0) || !(spec.cell_size_m > 0.0)) {
    throw MapError(Kind::kInvalidSpec, "map width, height and cell_size must be positive");
  }
  for (const Rect& r : spec.obstacles.rects) {
    if (!valid_rect(r, spec.width_m, spec.height_m)) {
      throw MapError(Kind::kInvalidSpec,
                     "obstacle " + describe(r) + " is degenerate or out of bounds");
    }
  }
  for (const Rect& r : spec.spawn_region) {
    if (!valid_rect(r, spec.width_m, spec.height_m)) {
      throw MapError(Kind::kInvalidSpec,
                     "spawn rectangle " + describe(r) + " is degenerate or out of bounds");
    }
  }

  WorldMap map;
  map.spec_ = spec;
  map.width_ = spec.width_m;
  map.height_ = spec.height_m;
  map.cell_size_ = spec.cell_size_m;
  map.cols_ = static_cast<int>(std::ceil(spec.width_m / spec.cell_size_m - 1e-9));
  map.rows_ = static_cast<int>(std::ceil(spec.height_m / spec.cell_size_m - 1e-9));
  map.target_ = spec.target;
  map.base_station_ = spec.base_station;
  map.occupancy_.assign(static_cast<std::size_t>(map.cols_) * map.rows_, 0);

  for (int row = 0; row < map.rows_; ++row) {
    for (int col = 0; col < map.cols_; ++col) {
      const Vec2 c = map.cell_center({col, row});
      const bool blocked = std::any_of(spec.obstacles.rects.begin(), spec.obstacles.rects.end(),
                                       [&](const Rect& r) { return r.contains(c); });
      map.occupancy_[map.index({col, row})] = blocked ? 1 : 0;
    }
  }

  const auto inside_any = [&](Vec2 p) {
    return std::any_of(spec.obstacles.rects.begin(), spec.obstacles.rects.end(),
                       [&](const Rect& r) { return r.contains(p); });
  };
  if (!map.in_bounds(spec.target) || inside_any(spec.target) ||
      map.occupied(map.cell_of(spec.target))) {
    throw MapError(Kind::kTargetInsideObstacle, "target lies inside an obstacle or off the map");
  }
  if (!map.in_bounds(spec.base_station) || inside_any(spec.base_station) ||
      map.occupied(map.cell_of(spec.base_station))) {
    throw MapError(Kind::kBaseStationInsideObstacle,
                   "base station lies inside an obstacle or off the map");
  }

  for (int row = 0; row < map.rows_; ++row) {
    for (int col = 0; col < map.cols_; ++col) {
      const Cell cell{col, row};
      if (map.occupied(cell)) continue;
      const Vec2 c = map.cell_center(cell);
      const bool in_region =
          spec.spawn_region.empty() ||
          std::any_of(spec.spawn_region.begin(), spec.spawn_region.end(),
                      [&](const Rect& r) { return r.contains(c); });
      if (in_region) map.spawn_cells_.push_back(cell);
    }
  }
  if (map.spawn_cells_.empty()) {
    throw MapError(Kind::kInvalidSpec, "spawn region contains no free cell");
  }

  // Flood fill from the target over 4-neighbors; this is exactly the set of
  // cells reachable under 8-connectivity without corner cutting.
  std::vector<std::uint8_t> reached(map.occupancy_.size(), 0);
  std::deque<Cell> frontier{map.cell_of(spec.target)};
  reached[map.index(frontier.front())] = 1;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell n{c.col + d.col, c.row + d.row};
      if (map.occupied(n) || reached[map.index(n)]) continue;
      reached[map.index(n)] = 1;
      frontier.push_back(n);
    }
  }
  for (const Cell& c : map.spawn_cells_) {
    if (!reached[map.index(c)]) {
      std::ostringstream os;
      os << "spawn cell (" << c.col << ", " << c.row << ") has no free path to the target";
      throw MapError(Kind::kDisconnectedMap, os.str());
    }
  }
  return map;
}

WorldMap build_map(const ObstacleSpec& obstacles, Vec2 target, Vec2 base_station,
                   double cell_size) {
  MapSpec spec;
  spec.cell_size_m = cell_size;
  spec.obstacles = obstacles;
  spec.target = target;
  spec.base_station = base_station;
  return build_map(spec);
}

bool is_free(const WorldMap& map, Vec2 p) {
  return map.in_bounds(p) && !map.occupied(map.cell_of(p));
}

bool segment_clear(const WorldMap& map, Vec2 a, Vec2 b) {
  bool clear = true;
  for_each_supercover_cell(map.cell_size(), a, b, [&](Cell c, bool) {
    if (map.occupied(c)) clear = false;
    return clear;
  });
  return clear;
}

double sense_distance(Vec2 agent_pos, Vec2 target, double sigma, RandomStream& rng) {
  const double noise = sigma * rng.normal();
  return std::max(0.0, distance(agent_pos, target) + noise);
}

RangeScan range_scan(const WorldMap& map, Vec2 pos, int ray_count, double max_range) {
  if (!is_free(map, pos)) {
    throw MapError(MapError::Kind::kOriginOccupied, "range scan origin is not a free cell");
  }
  if (ray_count < 8 || !(max_range > 0.0)) {
    throw MapError(MapError::Kind::kInvalidSpec, "range scan needs >= 8 rays and positive range");
  }
  RangeScan scan;
  scan.origin = pos;
  scan.max_range = max_range;
  scan.headings.resize(static_cast<std::size_t>(ray_count));
  scan.distances.resize(static_cast<std::size_t>(ray_count));

  const double step = map.cell_size() / 4.0;
  const int samples = static_cast<int>(std::ceil(max_range / step));
  for (int k = 0; k < ray_count; ++k) {
    const double heading = kTwoPi * k / ray_count;
    const Vec2 dir = unit_from_heading(heading);
    double hit = max_range;
    for (int s = 1; s <= samples; ++s) {
      const double t = std::min(s * step, max_range);
      if (!is_free(map, pos + dir * t)) {
        hit = t;
        break;
      }
    }
    scan.headings[static_cast<std::size_t>(k)] = heading;
    scan.distances[static_cast<std::size_t>(k)] = hit;
  }
  return scan;
}

}  // namespace dtswarm
