#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtswarm/geometry.hpp"
#include "dtswarm/rng.hpp"

namespace dtswarm {

/// Axis-aligned rectangle in meters.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct ObstacleSpec {
  std::vector<Rect> rects;
};

/// Everything needed to build a WorldMap. This is what the map file holds.
struct MapSpec {
  double width_m = 600.0;
  double height_m = 600.0;
  double cell_size_m = 5.0;
  ObstacleSpec obstacles;
  Vec2 target;
  Vec2 base_station;
  /// Rectangles whose free cells may host spawns. Empty means the whole map.
  std::vector<Rect> spawn_region;
};

class MapError : public std::runtime_error {
 public:
  enum class Kind {
    kInvalidSpec,
    kTargetInsideObstacle,
    kBaseStationInsideObstacle,
    kDisconnectedMap,
    kOriginOccupied,
  };

  MapError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Static occupancy grid with the target and the base station. Immutable once
/// built; safe to share between concurrent runs.
class WorldMap {
 public:
  double width() const { return width_; }
  double height() const { return height_; }
  double cell_size() const { return cell_size_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  Vec2 target() const { return target_; }
  Vec2 base_station() const { return base_station_; }
  const std::vector<Cell>& spawn_cells() const { return spawn_cells_; }
  const MapSpec& spec() const { return spec_; }

  bool in_bounds(Vec2 p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x < width_ && p.y < height_; }
  bool in_grid(Cell c) const { return c.col >= 0 && c.row >= 0 && c.col < cols_ && c.row < rows_; }

  /// Cell containing p. p must be in bounds.
  Cell cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_)),
            static_cast<int>(std::floor(p.y / cell_size_))};
  }

  Vec2 cell_center(Cell c) const {
    return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
  }

  /// Out-of-grid cells count as occupied.
  bool occupied(Cell c) const { return !in_grid(c) || occupancy_[index(c)] != 0; }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }

  std::size_t obstacle_cell_count() const;

  /// Clamps p into the half-open map rectangle.
  Vec2 clamp(Vec2 p) const;

  friend WorldMap build_map(const MapSpec& spec);

 private:
  MapSpec spec_;
  double width_ = 0.0;
  double height_ = 0.0;
  double cell_size_ = 0.0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<std::uint8_t> occupancy_;
  Vec2 target_;
  Vec2 base_station_;
  std::vector<Cell> spawn_cells_;
};

/// Rasterizes obstacles (a cell is blocked when its center lies inside any
/// rectangle) and validates target, base station and spawn connectivity.
/// Throws MapError.
WorldMap build_map(const MapSpec& spec);

/// Convenience overload for a 600 x 600 m map with the whole map as spawn region.
WorldMap build_map(const ObstacleSpec& obstacles, Vec2 target, Vec2 base_station,
                   double cell_size = 5.0);

bool is_free(const WorldMap& map, Vec2 p);

/// True iff every cell touched by the segment (supercover) is free.
bool segment_clear(const WorldMap& map, Vec2 a, Vec2 b);

/// Calls visit(cell, corner_extra) for each cell of the supercover of a->b in
/// traversal order. corner_extra marks the two side cells added when the
/// segment passes exactly through a grid corner. visit returns false to stop.
template <typename Visit>
void for_each_supercover_cell(double cell_size, Vec2 a, Vec2 b, Visit&& visit) {
  const double ax = a.x / cell_size;
  const double ay = a.y / cell_size;
  const double bx = b.x / cell_size;
  const double by = b.y / cell_size;
  int cx = static_cast<int>(std::floor(ax));
  int cy = static_cast<int>(std::floor(ay));
  const int ex = static_cast<int>(std::floor(bx));
  const int ey = static_cast<int>(std::floor(by));
  const double dx = bx - ax;
  const double dy = by - ay;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double kInf = 1e300;
  const double t_delta_x = step_x != 0 ? 1.0 / std::abs(dx) : kInf;
  const double t_delta_y = step_y != 0 ? 1.0 / std::abs(dy) : kInf;
  double t_max_x = kInf;
  double t_max_y = kInf;
  if (step_x > 0) t_max_x = (cx + 1 - ax) / dx;
  if (step_x < 0) t_max_x = (cx - ax) / dx;
  if (step_y > 0) t_max_y = (cy + 1 - ay) / dy;
  if (step_y < 0) t_max_y = (cy - ay) / dy;

  constexpr double kTie = 1e-12;
  if (!visit(Cell{cx, cy}, false)) return;
  while (cx != ex || cy != ey) {
    if (std::min(t_max_x, t_max_y) > 1.0 + kTie) break;
    if (std::abs(t_max_x - t_max_y) <= kTie) {
      if (!visit(Cell{cx + step_x, cy}, true)) return;
      if (!visit(Cell{cx, cy + step_y}, true)) return;
      cx += step_x;
      cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      cx += step_x;
      t_max_x += t_delta_x;
    } else {
      cy += step_y;
      t_max_y += t_delta_y;
    }
    if (!visit(Cell{cx, cy}, false)) return;
  }
}

/// Noisy distance-to-target sensor. Obstacles do not attenuate it.
double sense_distance(Vec2 agent_pos, Vec2 target, double sigma, RandomStream& rng);

struct RangeScan {
  Vec2 origin;
  double max_range = 0.0;
  std::vector<double> headings;
  std::vector<double> distances;

  std::size_t ray_count() const { return distances.size(); }
};

/// Ray-marches ray_count evenly spaced rays (first ray at heading 0). The map
/// boundary counts as an obstacle. Throws MapError(kOriginOccupied).
RangeScan range_scan(const WorldMap& map, Vec2 pos, int ray_count, double max_range);

}  // namespace dtswarm
