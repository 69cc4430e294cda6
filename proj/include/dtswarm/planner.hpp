#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dtswarm/environment.hpp"

namespace dtswarm {

/// Cell-center path on the 8-connected free grid.
struct GridPath {
  std::vector<Cell> cells;
  std::vector<Vec2> points;
  int orthogonal_steps = 0;
  int diagonal_steps = 0;
  /// Octile length in meters.
  double total_cost = 0.0;

  bool empty() const { return points.empty(); }
};

/// Octile distance between two cells, in meters.
double octile_distance(Cell a, Cell b, double cell_size);

/// Nearest free cell to p by Euclidean distance between cell centers (ties:
/// lowest row, then lowest column). Empty when the map has no free cell.
std::optional<Cell> nearest_free_cell(const WorldMap& map, Vec2 p);

/// A* from the cell of `from` to the cell of `to` (snapped to the nearest
/// free cell when occupied). Diagonal moves cost sqrt(2) * cell_size and are
/// forbidden when either orthogonal neighbor is blocked. Empty when the goal
/// is unreachable. Throws MapError(kOriginOccupied) when `from` is not free.
std::optional<GridPath> plan(const WorldMap& map, Vec2 from, Vec2 to);

/// Farthest of the path points progress .. progress + max_lookahead that is
/// reachable from `from` by a clear straight segment, pulled back along the
/// segment so the step is at most v_max. Empty when none is visible.
struct Waypoint {
  Vec2 point;
  std::size_t path_index = 0;
};
std::optional<Waypoint> next_waypoint(const WorldMap& map, const GridPath& path, Vec2 from,
                                      double v_max, std::size_t progress = 0,
                                      std::size_t max_lookahead = 32);

}  // namespace dtswarm
