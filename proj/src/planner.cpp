#include "dtswarm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace dtswarm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Neighbor {
  int dcol;
  int drow;
  bool diagonal;
};

constexpr Neighbor kNeighbors[] = {
    {1, 0, false}, {-1, 0, false}, {0, 1, false},  {0, -1, false},
    {1, 1, true},  {-1, 1, true},  {1, -1, true},  {-1, -1, true},
};

struct OpenEntry {
  double f;
  double h;
  std::size_t index;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return index > o.index;
  }
};

}  // namespace

double octile_distance(Cell a, Cell b, double cell_size) {
  const int dx = std::abs(a.col - b.col);
  const int dy = std::abs(a.row - b.row);
  return cell_size * (std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy));
}

std::optional<Cell> nearest_free_cell(const WorldMap& map, Vec2 p) {
  const Vec2 q = map.clamp(p);
  const Cell origin = map.cell_of(q);
  if (!map.occupied(origin)) return origin;
  // Rings of growing Chebyshev radius; a ring at radius r cannot beat the best
  // found so far once r - 1 exceeds its Euclidean distance in cells.
  std::optional<Cell> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const int max_r = std::max(map.cols(), map.rows());
  for (int r = 1; r <= max_r; ++r) {
    if (best && (r - 1) * (r - 1) > best_d2) break;
    for (int row = origin.row - r; row <= origin.row + r; ++row) {
      for (int col = origin.col - r; col <= origin.col + r; ++col) {
        if (std::max(std::abs(row - origin.row), std::abs(col - origin.col)) != r) continue;
        const Cell c{col, row};
        if (map.occupied(c)) continue;
        const double d2 = static_cast<double>((col - origin.col) * (col - origin.col) +
                                              (row - origin.row) * (row - origin.row));
        if (!best || d2 < best_d2 ||
            (d2 == best_d2 && (row < best->row || (row == best->row && col < best->col)))) {
          best = c;
          best_d2 = d2;
        }
      }
    }
  }
  return best;
}

std::optional<GridPath> plan(const WorldMap& map, Vec2 from, Vec2 to) {
  if (!is_free(map, from)) {
    throw MapError(MapError::Kind::kOriginOccupied, "planner start is not a free cell");
  }
  const Cell start = map.cell_of(from);
  const auto goal_opt = nearest_free_cell(map, to);
  if (!goal_opt) return std::nullopt;
  const Cell goal = *goal_opt;
  const double cs = map.cell_size();

  const std::size_t n = static_cast<std::size_t>(map.cols()) * map.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  const std::size_t start_i = map.index(start);
  const std::size_t goal_i = map.index(goal);
  g[start_i] = 0.0;
  const double h0 = octile_distance(start, goal, cs);
  open.push({h0, h0, start_i});

  const auto cell_at = [&](std::size_t i) {
    return Cell{static_cast<int>(i % static_cast<std::size_t>(map.cols())),
                static_cast<int>(i / static_cast<std::size_t>(map.cols()))};
  };

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == goal_i) {
      found = true;
      break;
    }
    const Cell c = cell_at(top.index);
    for (const Neighbor& nb : kNeighbors) {
      const Cell next{c.col + nb.dcol, c.row + nb.drow};
      if (map.occupied(next)) continue;
      if (nb.diagonal && (map.occupied({c.col + nb.dcol, c.row}) ||
                          map.occupied({c.col, c.row + nb.drow}))) {
        continue;
      }
      const std::size_t ni = map.index(next);
      if (closed[ni]) continue;
      const double tentative = g[top.index] + (nb.diagonal ? kSqrt2 * cs : cs);
      if (tentative < g[ni]) {
        g[ni] = tentative;
        parent[ni] = top.index;
        const double h = octile_distance(next, goal, cs);
        open.push({tentative + h, h, ni});
      }
    }
  }
  if (!found) return std::nullopt;

  GridPath path;
  for (std::size_t i = goal_i; i != n; i = parent[i]) {
    path.cells.push_back(cell_at(i));
    if (i == start_i) break;
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.points.reserve(path.cells.size());
  for (std::size_t k = 0; k < path.cells.size(); ++k) {
    path.points.push_back(map.cell_center(path.cells[k]));
    if (k > 0) {
      const bool diagonal = path.cells[k].col != path.cells[k - 1].col &&
                            path.cells[k].row != path.cells[k - 1].row;
      ++(diagonal ? path.diagonal_steps : path.orthogonal_steps);
    }
  }
  path.total_cost = cs * (path.orthogonal_steps + kSqrt2 * path.diagonal_steps);
  return path;
}

std::optional<Waypoint> next_waypoint(const WorldMap& map, const GridPath& path, Vec2 from,
                                      double v_max, std::size_t progress,
                                      std::size_t max_lookahead) {
  if (path.points.empty() || progress >= path.points.size()) return std::nullopt;
  std::optional<std::size_t> chosen;
  const std::size_t last = std::min(path.points.size() - 1, progress + max_lookahead);
  for (std::size_t i = last + 1; i-- > progress;) {
    if (segment_clear(map, from, path.points[i])) {
      chosen = i;
      break;
    }
  }
  if (!chosen) return std::nullopt;
  Vec2 target = path.points[*chosen];
  const double d = distance(from, target);
  if (d > v_max) target = from + (target - from) * (v_max / d);
  return Waypoint{target, *chosen};
}

}  // namespace dtswarm
