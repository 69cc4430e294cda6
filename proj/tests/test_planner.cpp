#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "dtswarm/planner.hpp"

using namespace dtswarm;

namespace {

void check_path_shape(const WorldMap& map, const GridPath& path, Vec2 from) {
  REQUIRE_FALSE(path.empty());
  CHECK(path.points.front() == map.cell_center(map.cell_of(from)));
  for (std::size_t k = 0; k < path.cells.size(); ++k) {
    REQUIRE_FALSE(map.occupied(path.cells[k]));
    REQUIRE(path.points[k] == map.cell_center(path.cells[k]));
    if (k > 0) {
      const int dc = std::abs(path.cells[k].col - path.cells[k - 1].col);
      const int dr = std::abs(path.cells[k].row - path.cells[k - 1].row);
      REQUIRE(std::max(dc, dr) == 1);
    }
  }
}

}  // namespace

TEST_CASE("straight open row") {
  const WorldMap map = testing::open_map();
  const auto path = plan(map, {102.5, 102.5}, {152.5, 102.5});
  REQUIRE(path);
  CHECK(path->total_cost == doctest::Approx(50.0));
  CHECK(path->points.size() == 11);
  check_path_shape(map, *path, {102.5, 102.5});
}

TEST_CASE("the path threads a single gap in a wall at Dijkstra cost") {
  MapSpec spec = testing::open_spec();
  spec.obstacles.rects.push_back({150, 0, 155, 300});
  spec.obstacles.rects.push_back({150, 310, 155, 600});
  const WorldMap map = build_map(spec);
  const Vec2 from{100, 100}, to{250, 120};
  const auto path = plan(map, from, to);
  REQUIRE(path);
  check_path_shape(map, *path, from);
  CHECK(path->total_cost == doctest::Approx(testing::dijkstra_cost(map, map.cell_of(from), map.cell_of(to))));
  bool through_gap = false;
  for (const Cell& c : path->cells) through_gap |= (c.col == 30 && (c.row == 60 || c.row == 61));
  CHECK(through_gap);
}

TEST_CASE("a sealed room is unreachable") {
  MapSpec spec = testing::open_spec();
  spec.obstacles.rects.push_back({400, 400, 500, 405});
  spec.obstacles.rects.push_back({400, 495, 500, 500});
  spec.obstacles.rects.push_back({400, 400, 405, 500});
  spec.obstacles.rects.push_back({495, 400, 500, 500});
  spec.spawn_region.push_back({0, 0, 300, 300});
  const WorldMap map = build_map(spec);
  CHECK_FALSE(plan(map, {100, 100}, {450, 450}).has_value());
}

TEST_CASE("an occupied goal snaps to the nearest free cell") {
  MapSpec spec = testing::open_spec();
  spec.obstacles.rects.push_back({100, 100, 200, 200});
  const WorldMap map = build_map(spec);
  const auto path = plan(map, {50, 150}, {101, 150});
  REQUIRE(path);
  CHECK(path->cells.back() == Cell{19, 30});
  CHECK_THROWS_AS(plan(map, {150, 150}, {50, 50}), MapError);
}

TEST_CASE("A* equals Dijkstra on random 50 x 50 maps") {
  RandomStream rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const WorldMap map = testing::random_wall_map(rng);

    for (int q = 0; q < 5; ++q) {
      Vec2 from, to;
      do from = {rng.uniform(0, 250), rng.uniform(0, 250)}; while (!is_free(map, from));
      do to = {rng.uniform(0, 250), rng.uniform(0, 250)}; while (!is_free(map, to));
      const auto path = plan(map, from, to);
      const auto oracle = testing::dijkstra(map, map.cell_of(from), map.cell_of(to));
      REQUIRE(path.has_value() == oracle.reachable());
      if (!path) continue;
      ++solved;
      REQUIRE(path->orthogonal_steps == oracle.orthogonal);
      REQUIRE(path->diagonal_steps == oracle.diagonal);
      REQUIRE(path->total_cost == oracle.meters);
      REQUIRE(testing::octile_within(map.cell_of(from), map.cell_of(to), path->orthogonal_steps,
                                     path->diagonal_steps));
      REQUIRE(path->cells.back() == map.cell_of(to));
      check_path_shape(map, *path, from);
    }
  }
  CHECK(solved > 200);
}

TEST_CASE("octile distance matches the step-count form") {
  CHECK(octile_distance({0, 0}, {3, 1}, 5.0) == doctest::Approx(5.0 * (2 + 1.4142135623730951)));
  CHECK(testing::octile_within({0, 0}, {3, 1}, 2, 1));
  CHECK_FALSE(testing::octile_within({0, 0}, {3, 1}, 3, 0));
  CHECK(testing::octile_within({0, 0}, {3, 1}, 4, 0));
}

TEST_CASE("next_waypoint on a straight path is one cell ahead") {
  const WorldMap map = testing::open_map();
  const auto path = plan(map, {102.5, 102.5}, {152.5, 102.5});
  REQUIRE(path);
  const auto wp = next_waypoint(map, *path, {102.5, 102.5}, 5.0);
  REQUIRE(wp);
  CHECK(wp->point.x == doctest::Approx(107.5));
  CHECK(wp->point.y == doctest::Approx(102.5));
  CHECK(wp->path_index == 10);
}

TEST_CASE("next_waypoint around a corner stays clear and capped") {
  MapSpec spec = testing::open_spec();
  spec.obstacles.rects.push_back({100, 100, 200, 200});
  const WorldMap map = build_map(spec);
  const Vec2 from{150, 95};
  const auto path = plan(map, from, {215, 150});
  REQUIRE(path);
  Vec2 pos = from;
  std::size_t progress = 0;
  for (int step = 0; step < 60 && distance(pos, path->points.back()) > 1e-9; ++step) {
    const auto wp = next_waypoint(map, *path, pos, 5.0, progress);
    REQUIRE(wp);
    REQUIRE(segment_clear(map, pos, wp->point));
    REQUIRE(distance(pos, wp->point) <= 5.0 + 1e-9);
    pos = wp->point;
    if (distance(pos, path->points[wp->path_index]) < 1e-9) progress = wp->path_index;
  }
  CHECK(distance(pos, path->points.back()) < 1e-9);
}

TEST_CASE("next_waypoint on a single-point path returns the start") {
  const WorldMap map = testing::open_map();
  const auto path = plan(map, {52.5, 52.5}, {53, 53});
  REQUIRE(path);
  REQUIRE(path->points.size() == 1);
  const auto wp = next_waypoint(map, *path, {52.5, 52.5}, 5.0);
  REQUIRE(wp);
  CHECK(wp->point == Vec2{52.5, 52.5});
}
