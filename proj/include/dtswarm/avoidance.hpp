#pragma once

#include <optional>
#include <vector>

#include "dtswarm/environment.hpp"

namespace dtswarm {

struct AvoidanceParams {
  int sector_count = 36;
  double threshold = 0.6;
  int safety_margin_sectors = 1;
  int ray_count = 72;
  double max_range_m = 30.0;

  void validate() const;
};

/// Single-stage VFH polar histogram. Sector s covers headings
/// [s * width, (s + 1) * width).
struct PolarHistogram {
  int sector_count = 0;
  double threshold = 0.0;
  std::vector<double> density;

  double sector_width() const;
  bool blocked(int sector) const;
  int sector_of(double heading) const;
};

/// Each ray contributes (max_range - distance) / max_range to its sector; a
/// sector keeps the maximum contribution.
PolarHistogram build_histogram(const RangeScan& scan, int sector_count, double threshold = 0.6);

/// Keeps the desired heading when its sector and the margin neighbors are
/// open. Otherwise rotates it by the smallest whole number of sectors that
/// lands in a sector whose margin neighbors are all open (counterclockwise on
/// ties). Empty when no such sector exists.
std::optional<double> select_heading(const PolarHistogram& hist, double desired,
                                     int safety_margin_sectors);

}  // namespace dtswarm
