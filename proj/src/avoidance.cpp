#include "dtswarm/avoidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtswarm {

void AvoidanceParams::validate() const {
  if (sector_count < 3) throw std::invalid_argument("avoidance.sector_count >= 3");
  if (!(threshold >= 0.0)) throw std::invalid_argument("avoidance.threshold >= 0");
  if (safety_margin_sectors < 0 || 2 * safety_margin_sectors + 1 > sector_count) {
    throw std::invalid_argument("avoidance.safety_margin_sectors in [0, (sector_count - 1) / 2]");
  }
  if (ray_count < 8) throw std::invalid_argument("avoidance.ray_count >= 8");
  if (!(max_range_m > 0.0)) throw std::invalid_argument("avoidance.max_range_m > 0");
}

double PolarHistogram::sector_width() const { return kTwoPi / sector_count; }

bool PolarHistogram::blocked(int sector) const {
  const int s = ((sector % sector_count) + sector_count) % sector_count;
  return density[static_cast<std::size_t>(s)] > threshold;
}

int PolarHistogram::sector_of(double heading) const {
  // The epsilon keeps headings generated as k * width in sector k.
  const int s = static_cast<int>(std::floor(wrap_angle(heading) / sector_width() + 1e-9));
  return ((s % sector_count) + sector_count) % sector_count;
}

PolarHistogram build_histogram(const RangeScan& scan, int sector_count, double threshold) {
  PolarHistogram hist;
  hist.sector_count = sector_count;
  hist.threshold = threshold;
  hist.density.assign(static_cast<std::size_t>(sector_count), 0.0);
  for (std::size_t k = 0; k < scan.ray_count(); ++k) {
    const double contribution =
        std::max(0.0, (scan.max_range - scan.distances[k]) / scan.max_range);
    auto& d = hist.density[static_cast<std::size_t>(hist.sector_of(scan.headings[k]))];
    d = std::max(d, contribution);
  }
  return hist;
}

std::optional<double> select_heading(const PolarHistogram& hist, double desired,
                                     int safety_margin_sectors) {
  const auto safe = [&](int s) {
    for (int k = -safety_margin_sectors; k <= safety_margin_sectors; ++k) {
      if (hist.blocked(s + k)) return false;
    }
    return true;
  };
  const int origin = hist.sector_of(desired);
  if (safe(origin)) return desired;
  const double width = hist.sector_width();
  for (int k = 1; k <= hist.sector_count / 2; ++k) {
    if (safe(origin + k)) return wrap_angle(desired + k * width);
    if (safe(origin - k)) return wrap_angle(desired - k * width);
  }
  return std::nullopt;
}

}  // namespace dtswarm
