#include "dtswarm/radio.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dtswarm {

void RadioParams::validate() const {
  if (!(path_loss_exponent >= 2.0)) {
    throw std::invalid_argument("radio.path_loss_exponent >= 2");
  }
  if (!(wall_penetration_db >= 0.0)) {
    throw std::invalid_argument("radio.wall_penetration_db >= 0");
  }
  if (!(per_curve_slope_db > 0.0)) {
    throw std::invalid_argument("radio.per_curve_slope_db > 0");
  }
  if (!std::isfinite(ref_loss_db) || !std::isfinite(per_curve_midpoint_db)) {
    throw std::invalid_argument("radio.ref_loss_db and radio.per_curve_midpoint_db must be finite");
  }
}

RadioField::RadioField(int cols, int rows, double cell_size, std::vector<double> per)
    : cols_(cols), rows_(rows), cell_size_(cell_size), per_(std::move(per)) {
  if (per_.size() != static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("radio field size does not match grid dimensions");
  }
  for (double v : per_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("PER must lie in [0, 1]");
  }
}

RadioField RadioField::uniform(const WorldMap& map, double per) {
  return RadioField(map.cols(), map.rows(), map.cell_size(),
                    std::vector<double>(static_cast<std::size_t>(map.cols()) * map.rows(), per));
}

double RadioField::per_at(Vec2 p) const {
  const int col = std::clamp(static_cast<int>(std::floor(p.x / cell_size_)), 0, cols_ - 1);
  const int row = std::clamp(static_cast<int>(std::floor(p.y / cell_size_)), 0, rows_ - 1);
  return per_[index({col, row})];
}

void RadioField::set_per(Cell c, double per) {
  if (!(per >= 0.0 && per <= 1.0)) throw std::invalid_argument("PER must lie in [0, 1]");
  per_[index(c)] = per;
}

double RadioField::min() const { return *std::min_element(per_.begin(), per_.end()); }
double RadioField::max() const { return *std::max_element(per_.begin(), per_.end()); }

int count_obstacle_runs(const WorldMap& map, Vec2 a, Vec2 b) {
  int runs = 0;
  bool inside = false;
  for_each_supercover_cell(map.cell_size(), a, b, [&](Cell c, bool corner_extra) {
    if (corner_extra) return true;
    const bool blocked = map.occupied(c);
    if (blocked && !inside) ++runs;
    inside = blocked;
    return true;
  });
  return runs;
}

double path_loss(const WorldMap& map, const RadioParams& params, Vec2 p) {
  const double d = std::max(distance(map.base_station(), p), 1.0);
  return params.ref_loss_db + 10.0 * params.path_loss_exponent * std::log10(d) +
         params.wall_penetration_db * count_obstacle_runs(map, map.base_station(), p);
}

double per_from_loss(const RadioParams& params, double loss_db) {
  return 1.0 / (1.0 + std::exp(-(loss_db - params.per_curve_midpoint_db) /
                               params.per_curve_slope_db));
}

RadioField compute_field(const WorldMap& map, const RadioParams& params) {
  params.validate();
  std::vector<double> per(static_cast<std::size_t>(map.cols()) * map.rows());
  for (int row = 0; row < map.rows(); ++row) {
    for (int col = 0; col < map.cols(); ++col) {
      const Cell c{col, row};
      per[map.index(c)] = per_from_loss(params, path_loss(map, params, map.cell_center(c)));
    }
  }
  return RadioField(map.cols(), map.rows(), map.cell_size(), std::move(per));
}

bool try_transmit(const RadioField& field, Vec2 p, RandomStream& rng) {
  return rng.uniform() >= field.per_at(p);
}

void write_field_csv(const RadioField& field, std::ostream& out) {
  out << "col,row,x_m,y_m,per\n";
  const auto old_precision = out.precision(10);
  for (int row = 0; row < field.rows(); ++row) {
    for (int col = 0; col < field.cols(); ++col) {
      out << col << ',' << row << ',' << (col + 0.5) * field.cell_size() << ','
          << (row + 0.5) * field.cell_size() << ',' << field.per({col, row}) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace dtswarm
