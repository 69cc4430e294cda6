#pragma once

#include <iosfwd>
#include <vector>

#include "dtswarm/environment.hpp"
#include "dtswarm/geometry.hpp"
#include "dtswarm/rng.hpp"

namespace dtswarm {

/// Log-distance path loss with a per-wall penalty, mapped to packet error
/// rate through a logistic curve.
struct RadioParams {
  double ref_loss_db = 40.0;
  double path_loss_exponent = 3.0;
  /// Added once per contiguous run of obstacle cells on the line of sight.
  double wall_penetration_db = 8.0;
  double per_curve_midpoint_db = 110.0;
  /// Logistic scale in dB.
  double per_curve_slope_db = 6.0;

  /// Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

/// Per-cell packet error rate over the map grid.
class RadioField {
 public:
  RadioField() = default;
  RadioField(int cols, int rows, double cell_size, std::vector<double> per);

  /// Same PER in every cell.
  static RadioField uniform(const WorldMap& map, double per);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double cell_size() const { return cell_size_; }
  const std::vector<double>& values() const { return per_; }

  double per(Cell c) const { return per_[index(c)]; }
  /// PER of the cell containing p; p must be in bounds.
  double per_at(Vec2 p) const;

  /// Used to pin individual cells in controlled experiments.
  void set_per(Cell c, double per);

  double min() const;
  double max() const;

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }

  int cols_ = 0;
  int rows_ = 0;
  double cell_size_ = 1.0;
  std::vector<double> per_;
};

/// Number of distinct obstacle runs crossed by the straight line a->b.
int count_obstacle_runs(const WorldMap& map, Vec2 a, Vec2 b);

double path_loss(const WorldMap& map, const RadioParams& params, Vec2 p);

/// Logistic loss-to-PER curve.
double per_from_loss(const RadioParams& params, double loss_db);

/// Evaluates PER at every cell center.
RadioField compute_field(const WorldMap& map, const RadioParams& params);

/// One Bernoulli transmission attempt at p; consumes exactly one draw.
bool try_transmit(const RadioField& field, Vec2 p, RandomStream& rng);

/// Long-format CSV: col,row,x_m,y_m,per (one line per cell, row-major).
void write_field_csv(const RadioField& field, std::ostream& out);

}  // namespace dtswarm
