#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>

#include "dtswarm/config.hpp"
#include "dtswarm/engine.hpp"

namespace dtswarm {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column order of summary.csv. Fixed; figures depend on it.
inline constexpr const char* kSummaryHeader =
    "mode,n_agents,run,seed,converged,rounds,total_moves,uplink,downlink,"
    "assistance_requests,convergence_fraction,convergence_radius_m,config_hash";

/// Column order of timeseries.csv (one row per run and round).
inline constexpr const char* kTimeseriesHeader =
    "mode,n_agents,run,round,uplink,downlink,cumulative_uplink,cumulative_downlink,"
    "assistance_requests,moves,arrived,convergence_fraction,swarm_best_dist_m";

void write_summary_row(std::ostream& out, const RunMetrics& m, int run, double convergence_radius,
                       const std::string& hash);
void write_timeseries_rows(std::ostream& out, const RunMetrics& m, int run);

struct SweepOptions {
  int jobs = 1;
  bool write_timeseries = true;
  /// Progress lines; may be null.
  std::ostream* progress = nullptr;
  /// Called once per run in (mode, n, run) order, after its rows are written.
  std::function<void(const RunMetrics&, int run)> on_run;
};

/// Runs every (mode, n, run) cell. Writes summary.csv, timeseries.csv and
/// effective_config.json into sweep.out. Rows are flushed as soon as they are
/// next in order, so an aborted sweep leaves a valid prefix. Returns the
/// number of summary rows. Throws IoError.
std::size_t run_sweep(std::shared_ptr<const World> world, const ScenarioConfig& scenario,
                      const SweepSpec& sweep, const SweepOptions& options = {});

}  // namespace dtswarm
