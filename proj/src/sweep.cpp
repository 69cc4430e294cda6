#include "dtswarm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

namespace dtswarm {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Task {
  Mode mode;
  int n_agents;
  int run;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_summary_row(std::ostream& out, const RunMetrics& m, int run, double convergence_radius,
                       const std::string& hash) {
  out << to_string(m.mode) << ',' << m.n_agents << ',' << run << ',' << m.seed << ','
      << (m.converged ? 1 : 0) << ',' << m.rounds_used << ',' << m.total_moves << ','
      << m.uplink_attempts << ',' << m.downlink_attempts << ',' << m.assistance_requests << ','
      << fixed6(m.final_convergence_fraction) << ',' << fixed6(convergence_radius) << ',' << hash
      << '\n';
}

void write_timeseries_rows(std::ostream& out, const RunMetrics& m, int run) {
  for (const RoundRecord& r : m.series) {
    out << to_string(m.mode) << ',' << m.n_agents << ',' << run << ',' << r.round << ','
        << r.traffic.uplink_attempts << ',' << r.traffic.downlink_attempts << ','
        << r.cumulative_uplink << ',' << r.cumulative_downlink << ','
        << r.traffic.assistance_requests << ',' << r.moves << ',' << r.arrived << ','
        << fixed6(r.convergence_fraction) << ',' << fixed6(r.swarm_best_dist) << '\n';
  }
}

std::size_t run_sweep(std::shared_ptr<const World> world, const ScenarioConfig& scenario,
                      const SweepSpec& sweep, const SweepOptions& options) {
  sweep.validate();
  const std::filesystem::path out_dir(sweep.out);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  {
    std::ofstream cfg = open_output(out_dir / "effective_config.json");
    nlohmann::json doc = to_json(scenario);
    doc["sweep"] = to_json(sweep);
    cfg << doc.dump(2) << '\n';
  }
  std::ofstream summary = open_output(out_dir / "summary.csv");
  summary << kSummaryHeader << '\n';
  std::optional<std::ofstream> series;
  if (options.write_timeseries) {
    series.emplace(open_output(out_dir / "timeseries.csv"));
    *series << kTimeseriesHeader << '\n';
  }

  std::vector<Task> tasks;
  for (Mode mode : sweep.modes) {
    for (int n : sweep.agents) {
      for (int run = 0; run < sweep.runs; ++run) tasks.push_back({mode, n, run});
    }
  }
  const auto config_for = [&](const Task& t) {
    ScenarioConfig c = scenario;
    c.mode = t.mode;
    c.n_agents = t.n_agents;
    c.seed = run_seed(sweep.seed_base, static_cast<std::uint64_t>(t.run));
    return c;
  };

  std::vector<std::optional<RunMetrics>> slots(tasks.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::exception_ptr failure;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        RunMetrics m = run_scenario(world, config_for(tasks[i]));
        std::lock_guard lock(mutex);
        slots[i] = std::move(m);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
      ready.notify_all();
    }
  };

  const int threads = std::clamp(options.jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::jthread> pool;
  if (threads > 1) {
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::string hash;
  std::pair<Mode, int> hash_key{Mode::kP2P, -1};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    if (threads == 1) {
      try {
        slots[i] = run_scenario(world, config_for(t));
      } catch (...) {
        failure = std::current_exception();
      }
    } else {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[i].has_value() || failure != nullptr; });
    }
    if (!slots[i]) break;
    RunMetrics m = std::move(*slots[i]);
    slots[i].reset();

    if (hash_key != std::pair{t.mode, t.n_agents}) {
      hash_key = {t.mode, t.n_agents};
      hash = config_hash(config_for(t), world->map.spec());
    }
    write_summary_row(summary, m, t.run, scenario.convergence_radius_m, hash);
    summary.flush();
    if (series) {
      write_timeseries_rows(*series, m, t.run);
      series->flush();
    }
    if (!summary || (series && !*series)) throw IoError("write to '" + out_dir.string() + "' failed");
    if (options.progress) {
      *options.progress << "[" << (i + 1) << "/" << tasks.size() << "] " << to_string(t.mode)
                        << " n=" << t.n_agents << " run=" << t.run << " "
                        << (m.converged ? "converged" : "not converged") << " after "
                        << m.rounds_used << " rounds\n";
    }
    if (options.on_run) options.on_run(m, t.run);
  }
  {
    std::lock_guard lock(mutex);
    next = tasks.size();
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return tasks.size();
}

}  // namespace dtswarm
