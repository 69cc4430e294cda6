#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "dtswarm/engine.hpp"

namespace dtswarm {

Stats summarize(std::span<const double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.stdev = s.ci_low = s.ci_high = nan;
    return s;
  }
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) {
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stdev = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double half = t * s.stdev / std::sqrt(n);
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

std::uint64_t run_seed(std::uint64_t seed_base, std::uint64_t run_index) {
  return derive_seed(seed_base, run_index);
}

MonteCarloResult aggregate(std::vector<RunMetrics> runs) {
  MonteCarloResult out;
  const auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(static_cast<double>(field(r)));
    return summarize(v);
  };
  out.rounds = collect([](const RunMetrics& r) { return r.rounds_used; });
  out.total_moves = collect([](const RunMetrics& r) { return r.total_moves; });
  out.uplink = collect([](const RunMetrics& r) { return r.uplink_attempts; });
  out.downlink = collect([](const RunMetrics& r) { return r.downlink_attempts; });
  out.assistance_requests = collect([](const RunMetrics& r) { return r.assistance_requests; });
  out.final_fraction = collect([](const RunMetrics& r) { return r.final_convergence_fraction; });
  if (!runs.empty()) {
    const auto converged =
        std::count_if(runs.begin(), runs.end(), [](const RunMetrics& r) { return r.converged; });
    out.convergence_rate = static_cast<double>(converged) / static_cast<double>(runs.size());
  }
  out.runs = std::move(runs);
  return out;
}

MonteCarloResult monte_carlo(std::shared_ptr<const World> world, const ScenarioConfig& config,
                             int runs, std::uint64_t seed_base, int jobs) {
  if (runs < 1) throw ConfigError("runs >= 1");
  config.validate();
  std::vector<RunMetrics> results(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (int i = next++; i < runs; i = next++) {
      try {
        ScenarioConfig c = config;
        c.seed = run_seed(seed_base, static_cast<std::uint64_t>(i));
        results[static_cast<std::size_t>(i)] = run_scenario(world, c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int threads = std::clamp(jobs, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(results));
}

}  // namespace dtswarm
