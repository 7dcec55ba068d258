#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "distribution.hpp"
#include "estimators.hpp"
#include "generators.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace wlcm {

inline constexpr const char* kVersion = "1.0.0";

enum class Sweep { Rho, N, Fixed };

inline std::string_view to_string(Sweep s) {
  switch (s) {
    case Sweep::Rho: return "rho";
    case Sweep::N: return "N";
    case Sweep::Fixed: return "fixed";
  }
  return "unknown";
}

inline Sweep parse_sweep(std::string_view name) {
  if (name == "rho") return Sweep::Rho;
  if (name == "N" || name == "n") return Sweep::N;
  if (name == "fixed") return Sweep::Fixed;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep '" + std::string(name) + "'");
}

// Random: Z and B drawn per replicate. Planted: the fixed 16 x 10, K = 2 instance
// with Theta(j,1) = 100, Theta(j,2) = 110 - 10 j; only R is redrawn.
enum class Truth { Random, Planted };

struct ScenarioConfig {
  std::string id;
  Sweep sweep = Sweep::Rho;
  std::vector<double> grid;
  int n = 500;        // used unless sweeping N
  double rho = 0.1;   // used unless sweeping rho
  int k = 3;
  int j = 0;          // 0: J = floor(N / j_divisor)
  int j_divisor = 5;
  DistributionSpec distribution = DistributionSpec::bernoulli();
  Truth truth = Truth::Random;
  int replicates = 50;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods = {Method::SCK, Method::RMK};
  KmeansOptions kmeans;
  bool record_timing = true;
};

inline std::vector<double> grid_steps(int count, double step) {
  std::vector<double> g;
  for (int i = 1; i <= count; ++i) g.push_back(i / (1.0 / step));
  return g;
}

inline std::vector<double> grid_range(int first, int last, int step) {
  std::vector<double> g;
  for (int v = first; v <= last; v += step) g.push_back(v);
  return g;
}

inline std::vector<std::string> canned_scenario_ids() {
  return {"sim1a", "sim1b", "sim2a", "sim2b", "sim3a", "sim3b", "sim4a", "sim4b",
          "sim5a", "sim5b", "sim6a", "sim6b", "sim7a", "sim7b", "sim8a", "sim8b"};
}

inline ScenarioConfig canned_scenario(const std::string& id) {
  ScenarioConfig c;
  c.id = id;
  auto rho_sweep = [&](DistributionSpec spec, int n, std::vector<double> grid) {
    c.distribution = spec;
    c.sweep = Sweep::Rho;
    c.n = n;
    c.grid = std::move(grid);
  };
  auto n_sweep = [&](DistributionSpec spec, double rho, std::vector<double> grid) {
    c.distribution = spec;
    c.sweep = Sweep::N;
    c.rho = rho;
    c.grid = std::move(grid);
  };
  const auto tenths = grid_steps(10, 0.1);          // 0.1, ..., 1
  const auto fifths = grid_steps(10, 0.2);          // 0.2, ..., 2
  const auto big_n = grid_range(1000, 5000, 1000);  // 1000, ..., 5000
  const auto mid_n = grid_range(300, 3000, 300);    // 300, ..., 3000
  const auto ints = grid_range(1, 20, 1);           // 1, ..., 20

  if (id == "sim1a") rho_sweep(DistributionSpec::bernoulli(), 500, tenths);
  else if (id == "sim1b") n_sweep(DistributionSpec::bernoulli(), 0.1, big_n);
  else if (id == "sim2a") rho_sweep(DistributionSpec::binomial(5), 500, fifths);
  else if (id == "sim2b") n_sweep(DistributionSpec::binomial(5), 0.1, big_n);
  else if (id == "sim3a") rho_sweep(DistributionSpec::poisson(), 500, fifths);
  else if (id == "sim3b") n_sweep(DistributionSpec::poisson(), 0.1, big_n);
  else if (id == "sim4a") rho_sweep(DistributionSpec::normal(2.0), 500, fifths);
  else if (id == "sim4b") n_sweep(DistributionSpec::normal(2.0), 0.5, big_n);
  else if (id == "sim5a") rho_sweep(DistributionSpec::exponential(), 300, ints);
  else if (id == "sim5b") n_sweep(DistributionSpec::exponential(), 1.0, mid_n);
  else if (id == "sim6a") rho_sweep(DistributionSpec::uniform(), 120, ints);
  else if (id == "sim6b") n_sweep(DistributionSpec::uniform(), 1.0, mid_n);
  else if (id == "sim7a") rho_sweep(DistributionSpec::signed_pm1(), 500, tenths);
  else if (id == "sim7b") n_sweep(DistributionSpec::signed_pm1(), 0.2, big_n);
  else if (id == "sim8a" || id == "sim8b") {
    c.distribution = id == "sim8a" ? DistributionSpec::normal(1.0) : DistributionSpec::poisson();
    c.truth = Truth::Planted;
    c.sweep = Sweep::Fixed;
    c.n = 16;
    c.k = 2;
    c.j = 10;
    c.rho = 100.0;
    c.grid = {100.0};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + id + "'");
  }
  return c;
}

struct PlantedTruth {
  ClassAssignment z;
  ItemParams params;
};

// Subjects 1-8 in profile 1, 9-16 in profile 2; Theta(j,1) = 100, Theta(j,2) = 110 - 10 j.
inline PlantedTruth planted_truth() {
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) labels[static_cast<std::size_t>(i)] = i < 8 ? 0 : 1;
  Matrix theta(10, 2);
  for (int j = 1; j <= 10; ++j) {
    theta(j - 1, 0) = 100.0;
    theta(j - 1, 1) = 110.0 - 10.0 * j;
  }
  return {ClassAssignment(std::move(labels), 2), ItemParams(std::move(theta))};
}

struct GridPoint {
  int n;
  int j;
  double rho;
  bool j_rounded;  // N not divisible by the J divisor
};

inline GridPoint grid_point(const ScenarioConfig& c, double value) {
  GridPoint g{c.n, 0, c.rho, false};
  if (c.sweep == Sweep::Rho) g.rho = value;
  if (c.sweep == Sweep::N) g.n = static_cast<int>(std::lround(value));
  if (c.j > 0) {
    g.j = c.j;
  } else {
    g.j = g.n / c.j_divisor;
    g.j_rounded = g.n % c.j_divisor != 0;
  }
  return g;
}

inline void validate(const ScenarioConfig& c) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, "scenario '" + c.id + "': " + what);
  };
  if (c.grid.empty()) fail("grid is empty");
  for (std::size_t i = 1; i < c.grid.size(); ++i)
    if (!(c.grid[i] > c.grid[i - 1])) fail("grid must be strictly increasing");
  if (c.sweep == Sweep::Fixed && c.grid.size() != 1) fail("a fixed scenario has one grid point");
  if (c.replicates < 1) fail("replicates must be >= 1");
  if (c.k < 1) fail("K must be >= 1");
  if (c.methods.empty()) fail("no methods selected");
  if (c.j_divisor < 1) fail("J divisor must be >= 1");
  if (c.truth == Truth::Planted) {
    if (c.sweep != Sweep::Fixed) fail("the planted instance has a fixed design");
    auto domain = c.distribution.mean_domain();
    auto truth = planted_truth();
    for (Eigen::Index i = 0; i < truth.params.theta().size(); ++i)
      if (!domain.contains(truth.params.theta().data()[i]))
        fail("planted Theta outside the " + c.distribution.describe() + " domain");
    return;
  }
  for (double v : c.grid) {
    auto g = grid_point(c, v);
    if (c.sweep == Sweep::N && (v != std::floor(v) || v < 1)) fail("N grid values must be integers");
    if (!c.distribution.rho_domain().contains(g.rho))
      fail("rho = " + std::to_string(g.rho) + " outside the range for " +
           c.distribution.describe());
    if (g.n < c.k) fail("N must be >= K");
    if (g.j < c.k) fail("J must be >= K");
  }
}

struct ReplicateRow {
  int grid_index = 0;
  double grid_value = 0.0;
  int n = 0;
  int j = 0;
  double rho = 0.0;
  int replicate = 0;
  Method method = Method::SCK;
  bool ok = false;
  std::string error;
  MetricVector metrics;
  double elapsed = 0.0;
};

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 for a single value
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

inline constexpr std::array<const char*, 7> kMetricNames = {
    "clustering_error", "hamming_error", "nmi", "ari", "rel_l1", "rel_l2", "time"};

inline std::array<double, 7> metric_values(const ReplicateRow& r) {
  return {r.metrics.clustering_error, r.metrics.hamming_error, r.metrics.nmi, r.metrics.ari,
          r.metrics.rel_l1,           r.metrics.rel_l2,        r.elapsed};
}

struct SummaryRow {
  int grid_index = 0;
  double grid_value = 0.0;
  int n = 0;
  int j = 0;
  double rho = 0.0;
  bool j_rounded = false;
  Method method = Method::SCK;
  int completed = 0;
  int failed = 0;
  std::array<Moments, 7> stats;  // indexed like kMetricNames

  const Moments& stat(std::string_view name) const {
    for (std::size_t i = 0; i < kMetricNames.size(); ++i)
      if (name == kMetricNames[i]) return stats[i];
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
  }
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<SummaryRow> summary;       // ordered by (grid index, method)
  std::vector<ReplicateRow> replicates;  // ordered by (grid index, replicate, method)

  const SummaryRow& row(int grid_index, Method method) const {
    for (const auto& r : summary)
      if (r.grid_index == grid_index && r.method == method) return r;
    throw Error(ErrorCode::InvalidArgument, "no summary row for that grid point and method");
  }
};

// Mean and standard deviation per (grid point, method) over completed replicates.
inline std::vector<SummaryRow> aggregate(const ScenarioConfig& c,
                                         const std::vector<ReplicateRow>& rows) {
  std::vector<SummaryRow> out;
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    auto gp = grid_point(c, c.grid[g]);
    for (Method m : c.methods) {
      SummaryRow s;
      s.grid_index = static_cast<int>(g);
      s.grid_value = c.grid[g];
      s.n = gp.n;
      s.j = gp.j;
      s.rho = gp.rho;
      s.j_rounded = gp.j_rounded;
      s.method = m;
      std::array<std::vector<double>, 7> cols;
      for (const auto& r : rows) {
        if (r.grid_index != s.grid_index || r.method != m) continue;
        if (!r.ok) {
          ++s.failed;
          continue;
        }
        ++s.completed;
        auto vals = metric_values(r);
        for (std::size_t i = 0; i < vals.size(); ++i) cols[i].push_back(vals[i]);
      }
      for (std::size_t i = 0; i < cols.size(); ++i) s.stats[i] = moments(cols[i]);
      out.push_back(s);
    }
  }
  return out;
}

// All methods on one (grid point, replicate). Data and method streams derive from
// (master_seed, replicate) only, so grid points share common random numbers.
inline std::vector<ReplicateRow> run_replicate(const ScenarioConfig& c, int grid_index,
                                               int replicate) {
  const double value = c.grid[static_cast<std::size_t>(grid_index)];
  const auto gp = grid_point(c, value);
  const std::uint64_t seed = derive_seed(c.master_seed, static_cast<std::uint64_t>(replicate));
  std::vector<ReplicateRow> rows;
  auto base_row = [&](Method m) {
    ReplicateRow r;
    r.grid_index = grid_index;
    r.grid_value = value;
    r.n = gp.n;
    r.j = gp.j;
    r.rho = gp.rho;
    r.replicate = replicate;
    r.method = m;
    return r;
  };

  std::optional<ClassAssignment> z;
  std::optional<ItemParams> params;
  Matrix r;
  try {
    RngHandle data_rng(derive_seed(seed, 0));
    if (c.truth == Truth::Planted) {
      auto truth = planted_truth();
      z = truth.z;
      params = truth.params;
    } else {
      z = sample_classes(gp.n, c.k, data_rng);
      params = sample_item_params(c.distribution, gp.j, c.k, gp.rho, data_rng);
      require_full_column_rank(params->theta());
    }
    r = sample_responses(population_matrix(*z, *params), c.distribution, data_rng).values;
  } catch (const Error& e) {
    for (Method m : c.methods) {
      auto row = base_row(m);
      row.error = e.what();
      rows.push_back(std::move(row));
    }
    return rows;
  }

  EstimatorOptions opts;
  opts.kmeans = c.kmeans;
  for (Method m : c.methods) {
    auto row = base_row(m);
    try {
      RngHandle method_rng(derive_seed(seed, 1));
      auto est = estimate(m, r, c.k, method_rng, opts);
      row.metrics = evaluate(*z, est.z_hat, params->theta(), est.theta_hat);
      row.elapsed = c.record_timing ? est.elapsed : 0.0;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Runs every (grid point, replicate) task on `threads` workers; the report does not
// depend on the thread count or schedule.
inline ScenarioReport run_scenario(const ScenarioConfig& config, int threads = 1) {
  validate(config);
  const int grid = static_cast<int>(config.grid.size());
  const int tasks = grid * config.replicates;
  std::vector<std::vector<ReplicateRow>> results(static_cast<std::size_t>(tasks));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < tasks; t = next++)
      results[static_cast<std::size_t>(t)] =
          run_replicate(config, t / config.replicates, t % config.replicates);
  };
  threads = std::max(1, std::min(threads, tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  ScenarioReport report;
  report.config = config;
  for (auto& chunk : results)
    for (auto& row : chunk) report.replicates.push_back(std::move(row));
  report.summary = aggregate(config, report.replicates);
  return report;
}

}  // namespace wlcm
