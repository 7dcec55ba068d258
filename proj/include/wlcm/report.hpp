#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "scenario.hpp"
#include "types.hpp"

namespace wlcm {

using Json = nlohmann::ordered_json;

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
}

// 17 significant digits: enough to round-trip any double.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- config <-> json ----

inline Json distribution_json(const DistributionSpec& d) {
  Json j{{"kind", std::string(to_string(d.kind()))}};
  if (d.kind() == DistributionKind::Binomial) j["m"] = d.m();
  if (d.kind() == DistributionKind::Normal) j["sigma2"] = d.sigma2();
  return j;
}

inline DistributionSpec distribution_from_json(const Json& j) {
  std::optional<int> m;
  std::optional<double> sigma2;
  if (j.contains("m")) m = j.at("m").get<int>();
  if (j.contains("sigma2")) sigma2 = j.at("sigma2").get<double>();
  return DistributionSpec::make(parse_kind(j.at("kind").get<std::string>()), m, sigma2);
}

inline Json config_json(const ScenarioConfig& c) {
  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  return Json{{"id", c.id},
              {"sweep", std::string(to_string(c.sweep))},
              {"grid", c.grid},
              {"n", c.n},
              {"rho", c.rho},
              {"k", c.k},
              {"j", c.j},
              {"j_divisor", c.j_divisor},
              {"distribution", distribution_json(c.distribution)},
              {"truth", c.truth == Truth::Planted ? "planted" : "random"},
              {"replicates", c.replicates},
              {"master_seed", c.master_seed},
              {"methods", methods},
              {"kmeans", {{"max_iters", c.kmeans.max_iters}, {"restarts", c.kmeans.restarts}}},
              {"record_timing", c.record_timing}};
}

// Keys mirror ScenarioConfig. When "id" names a canned scenario, that scenario is the
// starting point and the remaining keys override it.
inline ScenarioConfig config_from_json(const Json& j) {
  try {
    ScenarioConfig c;
    if (j.contains("id")) {
      auto id = j.at("id").get<std::string>();
      auto ids = canned_scenario_ids();
      if (std::find(ids.begin(), ids.end(), id) != ids.end()) c = canned_scenario(id);
      c.id = id;
    }
    if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep").get<std::string>());
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("rho")) c.rho = j.at("rho").get<double>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("j")) c.j = j.at("j").get<int>();
    if (j.contains("j_divisor")) c.j_divisor = j.at("j_divisor").get<int>();
    if (j.contains("distribution")) c.distribution = distribution_from_json(j.at("distribution"));
    if (j.contains("truth")) {
      auto t = j.at("truth").get<std::string>();
      if (t == "planted") c.truth = Truth::Planted;
      else if (t == "random") c.truth = Truth::Random;
      else throw Error(ErrorCode::InvalidArgument, "truth must be random or planted");
    }
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("kmeans")) {
      const auto& km = j.at("kmeans");
      if (km.contains("max_iters")) c.kmeans.max_iters = km.at("max_iters").get<int>();
      if (km.contains("restarts")) c.kmeans.restarts = km.at("restarts").get<int>();
    }
    if (j.contains("record_timing")) c.record_timing = j.at("record_timing").get<bool>();
    return c;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
  }
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileError, "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

// ---- scenario reports ----

inline std::vector<std::string> summary_header() {
  std::vector<std::string> h = {"scenario", "grid_index", "grid_value", "n",         "j",
                                "rho",      "method",     "completed",  "failed"};
  for (const char* m : kMetricNames) {
    h.push_back(std::string(m) + "_mean");
    h.push_back(std::string(m) + "_sd");
  }
  return h;
}

inline std::vector<std::string> summary_fields(const std::string& id, const SummaryRow& s) {
  std::vector<std::string> f = {id,
                                std::to_string(s.grid_index),
                                fmt_double(s.grid_value),
                                std::to_string(s.n),
                                std::to_string(s.j),
                                fmt_double(s.rho),
                                std::string(to_string(s.method)),
                                std::to_string(s.completed),
                                std::to_string(s.failed)};
  for (const auto& m : s.stats) {
    f.push_back(fmt_double(m.mean));
    f.push_back(fmt_double(m.sd));
  }
  return f;
}

inline std::vector<std::string> replicate_header() {
  std::vector<std::string> h = {"scenario", "grid_index", "grid_value", "n",  "j",    "rho",
                                "replicate", "method",    "ok",         "error"};
  for (const char* m : kMetricNames) h.push_back(m);
  return h;
}

inline std::vector<std::string> replicate_fields(const std::string& id, const ReplicateRow& r) {
  std::vector<std::string> f = {id,
                                std::to_string(r.grid_index),
                                fmt_double(r.grid_value),
                                std::to_string(r.n),
                                std::to_string(r.j),
                                fmt_double(r.rho),
                                std::to_string(r.replicate),
                                std::string(to_string(r.method)),
                                r.ok ? "1" : "0",
                                r.error};
  for (double v : metric_values(r)) f.push_back(fmt_double(v));
  return f;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

inline Json provenance(const ScenarioConfig& c) {
  return Json{{"tool", "wlcm"}, {"version", kVersion}, {"master_seed", c.master_seed},
              {"config", config_json(c)}};
}

inline Json report_json(const ScenarioReport& rep) {
  Json rows = Json::array();
  for (const auto& s : rep.summary) {
    Json row;
    row["grid_index"] = s.grid_index;
    row["grid_value"] = s.grid_value;
    row["n"] = s.n;
    row["j"] = s.j;
    row["rho"] = s.rho;
    row["j_rounded"] = s.j_rounded;
    row["method"] = std::string(to_string(s.method));
    row["completed"] = s.completed;
    row["failed"] = s.failed;
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
      row[std::string(kMetricNames[i]) + "_mean"] = s.stats[i].mean;
      row[std::string(kMetricNames[i]) + "_sd"] = s.stats[i].sd;
    }
    rows.push_back(row);
  }
  Json reps = Json::array();
  for (const auto& r : rep.replicates) {
    Json row{{"grid_index", r.grid_index}, {"replicate", r.replicate},
             {"method", std::string(to_string(r.method))}, {"ok", r.ok}};
    if (!r.ok) row["error"] = r.error;
    auto vals = metric_values(r);
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) row[kMetricNames[i]] = vals[i];
    reps.push_back(row);
  }
  return Json{{"provenance", provenance(rep.config)},
              {"scenario", rep.config.id},
              {"summary", rows},
              {"replicates", reps}};
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileError, "cannot write '" + path + "'");
  return out;
}

// CSV: summary at `path`, per-replicate rows at `path`.replicates.csv. JSON: one file.
inline void emit_report(const ScenarioReport& rep, ReportFormat format, const std::string& path) {
  require(!rep.summary.empty(), ErrorCode::InvalidArgument, "report has no grid points");
  if (format == ReportFormat::Json) {
    auto out = open_output(path);
    out << report_json(rep).dump(2) << '\n';
    return;
  }
  {
    auto out = open_output(path);
    write_csv_row(out, summary_header());
    for (const auto& s : rep.summary) write_csv_row(out, summary_fields(rep.config.id, s));
  }
  auto out = open_output(path + ".replicates.csv");
  write_csv_row(out, replicate_header());
  for (const auto& r : rep.replicates) write_csv_row(out, replicate_fields(rep.config.id, r));
}

// ---- dataset analysis ----

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Profiles are reported 1-based.
inline Json analysis_json(const Dataset& data, const AnalysisReport& rep, std::uint64_t seed) {
  Json j;
  j["provenance"] = {{"tool", "wlcm"}, {"version", kVersion}, {"seed", seed}};
  j["n"] = data.n();
  j["j"] = data.j();
  j["items"] = data.items;
  Json dropped = Json::array();
  for (const auto& d : data.dropped) dropped.push_back({{"line", d.line}, {"reason", d.reason}});
  j["dropped"] = dropped;
  j["k"] = rep.k;
  if (rep.selection) j["k_selection"] = {{"k_hat", rep.selection->k_hat}, {"scores", rep.selection->scores}};
  j["labels"] = rep.z_hat.one_based();
  j["source_lines"] = data.source_lines;
  j["theta_hat"] = matrix_json(rep.theta_hat);
  j["item_means"] = matrix_json(rep.item_means);
  j["max_abs_gap"] = rep.max_gap;
  Json profiles = Json::array();
  for (std::size_t c = 0; c < rep.profiles.size(); ++c) {
    const auto& p = rep.profiles[c];
    Json pj{{"profile", c + 1}, {"size", p.size}, {"numeric_means", p.numeric_means}};
    Json cats = Json::object();
    for (const auto& [name, levels] : p.categorical) {
      Json lv = Json::array();
      for (const auto& l : levels)
        lv.push_back({{"level", l.level}, {"count", l.count}, {"numeric_means", l.numeric_means}});
      cats[name] = lv;
    }
    pj["categorical"] = cats;
    profiles.push_back(pj);
  }
  j["profiles"] = profiles;
  j["elapsed"] = rep.elapsed;
  return j;
}

// CSV form: one row per kept subject with its source line, 1-based profile and covariates.
inline void emit_analysis(const Dataset& data, const AnalysisReport& rep, std::uint64_t seed,
                          ReportFormat format, const std::string& path) {
  if (format == ReportFormat::Json) {
    auto out = open_output(path);
    out << analysis_json(data, rep, seed).dump(2) << '\n';
    return;
  }
  auto out = open_output(path);
  std::vector<std::string> header = {"line", "profile"};
  for (const auto& c : data.covariates) header.push_back(c.spec.name);
  write_csv_row(out, header);
  for (int i = 0; i < data.n(); ++i) {
    std::vector<std::string> f = {std::to_string(data.source_lines[i]),
                                  std::to_string(rep.z_hat.label(i) + 1)};
    for (const auto& c : data.covariates)
      f.push_back(c.spec.type == CovariateType::Numeric ? fmt_double(c.numbers[i]) : c.levels[i]);
    write_csv_row(out, f);
  }
  auto theta = open_output(path + ".theta.csv");
  std::vector<std::string> th = {"item"};
  for (int c = 1; c <= rep.k; ++c) {
    th.push_back("theta_" + std::to_string(c));
    th.push_back("mean_" + std::to_string(c));
  }
  write_csv_row(theta, th);
  for (int j = 0; j < data.j(); ++j) {
    std::vector<std::string> f = {data.items[j]};
    for (int c = 0; c < rep.k; ++c) {
      f.push_back(fmt_double(rep.theta_hat(j, c)));
      f.push_back(fmt_double(rep.item_means(j, c)));
    }
    write_csv_row(theta, f);
  }
}

}  // namespace wlcm
