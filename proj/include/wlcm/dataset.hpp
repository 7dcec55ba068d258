#pragma once

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace wlcm {

using CsvRow = std::vector<std::string>;

// RFC 4180-style parsing: comma separator, double-quoted fields with "" escapes,
// quoted fields may span lines. A trailing CR is stripped.
inline std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false, any = false;
  char ch;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    any = false;
  };
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw Error(ErrorCode::SchemaError, "unterminated quoted field");
  if (any || !field.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_row();
  }
  return rows;
}

inline std::vector<CsvRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileError, "cannot open '" + path + "'");
  return parse_csv(in);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Whole-string numeric parse; nothing on failure.
inline std::optional<double> parse_number(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  std::string t = s.substr(b, e - b + 1);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

enum class CovariateType { Numeric, Categorical };

struct CovariateSpec {
  std::string name;
  CovariateType type = CovariateType::Numeric;
};

struct CsvSchema {
  std::vector<std::string> responses;
  std::vector<CovariateSpec> covariates;
  std::vector<std::string> missing = {"", "NA"};
  std::optional<std::pair<double, double>> range;  // inclusive legal response range
};

// Resolves a column spec against the header: comma-separated names, where
// "first..last" selects the inclusive run of header columns between two names.
inline std::vector<std::string> resolve_columns(const CsvRow& header, const std::string& spec) {
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::SchemaError, "column '" + name + "' not in header");
  };
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    auto dots = token.find("..");
    if (dots == std::string::npos) {
      index_of(token);
      out.push_back(token);
      continue;
    }
    auto first = index_of(token.substr(0, dots));
    auto last = index_of(token.substr(dots + 2));
    if (first > last) throw Error(ErrorCode::SchemaError, "reversed column range '" + token + "'");
    for (auto i = first; i <= last; ++i) out.push_back(header[i]);
  }
  if (out.empty()) throw Error(ErrorCode::SchemaError, "column spec '" + spec + "' is empty");
  return out;
}

// "age:num,gender:cat"
inline std::vector<CovariateSpec> parse_covariate_spec(const std::string& spec) {
  std::vector<CovariateSpec> out;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    auto colon = token.rfind(':');
    CovariateSpec c{token, CovariateType::Numeric};
    if (colon != std::string::npos) {
      c.name = token.substr(0, colon);
      auto type = token.substr(colon + 1);
      if (type == "num") c.type = CovariateType::Numeric;
      else if (type == "cat") c.type = CovariateType::Categorical;
      else throw Error(ErrorCode::InvalidArgument, "covariate type must be num or cat: " + token);
    }
    out.push_back(c);
  }
  return out;
}

struct CovariateColumn {
  CovariateSpec spec;
  std::vector<double> numbers;      // numeric covariates
  std::vector<std::string> levels;  // categorical covariates
};

struct DroppedRow {
  int line;  // 1-based line number in the file (header is line 1)
  std::string reason;
};

struct Dataset {
  Matrix r;
  std::vector<std::string> items;
  std::vector<CovariateColumn> covariates;
  std::vector<int> source_lines;
  std::vector<DroppedRow> dropped;

  int n() const { return static_cast<int>(r.rows()); }
  int j() const { return static_cast<int>(r.cols()); }
};

// Rows with a missing, non-numeric or out-of-range response, or a missing covariate,
// are dropped and logged.
inline Dataset load_response_csv(const std::vector<CsvRow>& rows, const CsvSchema& schema) {
  require(!rows.empty(), ErrorCode::SchemaError, "file has no header row");
  const CsvRow& header = rows.front();
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::SchemaError, "column '" + name + "' not in header");
  };
  require(!schema.responses.empty(), ErrorCode::SchemaError, "no response columns selected");
  std::vector<std::size_t> resp_idx, cov_idx;
  for (const auto& name : schema.responses) resp_idx.push_back(index_of(name));
  for (const auto& c : schema.covariates) cov_idx.push_back(index_of(c.name));

  auto is_missing = [&](const std::string& s) {
    for (const auto& m : schema.missing)
      if (s == m) return true;
    return false;
  };

  Dataset ds;
  ds.items = schema.responses;
  for (const auto& c : schema.covariates) ds.covariates.push_back({c, {}, {}});
  std::vector<std::vector<double>> kept;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const int line = static_cast<int>(r) + 1;
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    std::string reason;
    std::vector<double> values;
    for (std::size_t c = 0; c < resp_idx.size() && reason.empty(); ++c) {
      const auto& name = schema.responses[c];
      if (resp_idx[c] >= row.size() || is_missing(row[resp_idx[c]])) {
        reason = "missing response '" + name + "'";
        break;
      }
      auto v = parse_number(row[resp_idx[c]]);
      if (!v) {
        reason = "non-numeric response '" + name + "'";
      } else if (schema.range && (*v < schema.range->first || *v > schema.range->second)) {
        reason = "response '" + name + "' out of range";
      } else {
        values.push_back(*v);
      }
    }
    std::vector<double> nums(cov_idx.size());
    std::vector<std::string> levels(cov_idx.size());
    for (std::size_t c = 0; c < cov_idx.size() && reason.empty(); ++c) {
      const auto& spec = schema.covariates[c];
      if (cov_idx[c] >= row.size() || is_missing(row[cov_idx[c]])) {
        reason = "missing covariate '" + spec.name + "'";
      } else if (spec.type == CovariateType::Numeric) {
        auto v = parse_number(row[cov_idx[c]]);
        if (!v) reason = "non-numeric covariate '" + spec.name + "'";
        else nums[c] = *v;
      } else {
        levels[c] = row[cov_idx[c]];
      }
    }
    if (!reason.empty()) {
      ds.dropped.push_back({line, reason});
      continue;
    }
    kept.push_back(std::move(values));
    ds.source_lines.push_back(line);
    for (std::size_t c = 0; c < cov_idx.size(); ++c) {
      if (schema.covariates[c].type == CovariateType::Numeric)
        ds.covariates[c].numbers.push_back(nums[c]);
      else
        ds.covariates[c].levels.push_back(levels[c]);
    }
  }
  require(!kept.empty(), ErrorCode::EmptyAfterFilter, "no rows left after filtering");
  ds.r.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(resp_idx.size()));
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = 0; j < resp_idx.size(); ++j)
      ds.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kept[i][j];
  return ds;
}

inline Dataset load_response_csv(const std::string& path, const CsvSchema& schema) {
  return load_response_csv(read_csv_file(path), schema);
}

struct LevelSummary {
  std::string level;
  int count = 0;
  std::map<std::string, double> numeric_means;  // numeric covariate -> mean within level
};

struct ProfileSummary {
  int size = 0;
  std::map<std::string, double> numeric_means;
  std::map<std::string, std::vector<LevelSummary>> categorical;  // sorted by level
};

struct AnalysisReport {
  std::optional<KSelection> selection;
  int k = 0;
  ClassAssignment z_hat{std::vector<int>{0}, 1};
  Matrix theta_hat;
  Matrix item_means;
  double max_gap = 0.0;  // max |item_means - theta_hat|
  std::vector<ProfileSummary> profiles;
  double elapsed = 0.0;
};

// Fits SCK with a given K, or selects K in 1..k_max first when k is empty.
inline AnalysisReport analyze_dataset(const Dataset& data, std::optional<int> k, int k_max,
                                      RngHandle& rng, const EstimatorOptions& opts = {}) {
  AnalysisReport rep;
  if (k) {
    rep.k = *k;
  } else {
    const int cap = std::min<int>(k_max, static_cast<int>(std::min(data.r.rows(), data.r.cols())));
    rep.selection = estimate_k(data.r, cap, rng, opts);
    rep.k = rep.selection->k_hat;
  }
  auto est = sck(data.r, rep.k, rng, opts);
  rep.elapsed = est.elapsed;
  rep.z_hat = est.z_hat;
  rep.theta_hat = std::move(est.theta_hat);
  rep.item_means = profile_means(data.r, rep.z_hat);
  rep.max_gap = (rep.item_means - rep.theta_hat).cwiseAbs().maxCoeff();

  rep.profiles.resize(static_cast<std::size_t>(rep.k));
  for (int c = 0; c < rep.k; ++c) rep.profiles[c].size = rep.z_hat.size_of(c);
  for (const auto& col : data.covariates) {
    const auto& name = col.spec.name;
    if (col.spec.type == CovariateType::Numeric) {
      std::vector<double> sums(static_cast<std::size_t>(rep.k), 0.0);
      for (int i = 0; i < data.n(); ++i) sums[rep.z_hat.label(i)] += col.numbers[i];
      for (int c = 0; c < rep.k; ++c)
        rep.profiles[c].numeric_means[name] = sums[c] / rep.profiles[c].size;
      continue;
    }
    for (int c = 0; c < rep.k; ++c) {
      std::map<std::string, LevelSummary> by_level;
      std::map<std::string, std::map<std::string, double>> sums;
      for (int i = 0; i < data.n(); ++i) {
        if (rep.z_hat.label(i) != c) continue;
        auto& lv = by_level[col.levels[i]];
        lv.level = col.levels[i];
        ++lv.count;
        for (const auto& other : data.covariates)
          if (other.spec.type == CovariateType::Numeric)
            sums[col.levels[i]][other.spec.name] += other.numbers[i];
      }
      auto& out = rep.profiles[c].categorical[name];
      for (auto& [level, lv] : by_level) {
        for (auto& [cov, total] : sums[level]) lv.numeric_means[cov] = total / lv.count;
        out.push_back(lv);
      }
    }
  }
  return rep;
}

}  // namespace wlcm
