// wlcm command line: simulate / fit / generate.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wlcm/wlcm.hpp"

namespace {

struct SimulateArgs {
  std::string scenario;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  int threads = 1;
};

struct FitArgs {
  std::string input;
  std::string responses;
  std::string covariates;
  std::string k = "auto";
  int k_max = 15;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::string range;
  std::optional<std::string> missing;
};

struct GenerateArgs {
  std::string dist;
  int n = 0, j = 0, k = 0;
  double rho = 0.0;
  std::optional<int> m;
  std::optional<double> sigma2;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth;
  std::string theta;
};

int run_simulate(const SimulateArgs& a) {
  using namespace wlcm;
  auto ids = canned_scenario_ids();
  ScenarioConfig c;
  if (std::find(ids.begin(), ids.end(), a.scenario) != ids.end())
    c = canned_scenario(a.scenario);
  else if (std::filesystem::exists(a.scenario))
    c = load_config(a.scenario);
  else
    throw Error(ErrorCode::InvalidArgument,
                "'" + a.scenario + "' is neither a scenario id nor a config file");
  if (a.replicates) c.replicates = *a.replicates;
  if (a.seed) c.master_seed = *a.seed;
  auto format = parse_format(a.format);
  auto rep = run_scenario(c, a.threads);
  emit_report(rep, format, a.out);

  int failed = 0;
  for (const auto& s : rep.summary) failed += s.failed;
  std::cout << c.id << ": " << c.grid.size() << " grid points x " << c.replicates
            << " replicates -> " << a.out << "\n";
  if (failed) std::cout << failed << " method runs failed (see replicate rows)\n";
  return 0;
}

std::pair<double, double> parse_range(const std::string& s) {
  auto colon = s.find(':');
  auto lo = wlcm::parse_number(s.substr(0, colon));
  auto hi = colon == std::string::npos ? std::nullopt : wlcm::parse_number(s.substr(colon + 1));
  if (!lo || !hi || *lo > *hi)
    throw wlcm::Error(wlcm::ErrorCode::InvalidArgument, "range must look like lo:hi");
  return {*lo, *hi};
}

int run_fit(const FitArgs& a) {
  using namespace wlcm;
  auto rows = read_csv_file(a.input);
  require(!rows.empty(), ErrorCode::SchemaError, "'" + a.input + "' is empty");
  CsvSchema schema;
  schema.responses = resolve_columns(rows.front(), a.responses);
  if (!a.covariates.empty()) schema.covariates = parse_covariate_spec(a.covariates);
  if (a.missing) {
    schema.missing.clear();
    std::stringstream ss(*a.missing);
    std::string token;
    while (std::getline(ss, token, ',')) schema.missing.push_back(token);
    if (!a.missing->empty() && a.missing->back() == ',') schema.missing.push_back("");
  }
  if (!a.range.empty()) schema.range = parse_range(a.range);

  std::optional<int> k;
  if (a.k != "auto") {
    auto v = parse_number(a.k);
    if (!v || *v != static_cast<int>(*v))
      throw Error(ErrorCode::InvalidArgument, "--k must be an integer or 'auto'");
    k = static_cast<int>(*v);
  }
  auto format = parse_format(a.format);
  auto data = load_response_csv(rows, schema);
  for (const auto& d : data.dropped)
    std::cerr << "dropped line " << d.line << ": " << d.reason << "\n";

  RngHandle rng(a.seed);
  auto rep = analyze_dataset(data, k, a.k_max, rng);
  emit_analysis(data, rep, a.seed, format, a.out);

  std::cout << "N=" << data.n() << " J=" << data.j() << " dropped=" << data.dropped.size()
            << " K=" << rep.k << (rep.selection ? " (selected)" : "") << "\n";
  for (std::size_t c = 0; c < rep.profiles.size(); ++c)
    std::cout << "profile " << c + 1 << ": " << rep.profiles[c].size << " subjects\n";
  std::cout << "max |item means - theta_hat| = " << rep.max_gap << "\n";
  return 0;
}

int run_generate(const GenerateArgs& a) {
  using namespace wlcm;
  auto spec = DistributionSpec::make(parse_kind(a.dist), a.m, a.sigma2);
  RngHandle rng(a.seed);
  auto inst = sample_instance(spec, a.n, a.j, a.k, a.rho, rng);

  {
    std::ofstream out(a.out);
    if (!out) throw Error(ErrorCode::FileError, "cannot write '" + a.out + "'");
    for (int j = 0; j < a.j; ++j) out << (j ? "," : "") << "item" << j + 1;
    out << "\n";
    for (int i = 0; i < a.n; ++i) {
      for (int j = 0; j < a.j; ++j) out << (j ? "," : "") << fmt_double(inst.r.values(i, j));
      out << "\n";
    }
  }
  {
    std::ofstream out(a.truth);
    if (!out) throw Error(ErrorCode::FileError, "cannot write '" + a.truth + "'");
    out << "subject,profile\n";
    auto labels = inst.z.one_based();
    for (int i = 0; i < a.n; ++i) out << i + 1 << "," << labels[i] << "\n";
  }
  if (!a.theta.empty()) {
    std::ofstream out(a.theta);
    if (!out) throw Error(ErrorCode::FileError, "cannot write '" + a.theta + "'");
    for (int c = 0; c < a.k; ++c) out << (c ? "," : "") << "profile" << c + 1;
    out << "\n";
    const auto& theta = inst.params.theta();
    for (int j = 0; j < a.j; ++j) {
      for (int c = 0; c < a.k; ++c) out << (c ? "," : "") << fmt_double(theta(j, c));
      out << "\n";
    }
  }
  std::cout << spec.describe() << " N=" << a.n << " J=" << a.j << " K=" << a.k
            << " rho=" << a.rho << " -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted latent class model: simulation, fitting and data generation"};
  app.set_version_flag("--version", std::string(wlcm::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a canned or JSON-configured simulation");
  s->add_option("--scenario", sim.scenario, "Scenario id (sim1a..sim8b) or JSON config file")
      ->required();
  s->add_option("--replicates", sim.replicates, "Override the replicate count")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "Override the master seed");
  s->add_option("--out", sim.out, "Output path")->required();
  s->add_option("--format", sim.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  s->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit SCK to a response CSV and summarize profiles");
  f->add_option("--input", fit.input, "CSV file with a header row")->required();
  f->add_option("--responses", fit.responses, "Response columns: a,b,c or first..last")
      ->required();
  f->add_option("--covariates", fit.covariates, "Covariates, e.g. age:num,gender:cat");
  f->add_option("--k", fit.k, "Number of profiles or 'auto'");
  f->add_option("--kmax", fit.k_max, "Largest K tried by --k auto")->check(CLI::PositiveNumber);
  f->add_option("--seed", fit.seed, "Seed");
  f->add_option("--out", fit.out, "Output path")->required();
  f->add_option("--format", fit.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  f->add_option("--range", fit.range, "Legal response range lo:hi; other rows are dropped");
  f->add_option("--missing", fit.missing, "Comma-separated missing markers (default: empty, NA)");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a response matrix with ground truth");
  g->add_option("--dist", gen.dist, "bernoulli|binomial|poisson|normal|exponential|uniform|signed")
      ->required();
  g->add_option("--n", gen.n, "Subjects")->required();
  g->add_option("--j", gen.j, "Items")->required();
  g->add_option("--k", gen.k, "Profiles")->required();
  g->add_option("--rho", gen.rho, "Scaling parameter")->required();
  g->add_option("--m", gen.m, "Binomial trials");
  g->add_option("--sigma2", gen.sigma2, "Normal variance");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--out", gen.out, "Response matrix CSV")->required();
  g->add_option("--truth", gen.truth, "Subject labels CSV")->required();
  g->add_option("--theta", gen.theta, "Item parameter CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (s->parsed()) return run_simulate(sim);
    if (f->parsed()) return run_fit(fit);
    return run_generate(gen);
  } catch (const wlcm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wlcm::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
