// SPDX-License-Identifier: Apache-2.0
// Command-line front end: dataset generation, single reductions, evaluation,
// report merging, self-tests and full experiment grids.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lpvtr/experiment.hpp"
#include "lpvtr/io.hpp"
#include "lpvtr/metrics.hpp"
#include "lpvtr/selftest.hpp"

namespace fs = std::filesystem;
using namespace lpvtr;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kPartial = 3 };

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) apply_seed(cfg, *g.seed);
  return cfg;
}

void emit(const Globals& g, const DatasetStats* stats,
          const std::vector<ReductionReport>& rs) {
  if (g.format == "json")
    write_report_json(std::cout, stats, rs);
  else
    write_report_csv(std::cout, rs);
}

int cmd_bench_make(const Globals& g) {
  const auto cfg = load(g);
  const auto setup = make_benchmark(cfg);
  const fs::path dir(g.out.empty() ? "." : g.out);
  fs::create_directories(dir);
  for (const auto* tr : {&setup.data.red, &setup.data.val, &setup.data.extra})
    write_trajectory_csv((dir / (tr->label + ".csv")).string(), *tr);
  write_model((dir / "fom.model").string(), setup.fom);
  const auto& s = setup.stats;
  std::printf("nx=%zu np=%zu params=%zu N=%zu embed_nrmse red=%.4g val=%.4g extra=%.4g\n",
              s.nx, s.np, s.params, s.N, s.embed_nrmse_red, s.embed_nrmse_val,
              s.embed_nrmse_extra);
  for (const auto& n : s.notes) std::printf("note: %s\n", n.c_str());
  return kOk;
}

int cmd_reduce(const Globals& g, const ReducerSpec& spec, std::optional<double> tol = {}) {
  auto cfg = load(g);
  if (tol) cfg.tmm.tol = *tol;
  cfg.reducers = {spec};
  const auto setup = make_benchmark(cfg);
  auto run = run_reducer(setup, cfg, spec);
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    if (run.model) write_model((dir / (spec.name + ".model")).string(), *run.model);
    if (run.proj) write_projection((dir / (spec.name + ".proj")).string(), *run.proj);
    std::ofstream csv(dir / "report.csv");
    write_report_csv(csv, {run.report});
    std::ofstream js(dir / "report.json");
    write_report_json(js, &setup.stats, {run.report});
  }
  emit(g, &setup.stats, {run.report});
  for (const auto& w : run.report.warnings) std::cerr << "warning: " << w << '\n';
  if (!run.report.error.empty()) {
    std::cerr << "error: " << run.report.error << '\n';
    return kNumerical;
  }
  return kOk;
}

int cmd_eval(const Globals& g, const std::string& ref_path, const std::string& est_path) {
  const auto ref = read_trajectory_csv(ref_path);
  const auto est = read_trajectory_csv(est_path);
  const double e = nrmse(ref.y, est.y);
  std::optional<CostBreakdown> c;
  if (ref.x.rows() == est.x.rows() && ref.p.rows() == est.p.rows() &&
      ref.length() == est.length())
    c = cost_from_signals(ref.x, ref.p, est.x, est.p);
  if (g.format == "json") {
    nlohmann::ordered_json j{{"schema", 1}, {"nrmse", e}};
    if (c) j["costs"] = {{"Jx", c->Jx}, {"Jp", c->Jp}, {"Jxp", c->Jxp}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("nrmse,Jx,Jp,Jxp\n%.10g", e);
    if (c)
      std::printf(",%.10g,%.10g,%.10g\n", c->Jx, c->Jp, c->Jxp);
    else
      std::printf(",,,\n");
  }
  return kOk;
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_regular_file(in)) {
      files.emplace_back(in);
      continue;
    }
    if (!fs::is_directory(in)) throw std::invalid_argument("no such input " + in);
    for (const auto& e : fs::recursive_directory_iterator(in))
      if (e.is_regular_file() && e.path().filename() == "report.csv")
        files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : files) {
    std::ifstream is(f);
    for (auto& r : read_report_csv(is)) rows.push_back(std::move(r));
  }

  std::ostringstream body;
  if (g.format == "json") {
    std::vector<std::string> cols;
    std::istringstream hs(kReportColumns);
    for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < cols.size() && i < r.size(); ++i) o[cols[i]] = r[i];
      arr.push_back(std::move(o));
    }
    body << nlohmann::ordered_json{{"schema", 1}, {"runs", arr}}.dump(2) << '\n';
  } else {
    body << kReportColumns << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) body << (i ? "," : "") << r[i];
      body << '\n';
    }
  }
  if (g.out.empty()) {
    std::cout << body.str();
  } else {
    fs::create_directories(g.out);
    std::ofstream os(fs::path(g.out) / (g.format == "json" ? "merged.json" : "merged.csv"));
    os << body.str();
  }
  return kOk;
}

int cmd_selftest(const Globals& g) {
  bool ok = true;
  for (const auto& c : run_selftest(g.seed.value_or(0))) {
    std::printf("%s %-26s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? kOk : kNumerical;
}

int cmd_run(const Globals& g) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  const auto cfg = load(g);
  const auto res = run_experiment(cfg, g.out);
  emit(g, &res.stats, res.reports);
  for (const auto& r : res.reports)
    if (!r.error.empty()) std::cerr << r.spec.name << ": " << r.error << '\n';
  return res.any_failed() ? kPartial : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-based LPV model reduction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Experiment config (INI)");
  app.add_option("--out", g.out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Override dataset and TSVD seeds");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* bench = app.add_subcommand("bench", "Benchmark datasets");
  bench->require_subcommand(1);
  auto* make = bench->add_subcommand("make", "Generate red/val/extra datasets");

  auto* reduce = app.add_subcommand("reduce", "Reduce the configured benchmark");
  reduce->require_subcommand(1);
  ReducerSpec tmm_spec;
  tmm_spec.name = "tmm";
  std::string mode = "R", decomp = "hosvd";
  auto* tmm = reduce->add_subcommand("tmm", "Tensor moment matching");
  tmm->add_option("--mode", mode, "R, O or H")->check(CLI::IsMember({"R", "O", "H"}));
  tmm->add_option("--decomp", decomp, "tsvd or hosvd")
      ->check(CLI::IsMember({"tsvd", "hosvd"}));
  tmm->add_option("--horizon", tmm_spec.horizon, "Horizon n");
  std::optional<double> tol;
  tmm->add_option("--tol", tol, "Relative singular-vector retention tolerance")
      ->check(CLI::PositiveNumber);

  ReducerSpec pod_spec;
  pod_spec.name = "pod";
  pod_spec.method = "pod";
  std::string variant = "weighted", residual = "galerkin";
  auto* pod = reduce->add_subcommand("pod", "Proper orthogonal decomposition");
  pod->add_option("--variant", variant, "matrix, weighted, tsvd or hosvd")
      ->check(CLI::IsMember({"matrix", "weighted", "tsvd", "hosvd"}));
  pod->add_option("--rx", pod_spec.rx, "Reduced state dimension");
  pod->add_option("--rp", pod_spec.rp, "Reduced scheduling dimension");
  pod->add_option("--residual", residual, "galerkin or delta")
      ->check(CLI::IsMember({"galerkin", "delta"}));

  std::string ref_path, est_path;
  auto* eval = app.add_subcommand("eval", "NRMSE and costs between stored trajectories");
  eval->add_option("--ref", ref_path, "Reference trajectory CSV")->required();
  eval->add_option("--est", est_path, "Estimated trajectory CSV")->required();

  std::vector<std::string> inputs;
  auto* report = app.add_subcommand("report", "Merge report.csv files");
  report->add_option("--in", inputs, "Report files or directories")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the quick property suites");
  auto* run = app.add_subcommand("run", "Run the configured reducer grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*make) return cmd_bench_make(g);
    if (*tmm) {
      tmm_spec.mode = parse_tmm_mode(mode);
      tmm_spec.decomp = parse_decomp(decomp);
      return cmd_reduce(g, tmm_spec, tol);
    }
    if (*pod) {
      pod_spec.variant = parse_pod_variant(variant);
      pod_spec.residual = parse_pod_residual(residual);
      return cmd_reduce(g, pod_spec);
    }
    if (*eval) return cmd_eval(g, ref_path, est_path);
    if (*report) return cmd_report(g, inputs);
    if (*selftest) return cmd_selftest(g);
    if (*run) return cmd_run(g);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
