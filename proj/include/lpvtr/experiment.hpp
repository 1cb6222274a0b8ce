// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lpvtr/msd.hpp"
#include "lpvtr/pod.hpp"
#include "lpvtr/tmm.hpp"

namespace lpvtr {

struct ReducerSpec {
  std::string name;            // run id, unique within a config
  std::string method = "tmm";  // "tmm" or "pod"
  TmmMode mode = TmmMode::Reachability;
  Decomp decomp = Decomp::Hosvd;
  std::size_t horizon = 2;
  PodVariant variant = PodVariant::Weighted;
  PodResidual residual = PodResidual::Galerkin;
  std::size_t rx = 3;
  std::size_t rp = 2;
};

/// Parses "tmm R hosvd 2" or "pod weighted 3 2 [galerkin|delta]".
ReducerSpec parse_reducer(const std::string& name, const std::string& text);
std::string describe(const ReducerSpec& s);

struct ExperimentConfig {
  int M = 5;
  int Mp = 2;
  MsdParams params;
  DatasetConfig data;
  TmmOptions tmm;
  std::vector<ReducerSpec> reducers;
};

/// INI text with sections [benchmark], [datasets], [reducers]. Unknown keys
/// are rejected.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

/// Overrides the dataset seeds (seed, seed + 1, seed + 2) and the TSVD seed.
void apply_seed(ExperimentConfig& cfg, std::uint64_t seed);

/// CRC-32 of the canonical config text, as 8 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
std::string canonical_config(const ExperimentConfig& cfg);

struct DatasetCosts {
  CostBreakdown red, val, extra;
};

struct ReductionReport {
  ReducerSpec spec;
  std::size_t nx = 0, np = 0, rx = 0, rp = 0;
  double nrmse_red = 0, nrmse_val = 0, nrmse_extra = 0;  // NaN when diverged
  std::optional<DatasetCosts> costs;                     // POD runs
  double cpu_s = 0;
  std::size_t params = 0;
  bool diverged = false;
  std::string error;  // non-empty if the run failed
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct DatasetStats {
  std::size_t nx = 0, np = 0, params = 0, N = 0;
  double embed_nrmse_red = 0, embed_nrmse_val = 0, embed_nrmse_extra = 0;
  std::vector<std::string> notes;
};

/// Benchmark model, its datasets and the full-order closed-loop references
/// on each dataset.
struct BenchmarkSetup {
  MsdChain chain;
  AffineLpvSs fom;
  SchedulingMap eta;
  DatasetBundle data;
  DatasetBundle fom_sim;
  DatasetStats stats;
};

BenchmarkSetup make_benchmark(const ExperimentConfig& cfg);

struct RunOutput {
  ReductionReport report;
  std::optional<AffineLpvSs> model;
  std::optional<ProjectionTriple> proj;
};

/// Runs one reducer; failures are recorded in report.error, never thrown.
RunOutput run_reducer(const BenchmarkSetup& setup, const ExperimentConfig& cfg,
                      const ReducerSpec& spec);

struct ExperimentResult {
  DatasetStats stats;
  std::vector<ReductionReport> reports;
  bool any_failed() const;
};

/// Builds the benchmark, runs every reducer and, if `out_dir` is non-empty,
/// writes report.csv, report.json, the datasets and one model and projection
/// file per successful run.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir = "");

inline constexpr const char* kReportColumns =
    "method,mode,decomp,horizon,variant,rx,rp,nrmse_red,nrmse_val,nrmse_extra,"
    "Jx,Jp,Jxp,cpu_s,params,diverged,seed,config_hash";

std::string csv_row(const ReductionReport& r);
void write_report_csv(std::ostream& os, const std::vector<ReductionReport>& rs);
void write_report_json(std::ostream& os, const DatasetStats* stats,
                       const std::vector<ReductionReport>& rs);

/// Rows of a report.csv (header checked). Every field is kept as text.
std::vector<std::vector<std::string>> read_report_csv(std::istream& is);

}  // namespace lpvtr
