// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/crc.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "lpvtr/io.hpp"
#include "lpvtr/metrics.hpp"

namespace lpvtr {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using Index = Eigen::Index;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-')
    throw std::invalid_argument("bad " + what + ": '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ReducerSpec parse_reducer(const std::string& name, const std::string& text) {
  const auto t = tokens(text);
  ReducerSpec s;
  s.name = name;
  if (t.empty()) throw std::invalid_argument("empty reducer spec for " + name);
  s.method = t[0];
  if (s.method == "tmm") {
    if (t.size() != 4)
      throw std::invalid_argument("tmm reducer needs 'tmm <R|O|H> <tsvd|hosvd> <n>'");
    s.mode = parse_tmm_mode(t[1]);
    s.decomp = parse_decomp(t[2]);
    s.horizon = to_size(t[3], "horizon");
  } else if (s.method == "pod") {
    if (t.size() != 4 && t.size() != 5)
      throw std::invalid_argument("pod reducer needs 'pod <variant> <rx> <rp> [residual]'");
    s.variant = parse_pod_variant(t[1]);
    s.rx = to_size(t[2], "rx");
    s.rp = to_size(t[3], "rp");
    if (t.size() == 5) s.residual = parse_pod_residual(t[4]);
  } else {
    throw std::invalid_argument("unknown reducer method '" + s.method + "'");
  }
  return s;
}

std::string describe(const ReducerSpec& s) {
  if (s.method == "tmm")
    return "tmm " + to_string(s.mode) + " " + to_string(s.decomp) + " " +
           std::to_string(s.horizon);
  return "pod " + to_string(s.variant) + " " + std::to_string(s.rx) + " " +
         std::to_string(s.rp) + " " + to_string(s.residual);
}

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const auto num = [&] {
        std::size_t pos = 0;
        double d = 0;
        try {
          d = std::stod(v, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != v.size() || v.empty())
          throw std::invalid_argument("config: bad number for " + section + "." + key);
        return d;
      };
      const auto size = [&] { return to_size(v, section + "." + key); };
      const auto unknown = [&] {
        throw std::invalid_argument("config: unknown key " + section + "." + key);
      };
      if (section == "benchmark") {
        if (key == "M") cfg.M = static_cast<int>(size());
        else if (key == "Mp") cfg.Mp = static_cast<int>(size());
        else if (key == "m") cfg.params.m = num();
        else if (key == "ka") cfg.params.ka = num();
        else if (key == "kb") cfg.params.kb = num();
        else if (key == "b") cfg.params.b = num();
        else if (key == "Td") cfg.data.td = num();
        else unknown();
      } else if (section == "datasets") {
        auto& d = cfg.data;
        if (key == "N") d.N = size();
        else if (key == "Td") d.td = num();
        else if (key == "seed_red") d.seed_red = size();
        else if (key == "seed_val") d.seed_val = size();
        else if (key == "seed_extra") d.seed_extra = size();
        else if (key == "amplitude_scale") d.amplitude_scale = num();
        else if (key == "amplitude") d.recipe.amplitude = num();
        else if (key == "extra_factor") d.recipe.extra_factor = num();
        else if (key == "step_segments") d.recipe.step_segments = static_cast<int>(size());
        else if (key == "sine_count") d.recipe.sine_count = static_cast<int>(size());
        else if (key == "min_freq") d.recipe.min_freq = num();
        else if (key == "max_freq_td") d.recipe.max_freq_td = num();
        else unknown();
      } else if (section == "reducers") {
        auto& t = cfg.tmm;
        if (key == "tol") t.tol = num();
        else if (key == "rank_tol") t.rank_tol = num();
        else if (key == "memory_budget") t.memory_budget = size();
        else if (key == "tsvd_restarts") t.tsvd.restarts = static_cast<int>(size());
        else if (key == "tsvd_max_iters") t.tsvd.max_iters = static_cast<int>(size());
        else if (key == "tsvd_seed") t.tsvd.seed = size();
        else cfg.reducers.push_back(parse_reducer(key, v));
      } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
    }
  }
  std::set<std::string> names;
  for (const auto& r : cfg.reducers)
    if (!names.insert(r.name).second)
      throw std::invalid_argument("config: duplicate reducer " + r.name);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config " + path);
  return parse_config(is);
}

void apply_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.data.seed_red = seed;
  cfg.data.seed_val = seed + 1;
  cfg.data.seed_extra = seed + 2;
  cfg.tmm.tsvd.seed = seed;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const auto& d = cfg.data;
  const auto& r = d.recipe;
  os << "M=" << cfg.M << "\nMp=" << cfg.Mp << "\nm=" << fmt17(cfg.params.m)
     << "\nka=" << fmt17(cfg.params.ka) << "\nkb=" << fmt17(cfg.params.kb)
     << "\nb=" << fmt17(cfg.params.b) << "\nTd=" << fmt17(d.td) << "\nN=" << d.N
     << "\nseeds=" << d.seed_red << ',' << d.seed_val << ',' << d.seed_extra
     << "\namplitude_scale=" << fmt17(d.amplitude_scale)
     << "\namplitude=" << fmt17(r.amplitude) << "\nextra_factor=" << fmt17(r.extra_factor)
     << "\nstep_segments=" << r.step_segments << "\nsine_count=" << r.sine_count
     << "\nmin_freq=" << fmt17(r.min_freq) << "\nmax_freq_td=" << fmt17(r.max_freq_td)
     << "\ntol=" << fmt17(cfg.tmm.tol) << "\nrank_tol=" << fmt17(cfg.tmm.rank_tol)
     << "\nmemory_budget=" << cfg.tmm.memory_budget
     << "\ntsvd=" << cfg.tmm.tsvd.restarts << ',' << cfg.tmm.tsvd.max_iters << ','
     << cfg.tmm.tsvd.seed << ',' << fmt17(cfg.tmm.tsvd.tol) << '\n';
  for (const auto& s : cfg.reducers) os << "run " << s.name << '=' << describe(s) << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

BenchmarkSetup make_benchmark(const ExperimentConfig& cfg) {
  BenchmarkSetup s;
  s.chain = build_msd(cfg.M, cfg.Mp, cfg.params);
  s.fom = discretize_euler(embed_lpv(s.chain), cfg.data.td);
  s.eta = msd_scheduling_map(s.chain);
  s.data = make_datasets(s.chain, cfg.data);
  const Vector x0 = Vector::Zero(static_cast<Index>(s.fom.nx()));
  const auto sim = [&](const Trajectory& d) {
    auto tr = simulate(s.fom, s.eta, d.u, x0, cfg.data.td);
    tr.label = d.label;
    return tr;
  };
  s.fom_sim = {sim(s.data.red), sim(s.data.val), sim(s.data.extra)};

  auto& st = s.stats;
  st.nx = s.fom.nx();
  st.np = s.fom.np();
  st.params = param_count(s.fom);
  st.N = cfg.data.N;
  const auto embed = [](const Trajectory& nl, const Trajectory& lpv) {
    if (nl.diverged() || lpv.diverged()) return kNaN;
    return nrmse(nl.y, lpv.y);
  };
  st.embed_nrmse_red = embed(s.data.red, s.fom_sim.red);
  st.embed_nrmse_val = embed(s.data.val, s.fom_sim.val);
  st.embed_nrmse_extra = embed(s.data.extra, s.fom_sim.extra);
  st.notes.push_back("n_p counts one scheduling variable per nonlinear spring");
  if (cfg.M == 5 && cfg.Mp == 2)
    st.notes.push_back(
        "MSD1 published n_p is 5; per-spring counting gives " + std::to_string(st.np));
  return s;
}

RunOutput run_reducer(const BenchmarkSetup& setup, const ExperimentConfig& cfg,
                      const ReducerSpec& spec) {
  RunOutput out;
  auto& r = out.report;
  r.spec = spec;
  r.nx = setup.fom.nx();
  r.np = setup.fom.np();
  r.seed = cfg.data.seed_red;
  r.config_hash = config_hash(cfg);
  r.nrmse_red = r.nrmse_val = r.nrmse_extra = kNaN;
  try {
    ReducedModel red;
    ProjectionTriple proj;
    const auto t0 = std::chrono::steady_clock::now();
    if (spec.method == "tmm") {
      auto res = tmm_reduce(setup.fom, spec.mode, spec.decomp, spec.horizon,
                            setup.eta, cfg.tmm);
      red = std::move(res.reduced);
      proj = std::move(res.proj);
      r.rp = res.rp;
    } else {
      const auto snap = snapshot_matrices(setup.data.red);
      const auto pr =
          spec.variant == PodVariant::Tsvd
              ? pod_tensor(snap, spec.rx, spec.rp, Decomp::Tsvd, spec.residual, cfg.tmm.tsvd)
              : pod_reduce(snap, spec.variant, spec.rx, spec.rp, spec.residual);
      proj = pr.proj;
      red = petrov_galerkin(setup.fom, proj, setup.eta);
      r.rp = reported_rp(proj.Z, proj.z_includes_affine);
    }
    r.cpu_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.rx = proj.rx();
    r.params = param_count(red.model);
    r.warnings = red.warnings;

    const Vector x0 = Vector::Zero(static_cast<Index>(r.rx));
    DatasetCosts costs;
    const auto eval = [&](const Trajectory& ref, CostBreakdown& cost) {
      const auto rom = simulate(red.model, red.eta, ref.u, x0, cfg.data.td);
      if (spec.method == "pod") cost = cost_closed_loop(ref, rom, proj);
      if (rom.diverged()) {
        r.diverged = true;
        return kNaN;
      }
      return nrmse(ref.y, rom.y);
    };
    r.nrmse_red = eval(setup.fom_sim.red, costs.red);
    r.nrmse_val = eval(setup.fom_sim.val, costs.val);
    r.nrmse_extra = eval(setup.fom_sim.extra, costs.extra);
    if (spec.method == "pod") r.costs = costs;
    out.model = std::move(red.model);
    out.proj = std::move(proj);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return out;
}

bool ExperimentResult::any_failed() const {
  for (const auto& r : reports)
    if (!r.error.empty()) return true;
  return false;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  ExperimentResult res;
  const auto setup = make_benchmark(cfg);
  res.stats = setup.stats;
  std::vector<RunOutput> runs;
  for (const auto& spec : cfg.reducers) {
    runs.push_back(run_reducer(setup, cfg, spec));
    res.reports.push_back(runs.back().report);
  }
  if (out_dir.empty()) return res;

  const fs::path dir(out_dir);
  fs::create_directories(dir / "datasets");
  fs::create_directories(dir / "models");
  for (const auto* tr : {&setup.data.red, &setup.data.val, &setup.data.extra})
    write_trajectory_csv((dir / "datasets" / (tr->label + ".csv")).string(), *tr);
  write_model((dir / "models" / "fom.model").string(), setup.fom);
  for (const auto& run : runs) {
    const auto stem = dir / "models" / run.report.spec.name;
    if (run.model) write_model(stem.string() + ".model", *run.model);
    if (run.proj) write_projection(stem.string() + ".proj", *run.proj);
  }
  {
    std::ofstream os(dir / "report.csv");
    write_report_csv(os, res.reports);
  }
  {
    std::ofstream os(dir / "report.json");
    write_report_json(os, &res.stats, res.reports);
  }
  return res;
}

std::string csv_row(const ReductionReport& r) {
  const auto& s = r.spec;
  const bool tmm = s.method == "tmm";
  const bool ok = r.error.empty();
  std::ostringstream os;
  os << s.method << ',' << (tmm ? to_string(s.mode) : "") << ','
     << (tmm ? to_string(s.decomp) : "") << ',' << (tmm ? std::to_string(s.horizon) : "")
     << ',' << (tmm ? "" : to_string(s.variant)) << ',';
  if (ok) {
    os << r.rx << ',' << r.rp << ',' << fmt(r.nrmse_red) << ',' << fmt(r.nrmse_val) << ','
       << fmt(r.nrmse_extra) << ',';
    if (r.costs)
      os << fmt(r.costs->red.Jx) << ',' << fmt(r.costs->red.Jp) << ','
         << fmt(r.costs->red.Jxp) << ',';
    else
      os << ",,,";
    os << fmt(r.cpu_s) << ',' << r.params << ',' << (r.diverged ? 1 : 0) << ',';
  } else {
    os << ",,,,,,,,,,error,";
  }
  os << r.seed << ',' << r.config_hash;
  return os.str();
}

void write_report_csv(std::ostream& os, const std::vector<ReductionReport>& rs) {
  os << kReportColumns << '\n';
  for (const auto& r : rs) os << csv_row(r) << '\n';
}

namespace {

nlohmann::json num(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json cost_json(const CostBreakdown& c) {
  return {{"Jx", num(c.Jx)},       {"Jp", num(c.Jp)},       {"Jxp", num(c.Jxp)},
          {"Jxp_A", num(c.Jxp_A)}, {"Jxp_B", num(c.Jxp_B)}, {"Jxp_C", num(c.Jxp_C)}};
}

}  // namespace

void write_report_json(std::ostream& os, const DatasetStats* stats,
                       const std::vector<ReductionReport>& rs) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  if (stats) {
    j["benchmark"] = {{"nx", stats->nx},
                      {"np", stats->np},
                      {"params", stats->params},
                      {"N", stats->N},
                      {"embed_nrmse", {{"red", num(stats->embed_nrmse_red)},
                                       {"val", num(stats->embed_nrmse_val)},
                                       {"extra", num(stats->embed_nrmse_extra)}}},
                      {"notes", stats->notes}};
  }
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : rs) {
    const auto& s = r.spec;
    const bool tmm = s.method == "tmm";
    nlohmann::ordered_json o;
    o["name"] = s.name;
    o["method"] = s.method;
    o["mode"] = tmm ? to_string(s.mode) : "";
    o["decomp"] = tmm ? to_string(s.decomp) : "";
    o["horizon"] = tmm ? nlohmann::json(s.horizon) : nlohmann::json(nullptr);
    o["variant"] = tmm ? "" : to_string(s.variant);
    o["residual"] = tmm ? "" : to_string(s.residual);
    o["nx"] = r.nx;
    o["np"] = r.np;
    if (r.error.empty()) {
      o["rx"] = r.rx;
      o["rp"] = r.rp;
      o["nrmse_red"] = num(r.nrmse_red);
      o["nrmse_val"] = num(r.nrmse_val);
      o["nrmse_extra"] = num(r.nrmse_extra);
      if (r.costs)
        o["costs"] = {{"red", cost_json(r.costs->red)},
                      {"val", cost_json(r.costs->val)},
                      {"extra", cost_json(r.costs->extra)}};
      o["cpu_s"] = r.cpu_s;
      o["params"] = r.params;
      o["diverged"] = r.diverged;
    }
    o["error"] = r.error;
    o["warnings"] = r.warnings;
    o["seed"] = r.seed;
    o["config_hash"] = r.config_hash;
    runs.push_back(std::move(o));
  }
  j["runs"] = std::move(runs);
  os << j.dump(2) << '\n';
}

std::vector<std::vector<std::string>> read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  if (line != kReportColumns) throw std::runtime_error("report csv: unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      f.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

}  // namespace lpvtr
