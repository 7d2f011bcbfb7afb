// Command line front end for the spectral experiments. Every subcommand
// resolves a full configuration (defaults, then config file, then flags),
// runs one experiment, and writes its outputs into --out: CSV tables for
// plotting, a results JSON with the same tables plus summary scalars, and a
// run manifest (manifest.json) that can be fed back through --config to
// reproduce the run byte for byte.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wigner/config_json.hpp"
#include "wigner/csv.hpp"
#include "wigner/ensemble.hpp"
#include "wigner/mc.hpp"
#include "wigner/version.hpp"

namespace {

using nlohmann::json;
using wigner::mc::ExperimentConfig;

struct Overrides {
  std::optional<std::size_t> n, samples, workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> energy, kappa, delta, p, eta, width;
  std::optional<int> k;
  std::optional<std::string> family, diagonal;
  std::vector<double> grid;
  bool grid_given = false;
  std::string config_path;
  std::string out_dir = ".";
  std::string kernel = "identity";
};

void add_common_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file (a run manifest also works)");
  sub->add_option("--out", o.out_dir, "output directory (default: current directory)");
  sub->add_option("--seed", o.seed,
                  "master seed; sample i uses stream_seed(seed, i); omitted = drawn "
                  "from system entropy and echoed in the manifest");
  sub->add_option("--workers", o.workers,
                  "worker threads, 0 = hardware concurrency (results do not depend on this)");
  sub->add_option("--n", o.n, "matrix dimension");
  sub->add_option("--samples", o.samples, "number of Monte Carlo samples");
  sub->add_option("--E,--energy", o.energy, "spectral location E");
  sub->add_option("--kappa", o.kappa,
                  "bulk margin; configs must satisfy |E| <= 2 - kappa");
  sub->add_option("--delta", o.delta, "deviation threshold for concentration tables");
  sub->add_option("--k", o.k, "order parameter (repulsion order / index-set size)");
  sub->add_option("--p", o.p, "p for the eigenvector p-norm statistics");
  sub->add_option("--grid", o.grid, "experiment grid values (comma separated)")
      ->delimiter(',')
      ->expected(-1);
  sub->add_option("--family", o.family,
                  "off-diagonal law: complex-gaussian | product-uniform | "
                  "radial-uniform | product-gaussian");
  sub->add_option("--diagonal", o.diagonal, "diagonal law: real-gaussian | real-uniform");
}

ExperimentConfig resolve_config(const Overrides& o, const std::vector<double>& default_grid) {
  ExperimentConfig config;
  bool seed_given = o.seed.has_value();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw wigner::mc::ConfigError("cannot open config file " + o.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw wigner::mc::ConfigError("config file " + o.config_path + " is not valid JSON: " +
                                    e.what());
    }
    const json& body =
        (j.is_object() && j.contains("config") && j.at("config").is_object()) ? j.at("config")
                                                                              : j;
    seed_given = seed_given || (body.is_object() && body.contains("seed"));
    config = wigner::io::config_from_json(body);
  }

  if (const char* env = std::getenv("WIGNER_LAB_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
      throw wigner::mc::ConfigError("WIGNER_LAB_WORKERS must be a non-negative integer");
    }
    config.workers = static_cast<std::size_t>(v);
  }

  if (o.n) config.n = *o.n;
  if (o.samples) config.n_samples = *o.samples;
  if (o.workers) config.workers = *o.workers;
  if (o.seed) config.master_seed = *o.seed;
  if (o.energy) config.energy = *o.energy;
  if (o.kappa) config.kappa = *o.kappa;
  if (o.delta) config.delta = *o.delta;
  if (o.p) config.p_norm = *o.p;
  if (o.k) config.repulsion_order = *o.k;
  if (o.family) config.entry_spec.family = wigner::ensemble::parse_family(*o.family);
  if (o.diagonal) config.entry_spec.diagonal = wigner::ensemble::parse_diagonal(*o.diagonal);
  if (o.grid_given) config.grid = o.grid;
  if (o.eta) config.grid = {*o.eta};
  if (config.grid.empty()) config.grid = default_grid;

  if (!seed_given) {
    std::random_device rd;
    config.master_seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  }

  wigner::mc::validate_config(config);
  if (config.kappa < 0.5 && std::abs(config.energy) > 2.0 - 0.5) {
    std::fprintf(stderr,
                 "warning: E = %g sits within %g of the spectral edge; the bulk-regime "
                 "guarantees degrade as kappa -> 0, treat quantitative output with care\n",
                 config.energy, 2.0 - std::abs(config.energy));
  }
  return config;
}

std::string fd(double v) { return wigner::io::format_double(v); }

json ci_cells(const char* stem, const wigner::stats::EstimateWithCI& e) {
  const std::string s(stem);
  return json{{s, e.point}, {s + "_lo", e.lo}, {s + "_hi", e.hi}};
}

json fit_json(const wigner::stats::ExponentFit& fit) {
  json j;
  j["ok"] = fit.ok;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["slope_stderr"] = fit.slope_stderr;
  j["r2"] = fit.r2;
  j["bins_used"] = fit.bins_used;
  j["diagnostic"] = fit.diagnostic;
  return j;
}

// One experiment's complete on-disk output inside the --out directory.
class RunWriter {
 public:
  RunWriter(std::string command, const std::string& dir, const ExperimentConfig& config)
      : command_(std::move(command)),
        dir_(dir.empty() ? "." : dir),
        config_(config),
        start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(dir_);
    stem_ = command_;
    for (auto& c : stem_) {
      if (c == '-') c = '_';
    }
  }

  std::string path_for(const std::string& filename) const {
    return (std::filesystem::path(dir_) / filename).string();
  }

  void add_table(const std::string& name, std::vector<std::string> columns, json rows) {
    const std::string file = (name == stem_) ? stem_ + ".csv" : stem_ + "_" + name + ".csv";
    const std::string path = path_for(file);
    wigner::io::write_csv(path, columns, rows);
    outputs_.push_back(path);
    tables_[name] = std::move(rows);
  }

  void set_summary(json summary) { summary_ = std::move(summary); }
  void note_output(const std::string& path) { outputs_.push_back(path); }

  // results JSON first, manifest last: an existing manifest implies the rest
  // of the run's outputs are complete.
  void finish() {
    json envelope;
    envelope["tool"] = wigner::kToolName;
    envelope["version"] = wigner::kToolVersion;
    envelope["git_describe"] = wigner::kGitDescribe;
    envelope["command"] = command_;
    envelope["config"] = wigner::io::config_to_json(config_);
    envelope["seed"] = config_.master_seed;
    envelope["tables"] = tables_;
    envelope["summary"] = summary_;
    write_json(path_for("results.json"), envelope);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      start_)
                            .count();
    json manifest;
    manifest["tool"] = wigner::kToolName;
    manifest["version"] = wigner::kToolVersion;
    manifest["git_describe"] = wigner::kGitDescribe;
    manifest["command"] = command_;
    manifest["config"] = wigner::io::config_to_json(config_);
    manifest["master_seed"] = config_.master_seed;
    manifest["wall_time_seconds"] = wall;
    manifest["outputs"] = outputs_;
    manifest["status"] = "ok";
    write_json(path_for("manifest.json"), manifest);

    std::printf("wrote:");
    for (const auto& path : outputs_) std::printf(" %s", path.c_str());
    std::printf("\n");
  }

 private:
  void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to " + path + " failed");
    outputs_.push_back(path);
  }

  std::string command_;
  std::string stem_;
  std::string dir_;
  ExperimentConfig config_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
  json tables_ = json::object();
  json summary_ = json::object();
};

int run_sample(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {});
  RunWriter writer("sample", o.out_dir, config);

  const wigner::HermitianMatrix h = wigner::ensemble::sample_wigner(
      config.n, config.entry_spec, config.master_seed);
  const std::string matrix_path = writer.path_for("sample_matrix.bin");
  wigner::write_matrix(matrix_path, h);

  constexpr double kDelta0 = 0.25;
  const std::size_t draws = std::max<std::size_t>(config.n_samples, 100000);
  const auto report = wigner::ensemble::verify_moment_conditions(
      config.entry_spec, kDelta0, draws, config.master_seed);
  const auto closed = wigner::ensemble::exp_moment_closed_form(
      config.entry_spec.family, kDelta0);

  json row;
  row["law"] = wigner::ensemble::family_name(config.entry_spec.family);
  row["mean_re"] = report.mean.real();
  row["mean_im"] = report.mean.imag();
  row["second_moment"] = report.second_moment;
  row["exp_moment"] = report.exp_moment;
  row["exp_moment_stderr"] = report.exp_moment_stderr;
  if (closed) row["exp_moment_closed_form"] = *closed;
  row["diverged"] = report.diverged;
  row["delta0"] = report.delta0;
  row["n_draws"] = report.n_samples;

  writer.note_output(matrix_path);
  writer.add_table("moments",
                   {"law", "mean_re", "mean_im", "second_moment", "exp_moment",
                    "exp_moment_stderr", "exp_moment_closed_form", "diverged", "delta0",
                    "n_draws"},
                   json::array({row}));
  writer.set_summary(json{{"matrix_path", matrix_path},
                          {"max_abs_entry", h.max_abs()},
                          {"hermitian", h.is_hermitian()}});
  writer.finish();
  std::printf("n=%zu %s/%s: E|z|^2 = %s, E exp(%g |z|^2) = %s (stderr %s)\n", config.n,
              wigner::ensemble::family_name(config.entry_spec.family),
              wigner::ensemble::diagonal_name(config.entry_spec.diagonal),
              fd(report.second_moment).c_str(), kDelta0, fd(report.exp_moment).c_str(),
              fd(report.exp_moment_stderr).c_str());
  return 0;
}

int run_validate(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.5});
  RunWriter writer("validate", o.out_dir, config);
  const auto result = wigner::mc::validate_identities(config);

  json rows = json::array();
  for (const auto& row : result.rows) {
    rows.push_back(json{{"check", row.check},
                        {"n_evaluated", row.n_evaluated},
                        {"n_violations", row.n_violations},
                        {"worst_excess", row.worst}});
    std::printf("%-22s evaluated %zu, violations %zu\n", row.check.c_str(),
                row.n_evaluated, row.n_violations);
  }
  writer.add_table("identities", {"check", "n_evaluated", "n_violations", "worst_excess"},
                   rows);
  writer.set_summary(json{{"n_samples", result.n_samples},
                          {"eta", config.grid[0]},
                          {"all_ok", result.all_ok()}});
  writer.finish();
  if (!result.all_ok()) {
    std::fprintf(stderr, "identity violations found\n");
    return 2;
  }
  return 0;
}

int run_semicircle(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.05, 0.1, 0.2, 0.4});
  RunWriter writer("semicircle", o.out_dir, config);
  const auto result = wigner::mc::semicircle_concentration(config);

  json rows = json::array();
  json count_rows = json::array();
  json mean_rows = json::array();
  for (const auto& row : result.rows) {
    const double n_eta = static_cast<double>(config.n) * row.eta;
    rows.push_back(json{{"eta", row.eta},
                        {"n_eta", n_eta},
                        {"p_exceed", row.m_exceed.point},
                        {"ci_lo", row.m_exceed.lo},
                        {"ci_hi", row.m_exceed.hi},
                        {"n_samples", row.m_exceed.n_samples}});
    count_rows.push_back(json{{"eta", row.eta},
                              {"n_eta", n_eta},
                              {"p_exceed", row.count_exceed.point},
                              {"ci_lo", row.count_exceed.lo},
                              {"ci_hi", row.count_exceed.hi},
                              {"n_samples", row.count_exceed.n_samples}});
    const std::complex<double> target = wigner::spectral::m_sc({config.energy, row.eta});
    mean_rows.push_back(json{{"eta", row.eta},
                             {"mean_m_re", row.mean_m.real()},
                             {"mean_m_im", row.mean_m.imag()},
                             {"m_sc_re", target.real()},
                             {"m_sc_im", target.imag()}});
    std::printf("eta %-8s P(|m - m_sc| >= %g) = %s   P(|N/(n eta) - rho| >= %g) = %s\n",
                fd(row.eta).c_str(), config.delta, fd(row.m_exceed.point).c_str(),
                config.delta, fd(row.count_exceed.point).c_str());
  }
  writer.add_table("semicircle",
                   {"eta", "n_eta", "p_exceed", "ci_lo", "ci_hi", "n_samples"}, rows);
  writer.add_table("counting",
                   {"eta", "n_eta", "p_exceed", "ci_lo", "ci_hi", "n_samples"}, count_rows);
  writer.add_table("mean_m", {"eta", "mean_m_re", "mean_m_im", "m_sc_re", "m_sc_im"},
                   mean_rows);
  writer.set_summary(json{{"delta", result.delta},
                          {"n_samples", result.n_samples},
                          {"rho_sc", wigner::spectral::semicircle_density(config.energy)}});
  writer.finish();
  return 0;
}

int run_wegner(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.125, 0.25, 0.5, 1.0});
  RunWriter writer("wegner", o.out_dir, config);
  const auto result = wigner::mc::wegner_moments(config);

  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"epsilon", row.epsilon}, {"n_eta", row.epsilon}};
    r.update(ci_cells("mean_ni", row.mean_ni));
    r.update(ci_cells("mean_ni_sq", row.mean_ni_sq));
    r.update(ci_cells("mean_ni_k", row.mean_ni_k));
    r["neta_mean_m_sq"] = row.neta_mean_m_sq;
    rows.push_back(std::move(r));
    std::printf("eps %-8s E N = %-12s E N^2 = %-12s E N^2/eps = %s\n",
                fd(row.epsilon).c_str(), fd(row.mean_ni.point).c_str(),
                fd(row.mean_ni_sq.point).c_str(),
                fd(row.mean_ni_sq.point / row.epsilon).c_str());
  }
  writer.add_table("wegner",
                   {"epsilon", "n_eta", "mean_ni", "mean_ni_lo", "mean_ni_hi", "mean_ni_sq",
                    "mean_ni_sq_lo", "mean_ni_sq_hi", "mean_ni_k", "mean_ni_k_lo",
                    "mean_ni_k_hi", "neta_mean_m_sq"},
                   rows);
  writer.set_summary(json{{"ratio_max_over_min", result.ratio_max_over_min},
                          {"ratio_lo", result.ratio_lo},
                          {"ratio_hi", result.ratio_hi},
                          {"k", config.repulsion_order},
                          {"n_samples", result.n_samples}});
  writer.finish();
  std::printf("E N^2 / eps flatness ratio %s  (bootstrap 95%%: %s .. %s)\n",
              fd(result.ratio_max_over_min).c_str(), fd(result.ratio_lo).c_str(),
              fd(result.ratio_hi).c_str());
  return 0;
}

json repulsion_rows(const wigner::mc::RepulsionResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"epsilon", row.epsilon},
           {"n_eta", row.epsilon},
           {"events", row.p_ge_k.n_events}};
    r.update(ci_cells("p_ge_k", row.p_ge_k));
    rows.push_back(std::move(r));
  }
  return rows;
}

void print_fit(const char* label, const wigner::stats::ExponentFit& fit) {
  if (fit.ok) {
    std::printf("%s: slope %s +/- %s  (r2 %s, bins %zu)\n", label, fd(fit.slope).c_str(),
                fd(fit.slope_stderr).c_str(), fd(fit.r2).c_str(), fit.bins_used);
  } else {
    std::printf("%s: no fit (%s)\n", label, fit.diagnostic.c_str());
  }
}

int run_repulsion(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.25, 0.35, 0.5, 0.7, 1.0});
  RunWriter writer("repulsion", o.out_dir, config);
  const auto result = wigner::mc::repulsion_fit(config);

  writer.add_table("repulsion",
                   {"epsilon", "n_eta", "events", "p_ge_k", "p_ge_k_lo", "p_ge_k_hi"},
                   repulsion_rows(result));
  json summary{{"k", result.k},
               {"n_samples", result.n_samples},
               {"fit", fit_json(result.fit)}};
  // A flat k = 1 control from the same sampled counts: interval occupation
  // itself scales like epsilon, so its slope should sit near 1 while the
  // k >= 2 slopes steepen.
  if (result.k != 1) {
    const auto control = wigner::mc::refit_repulsion(result, 1);
    summary["control_k1_fit"] = fit_json(control.fit);
    print_fit("k=1 control", control.fit);
  }
  writer.set_summary(summary);
  writer.finish();
  print_fit("log P(N >= k) vs log eps", result.fit);
  return 0;
}

int run_gaps(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0});
  RunWriter writer("gaps", o.out_dir, config);
  const auto result = wigner::mc::gap_tail(config);

  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"threshold_k", row.big_k}, {"events", row.p_exceed.n_events}};
    r.update(ci_cells("p_exceed", row.p_exceed));
    rows.push_back(std::move(r));
    std::printf("P(n gap >= %-6s) = %s\n", fd(row.big_k).c_str(),
                fd(row.p_exceed.point).c_str());
  }
  writer.add_table("gaps",
                   {"threshold_k", "events", "p_exceed", "p_exceed_lo", "p_exceed_hi"},
                   rows);
  writer.set_summary(json{{"used", result.used},
                          {"censored", result.censored},
                          {"failed", result.failed}});
  writer.finish();
  return 0;
}

int run_deloc(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0});
  RunWriter writer("deloc", o.out_dir, config);
  const auto result = wigner::mc::delocalization_stats(config, o.width.value_or(0.0));

  json qrows = json::array();
  for (const auto& row : result.quantiles) {
    qrows.push_back(json{{"quantile", row.quantile},
                         {"sup_norm_scaled", row.sup_norm_scaled},
                         {"p_norm_scaled", row.p_norm_scaled}});
  }
  json erows = json::array();
  for (const auto& row : result.exceedance) {
    json r{{"threshold_m", row.big_k}, {"events", row.p_exceed.n_events}};
    r.update(ci_cells("p_exceed", row.p_exceed));
    erows.push_back(std::move(r));
  }
  writer.add_table("quantiles", {"quantile", "sup_norm_scaled", "p_norm_scaled"}, qrows);
  writer.add_table("exceedance",
                   {"threshold_m", "events", "p_exceed", "p_exceed_lo", "p_exceed_hi"},
                   erows);
  writer.set_summary(json{{"n_vectors", result.n_vectors},
                          {"n_samples", result.n_samples},
                          {"interval_width", result.interval_width},
                          {"p", config.p_norm}});
  writer.finish();
  const auto& top = result.quantiles.back();
  std::printf("%zu vectors from %zu samples; max sqrt(n)||v||_inf = %s, "
              "max n^(1/2-1/p)||v||_p = %s\n",
              result.n_vectors, result.n_samples, fd(top.sup_norm_scaled).c_str(),
              fd(top.p_norm_scaled).c_str());
  return 0;
}

int run_concentration(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.5});
  RunWriter writer("concentration", o.out_dir, config);
  const auto result = wigner::mc::xi_concentration(config);

  json row{{"eta", result.eta}, {"n_pairs", result.n_pairs}};
  row.update(ci_cells("xi_mean", result.xi_mean));
  row.update(ci_cells("x_re", result.x_stat_re));
  row.update(ci_cells("x_im", result.x_stat_im));
  writer.add_table("concentration",
                   {"eta", "n_pairs", "xi_mean", "xi_mean_lo", "xi_mean_hi", "x_re",
                    "x_re_lo", "x_re_hi", "x_im", "x_im_lo", "x_im_hi"},
                   json::array({row}));
  writer.set_summary(json{{"eta", result.eta}, {"n_pairs", result.n_pairs}});
  writer.finish();
  std::printf("mean xi = %s [%s, %s];  mean X = %s + %si\n", fd(result.xi_mean.point).c_str(),
              fd(result.xi_mean.lo).c_str(), fd(result.xi_mean.hi).c_str(),
              fd(result.x_stat_re.point).c_str(), fd(result.x_stat_im.point).c_str());
  return 0;
}

int run_xi_tail(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {0.10, 0.13, 0.17, 0.22, 0.29});
  RunWriter writer("xi-tail", o.out_dir, config);
  const auto result = wigner::mc::xi_lower_tail(config);

  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"delta", row.delta}, {"events", row.p_le.n_events}};
    r.update(ci_cells("p_le", row.p_le));
    rows.push_back(std::move(r));
    std::printf("P(xi_avg <= %-6s) = %s\n", fd(row.delta).c_str(), fd(row.p_le.point).c_str());
  }
  writer.add_table("xi_tail", {"delta", "events", "p_le", "p_le_lo", "p_le_hi"}, rows);
  writer.set_summary(json{{"m", result.m},
                          {"n_samples", result.n_samples},
                          {"fit", fit_json(result.fit)}});
  writer.finish();
  print_fit("log P vs log delta", result.fit);
  return 0;
}

int run_hanson_wright(const Overrides& o) {
  ExperimentConfig config = resolve_config(o, {});
  const std::size_t m = config.n;

  std::vector<std::complex<double>> kernel(m * m, 0.0);
  if (o.kernel == "identity") {
    for (std::size_t j = 0; j < m; ++j) kernel[j * m + j] = 1.0 / static_cast<double>(m);
  } else if (o.kernel == "flat") {
    for (auto& v : kernel) v = 1.0 / static_cast<double>(m);
  } else {
    throw wigner::mc::ConfigError("unknown kernel \"" + o.kernel +
                                  "\" (choices: identity, flat)");
  }

  double hs_sq = 0.0;
  for (const auto& v : kernel) hs_sq += std::norm(v);
  const double a_norm = std::sqrt(hs_sq);
  if (config.grid.empty()) {
    config.grid = {0.5 * a_norm, a_norm, 2.0 * a_norm, 4.0 * a_norm};
  }

  RunWriter writer("hanson-wright", o.out_dir, config);
  const auto result = wigner::mc::hanson_wright_trial(
      kernel, m, config.entry_spec, config.n_samples, config.grid, config.master_seed,
      config.workers);

  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"delta", row.delta},
           {"delta_over_a", row.delta / result.hs_norm},
           {"events", row.p_exceed.n_events},
           {"envelope", row.envelope}};
    r.update(ci_cells("p_exceed", row.p_exceed));
    rows.push_back(std::move(r));
    std::printf("P(|X| >= %-10s) = %-12s envelope %s\n", fd(row.delta).c_str(),
                fd(row.p_exceed.point).c_str(), fd(row.envelope).c_str());
  }
  writer.add_table("hanson_wright",
                   {"delta", "delta_over_a", "events", "p_exceed", "p_exceed_lo",
                    "p_exceed_hi", "envelope"},
                   rows);
  writer.set_summary(json{{"fitted_c", result.fitted_c},
                          {"hs_norm", result.hs_norm},
                          {"tails_monotone", result.tails_monotone},
                          {"kernel", o.kernel},
                          {"m", m},
                          {"n_samples", result.n_samples}});
  writer.finish();
  std::printf("fitted c = %s (A = %s, tails monotone: %s)\n", fd(result.fitted_c).c_str(),
              fd(result.hs_norm).c_str(), result.tails_monotone ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral statistics laboratory for Hermitian Wigner matrices"};
  app.set_version_flag("--version", std::string(wigner::kToolVersion) + " (" +
                                        wigner::kGitDescribe + ")");
  app.require_subcommand(1);

  Overrides o;

  CLI::App* sample = app.add_subcommand(
      "sample", "draw one matrix, dump it, and check entry moment conditions");
  CLI::App* validate = app.add_subcommand(
      "validate", "deterministic identity suite over sampled matrices");
  CLI::App* semicircle = app.add_subcommand(
      "semicircle", "Stieltjes transform and counting concentration across eta");
  CLI::App* wegner = app.add_subcommand(
      "wegner", "micro-interval occupation moments at widths eps/n");
  CLI::App* repulsion = app.add_subcommand(
      "repulsion", "P(N_I >= k) across interval widths with log-log slope fit");
  CLI::App* gaps = app.add_subcommand(
      "gaps", "tail of the scaled spectral gap above E");
  CLI::App* deloc = app.add_subcommand(
      "deloc", "eigenvector sup/p-norm statistics near E");
  CLI::App* concentration = app.add_subcommand(
      "concentration", "spectral weight and resolvent-sum concentration");
  CLI::App* hw = app.add_subcommand(
      "hanson-wright", "quadratic form concentration for an explicit kernel");
  CLI::App* xi_tail = app.add_subcommand(
      "xi-tail", "lower tail of averaged spectral weights near E");

  for (CLI::App* sub : {sample, validate, semicircle, wegner, repulsion, gaps, deloc,
                        concentration, hw, xi_tail}) {
    add_common_options(sub, o);
  }
  validate->add_option("--eta", o.eta, "resolvent scale (shorthand for --grid eta)");
  concentration->add_option("--eta", o.eta, "resolvent scale (shorthand for --grid eta)");
  deloc->add_option("--width", o.width, "energy window width (default 8/n)");
  hw->add_option("--kernel", o.kernel, "kernel shape: identity | flat");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  o.grid_given = app.get_subcommands().front()->count("--grid") > 0;

  try {
    const CLI::App* sub = app.get_subcommands().front();
    if (sub == sample) return run_sample(o);
    if (sub == validate) return run_validate(o);
    if (sub == semicircle) return run_semicircle(o);
    if (sub == wegner) return run_wegner(o);
    if (sub == repulsion) return run_repulsion(o);
    if (sub == gaps) return run_gaps(o);
    if (sub == deloc) return run_deloc(o);
    if (sub == concentration) return run_concentration(o);
    if (sub == hw) return run_hanson_wright(o);
    if (sub == xi_tail) return run_xi_tail(o);
  } catch (const wigner::mc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
