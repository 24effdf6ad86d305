// misalm: experiment driver for the misspecified augmented Lagrangian solver.
//
//   misalm generate --seed 3 --out out/
//   misalm solve    --regime increasing --spec learned --epsilon 1e-3
//   misalm table    --config cfg.json --no-timing
//   misalm seqsim   --out out/
//   misalm bounds   --regime constant --spec learned --epsilon 1e-2
//
// Exit codes: 0 success, 2 configuration error, 3 convergence-cap failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "misalm/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> epsilon;
  std::optional<std::string> regime;
  std::optional<std::string> spec;
  bool no_timing = false;
};

misalm::ExperimentConfig resolve(const Overrides& o) {
  misalm::ExperimentConfig cfg = o.config_path.empty() ? misalm::ExperimentConfig{} : misalm::load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (o.epsilon) cfg.epsilons = {*o.epsilon};
  if (o.regime) cfg.regime = misalm::parse_regime(*o.regime);
  if (o.spec) cfg.specification = misalm::parse_specification(*o.spec);
  if (o.no_timing) cfg.timing = false;
  misalm::validate(cfg);
  return cfg;
}

void log_setup(const misalm::ExperimentConfig& cfg, const misalm::ExperimentSetup& st) {
  std::fprintf(stderr, "instance: n=%ld s=%ld seed=%llu (requested %llu)  f*=%.10e  kkt=%.1e  tau=%.4f\n",
               cfg.n, cfg.s, static_cast<unsigned long long>(st.instance.portfolio.seed),
               static_cast<unsigned long long>(cfg.seed), st.reference.f_star, st.kkt_residual, st.tau);
}

int cmd_generate(const misalm::ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const misalm::GeneratedInstance g = misalm::generate_instance(cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  std::ofstream(dir / "instance.json") << misalm::instance_to_json(g.portfolio).dump(1) << "\n";
  std::ofstream(dir / "sample_cov.json") << misalm::dense_matrix_to_json(g.samples.sample_cov).dump() << "\n";
  std::ofstream(dir / "sigma_star.json") << misalm::dense_matrix_to_json(g.sigma_star).dump() << "\n";
  std::printf("wrote %s (seed %llu after %d regenerations)\n", (dir / "instance.json").c_str(),
              static_cast<unsigned long long>(g.portfolio.seed), g.regenerations);
  return kExitOk;
}

int cmd_solve(const misalm::ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const misalm::ExperimentSetup st = misalm::prepare(cfg);
  log_setup(cfg, st);
  const double eps = cfg.epsilons.front();
  const misalm::CellResult cell = misalm::run_cell(cfg, st, eps);
  fs::create_directories(cfg.output_dir);
  const fs::path p = fs::path(cfg.output_dir) / ("trace_" + misalm::to_string(cfg.regime) + "_" +
                                                 misalm::to_string(cfg.specification) + "_eps" +
                                                 misalm::epsilon_tag(eps) + ".csv");
  std::ofstream os(p);
  misalm::write_trace_csv(os, cell.trace, &cell.bounds, misalm::CsvOptions{cfg.timing});
  const misalm::TableRow row = misalm::table_row(cell);
  std::printf("eps=%.1e  rel_subopt=%.3e  infeas=%.3e  outer=%ld  inner=%ld  %s\n", eps, row.f_rel_subopt,
              row.infeas, row.outer, row.inner_actual, row.reached ? "reached" : "NOT reached");
  return row.reached ? kExitOk : kExitConvergence;
}

int cmd_table(const misalm::ExperimentConfig& cfg) {
  const misalm::ExperimentSetup st = misalm::prepare(cfg);
  log_setup(cfg, st);
  const misalm::TableRun run = misalm::run_table(cfg, st);
  for (const auto& path : misalm::write_table_outputs(cfg, run)) std::printf("wrote %s\n", path.c_str());
  misalm::write_table_csv(std::cout, run.rows, cfg.timing);
  bool all = true;
  for (const auto& r : run.rows) all = all && r.reached;
  return all ? kExitOk : kExitConvergence;
}

int cmd_seqsim(const misalm::ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const misalm::ExperimentSetup st = misalm::prepare(cfg);
  log_setup(cfg, st);
  const auto curves = misalm::run_seq_vs_sim(cfg, st);
  fs::create_directories(cfg.output_dir);
  const fs::path p = fs::path(cfg.output_dir) / "seqsim.csv";
  std::ofstream os(p);
  misalm::write_curves_csv(os, curves);
  for (const auto& c : curves)
    std::printf("%-12s budget=%3ld  final |f - f*| = %.3e\n", c.scheme.c_str(), c.budget, c.final_error());
  std::printf("wrote %s\n", p.c_str());
  return kExitOk;
}

/// Theory curves alone, k = 1..max_outer, with constants from the reference solve.
int cmd_bounds(const misalm::ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const misalm::ExperimentSetup st = misalm::prepare(cfg);
  log_setup(cfg, st);
  const bool learned = cfg.specification == misalm::Specification::Learned;
  const double eps = cfg.epsilons.front();
  const auto [penalty, inexact] = misalm::detail::schedules_for(cfg, eps, learned ? st.tau : 0.5, learned);
  misalm::AlmTrace skeleton;
  skeleton.penalty = penalty;
  skeleton.inexact = inexact;
  for (long k = 1; k <= cfg.max_outer; ++k) {
    misalm::AlmRecord r;
    r.k = k;
    skeleton.records.push_back(std::move(r));
  }
  const misalm::BoundInputs in = misalm::detail::bound_inputs(cfg, st, skeleton, learned);
  const misalm::BoundColumns cols = misalm::detail::bound_columns(in, skeleton);
  fs::create_directories(cfg.output_dir);
  const fs::path p = fs::path(cfg.output_dir) / ("bounds_" + misalm::to_string(cfg.regime) + "_" +
                                                 misalm::to_string(cfg.specification) + ".csv");
  std::ofstream os(p);
  os << "k,v_k_bound,subopt_upper_bound,subopt_lower_bound,dual_gap_bound\n";
  for (std::size_t i = 0; i < skeleton.records.size(); ++i)
    os << skeleton.records[i].k << ',' << misalm::detail::fmt_double(cols.v_k_bound[i]) << ','
       << misalm::detail::fmt_double(cols.subopt_upper_bound[i]) << ','
       << misalm::detail::fmt_double(cols.subopt_lower_bound[i]) << ','
       << misalm::detail::fmt_double(cols.dual_gap_bound[i]) << "\n";
  if (penalty.increasing()) {
    std::printf("C'_lambda = %.6e\n", misalm::c_lambda_prime(in));
  } else {
    std::printf("C_lambda = %.6e  B_g = %.6e  C1 = %.6e  C2 = %.6e  U = %.6e\n", misalm::c_lambda(in),
                misalm::b_g(in), misalm::c1_const(in), misalm::c2_const(in), misalm::u_const(in));
  }
  std::printf("wrote %s\n", p.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misspecified inexact augmented Lagrangian experiments"};
  app.require_subcommand(1);
  Overrides o;
  std::string regime, spec, out;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  app.add_option("--config", o.config_path, "ExperimentConfig JSON file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "generator seed");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* eps_opt = app.add_option("--epsilon", epsilon, "target accuracy (replaces the epsilon list)");
  auto* regime_opt = app.add_option("--regime", regime, "penalty regime")->check(CLI::IsMember({"constant", "increasing"}));
  auto* spec_opt = app.add_option("--spec", spec, "theta known or learned")->check(CLI::IsMember({"known", "learned"}));
  app.add_flag("--no-timing", o.no_timing, "leave cpu columns empty so CSVs are reproducible byte for byte");
  app.fallthrough();

  auto* generate = app.add_subcommand("generate", "draw the portfolio instance and solve the learning problem");
  auto* solve = app.add_subcommand("solve", "run one regime at one epsilon and write its trace");
  auto* table = app.add_subcommand("table", "run every epsilon of a regime and write the table");
  auto* seqsim = app.add_subcommand("seqsim", "compare learn-then-optimize against simultaneous");
  auto* bounds = app.add_subcommand("bounds", "write the theoretical bound curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.out = out;
  if (*eps_opt) o.epsilon = epsilon;
  if (*regime_opt) o.regime = regime;
  if (*spec_opt) o.spec = spec;

  try {
    const misalm::ExperimentConfig cfg = resolve(o);
    if (*generate) return cmd_generate(cfg);
    if (*solve) return cmd_solve(cfg);
    if (*table) return cmd_table(cfg);
    if (*seqsim) return cmd_seqsim(cfg);
    if (*bounds) return cmd_bounds(cfg);
  } catch (const misalm::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const misalm::DimensionError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const misalm::ConvergenceError& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  }
  return kExitConfig;
}
