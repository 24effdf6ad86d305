#pragma once

// Desk-scale replication harness for the misspecified Markowitz experiment:
// instance generation, reference solves, per-epsilon tables for the four
// regimes, and the learn-then-optimize comparison.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "misalm/bounds.hpp"
#include "misalm/errors.hpp"
#include "misalm/learning.hpp"
#include "misalm/outer_alm.hpp"
#include "misalm/portfolio.hpp"
#include "misalm/reference_qp.hpp"
#include "misalm/schedules.hpp"

namespace misalm {

enum class Regime { Constant, Increasing };
enum class Specification { Known, Learned };

inline std::string to_string(Regime r) { return r == Regime::Constant ? "constant" : "increasing"; }
inline std::string to_string(Specification s) { return s == Specification::Known ? "known" : "learned"; }

inline Regime parse_regime(const std::string& s) {
  if (s == "constant") return Regime::Constant;
  if (s == "increasing") return Regime::Increasing;
  throw ConfigError("regime must be constant or increasing, got '" + s + "'");
}

inline Specification parse_specification(const std::string& s) {
  if (s == "known") return Specification::Known;
  if (s == "learned") return Specification::Learned;
  throw ConfigError("specification must be known or learned, got '" + s + "'");
}

struct ExperimentConfig {
  long n = 100;
  long s = 10;
  std::uint64_t seed = 1;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  Regime regime = Regime::Constant;
  Specification specification = Specification::Known;
  double rho_o = 1.0;
  double beta = 1.05;
  double c = 1e-3;
  std::vector<long> sequential_budgets{0, 2, 4, 8};
  std::string output_dir = "out";

  // Knobs the paper leaves open.
  double sector_limit = 0.3;
  double sector_overlap = 0.2;  // probability of joining a second sector
  double risk_tradeoff = 0.1;
  double upsilon = 0.4;
  double psd_floor = 1e-2;
  double admm_penalty = 1.0;
  double kappa = 1.0;
  /// Increasing regime: alpha0 <= 0 means 1/(2 rho0 zeta(1+c)^2).
  double alpha0 = 0.0;
  /// Increasing regime with the learned specification: the learner's tau;
  /// <= 0 means measure it from the ADMM error history.
  double tau = 0.0;
  bool certified_inner = true;
  long max_outer = 200;
  long max_inner_iterations = 50'000'000;
  long seqsim_outer = 60;
  bool timing = true;
};

inline void validate(const ExperimentConfig& c) {
  if (c.s < 1 || c.n < c.s) throw ConfigError("config: need n >= s >= 1");
  if (c.epsilons.empty()) throw ConfigError("config: epsilons must not be empty");
  for (double e : c.epsilons)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("config: every epsilon must lie in (0, 1)");
  if (!(c.rho_o > 0.0)) throw ConfigError("config: rho_o must be positive");
  if (!(c.beta > 1.0)) throw ConfigError("config: beta must exceed 1");
  if (!(c.c > 0.0)) throw ConfigError("config: c must be positive");
  for (long b : c.sequential_budgets)
    if (b < 0) throw ConfigError("config: sequential budgets must be nonnegative");
  if (!(c.sector_limit > 0.0 && c.sector_limit <= 1.0)) throw ConfigError("config: sector_limit must lie in (0, 1]");
  if (!(c.sector_overlap >= 0.0 && c.sector_overlap <= 1.0)) throw ConfigError("config: sector_overlap must lie in [0, 1]");
  if (!(c.tau < 1.0)) throw ConfigError("config: tau must be below 1");
  if (c.max_outer < 1 || c.seqsim_outer < 1 || c.max_inner_iterations < 1)
    throw ConfigError("config: iteration caps must be positive");
}

/// Reads a config object; unknown keys are rejected so typos surface.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n") c.n = v.get<long>();
      else if (key == "s") c.s = v.get<long>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "epsilons" || key == "epsilon") c.epsilons = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "regime") c.regime = parse_regime(v.get<std::string>());
      else if (key == "specification") c.specification = parse_specification(v.get<std::string>());
      else if (key == "rho_o") c.rho_o = v.get<double>();
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "c") c.c = v.get<double>();
      else if (key == "sequential_budgets") c.sequential_budgets = v.get<std::vector<long>>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "sector_limit") c.sector_limit = v.get<double>();
      else if (key == "sector_overlap") c.sector_overlap = v.get<double>();
      else if (key == "risk_tradeoff") c.risk_tradeoff = v.get<double>();
      else if (key == "upsilon") c.upsilon = v.get<double>();
      else if (key == "psd_floor") c.psd_floor = v.get<double>();
      else if (key == "admm_penalty") c.admm_penalty = v.get<double>();
      else if (key == "kappa") c.kappa = v.get<double>();
      else if (key == "alpha0") c.alpha0 = v.get<double>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "certified_inner") c.certified_inner = v.get<bool>();
      else if (key == "max_outer") c.max_outer = v.get<long>();
      else if (key == "max_inner_iterations") c.max_inner_iterations = v.get<long>();
      else if (key == "seqsim_outer") c.seqsim_outer = v.get<long>();
      else if (key == "timing") c.timing = v.get<bool>();
      else throw ConfigError("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Instance generation

struct SampleData {
  Matrix returns;   // p x n
  Matrix sample_cov;  // S
};

struct GeneratedInstance {
  PortfolioInstance portfolio;
  ScsProblem scs;
  SampleData samples;
  Matrix sigma_star;     // SCS solution, the true parameter
  std::uint64_t requested_seed = 0;
  int regenerations = 0;  // extra seeds tried before the sector limits bound
};

/// sigma_ij = max(1 - |i - j| / 10, 0)
inline Matrix banded_covariance(Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      m(i, j) = std::max(1.0 - std::abs(static_cast<double>(i - j)) / 10.0, 0.0);
  return m;
}

/// Every asset gets a primary sector drawn with a skew toward low indices
/// (floor(s u^2)) and joins one more random sector with probability
/// `overlap`, so sectors overlap and differ in size.
inline Matrix random_sectors(Eigen::Index n, Eigen::Index s, double overlap, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix a = Matrix::Zero(s, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = unif(gen);
    const auto primary = std::min<Eigen::Index>(s - 1, static_cast<Eigen::Index>(std::floor(s * u * u)));
    a(primary, i) = 1.0;
    if (s > 1 && unif(gen) < overlap) {
      auto other = std::min<Eigen::Index>(s - 1, static_cast<Eigen::Index>(std::floor(s * unif(gen))));
      a(other, i) = 1.0;
    }
  }
  return a;
}

namespace detail {

inline GeneratedInstance draw_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Eigen::Index n = cfg.n;
  const Eigen::Index p = std::max<Eigen::Index>(2, n / 2);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  GeneratedInstance g;
  PortfolioInstance& inst = g.portfolio;
  inst.n = n;
  inst.s = cfg.s;
  inst.seed = seed;
  inst.risk_tradeoff = cfg.risk_tradeoff;
  inst.mu.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) inst.mu(i) = unif(gen);
  inst.sigma_true = banded_covariance(n);
  const Eigen::LLT<Matrix> chol(inst.sigma_true);
  if (chol.info() != Eigen::Success) throw ConvergenceError("generated covariance is not positive definite");
  const Matrix lower = chol.matrixL();

  g.samples.returns.resize(p, n);
  for (Eigen::Index t = 0; t < p; ++t) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(gen);
    g.samples.returns.row(t) = (inst.mu + lower * z).transpose();
  }
  const Vector mean = g.samples.returns.colwise().mean().transpose();
  const Matrix centered = g.samples.returns.rowwise() - mean.transpose();
  g.samples.sample_cov = centered.transpose() * centered / static_cast<double>(p - 1);
  g.samples.sample_cov = 0.5 * (g.samples.sample_cov + g.samples.sample_cov.transpose());

  inst.A = random_sectors(n, cfg.s, cfg.sector_overlap, gen);
  inst.b = Vector::Constant(cfg.s, cfg.sector_limit);

  g.scs = ScsProblem{g.samples.sample_cov, cfg.upsilon, cfg.psd_floor, cfg.admm_penalty};
  return g;
}

}  // namespace detail

/// Draws the instance and solves the learning problem for Sigma*. If no
/// sector limit binds at the optimum of C(Sigma*) the next seed is tried.
inline GeneratedInstance generate_instance(const ExperimentConfig& cfg, int max_attempts = 20) {
  validate(cfg);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    GeneratedInstance g = detail::draw_instance(cfg, cfg.seed + static_cast<std::uint64_t>(attempt));
    g.requested_seed = cfg.seed;
    g.regenerations = attempt;
    g.sigma_star = solve_scs(g.scs);
    const ParametricProblem problem = make_portfolio_problem(g.portfolio, cfg.kappa);
    const ReferenceSolution ref = reference_solve(problem, flatten(g.sigma_star));
    if (ref.lambda.maxCoeff() > 1e-8) return g;
  }
  throw ConvergenceError("no generated instance had a binding sector limit");
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace detail {

inline nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(std::string(what) + ": ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

inline nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_json(const nlohmann::json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace detail

inline nlohmann::json instance_to_json(const PortfolioInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["s"] = inst.s;
  j["A"] = detail::matrix_json(inst.A);
  j["b"] = detail::vector_json(inst.b);
  j["mu"] = detail::vector_json(inst.mu);
  j["risk_tradeoff"] = inst.risk_tradeoff;
  j["sigma_true"] = detail::matrix_json(inst.sigma_true);
  j["seed"] = inst.seed;
  return j;
}

inline PortfolioInstance instance_from_json(const nlohmann::json& j) {
  PortfolioInstance inst;
  try {
    inst.n = j.at("n").get<Eigen::Index>();
    inst.s = j.at("s").get<Eigen::Index>();
    inst.A = detail::matrix_from_json(j.at("A"), "instance A");
    inst.b = detail::vector_from_json(j.at("b"));
    inst.mu = detail::vector_from_json(j.at("mu"));
    inst.risk_tradeoff = j.at("risk_tradeoff").get<double>();
    inst.sigma_true = detail::matrix_from_json(j.at("sigma_true"), "instance sigma_true");
    inst.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
  validate(inst);
  return inst;
}

inline Matrix dense_matrix_from_json(const nlohmann::json& j) { return detail::matrix_from_json(j, "matrix"); }
inline nlohmann::json dense_matrix_to_json(const Matrix& m) { return detail::matrix_json(m); }

// ---------------------------------------------------------------------------
// Runs

/// Everything a cell needs that does not depend on epsilon.
struct ExperimentSetup {
  GeneratedInstance instance;
  ParametricProblem problem;
  Reference reference;
  Parameter theta0;      // starting estimate Pi_Q(S)
  double tau = 0.5;      // learner rate used by schedules and bounds
  double kkt_residual = 0.0;
};

inline ExperimentSetup prepare(const ExperimentConfig& cfg) {
  ExperimentSetup st;
  st.instance = generate_instance(cfg);
  st.problem = make_portfolio_problem(st.instance.portfolio, cfg.kappa);
  const Parameter theta_star = flatten(st.instance.sigma_star);
  const ReferenceSolution ref = reference_solve(st.problem, theta_star);
  st.reference = Reference{ref.f_star, theta_star, ref.x, ref.lambda};
  st.kkt_residual = ref.kkt_residual;
  st.theta0 = flatten(scs_admm_init(st.instance.scs).sigma);
  st.tau = cfg.tau > 0.0 ? cfg.tau : measure_admm_tau(st.instance.scs, st.instance.sigma_star);
  return st;
}

struct CellResult {
  double epsilon = 0.0;
  AlmTrace trace;
  BoundColumns bounds;
  double inner_theory = 0.0;  // sum of a-priori budgets T_k over the run
};

namespace detail {

inline BoundInputs bound_inputs(const ExperimentConfig& cfg, const ExperimentSetup& st,
                                const AlmTrace& trace, bool learned) {
  BoundInputs in;
  in.rho = trace.penalty.rho0;
  in.rho0 = trace.penalty.rho0;
  in.beta = trace.penalty.increasing() ? trace.penalty.beta : 1.0;
  in.alpha0 = trace.inexact.alpha0;
  in.c = trace.inexact.c;
  in.tau = std::clamp(st.tau, 1e-12, 1.0 - 1e-12);
  in.theta0_err = learned ? (st.theta0 - st.reference.theta_star).norm() : 0.0;
  in.lambda0_err = st.reference.lambda_star.norm();  // lambda0 = 0
  in.lambda0_norm = 0.0;
  in.lambda_star_norm = st.reference.lambda_star.norm();
  in.kappa = cfg.kappa;
  in.L_f = st.problem.constants.L_f;
  in.L_h_theta = st.problem.constants.L_h_theta;
  in.L_h_x = st.problem.constants.L_h_x;
  return in;
}

inline BoundColumns bound_columns(const BoundInputs& in, const AlmTrace& trace) {
  BoundColumns cols;
  const double nan = std::nan("");
  for (const AlmRecord& r : trace.records) {
    if (trace.penalty.increasing()) {
      const GeometricBound gb = b_k(in, r.k - 1);
      cols.v_k_bound.push_back(gb.infeas);
      cols.subopt_upper_bound.push_back(gb.subopt);
      cols.subopt_lower_bound.push_back(-gb.subopt);
      cols.dual_gap_bound.push_back(nan);
    } else {
      cols.v_k_bound.push_back(v_of_k(in, r.k));
      cols.subopt_upper_bound.push_back(subopt_upper_bound(in, r.k));
      cols.subopt_lower_bound.push_back(subopt_lower_bound(in, r.k));
      cols.dual_gap_bound.push_back(dual_gap_bound(in, r.k));
    }
  }
  return cols;
}

inline std::pair<PenaltySchedule, InexactnessSchedule> schedules_for(const ExperimentConfig& cfg,
                                                                     double epsilon, double tau,
                                                                     bool learned) {
  if (cfg.regime == Regime::Constant) return make_constant_schedule(epsilon, cfg.rho_o, !learned, cfg.c);
  const double z = zeta_sum(1.0 + cfg.c);
  const double alpha0 = cfg.alpha0 > 0.0 ? cfg.alpha0 : 1.0 / (2.0 * cfg.rho_o * z * z);
  return make_increasing_schedule(cfg.rho_o, cfg.beta, alpha0, cfg.c, tau);
}

inline AlmOptions alm_options(const ExperimentConfig& cfg, const ExperimentSetup& st) {
  AlmOptions opt;
  opt.inner_mode = cfg.certified_inner ? ApgMode::Certified : ApgMode::Budget;
  opt.max_inner_iterations = cfg.max_inner_iterations;
  opt.reference = st.reference;
  return opt;
}

}  // namespace detail

/// One (regime, specification, epsilon) cell. The known specification runs
/// with theta fixed at theta*; the learned one interleaves ADMM steps.
inline CellResult run_cell(const ExperimentConfig& cfg, const ExperimentSetup& st, double epsilon) {
  const bool learned = cfg.specification == Specification::Learned;
  const double tau = learned ? st.tau : 0.5;
  const auto [penalty, inexact] = detail::schedules_for(cfg, epsilon, tau, learned);
  const StopCriteria stop{cfg.max_outer, epsilon, true};
  const AlmOptions opt = detail::alm_options(cfg, st);
  const Vector x0 = Vector::Constant(st.problem.n, 1.0 / static_cast<double>(st.problem.n));
  const Vector lambda0 = Vector::Zero(st.problem.m());

  CellResult out;
  out.epsilon = epsilon;
  if (learned) {
    ScsAdmmLearner learner(st.instance.scs, st.tau);
    out.trace = alm_run(st.problem, learner, penalty, inexact, lambda0, x0, stop, opt);
  } else {
    FixedLearner learner(st.reference.theta_star, tau);
    out.trace = alm_run(st.problem, learner, penalty, inexact, lambda0, x0, stop, opt);
  }
  const BoundInputs in = detail::bound_inputs(cfg, st, out.trace, learned);
  out.bounds = detail::bound_columns(in, out.trace);
  for (const AlmRecord& r : out.trace.records) out.inner_theory += static_cast<double>(r.inner_budget);
  return out;
}

struct TableRow {
  double epsilon = 0.0;
  double f_rel_subopt = 0.0;
  double theta_err_rel = 0.0;
  double infeas = 0.0;
  long outer = 0;
  long inner_actual = 0;
  double inner_theory = 0.0;
  double cpu_learn_s = 0.0;
  double cpu_opt_s = 0.0;
  bool reached = false;
};

inline TableRow table_row(const CellResult& cell) {
  TableRow row;
  row.epsilon = cell.epsilon;
  row.reached = cell.trace.converged;
  row.outer = cell.trace.outer();
  row.inner_actual = cell.trace.total_inner();
  row.inner_theory = cell.inner_theory;
  if (!cell.trace.records.empty()) {
    const AlmRecord& last = cell.trace.records.back();
    row.f_rel_subopt = last.f_rel_subopt;
    row.theta_err_rel = last.theta_err_rel;
    row.infeas = last.infeasibility_at_theta_star;
    row.cpu_learn_s = last.cpu_learn_s;
    row.cpu_opt_s = last.cpu_opt_s;
  }
  return row;
}

inline void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows, bool timing) {
  using detail::fmt_double;
  os << "epsilon,f_rel_subopt,theta_err_rel,infeas,outer,inner_actual,inner_theory,cpu_learn_s,cpu_opt_s,reached\n";
  for (const TableRow& r : rows) {
    os << fmt_double(r.epsilon) << ',' << fmt_double(r.f_rel_subopt) << ',' << fmt_double(r.theta_err_rel)
       << ',' << fmt_double(r.infeas) << ',' << r.outer << ',' << r.inner_actual << ','
       << fmt_double(r.inner_theory) << ',';
    if (timing) os << fmt_double(r.cpu_learn_s) << ',' << fmt_double(r.cpu_opt_s);
    else os << ',';
    os << ',' << (r.reached ? 1 : 0) << "\n";
  }
}

inline std::string epsilon_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", eps);
  return buf;
}

struct TableRun {
  std::vector<CellResult> cells;
  std::vector<TableRow> rows;
};

/// Runs every epsilon of the configured regime and specification. Cells
/// that miss epsilon within max_outer are kept with reached = 0.
inline TableRun run_table(const ExperimentConfig& cfg, const ExperimentSetup& st) {
  TableRun run;
  for (double eps : cfg.epsilons) {
    run.cells.push_back(run_cell(cfg, st, eps));
    run.rows.push_back(table_row(run.cells.back()));
  }
  return run;
}

/// Writes table_<regime>_<spec>.csv and one trace file per epsilon; returns
/// the written paths.
inline std::vector<std::filesystem::path> write_table_outputs(const ExperimentConfig& cfg, const TableRun& run) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string stem = to_string(cfg.regime) + "_" + to_string(cfg.specification);
  std::vector<fs::path> written;
  const fs::path table_path = fs::path(cfg.output_dir) / ("table_" + stem + ".csv");
  {
    std::ofstream os(table_path);
    write_table_csv(os, run.rows, cfg.timing);
  }
  written.push_back(table_path);
  for (const CellResult& cell : run.cells) {
    const fs::path p = fs::path(cfg.output_dir) / ("trace_" + stem + "_eps" + epsilon_tag(cell.epsilon) + ".csv");
    std::ofstream os(p);
    write_trace_csv(os, cell.trace, &cell.bounds, CsvOptions{cfg.timing});
    written.push_back(p);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Learn-then-optimize versus simultaneous

struct Curve {
  std::string scheme;  // "simultaneous" or "sequential"
  long budget = 0;     // learning steps before optimizing; -1 for simultaneous
  std::vector<long> work;  // cumulative learner steps + inner iterations
  std::vector<long> k;
  std::vector<double> abs_subopt;  // |f(x; theta*) - f*|
  std::vector<double> infeas;
  std::vector<double> theta_err_rel;

  double final_error() const { return abs_subopt.empty() ? std::nan("") : abs_subopt.back(); }
};

namespace detail {

inline void append_records(Curve& c, const std::vector<AlmRecord>& recs, const Reference& ref, long work_offset) {
  for (const AlmRecord& r : recs) {
    c.work.push_back(work_offset + r.learn_steps + r.cumulative_inner);
    c.k.push_back(r.k);
    c.abs_subopt.push_back(std::abs(r.f_value_at_theta_star - ref.f_star));
    c.infeas.push_back(r.infeasibility_at_theta_star);
    c.theta_err_rel.push_back(r.theta_err_rel);
  }
}

}  // namespace detail

/// Increasing penalty on the learned specification, run for seqsim_outer
/// epochs without early stopping, against one sequential run per budget.
inline std::vector<Curve> run_seq_vs_sim(const ExperimentConfig& cfg, const ExperimentSetup& st) {
  if (cfg.sequential_budgets.size() < 2) throw ConfigError("seqsim needs at least two sequential budgets");
  ExperimentConfig increasing = cfg;
  increasing.regime = Regime::Increasing;
  const auto [penalty, inexact] = detail::schedules_for(increasing, cfg.epsilons.front(), st.tau, true);
  const StopCriteria stop{cfg.seqsim_outer, cfg.epsilons.front(), false};
  const AlmOptions opt = detail::alm_options(cfg, st);
  const Vector x0 = Vector::Constant(st.problem.n, 1.0 / static_cast<double>(st.problem.n));
  const Vector lambda0 = Vector::Zero(st.problem.m());

  std::vector<Curve> curves;
  {
    ScsAdmmLearner learner(st.instance.scs, st.tau);
    const AlmTrace tr = alm_run(st.problem, learner, penalty, inexact, lambda0, x0, stop, opt);
    Curve c{"simultaneous", -1, {}, {}, {}, {}, {}};
    detail::append_records(c, tr.records, st.reference, 0);
    curves.push_back(std::move(c));
  }
  for (long budget : cfg.sequential_budgets) {
    ScsAdmmLearner learner(st.instance.scs, st.tau);
    const AlmTrace tr = sequential_baseline(st.problem, learner, budget, penalty, inexact, lambda0, x0, stop, opt);
    Curve c{"sequential", budget, {}, {}, {}, {}, {}};
    detail::append_records(c, tr.learning, st.reference, 0);
    detail::append_records(c, tr.records, st.reference, 0);
    curves.push_back(std::move(c));
  }
  return curves;
}

inline void write_curves_csv(std::ostream& os, const std::vector<Curve>& curves) {
  using detail::fmt_double;
  os << "scheme,budget,work,k,abs_subopt,infeas,theta_err_rel\n";
  for (const Curve& c : curves)
    for (std::size_t i = 0; i < c.k.size(); ++i)
      os << c.scheme << ',' << c.budget << ',' << c.work[i] << ',' << c.k[i] << ',' << fmt_double(c.abs_subopt[i])
         << ',' << fmt_double(c.infeas[i]) << ',' << fmt_double(c.theta_err_rel[i]) << "\n";
}

}  // namespace misalm
