#pragma once

// Outer loop of the misspecified inexact augmented Lagrangian method.
// At epoch k the driver holds theta_k (the k-th revealed estimate) and
//   1. computes x_{k+1} with L_{rho_k}(x_{k+1}, lambda_k; theta_k) <= g_{rho_k} + alpha_k
//      by APG warm-started at x_k,
//   2. sets lambda_{k+1} = Pi_{K*}(lambda_k + rho_k h(x_{k+1}; theta_k)),
//   3. asks the learner for theta_{k+1}.

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "misalm/al_core.hpp"
#include "misalm/errors.hpp"
#include "misalm/inner_apg.hpp"
#include "misalm/learning.hpp"
#include "misalm/model.hpp"
#include "misalm/schedules.hpp"

namespace misalm {

struct StopCriteria {
  long max_outer = 50;
  double epsilon = 1e-2;
  bool stop_at_epsilon = true;  // needs a reference
};

/// Ground truth used only for reporting: f*, theta*, and optionally x*, lambda*.
struct Reference {
  double f_star = 0.0;
  Parameter theta_star;
  Vector x_star;
  Vector lambda_star;
};

using CertificateFactory = std::function<GapCertificate(const AlSubproblem&)>;

struct AlmOptions {
  ApgMode inner_mode = ApgMode::Budget;
  long max_inner_iterations = 50'000'000;
  /// Certified mode only; defaults to the Frank-Wolfe gap.
  CertificateFactory certificate;
  std::optional<Reference> reference;
};

struct AlmRecord {
  long k = 0;  // outer iterations completed
  Parameter theta_k;  // latest revealed estimate
  double rho_k = 0.0;      // penalty used to produce x_k
  double alpha_k = 0.0;    // inexactness used to produce x_k
  long inner_iterations = 0;
  long inner_budget = 0;   // T for this epoch
  double inner_gap_bound = 0.0;
  Vector x_k;
  Vector lambda_k;
  Vector x_avg;       // (1/k) sum_{i=1..k} x_i
  Vector lambda_avg;  // (1/k) sum_{i=1..k} lambda_i
  // Measured at theta* on the reported iterate (NaN without a reference).
  double f_value_at_theta_star = std::nan("");
  double f_rel_subopt = std::nan("");
  double infeasibility_at_theta_star = std::nan("");
  double theta_err = std::nan("");
  double theta_err_rel = std::nan("");
  double cpu_learn_s = 0.0;  // cumulative
  double cpu_opt_s = 0.0;    // cumulative
  long learn_steps = 0;      // cumulative learner steps
  long cumulative_inner = 0;
};

struct AlmTrace {
  PenaltySchedule penalty;
  InexactnessSchedule inexact;
  bool report_average = true;  // constant regime reports x_avg, increasing x_k
  std::vector<AlmRecord> learning;  // sequential baseline only: flat learning phase
  std::vector<AlmRecord> records;
  bool converged = false;

  const Vector& reported_x(const AlmRecord& r) const { return report_average ? r.x_avg : r.x_k; }
  long total_inner() const { return records.empty() ? 0 : records.back().cumulative_inner; }
  long outer() const { return records.empty() ? 0 : records.back().k; }
};

namespace detail {

inline void fill_metrics(const ParametricProblem& problem, const Reference& ref, const Vector& x,
                         AlmRecord& rec) {
  rec.f_value_at_theta_star = evaluate_f(problem, x, ref.theta_star);
  rec.f_rel_subopt = std::abs(rec.f_value_at_theta_star - ref.f_star) /
                     std::max(std::abs(ref.f_star), 1e-300);
  rec.infeasibility_at_theta_star = infeasibility(problem, x, ref.theta_star);
  rec.theta_err = (rec.theta_k - ref.theta_star).norm();
  rec.theta_err_rel = rec.theta_err / std::max(ref.theta_star.norm(), 1e-300);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Runs the outer loop from (x0, lambda0). The learner is asked for exactly one
/// new estimate per completed epoch, so at epoch k only theta_0..theta_k are
/// revealed. Throws ConfigError for beta * tau >= 1 and BudgetExceeded when an
/// inner budget passes options.max_inner_iterations.
template <Learner L>
AlmTrace alm_run(const ParametricProblem& problem, L& learner, const PenaltySchedule& penalty,
                 const InexactnessSchedule& inexact, const Vector& lambda0, const Vector& x0,
                 const StopCriteria& stop, const AlmOptions& options = {}) {
  validate(inexact);
  if (penalty.increasing() && !(penalty.beta * learner.rate_tau() < 1.0))
    throw ConfigError("increasing penalty requires beta * tau < 1 for the attached learner; got " +
                      std::to_string(penalty.beta * learner.rate_tau()));
  if (stop.max_outer < 1) throw ConfigError("max_outer must be at least 1");
  validate(problem, learner.theta());
  check_primal(problem, x0);
  if (lambda0.size() != problem.m()) throw DimensionError("lambda0 has the wrong length");
  if (!in_dual(problem.cone, lambda0, 1e-12)) throw ConfigError("lambda0 must lie in K*");

  AlmTrace trace;
  trace.penalty = penalty;
  trace.inexact = inexact;
  trace.report_average = !penalty.increasing();

  Vector x = x0;
  Vector lambda = lambda0;
  Vector x_sum = Vector::Zero(problem.n);
  Vector lambda_sum = Vector::Zero(problem.m());
  const long steps_at_start = learner.steps();
  double cpu_learn = 0.0;
  double cpu_opt = 0.0;
  long cumulative_inner = 0;

  for (long k = 0; k < stop.max_outer; ++k) {
    if (learner.steps() - steps_at_start != k)
      throw std::logic_error("learner revealed estimates ahead of the outer counter");
    const Parameter theta_k = learner.theta();
    const double rho_k = penalty.rho(k);
    const double alpha_k = inexact.alpha(k);

    auto t_opt = std::chrono::steady_clock::now();
    const AlSubproblem sub(problem, lambda, rho_k, theta_k);
    GapCertificate cert;
    if (options.inner_mode == ApgMode::Certified)
      cert = options.certificate ? options.certificate(sub) : frank_wolfe_certificate(sub);
    const ApgConfig cfg{options.inner_mode, options.max_inner_iterations, alpha_k};
    ApgResult inner = apg_solve(sub, x, cfg, cert, k);
    x = std::move(inner.x);
    lambda = dual_update(problem, lambda, rho_k, x, theta_k);
    cpu_opt += detail::seconds_since(t_opt);
    cumulative_inner += inner.iterations;

    auto t_learn = std::chrono::steady_clock::now();
    learner.step();
    cpu_learn += detail::seconds_since(t_learn);

    x_sum += x;
    lambda_sum += lambda;
    AlmRecord rec;
    rec.k = k + 1;
    rec.theta_k = learner.theta();
    rec.rho_k = rho_k;
    rec.alpha_k = alpha_k;
    rec.inner_iterations = inner.iterations;
    rec.inner_budget = inner.budget;
    rec.inner_gap_bound = inner.certified_gap_bound;
    rec.x_k = x;
    rec.lambda_k = lambda;
    rec.x_avg = x_sum / static_cast<double>(k + 1);
    rec.lambda_avg = lambda_sum / static_cast<double>(k + 1);
    rec.cpu_learn_s = cpu_learn;
    rec.cpu_opt_s = cpu_opt;
    rec.learn_steps = learner.steps() - steps_at_start;
    rec.cumulative_inner = cumulative_inner;
    if (options.reference) detail::fill_metrics(problem, *options.reference, trace.reported_x(rec), rec);
    trace.records.push_back(std::move(rec));

    const AlmRecord& last = trace.records.back();
    if (options.reference && stop.stop_at_epsilon && last.f_rel_subopt <= stop.epsilon &&
        last.infeasibility_at_theta_star <= stop.epsilon) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

/// Learn-then-optimize baseline: learn_budget learner steps with x frozen at x0
/// (recorded in trace.learning), then the outer loop with theta frozen.
template <Learner L>
AlmTrace sequential_baseline(const ParametricProblem& problem, L& learner, long learn_budget,
                             const PenaltySchedule& penalty, const InexactnessSchedule& inexact,
                             const Vector& lambda0, const Vector& x0, const StopCriteria& stop,
                             const AlmOptions& options = {}) {
  if (learn_budget < 0) throw ConfigError("learn_budget must be nonnegative");
  std::vector<AlmRecord> learning;
  double cpu_learn = 0.0;
  for (long j = 0; j <= learn_budget; ++j) {
    if (j > 0) {
      auto t0 = std::chrono::steady_clock::now();
      learner.step();
      cpu_learn += detail::seconds_since(t0);
    }
    AlmRecord rec;
    rec.k = 0;
    rec.theta_k = learner.theta();
    rec.x_k = x0;
    rec.x_avg = x0;
    rec.lambda_k = lambda0;
    rec.lambda_avg = lambda0;
    rec.learn_steps = j;
    rec.cpu_learn_s = cpu_learn;
    if (options.reference) detail::fill_metrics(problem, *options.reference, x0, rec);
    learning.push_back(std::move(rec));
  }
  FixedLearner frozen(learner.theta(), learner.rate_tau());
  AlmTrace trace = alm_run(problem, frozen, penalty, inexact, lambda0, x0, stop, options);
  for (auto& rec : trace.records) {
    rec.cpu_learn_s += cpu_learn;
    rec.learn_steps = learn_budget;
  }
  trace.learning = std::move(learning);
  return trace;
}

/// Optional theory columns aligned with trace.records.
struct BoundColumns {
  std::vector<double> v_k_bound;
  std::vector<double> subopt_upper_bound;
  std::vector<double> subopt_lower_bound;
  std::vector<double> dual_gap_bound;
};

struct CsvOptions {
  bool timing = true;  // false leaves the cpu columns empty for reproducible output
};

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace detail

/// k, rho_k, alpha_k, inner_iters, f_rel_subopt, infeas, theta_err_rel,
/// cpu_learn_s, cpu_opt_s, then the bound columns when given.
inline void write_trace_csv(std::ostream& os, const AlmTrace& trace,
                            const BoundColumns* bounds = nullptr, const CsvOptions& opt = {}) {
  using detail::fmt_double;
  os << "k,rho_k,alpha_k,inner_iters,f_rel_subopt,infeas,theta_err_rel,cpu_learn_s,cpu_opt_s";
  if (bounds) os << ",v_k_bound,subopt_upper_bound,subopt_lower_bound,dual_gap_bound";
  os << "\n";
  auto column = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? fmt_double(v[i]) : std::string("nan");
  };
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const AlmRecord& r = trace.records[i];
    os << r.k << ',' << fmt_double(r.rho_k) << ',' << fmt_double(r.alpha_k) << ','
       << r.inner_iterations << ',' << fmt_double(r.f_rel_subopt) << ','
       << fmt_double(r.infeasibility_at_theta_star) << ',' << fmt_double(r.theta_err_rel) << ',';
    if (opt.timing) os << fmt_double(r.cpu_learn_s) << ',' << fmt_double(r.cpu_opt_s);
    else os << ',';
    if (bounds)
      os << ',' << column(bounds->v_k_bound, i) << ',' << column(bounds->subopt_upper_bound, i) << ','
         << column(bounds->subopt_lower_bound, i) << ',' << column(bounds->dual_gap_bound, i);
    os << "\n";
  }
}

}  // namespace misalm
