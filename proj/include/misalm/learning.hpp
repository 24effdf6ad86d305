#pragma once

// Learners reveal theta_0, theta_1, ... converging linearly to theta*:
//   ||theta_k - theta*|| <= tau^k ||theta_0 - theta*||.

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <concepts>
#include <future>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "misalm/errors.hpp"
#include "misalm/linalg.hpp"
#include "misalm/model.hpp"
#include "misalm/portfolio.hpp"

namespace misalm {

/// theta() is the latest revealed estimate theta_k; step() performs one
/// learning iteration and returns theta_{k+1}; steps() counts iterations.
template <class L>
concept Learner = requires(L learner, const L& view) {
  { view.theta() } -> std::convertible_to<const Parameter&>;
  { learner.step() } -> std::convertible_to<const Parameter&>;
  { view.steps() } -> std::convertible_to<long>;
  { view.rate_tau() } -> std::convertible_to<double>;
  { view.theta_dim() } -> std::convertible_to<Eigen::Index>;
};

/// Always reveals the same parameter (theta known, or frozen after a
/// sequential learning phase).
class FixedLearner {
 public:
  explicit FixedLearner(Parameter theta, double tau = 0.5) : theta_(std::move(theta)), tau_(tau) {}
  const Parameter& theta() const { return theta_; }
  const Parameter& step() {
    ++steps_;
    return theta_;
  }
  long steps() const { return steps_; }
  double rate_tau() const { return tau_; }
  Eigen::Index theta_dim() const { return theta_.size(); }

 private:
  Parameter theta_;
  double tau_;
  long steps_ = 0;
};

/// theta_k = theta* + tau^k (theta_0 - theta*): the rate holds with equality.
class SyntheticLearner {
 public:
  SyntheticLearner(Parameter theta_star, Parameter theta0, double tau)
      : theta_star_(std::move(theta_star)), delta_(std::move(theta0)), tau_(tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("synthetic learner: tau must lie in (0, 1)");
    if (theta_star_.size() != delta_.size()) throw DimensionError("synthetic learner: theta sizes differ");
    delta_ -= theta_star_;
    current_ = theta_star_ + delta_;
  }
  const Parameter& theta() const { return current_; }
  const Parameter& step() {
    ++steps_;
    current_ = theta_star_ + std::pow(tau_, static_cast<double>(steps_)) * delta_;
    return current_;
  }
  long steps() const { return steps_; }
  double rate_tau() const { return tau_; }
  Eigen::Index theta_dim() const { return current_.size(); }
  const Parameter& theta_star() const { return theta_star_; }

 private:
  Parameter theta_star_;
  Parameter delta_;
  Parameter current_;
  double tau_;
  long steps_ = 0;
};

/// Sparse covariance selection
///   min 1/2 ||Sigma - S||_F^2 + upsilon |Sigma|_1   s.t. Sigma >= psd_floor I,
/// where |.|_1 sums absolute off-diagonal entries.
struct ScsProblem {
  Matrix S;
  double upsilon = 0.4;
  double psd_floor = 1e-2;
  double admm_penalty = 1.0;
};

inline void validate(const ScsProblem& p) {
  if (p.S.rows() != p.S.cols() || p.S.rows() == 0) throw DimensionError("SCS: S must be square");
  if ((p.S - p.S.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + p.S.lpNorm<Eigen::Infinity>()))
    throw ConfigError("SCS: S must be symmetric");
  if (!(p.upsilon >= 0.0)) throw ConfigError("SCS: upsilon must be nonnegative");
  if (!(p.psd_floor > 0.0)) throw ConfigError("SCS: psd_floor must be positive");
  if (!(p.admm_penalty > 0.0)) throw ConfigError("SCS: admm penalty must be positive");
}

inline double scs_objective(const ScsProblem& p, const Matrix& sigma) {
  const double l1 = sigma.cwiseAbs().sum() - sigma.diagonal().cwiseAbs().sum();
  return 0.5 * (sigma - p.S).squaredNorm() + p.upsilon * l1;
}

struct ScsAdmmState {
  Matrix sigma;
  Matrix phi;
  Matrix u;  // scaled dual
  long iteration = 0;
  double primal_residual = 0.0;  // ||Sigma - Phi||_F
  double dual_residual = 0.0;    // mu ||Phi - Phi_prev||_F
};

inline ScsAdmmState scs_admm_init(const ScsProblem& p) {
  validate(p);
  ScsAdmmState st;
  st.sigma = project_eigen_floor(p.S, p.psd_floor);
  st.phi = st.sigma;
  st.u = Matrix::Zero(p.S.rows(), p.S.cols());
  return st;
}

/// One sweep: Sigma <- Pi_Q((S + mu (Phi - U)) / (1 + mu)); Phi <- Sigma + U
/// with off-diagonals soft-thresholded at upsilon/mu; U <- U + Sigma - Phi.
inline const Matrix& scs_admm_step(const ScsProblem& p, ScsAdmmState& st) {
  const double mu = p.admm_penalty;
  st.sigma = project_eigen_floor((p.S + mu * (st.phi - st.u)) / (1.0 + mu), p.psd_floor);
  const Matrix prev_phi = st.phi;
  const Matrix v = st.sigma + st.u;
  const double t = p.upsilon / mu;
  const Eigen::Index n = v.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      st.phi(i, j) = (i == j) ? v(i, j) : soft_threshold(v(i, j), t);
  st.u += st.sigma - st.phi;
  st.primal_residual = (st.sigma - st.phi).norm();
  st.dual_residual = mu * (st.phi - prev_phi).norm();
  ++st.iteration;
  return st.sigma;
}

/// Runs ADMM until the combined residual is below tol; returns Sigma.
inline Matrix solve_scs(const ScsProblem& p, double tol = 1e-11, long max_iterations = 100'000) {
  ScsAdmmState st = scs_admm_init(p);
  for (long k = 0; k < max_iterations; ++k) {
    scs_admm_step(p, st);
    if (std::max(st.primal_residual, st.dual_residual) <= tol) return st.sigma;
  }
  throw ConvergenceError("solve_scs: ADMM did not reach the residual tolerance");
}

/// Least-squares slope of log(error) against k, exponentiated.
inline double estimate_tau(std::span<const double> errors) {
  if (errors.size() < 3) throw ConvergenceError("estimate_tau needs at least three errors");
  for (double e : errors)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConvergenceError("estimate_tau needs positive errors");
  const double count = static_cast<double>(errors.size());
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double y = std::log(errors[k]);
    sk += kk;
    sy += y;
    skk += kk * kk;
    sky += kk * y;
  }
  const double slope = (count * sky - sk * sy) / (count * skk - sk * sk);
  if (!(slope < 0.0)) throw ConvergenceError("estimate_tau: error history is not decreasing");
  return std::min(std::exp(slope), 1.0 - 1e-15);
}

/// ADMM on the SCS problem as a learner; theta = vec(Sigma_k).
class ScsAdmmLearner {
 public:
  explicit ScsAdmmLearner(ScsProblem problem, double tau_estimate = std::numeric_limits<double>::quiet_NaN())
      : problem_(std::move(problem)), state_(scs_admm_init(problem_)), tau_(tau_estimate) {
    theta_ = flatten(state_.sigma);
  }
  const Parameter& theta() const { return theta_; }
  const Parameter& step() {
    theta_ = flatten(scs_admm_step(problem_, state_));
    return theta_;
  }
  long steps() const { return state_.iteration; }
  double rate_tau() const { return tau_; }
  void set_rate_tau(double tau) { tau_ = tau; }
  Eigen::Index theta_dim() const { return theta_.size(); }
  const ScsAdmmState& state() const { return state_; }
  const ScsProblem& problem() const { return problem_; }

 private:
  ScsProblem problem_;
  ScsAdmmState state_;
  Parameter theta_;
  double tau_;
};

/// Measures tau for ADMM from ||Sigma_k - Sigma*||_F over the first steps
/// whose error stays above `floor`.
inline double measure_admm_tau(const ScsProblem& p, const Matrix& sigma_star, long max_steps = 400,
                               double floor = 1e-9) {
  ScsAdmmState st = scs_admm_init(p);
  std::vector<double> errors{(st.sigma - sigma_star).norm()};
  for (long k = 0; k < max_steps; ++k) {
    scs_admm_step(p, st);
    const double e = (st.sigma - sigma_star).norm();
    if (e <= floor) break;
    errors.push_back(e);
  }
  return estimate_tau(errors);
}

/// Runs the wrapped learner's next step on a worker thread while the
/// optimizer works on the current estimate. Only revealed values are exposed.
template <Learner Inner>
class PrefetchingLearner {
 public:
  explicit PrefetchingLearner(Inner inner)
      : inner_(std::move(inner)), current_(inner_.theta()), tau_(inner_.rate_tau()) {
    launch();
  }
  PrefetchingLearner(const PrefetchingLearner&) = delete;
  PrefetchingLearner& operator=(const PrefetchingLearner&) = delete;
  ~PrefetchingLearner() {
    if (pending_.valid()) pending_.wait();
  }

  const Parameter& theta() const { return current_; }
  const Parameter& step() {
    current_ = pending_.get();
    ++steps_;
    launch();
    return current_;
  }
  long steps() const { return steps_; }
  double rate_tau() const { return tau_; }
  Eigen::Index theta_dim() const { return current_.size(); }

 private:
  void launch() {
    pending_ = std::async(std::launch::async, [this] { return Parameter(inner_.step()); });
  }

  Inner inner_;
  Parameter current_;
  double tau_;
  std::future<Parameter> pending_;
  long steps_ = 0;
};

}  // namespace misalm
