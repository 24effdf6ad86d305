// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "misalm/experiments.hpp"

using namespace misalm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, Verdict& v, Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!v.pass) ++failures;
  std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " (" << secs << " s)" << v.detail.str()
            << std::endl;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vector gaussian(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

Vector simplex_point(std::mt19937_64& gen, Eigen::Index n) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = expo(gen);
  return v / v.sum();
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------

void criterion_cones() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::vector<std::pair<std::string, Cone>> variants{
      {"zero", Cone::zero(4)},
      {"orthant", Cone::nonnegative_orthant(6)},
      {"soc", Cone::second_order(6)},
      {"product", Cone::product({Cone::second_order(3), Cone::nonnegative_orthant(2), Cone::zero(1)})}};
  std::mt19937_64 gen(101);
  double worst_moreau = 0.0;
  for (const auto& [name, k] : variants) {
    long bad = 0;
    for (int t = 0; t < 10000; ++t) {
      const Vector y = gaussian(gen, k.dim(), 3.0);
      const Vector z = gaussian(gen, k.dim(), 3.0);
      const Vector p = project(k, y);
      bool ok = (project(k, p) - p).norm() <= 1e-10;
      ok = ok && (p - project(k, z)).norm() <= (y - z).norm() + 1e-10;
      const double moreau = (project_neg(k, y) + project_dual(k, y) - y).norm();
      worst_moreau = std::max(worst_moreau, moreau);
      ok = ok && moreau <= 1e-10 && std::abs(project_neg(k, y).dot(project_dual(k, y))) <= 1e-10;
      ok = ok && dist_neg(k, y + z) <= dist_neg(k, y) + z.norm() + 1e-10;
      if (!ok) ++bad;
    }
    v.require(bad == 0, name + ": " + std::to_string(bad) + " vectors violate a property");
  }
  const double secs = elapsed(t0);
  v.require(secs < 5.0, "runtime");
  v.detail << " 4 variants x 10000 vectors, worst Moreau residual " << worst_moreau;
  report(1, v, t0);
}

void criterion_gradients(const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const ParametricProblem& pr = st.problem;
  double worst_lambda = 0.0, worst_x = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Vector x = simplex_point(gen, pr.n);
    const Vector lambda = gaussian(gen, pr.m()).cwiseAbs();
    const double rho = 0.1 + 10.0 * unif(gen);
    const Parameter& theta = st.reference.theta_star;

    const Vector gl = grad_lambda_L(pr, x, lambda, rho, theta);
    const Vector fdl = central_difference([&](const Vector& l) { return eval_L(pr, x, l, rho, theta); }, lambda, 1e-6);
    worst_lambda = std::max(worst_lambda, (fdl - gl).norm() / std::max(1.0, gl.norm()));

    const AlSubproblem sub(pr, lambda, rho, theta);
    const Vector gx = sub.nu(x).grad;
    const Vector fdx = central_difference([&](const Vector& z) { return sub.nu(z).value; }, x, 1e-6);
    worst_x = std::max(worst_x, (fdx - gx).norm() / std::max(1.0, gx.norm()));
  }
  v.require(worst_lambda <= 1e-6, "lambda gradient");
  v.require(worst_x <= 1e-6, "x gradient");
  v.require(elapsed(t0) < 10.0, "runtime");
  v.detail << " worst relative error: d/dlambda " << worst_lambda << ", d/dx " << worst_x;
  report(2, v, t0);
}

void criterion_fista() {
  const auto t0 = Clock::now();
  Verdict v;
  std::mt19937_64 gen(303);
  const Eigen::Index n = 20;
  Matrix r(n, n);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = gaussian(gen, 1)(0);
  const Matrix q = r.transpose() * r / static_cast<double>(n);
  const Vector c = gaussian(gen, n);

  QpProblem qp;
  qp.Q = q;
  qp.c = c;
  qp.G = -Matrix::Identity(n, n);
  qp.h = Vector::Zero(n);
  qp.E = Matrix::Ones(1, n);
  qp.e = Vector::Ones(1);
  const QpSolution oracle = solve_qp_ipm(qp);
  v.require(oracle.kkt_residual <= 1e-9, "oracle KKT residual");
  const double lip = Eigen::SelfAdjointEigenSolver<Matrix>(q).eigenvalues().maxCoeff();
  const Vector x0 = Vector::Constant(n, 1.0 / n);
  const auto f = [&](const Vector& x) { return 0.5 * x.dot(q * x) + c.dot(x); };
  for (long t : {5L, 10L, 50L}) {
    const FistaRun run = fista(
        x0, lip, t, [&](const Vector& y) { return Vector(q * y + c); },
        [](const Vector& y, const Vector& g, double l) { return simplex_prox(y, g, l); },
        [](long, const Vector&) { return false; });
    const double gap = f(run.z) - oracle.objective;
    const double bound = 2.0 * lip * (x0 - oracle.x).squaredNorm() / ((t + 1.0) * (t + 1.0));
    v.require(gap <= bound, "t = " + std::to_string(t));
    v.detail << " t=" << t << ": " << gap << " <= " << bound << ";";
  }
  v.require(elapsed(t0) < 5.0, "runtime");
  v.detail << " oracle KKT " << oracle.kkt_residual;
  report(3, v, t0);
}

void criterion_constant_known(const ExperimentConfig& base, const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  ExperimentConfig cfg = base;
  cfg.regime = Regime::Constant;
  cfg.specification = Specification::Known;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto c0 = Clock::now();
    const CellResult cell = run_cell(cfg, st, eps);
    const TableRow row = table_row(cell);
    const double secs = elapsed(c0);
    const std::string tag = "eps " + epsilon_tag(eps);
    v.require(row.reached && row.f_rel_subopt <= eps && row.infeas <= eps, tag + " accuracy");
    v.require(row.outer <= 10, tag + " outer count");
    v.require(secs < 120.0, tag + " runtime");
    v.detail << " " << tag << ": subopt " << row.f_rel_subopt << ", infeas " << row.infeas << ", outer " << row.outer
             << ", inner " << row.inner_actual << ", " << secs << " s;";
  }
  report(4, v, t0);
}

void criterion_constant_learned(const ExperimentConfig& base, const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  ExperimentConfig cfg = base;
  cfg.regime = Regime::Constant;
  cfg.specification = Specification::Learned;
  for (double eps : {1e-1, 1e-2}) {
    const auto c0 = Clock::now();
    const CellResult cell = run_cell(cfg, st, eps);
    const TableRow row = table_row(cell);
    const std::string tag = "eps " + epsilon_tag(eps);
    v.require(row.reached && row.f_rel_subopt <= eps && row.infeas <= eps, tag + " accuracy");

    long infeas_violations = 0, gap_violations = 0;
    double worst_gap = -1e300;
    for (std::size_t i = 0; i < cell.trace.records.size(); ++i) {
      const AlmRecord& r = cell.trace.records[i];
      if (cell.bounds.v_k_bound[i] < r.infeasibility_at_theta_star) ++infeas_violations;
      // f* - g(lambda_bar_k; theta*) is at most f* - (L(z) - certified gap)
      const AlSubproblem sub(st.problem, r.lambda_avg, r.rho_k, st.reference.theta_star);
      const AccurateSolve acc = solve_subproblem_accurately(sub, st.reference.x_star, 1e-10);
      const double gap = st.reference.f_star - (acc.value - acc.gap);
      worst_gap = std::max(worst_gap, gap);
      if (cell.bounds.dual_gap_bound[i] < gap) ++gap_violations;
    }
    v.require(infeas_violations == 0, tag + " V(k) below infeasibility");
    v.require(gap_violations == 0, tag + " B_g/k below dual gap");
    if (eps == 1e-2) v.require(row.outer <= 9, tag + " outer count not single digit");
    const double secs = elapsed(c0);
    v.require(secs < 300.0, tag + " runtime");
    v.detail << " " << tag << ": subopt " << row.f_rel_subopt << ", infeas " << row.infeas << ", outer " << row.outer
             << ", V(1) " << cell.bounds.v_k_bound.front() << ", worst dual gap " << worst_gap << ", " << secs << " s;";
  }
  report(5, v, t0);
}

void criterion_geometric(const ExperimentConfig& base, const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  const double beta = 1.05, tau = 0.91;
  const long epochs = 80;
  SyntheticLearner learner(st.reference.theta_star, st.theta0, tau);
  const double z = zeta_sum(1.0 + base.c);
  const auto [penalty, inexact] =
      make_increasing_schedule(base.rho_o, beta, 1.0 / (2.0 * base.rho_o * z * z), base.c, tau);
  AlmOptions opt = detail::alm_options(base, st);
  opt.inner_mode = ApgMode::Certified;
  const Vector x0 = Vector::Constant(st.problem.n, 1.0 / static_cast<double>(st.problem.n));
  const AlmTrace tr = alm_run(st.problem, learner, penalty, inexact, Vector::Zero(st.problem.m()), x0,
                              StopCriteria{epochs, 1e-12, false}, opt);

  ExperimentSetup synthetic = st;
  synthetic.tau = tau;
  const BoundInputs in = detail::bound_inputs(base, synthetic, tr, true);
  const BoundColumns bounds = detail::bound_columns(in, tr);

  std::vector<double> ks, ys;
  long majorize_violations = 0;
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const AlmRecord& r = tr.records[i];
    const double err = std::abs(r.f_value_at_theta_star - st.reference.f_star);
    if (bounds.subopt_upper_bound[i] < err) ++majorize_violations;
    if (r.k >= 5 && err > 0.0) {
      ks.push_back(static_cast<double>(r.k));
      ys.push_back(std::log(err));
    }
  }
  const double count = static_cast<double>(ks.size());
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sk += ks[i];
    sy += ys[i];
    skk += ks[i] * ks[i];
    sky += ks[i] * ys[i];
  }
  const double slope = (count * sky - sk * sy) / (count * skk - sk * sk);
  const double target = -std::log(beta) + 0.02;
  v.require(slope <= target, "slope");
  v.require(majorize_violations == 0, "B_k/beta^k below the empirical error");
  v.require(elapsed(t0) < 120.0, "runtime");
  v.detail << " slope " << slope << " <= " << target << " over k in [5, " << epochs << "], final error "
           << std::abs(tr.records.back().f_value_at_theta_star - st.reference.f_star) << ", inner "
           << tr.total_inner();
  report(6, v, t0);
}

void criterion_schedules() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto rejects = [](double beta, double tau) {
    try {
      make_increasing_schedule(1.0, beta, 1e-3, 1e-3, tau);
    } catch (const ConfigError&) {
      return true;
    }
    return false;
  };
  v.require(rejects(1.2, 0.91), "beta 1.2, tau 0.91 accepted");
  v.require(rejects(1.05, 0.96), "beta 1.05, tau 0.96 accepted");
  v.require(rejects(1.25, 0.8), "beta tau = 1 accepted");
  v.require(!rejects(1.05, 0.91), "beta 1.05, tau 0.91 rejected");

  // sum_{k>=0} (k+1)^{-1.001} = zeta(1.001) from a 30-digit reference.
  const double zeta_1001 = 1000.5772884760116;
  double worst = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3})
    for (bool known : {true, false}) {
      const auto [pen, inex] = make_constant_schedule(eps, 1.0, known, 1e-3);
      worst = std::max(worst, std::abs(std::sqrt(inex.alpha0) * zeta_1001 - 1.0 / std::sqrt(2.0 * pen.rho(0))));
    }
  v.require(worst <= 1e-10, "alpha0 series condition");
  v.detail << " worst series residual " << worst;
  report(7, v, t0);
}

/// Projected subgradient on min 1/2||X - S||^2 + u sum_{i != j}|X_ij| over
/// X >= floor I, with step 2/(k+1) and k-weighted averaging.
double subgradient_oracle(const ScsProblem& p, long iterations) {
  const auto objective = [&](const Matrix& x) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (i != j) off += std::abs(x(i, j));
    return 0.5 * (x - p.S).squaredNorm() + p.upsilon * off;
  };
  const auto project = [&](const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.transpose()));
    const Vector d = es.eigenvalues().cwiseMax(p.psd_floor);
    return Matrix(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
  };
  Matrix x = project(p.S);
  Matrix avg = Matrix::Zero(p.S.rows(), p.S.cols());
  double weight = 0.0;
  for (long k = 1; k <= iterations; ++k) {
    Matrix g = x - p.S;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (i != j && x(i, j) != 0.0) g(i, j) += p.upsilon * (x(i, j) > 0.0 ? 1.0 : -1.0);
    x = project(x - (2.0 / (k + 1.0)) * g);
    avg += static_cast<double>(k) * x;
    weight += static_cast<double>(k);
  }
  return objective(avg / weight);
}

void criterion_scs(const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  const ScsProblem& desk = st.instance.scs;
  ScsAdmmState state = scs_admm_init(desk);
  double worst_asym = 0.0, worst_floor = 1e300;
  for (int k = 0; k <= 200; ++k) {
    const Matrix& sigma = k == 0 ? state.sigma : scs_admm_step(desk, state);
    worst_asym = std::max(worst_asym, (sigma - sigma.transpose()).lpNorm<Eigen::Infinity>());
    worst_floor = std::min(worst_floor, Eigen::SelfAdjointEigenSolver<Matrix>(sigma).eigenvalues().minCoeff());
  }
  v.require(worst_asym == 0.0 || worst_asym <= 1e-12, "symmetry");
  v.require(worst_floor >= desk.psd_floor - 1e-10, "eigenvalue floor");

  double worst_obj = 0.0;
  for (std::uint64_t seed : {11u, 12u}) {
    std::mt19937_64 gen(seed);
    Matrix r(5, 3);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = gaussian(gen, 1)(0);
    ScsProblem p;
    p.S = r * r.transpose() / 2.0;  // rank 3, so the floor binds
    const double f_admm = scs_objective(p, solve_scs(p));
    const double f_sg = subgradient_oracle(p, 2'000'000);
    worst_obj = std::max(worst_obj, std::abs(f_admm - f_sg));
    v.require(std::abs(f_admm - f_sg) <= 1e-6, "n = 5 objective match, seed " + std::to_string(seed));
  }
  v.require(st.tau > 0.0 && st.tau < 1.0, "tau");
  v.require(elapsed(t0) < 30.0, "runtime");
  v.detail << " min eigenvalue " << worst_floor << ", n=5 objective gap " << worst_obj << ", tau " << st.tau;
  report(8, v, t0);
}

void criterion_seqsim(const ExperimentConfig& base, const ExperimentSetup& st) {
  const auto t0 = Clock::now();
  Verdict v;
  ExperimentConfig cfg = base;
  cfg.specification = Specification::Learned;
  const std::vector<Curve> curves = run_seq_vs_sim(cfg, st);
  const double sim = curves.front().final_error();
  double previous = std::numeric_limits<double>::infinity();
  v.detail << " simultaneous " << sim << ";";
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const double plateau = curves[i].final_error();
    v.require(plateau > sim, "budget " + std::to_string(curves[i].budget) + " not above simultaneous");
    v.require(plateau <= previous, "budget " + std::to_string(curves[i].budget) + " not monotone");
    previous = plateau;
    v.detail << " budget " << curves[i].budget << ": " << plateau << ";";
  }
  v.require(elapsed(t0) < 300.0, "runtime");
  report(9, v, t0);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

void criterion_determinism() {
  const auto t0 = Clock::now();
  Verdict v;
  const fs::path root = fs::absolute("determinism");
  fs::remove_all(root);
  std::vector<fs::path> dirs{root / "a", root / "b"};
  for (const fs::path& d : dirs) {
    const std::string cmd = std::string("\"") + MISALM_CLI_PATH + "\" table --seed 7 --regime constant --spec learned" +
                            " --epsilon 0.01 --no-timing --out \"" + d.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    v.require(rc == 0, "cli exit status " + std::to_string(rc));
  }
  long files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++files;
    const fs::path twin = dirs[1] / entry.path().filename();
    v.require(fs::exists(twin) && slurp(entry.path()) == slurp(twin), entry.path().filename().string() + " differs");
  }
  v.require(files >= 2, "no CSVs written");
  v.detail << " " << files << " CSV files compared";
  report(10, v, t0);
}

}  // namespace

int main() {
  std::cout << std::setprecision(4);
  criterion_cones();
  criterion_fista();
  criterion_schedules();

  const auto s0 = Clock::now();
  const ExperimentConfig cfg;  // desk scale: n = 100, s = 10, seed 1
  const ExperimentSetup st = prepare(cfg);
  std::cout << "setup: n = " << st.problem.n << ", seed " << st.instance.portfolio.seed << ", f* = " << st.reference.f_star
            << ", KKT " << st.reference.lambda_star.size() << " multipliers at residual " << st.kkt_residual
            << ", tau " << st.tau << " (" << elapsed(s0) << " s)" << std::endl;

  criterion_gradients(st);
  criterion_constant_known(cfg, st);
  criterion_constant_learned(cfg, st);
  criterion_geometric(cfg, st);
  criterion_scs(st);
  criterion_seqsim(cfg, st);
  criterion_determinism();

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
