#include <doctest.h>

#include <random>
#include <sstream>

#include "ccik/solver.hpp"
#include "helpers.hpp"

using namespace ccik;
using namespace ccik::testing;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = gauss(rng);
  return 0.5 * (a + a.transpose());
}

// Minimal layout wrapper for hand-built instances: m = j + d with one scalar
// block unused.
LiftIndex tiny_layout(int m) {
  LiftIndex l;
  l.d = 1;
  l.j = m - 1;
  l.n_scalars = 0;
  return l;
}

LinearRow unit_row(int m, int r, int c, double rhs, Sense sense = Sense::Eq) {
  LinearRow row;
  row.mat = SparseSym(m);
  row.mat.add(r, c, r == c ? 1.0 : 0.5);
  row.mat.compress();
  row.rhs = rhs;
  row.sense = sense;
  return row;
}

}  // namespace

TEST_CASE("project_psd clamps negative eigenvalues") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 0, 0, -2;
  const Eigen::MatrixXd p = project_psd(s);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((p - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("project_psd leaves PSD input unchanged") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd a = random_symmetric(rng, 8);
  const Eigen::MatrixXd psd = a * a.transpose() + Eigen::MatrixXd::Identity(8, 8) * 1e-3;
  CHECK((project_psd(psd) - psd).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project_psd matches the eigen-clamp oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd s = random_symmetric(rng, 20);
    const auto [vals, vecs] = jacobi_eigs(s);
    const Eigen::MatrixXd expected =
        vecs * vals.cwiseMax(0.0).asDiagonal() * vecs.transpose();
    CHECK((project_psd(s) - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("project_psd is idempotent") {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd s = random_symmetric(rng, 12);
  const Eigen::MatrixXd once = project_psd(s);
  CHECK((project_psd(once) - once).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("smallest_eigs basics") {
  SUBCASE("sorted diagonal") {
    Eigen::VectorXd diag(6);
    diag << 5, 4, 3, 2, 1, 0;
    const auto [vals, vecs] = smallest_eigs(diag.asDiagonal(), 3);
    CHECK(vals[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(vals[2] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("degenerate spectrum yields an orthonormal pair") {
    const auto [vals, vecs] = smallest_eigs(Eigen::MatrixXd::Identity(4, 4), 2);
    CHECK(vals[0] == doctest::Approx(1.0));
    CHECK(vals[1] == doctest::Approx(1.0));
    CHECK((vecs.transpose() * vecs - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-10);
  }
  SUBCASE("random PSD matches the oracle") {
    std::mt19937_64 rng(31);
    const Eigen::MatrixXd a = random_symmetric(rng, 10);
    const Eigen::MatrixXd psd = a * a.transpose();
    const auto [vals, vecs] = smallest_eigs(psd, 4);
    const auto [oracle_vals, oracle_vecs] = jacobi_eigs(psd);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(vals[i] - oracle_vals[i]) < 1e-10);
    CHECK((vecs.transpose() * vecs - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("solve minimizes trace against a pinned corner") {
  LiftedSDP sdp;
  sdp.layout = tiny_layout(2);
  sdp.eq.push_back(unit_row(2, 0, 0, 1.0));
  const auto [z, st] = solve_sdp(sdp, Eigen::MatrixXd::Identity(2, 2));
  CHECK(st.outcome == SolveOutcome::Optimal);
  CHECK(st.objective == doctest::Approx(1.0).epsilon(1e-6));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((z - expected).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("feasibility solve on a lifted ground-truth instance") {
  std::mt19937_64 rng(41);
  const RobotModel robot = RobotModel::uniform(3, 3);
  const Configuration config = random_chord_feasible_config(rng, robot);
  const GoalSpec goal = goal_from_fk(robot, config, GoalMode::PositionYawPitch);
  const DGProblem p = build_problem(robot, goal, Environment::empty());
  const LiftIndex layout = make_layout(p);
  const LiftedSDP sdp = assemble(p, layout);

  const auto [z, st] = solve_sdp(sdp, Eigen::MatrixXd::Zero(layout.m(), layout.m()));
  CHECK(st.outcome == SolveOutcome::Optimal);
  CHECK(st.primal_residual <= 1e-8);
  // Returned matrix is feasible for the rows, not necessarily the lift of
  // the generating configuration.
  double max_eq = 0.0;
  for (const auto& row : sdp.eq) max_eq = std::max(max_eq, std::abs(row.mat.dot(z) - row.rhs));
  CHECK(max_eq < 1e-6);
}

TEST_CASE("warm start accelerates a feasible solve") {
  std::mt19937_64 rng(43);
  const RobotModel robot = RobotModel::uniform(3, 3);
  const Configuration config = random_chord_feasible_config(rng, robot);
  const GoalSpec goal = goal_from_fk(robot, config, GoalMode::PositionYawPitch);
  const DGProblem p = build_problem(robot, goal, Environment::empty());
  const LiftIndex layout = make_layout(p);
  const LiftedSDP sdp = assemble(p, layout);
  const PointAssignment a = assignment_from_configuration(robot, config, true);
  const Eigen::MatrixXd z_gt = lift(a.points, a.scalars, layout);

  const SdpSolver solver(sdp);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(layout.m(), layout.m());
  const auto [z_cold, st_cold] = solver.solve(c);
  const auto [z_warm, st_warm] = solver.solve(c, &z_gt);
  CHECK(st_warm.outcome == SolveOutcome::Optimal);
  CHECK(st_warm.inner_iterations <= st_cold.inner_iterations);
}

TEST_CASE("inconsistent equalities do not come back optimal") {
  LiftedSDP sdp;
  sdp.layout = tiny_layout(3);
  sdp.eq.push_back(unit_row(3, 0, 1, 1.0));
  sdp.eq.push_back(unit_row(3, 0, 1, -1.0));
  SolverOptions opts;
  opts.max_inner_iterations = 5000;
  const auto [z, st] = solve_sdp(sdp, Eigen::MatrixXd::Identity(3, 3), nullptr, opts);
  CHECK(st.outcome != SolveOutcome::Optimal);
  const bool infeasible_or_stuck = st.outcome == SolveOutcome::PrimalInfeasibleLikely ||
                                   (st.outcome == SolveOutcome::MaxIterations &&
                                    st.primal_residual > 1e-3);
  CHECK(infeasible_or_stuck);
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 rng(47);
  const RobotModel robot = RobotModel::uniform(2, 2);
  const Configuration config = random_chord_feasible_config(rng, robot);
  const GoalSpec goal = goal_from_fk(robot, config, GoalMode::Position);
  const DGProblem p = build_problem(robot, goal, Environment::empty());
  const LiftIndex layout = make_layout(p);
  const LiftedSDP sdp = assemble(p, layout);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(layout.m(), layout.m());

  const auto [z1, st1] = solve_sdp(sdp, c);
  const auto [z2, st2] = solve_sdp(sdp, c);
  CHECK(st1.inner_iterations == st2.inner_iterations);
  CHECK(st1.outcome == st2.outcome);
  CHECK((z1 - z2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("inequalities are honored") {
  // min tr(Z) with Z_00 >= 2 pushes the diagonal to exactly 2.
  LiftedSDP sdp;
  sdp.layout = tiny_layout(2);
  sdp.eq.push_back(unit_row(2, 1, 1, 0.5));
  sdp.ineq.push_back(unit_row(2, 0, 0, 2.0, Sense::Ge));
  const auto [z, st] = solve_sdp(sdp, Eigen::MatrixXd::Identity(2, 2));
  CHECK(st.outcome == SolveOutcome::Optimal);
  CHECK(z(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(z(1, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(st.max_ineq_violation <= 1e-8);
}

TEST_CASE("solver options are validated") {
  SolverOptions opts;
  opts.eps_primal = -1.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts = SolverOptions{};
  opts.over_relaxation = 2.5;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}

TEST_CASE("iteration log emits CSV rows") {
  LiftedSDP sdp;
  sdp.layout = tiny_layout(2);
  sdp.eq.push_back(unit_row(2, 0, 0, 1.0));
  SolverOptions opts;
  std::ostringstream log;
  opts.iteration_log = &log;
  solve_sdp(sdp, Eigen::MatrixXd::Identity(2, 2), nullptr, opts);
  const std::string text = log.str();
  CHECK_FALSE(text.empty());
  CHECK(std::count(text.begin(), text.end(), ',') >= 2);
}
