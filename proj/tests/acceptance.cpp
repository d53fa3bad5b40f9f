// Acceptance suite: end-to-end checks of the full pipeline at fixed seeds and
// pinned thresholds. Prints one PASS/FAIL line per criterion; the exit code
// is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ccik/bench.hpp"
#include "ccik/driver.hpp"
#include "ccik/sdp_lift.hpp"
#include "ccik/stats.hpp"
#include "beta_oracle.hpp"
#include "helpers.hpp"

using namespace ccik;
using namespace ccik::testing;

namespace {

int failures = 0;

struct Criterion {
  const char* name;
  std::chrono::steady_clock::time_point start;
  explicit Criterion(const char* n) : name(n), start(std::chrono::steady_clock::now()) {}
  void report(bool pass, const std::string& detail) const {
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-18s %s  [%.1f s]\n", pass ? "PASS" : "FAIL", name, detail.c_str(), dt);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

struct SolveLog {
  bool converged = false;
  bool valid = false;
  bool lengths_valid = false;
  bool clearance_ok = false;
  double lambda_final = 0.0;
  int outer_iterations = 0;
  double pos_err = 0.0;
  double rot_z = 0.0;
  double rot_y = 0.0;
};

std::vector<SolveLog> all_solves;

SolveLog run_query(const RobotModel& robot, const Query& q, const Environment& env) {
  const IKResult res = solve_ik(robot, q.goal, env);
  SolveLog log;
  log.converged = res.status == IKStatus::Converged;
  log.valid = res.validity.overall_valid;
  log.lengths_valid = res.validity.all_lengths_valid();
  log.clearance_ok = res.validity.obstacle_clearance_ok;
  log.lambda_final = res.lambda_final;
  log.outer_iterations = res.outer_iterations;
  log.pos_err = res.validity.ee_position_error;
  log.rot_z = res.validity.ee_rot_z_error_deg;
  log.rot_y = res.validity.ee_rot_y_error_deg;
  all_solves.push_back(log);
  return log;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void criterion_1_lift_exactness() {
  Criterion c("lift-exactness");
  std::mt19937_64 rng(101);
  double worst_eq = 0.0, worst_viol = 0.0;
  int cases = 0;
  for (int n : {3, 4}) {
    for (int d : {2, 3}) {
      for (GoalMode mode :
           {GoalMode::Position, GoalMode::PositionYawPitch, GoalMode::FullPose}) {
        if (mode == GoalMode::FullPose && d == 2) continue;  // planar roll is undefined
        const RobotModel robot = RobotModel::uniform(n, d);
        for (int i = 0; i < 100; ++i) {
          const Configuration config = random_chord_feasible_config(rng, robot);
          const GoalSpec goal = goal_from_fk(robot, config, mode);
          const DGProblem p = build_problem(robot, goal, Environment::empty());
          const LiftIndex layout = make_layout(p);
          const LiftedSDP sdp = assemble(p, layout);
          const PointAssignment a =
              assignment_from_configuration(robot, config, p.num_scalars() == n + 1);
          const Eigen::MatrixXd z = lift(a.points, a.scalars, layout);
          for (const auto& row : sdp.eq)
            worst_eq = std::max(worst_eq, std::abs(row.mat.dot(z) - row.rhs));
          for (const auto& row : sdp.ineq) {
            const double lhs = row.mat.dot(z);
            worst_viol = std::max(worst_viol,
                                  row.sense == Sense::Le ? lhs - row.rhs : row.rhs - lhs);
          }
          ++cases;
        }
      }
    }
  }
  const bool pass = worst_eq < 1e-9 && worst_viol < 1e-9;
  c.report(pass, fmt("%d configs, max |eq| %.2e, max violation %.2e", cases, worst_eq,
                     std::max(worst_viol, 0.0)));
}

void criterion_2_kinematics_round_trip() {
  Criterion c("kinematics");
  std::mt19937_64 rng(202);
  double worst_arc = 0.0;
  const LengthRange wide{0.01, 10.0};
  for (int i = 0; i < 1000; ++i) {
    const ArcParams arc = random_chord_feasible_arc(rng, LengthRange{0.15, 0.55}, 3);
    const auto tri = segment_triangle(arc, Pose::identity(3));
    const auto rec = arc_from_triangle(tri, Eigen::Vector3d(0, 0, 1), wide);
    worst_arc = std::max({worst_arc, std::abs(rec.length - arc.length),
                          std::abs(rec.theta - arc.theta)});
  }
  double worst_tangent = 0.0;
  const RobotModel robot = RobotModel::uniform(5, 3);
  for (int i = 0; i < 100; ++i) {
    const Configuration config = random_chord_feasible_config(rng, robot);
    const auto poses = forward_kinematics(config, robot);
    for (int t = 0; t < robot.n; ++t) {
      const ArcParams& arc = config[static_cast<size_t>(t)];
      const double ct = std::cos(arc.delta), st = std::sin(arc.delta);
      const Eigen::Vector3d tip_local(ct * std::sin(arc.theta), st * std::sin(arc.theta),
                                      std::cos(arc.theta));
      const Eigen::Vector3d expected = poses[static_cast<size_t>(t)].frame * tip_local;
      worst_tangent = std::max(
          worst_tangent, (poses[static_cast<size_t>(t + 1)].tangent() - expected).norm());
    }
  }
  const bool pass = worst_arc < 1e-9 && worst_tangent < 1e-10;
  c.report(pass, fmt("round trip %.2e, tangent continuity %.2e", worst_arc, worst_tangent));
}

void criterion_3_rank_cost_oracle() {
  Criterion c("rank-cost");
  std::mt19937_64 rng(303);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_sum = 0.0, worst_proj = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd q(20, 20);
    for (int r = 0; r < 20; ++r)
      for (int cc = 0; cc < 20; ++cc) q(r, cc) = gauss(rng);
    const Eigen::MatrixXd z = q * q.transpose();
    const Eigen::MatrixXd cost = rank_cost(z, 3);
    const auto [vals, vecs] = jacobi_eigs(z);
    worst_sum = std::max(worst_sum, std::abs((cost * z).trace() - vals.head(17).sum()));
    worst_proj = std::max(worst_proj, (cost * cost - cost).cwiseAbs().maxCoeff());
    worst_trace = std::max(worst_trace, std::abs(cost.trace() - 17.0));
  }
  const bool pass = worst_sum < 1e-10 && worst_proj < 1e-9 && worst_trace < 1e-9;
  c.report(pass, fmt("eigensum %.2e, projector %.2e, trace %.2e", worst_sum, worst_proj,
                     worst_trace));
}

void criterion_4_cone_projection() {
  Criterion c("cone-projection");
  std::mt19937_64 rng(404);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd a(20, 20);
    for (int r = 0; r < 20; ++r)
      for (int cc = 0; cc < 20; ++cc) a(r, cc) = gauss(rng);
    const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
    const auto [vals, vecs] = jacobi_eigs(s);
    const Eigen::MatrixXd expected = vecs * vals.cwiseMax(0.0).asDiagonal() * vecs.transpose();
    worst = std::max(worst, (project_psd(s) - expected).cwiseAbs().maxCoeff());
  }
  c.report(worst < 1e-10, fmt("max deviation from clamp oracle %.2e", worst));
}

std::vector<SolveLog> c5_logs;

void criterion_5_free_space_rates() {
  Criterion c("free-space-rates");
  const RobotModel robot = RobotModel::uniform(4, 3);
  int converged = 0, valid = 0;
  double worst_pos = 0.0, worst_rot = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto rng = query_rng(505, static_cast<std::uint64_t>(i));
    const Query q = sample_query(robot, Environment::empty(), GoalMode::FullPose, rng);
    const SolveLog log = run_query(robot, q, Environment::empty());
    c5_logs.push_back(log);
    if (log.converged) {
      ++converged;
      worst_pos = std::max(worst_pos, log.pos_err);
      worst_rot = std::max({worst_rot, log.rot_z, log.rot_y});
    }
    if (log.valid) ++valid;
  }
  const bool pass = converged >= 45 && valid >= 43 && worst_pos <= 1e-4 && worst_rot <= 2.0;
  c.report(pass, fmt("converged %d/50, valid %d/50, max pos err %.2e m, max rot err %.2e deg",
                     converged, valid, worst_pos, worst_rot));
}

double obstacle_free_iters_mean = 0.0;
double obstacle_obs_iters_mean = 0.0;

void criterion_6_obstacle_suites() {
  Criterion c("obstacle-suites");
  bool pass = true;
  std::string detail;
  double free_iters = 0.0, obs_iters = 0.0;
  int obs_solves = 0;
  for (EnvironmentKind kind : {EnvironmentKind::Octahedron, EnvironmentKind::Cube}) {
    const RobotModel robot = RobotModel::uniform(3, 3);
    const Environment env = make_environment(kind, 3);
    int obs_valid = 0, clearance_breaks = 0;
    for (int i = 0; i < 25; ++i) {
      auto rng = query_rng(606, static_cast<std::uint64_t>(i) + (kind == EnvironmentKind::Cube
                                                                     ? 1000
                                                                     : 0));
      const Query q = sample_query(robot, env, GoalMode::FullPose, rng);
      const SolveLog free_log = run_query(robot, q, Environment::empty());
      const SolveLog obs_log = run_query(robot, q, env);
      free_iters += free_log.outer_iterations;
      obs_iters += obs_log.outer_iterations;
      ++obs_solves;
      if (obs_log.valid) ++obs_valid;
      if (obs_log.valid && !obs_log.clearance_ok) ++clearance_breaks;
    }
    pass = pass && obs_valid >= 23 && clearance_breaks == 0;  // >= 90% of 25
    detail += fmt("%s with-obs valid %d/25; ", to_string(kind).c_str(), obs_valid);
  }
  obstacle_free_iters_mean = free_iters / obs_solves;
  obstacle_obs_iters_mean = obs_iters / obs_solves;
  c.report(pass, detail + "endpoint clearance within 0.01 m on all valid solves");
}

void criterion_7_effort_scaling() {
  Criterion c("effort-scaling");
  auto mean_iters = [&](int n) {
    const RobotModel robot = RobotModel::uniform(n, 3);
    double total = 0.0;
    for (int i = 0; i < 20; ++i) {
      auto rng = query_rng(707, static_cast<std::uint64_t>(i));
      const Query q = sample_query(robot, Environment::empty(), GoalMode::FullPose, rng);
      total += run_query(robot, q, Environment::empty()).outer_iterations;
    }
    return total / 20.0;
  };
  const double mean3 = mean_iters(3);
  const double mean6 = mean_iters(6);
  const bool scaling = mean6 > mean3;
  const bool obs_cheap = obstacle_obs_iters_mean <= 2.0 * obstacle_free_iters_mean;
  c.report(scaling && obs_cheap,
           fmt("mean outer iterations n=3: %.1f, n=6: %.1f; obstacle batches free %.1f vs "
               "with-obs %.1f",
               mean3, mean6, obstacle_free_iters_mean, obstacle_obs_iters_mean));
}

void criterion_8_bookkeeping() {
  Criterion c("bookkeeping");
  bool pass = true;
  for (const auto& log : all_solves) {
    if (log.converged && !(log.lambda_final < 1e-7)) pass = false;
    if (log.outer_iterations > 200) pass = false;
  }
  const DriverOptions defaults;
  pass = pass && defaults.max_outer_iterations == 200 && defaults.rank_eps == 1e-7;
  c.report(pass, fmt("%zu solves: converged implies rank residual < 1e-7, cap 200 respected",
                     all_solves.size()));
}

void criterion_9_segment_lengths() {
  Criterion c("segment-lengths");
  int converged = 0, in_range = 0;
  for (const auto& log : c5_logs) {
    if (!log.converged) continue;
    ++converged;
    if (log.lengths_valid) ++in_range;
  }
  const bool pass = converged > 0 && in_range * 10 >= converged * 9;
  c.report(pass, fmt("lengths in range for %d/%d converged solves", in_range, converged));
}

void criterion_10_statistics() {
  Criterion c("statistics");
  double worst_q = 0.0;
  for (int t = 1; t <= 50; t += (t < 12 ? 1 : 19)) {
    for (int s = 0; s <= t; ++s) {
      const auto [lo, hi] = jeffreys_interval(s, t);
      const double a = s + 0.5, b = t - s + 0.5;
      if (s > 0) worst_q = std::max(worst_q, std::abs(lo - oracle_beta_quantile(a, b, 0.025)));
      if (s < t) worst_q = std::max(worst_q, std::abs(hi - oracle_beta_quantile(a, b, 0.975)));
    }
  }
  std::mt19937_64 rng(1010);
  RunningStats lengths;
  for (int i = 0; i < 10000; ++i) lengths.add(truncated_normal(rng, 0.35, 0.075, 0.15, 0.55));
  const bool pass = worst_q < 1e-9 && std::abs(lengths.mean - 0.35) < 0.01;
  c.report(pass, fmt("interval oracle gap %.2e, sampled length mean %.4f m", worst_q,
                     lengths.mean));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1_lift_exactness();
  criterion_2_kinematics_round_trip();
  criterion_3_rank_cost_oracle();
  criterion_4_cone_projection();
  criterion_5_free_space_rates();
  criterion_6_obstacle_suites();
  criterion_7_effort_scaling();
  criterion_8_bookkeeping();
  criterion_9_segment_lengths();
  criterion_10_statistics();
  std::printf("%s (%d criteria failed)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures;
}
