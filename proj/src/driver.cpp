#include "ccik/driver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ccik {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_between_deg(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double dot = a.dot(b);
  const double cross_sq = std::max(0.0, a.squaredNorm() * b.squaredNorm() - dot * dot);
  return std::atan2(std::sqrt(cross_sq), dot) * 180.0 / kPi;
}

Eigen::Vector3d reflect(const Eigen::Vector3d& v, const Eigen::Vector3d& unit_normal) {
  return v - 2.0 * v.dot(unit_normal) * unit_normal;
}

}  // namespace

void DriverOptions::validate() const {
  if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be >= 1");
  if (!(rank_eps > 0.0)) throw std::invalid_argument("rank_eps must be positive");
  solver.validate();
}

bool ValidityReport::all_lengths_valid() const {
  for (bool v : segment_lengths_valid)
    if (!v) return false;
  return true;
}

std::string to_string(IKStatus status) {
  switch (status) {
    case IKStatus::Converged: return "converged";
    case IKStatus::MaxOuterIterations: return "max_outer_iterations";
    case IKStatus::SolverFailure: return "solver_failure";
  }
  throw std::invalid_argument("unknown IK status");
}

Eigen::MatrixXd rank_cost(const Eigen::MatrixXd& z, int d) {
  const Eigen::Index m = z.rows();
  if (z.cols() != m) throw std::invalid_argument("matrix must be square");
  if (d < 1 || d >= m) throw std::invalid_argument("need 1 <= d < m");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const auto v = eig.eigenvectors().leftCols(m - d);  // ascending: trailing eigenspace
  return v * v.transpose();
}

Eigen::MatrixXd warm_start(const RobotModel& robot, const GoalSpec& goal,
                           const LiftIndex& layout) {
  goal.validate(robot.d);
  const Configuration straight = robot.straight_mid_configuration();
  const PointAssignment a =
      assignment_from_configuration(robot, straight, layout.n_scalars == robot.n + 1);
  return lift(a.points, a.scalars, layout);
}

Configuration recover_configuration(const Eigen::MatrixXd& points, const RobotModel& robot,
                                    const GoalSpec& goal, std::vector<std::string>* warnings) {
  robot.validate();
  goal.validate(robot.d);
  const int n = robot.n;
  const int d = robot.d;
  if (points.rows() != d || points.cols() != 2 * (n - 1) + 1)
    throw std::invalid_argument("point matrix shape mismatch");

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  const AnchorSet anchors = build_anchors(robot.base_pose, goal);
  Pose cursor = robot.base_pose;
  Configuration config;
  config.reserve(static_cast<size_t>(n));

  for (int t = 1; t <= n; ++t) {
    const Eigen::VectorXd p_prev =
        t == 1 ? anchors.b : Eigen::VectorXd(points.col(DGProblem::p_column(t - 1)));
    const Eigen::VectorXd p =
        t == n ? anchors.w : Eigen::VectorXd(points.col(DGProblem::p_column(t)));
    Eigen::VectorXd q = points.col(DGProblem::q_column(t));

    const Eigen::VectorXd chord_vec = p - p_prev;
    const double chord = chord_vec.norm();
    if (chord < 1e-12) throw std::runtime_error("degenerate segment: zero chord");

    // Project q onto the perpendicular bisector plane of the chord so the
    // triangle is exactly isosceles.
    const Eigen::VectorXd chord_dir = chord_vec / chord;
    const double off = (q - 0.5 * (p_prev + p)).dot(chord_dir);
    q -= off * chord_dir;
    if (std::abs(off) > 1e-6)
      warn("segment " + std::to_string(t) + ": virtual joint repaired (offset " +
           std::to_string(off) + ")");

    const Eigen::VectorXd leg = p - q;
    const double leg_norm = leg.norm();
    double theta = 0.0, delta = 0.0, length = chord;
    if (leg_norm > 1e-12) {
      const Eigen::VectorXd v = cursor.frame.transpose() * (leg / leg_norm);
      const double perp = d == 3 ? std::hypot(v[0], v[1]) : std::abs(v[0]);
      theta = std::atan2(perp, v[d - 1]);
      if (theta >= kPi - 1e-9) {
        theta = kPi - 1e-9;
        warn("segment " + std::to_string(t) + ": bend angle clamped below pi");
      }
      if (theta < 1e-8) {
        theta = 0.0;
      } else {
        if (d == 3)
          delta = perp > 1e-12 ? std::atan2(v[1], v[0]) : 0.0;
        else
          delta = v[0] >= 0.0 ? 0.0 : kPi;
        length = theta * chord / (2.0 * std::sin(0.5 * theta));
      }
    } else {
      warn("segment " + std::to_string(t) + ": degenerate virtual joint, treated straight");
    }

    const ArcParams arc{length, theta, delta};
    config.push_back(arc);
    cursor = cursor.compose(segment_pose(arc, d));
  }
  return config;
}

ValidityReport validate(const Configuration& config, const RobotModel& robot,
                        const GoalSpec& goal, const Environment& env) {
  const auto poses = forward_kinematics(config, robot);
  const Pose& ee = poses.back();
  const int d = robot.d;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ValidityReport rep;
  rep.ee_position_error = (ee.position - goal.position).norm();
  rep.ee_rot_z_error_deg = nan;
  rep.ee_rot_y_error_deg = nan;

  if (goal.tangent) {
    const Eigen::VectorXd z_actual = ee.tangent();
    rep.ee_rot_z_error_deg = angle_between_deg(z_actual, *goal.tangent);
    if (d == 3 && goal.roll_axis) {
      const Eigen::Vector3d zd = *goal.tangent;
      const Eigen::Vector3d yd = *goal.roll_axis;
      const Eigen::Vector3d za = z_actual;
      const Eigen::Vector3d ya = ee.frame.col(1);
      if (goal.constrains_roll()) {
        // The goal plane spanned by the tangent and roll axis admits a
        // mirrored solution; its frame reflects the tangent and flips the
        // reflected roll axis. Report the better of the two.
        const Eigen::Vector3d normal = zd.cross(yd).normalized();
        const Eigen::Vector3d zr = reflect(za, normal);
        const Eigen::Vector3d yr = -reflect(ya, normal);
        rep.ee_rot_z_error_deg =
            std::min(angle_between_deg(za, zd), angle_between_deg(zr, zd));
        rep.ee_rot_y_error_deg =
            std::min(angle_between_deg(ya, yd), angle_between_deg(yr, yd));
      } else {
        rep.ee_rot_y_error_deg = angle_between_deg(ya, yd);
      }
    }
  }

  rep.segment_lengths_valid.resize(config.size());
  for (size_t t = 0; t < config.size(); ++t) {
    const LengthRange& r = robot.length_ranges[t];
    rep.segment_lengths_valid[t] =
        config[t].length >= r.lo - 1e-9 && config[t].length <= r.hi + 1e-9;
  }

  rep.obstacle_clearance_ok = true;
  for (const auto& s : env.spheres) {
    for (const auto& pose : poses) {
      if ((pose.position - s.center).norm() < s.radius - 0.01) {
        rep.obstacle_clearance_ok = false;
        break;
      }
    }
    if (!rep.obstacle_clearance_ok) break;
  }

  rep.self_collision_ok = self_collision_free(config, robot, 10);

  const double pos_tol = 0.01 * robot.mid_extension_length();
  bool ok = rep.ee_position_error <= pos_tol && rep.all_lengths_valid() &&
            rep.obstacle_clearance_ok && rep.self_collision_ok;
  if (goal.constrains_tangent()) ok = ok && rep.ee_rot_z_error_deg <= 2.0;
  if (goal.constrains_roll()) ok = ok && rep.ee_rot_y_error_deg <= 2.0;
  rep.overall_valid = ok;
  return rep;
}

IKResult solve_ik(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                  const DriverOptions& opts) {
  opts.validate();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  const DGProblem problem = build_problem(robot, goal, env, opts.build);
  const LiftIndex layout = make_layout(problem);
  const LiftedSDP sdp = assemble(problem, layout, opts.assemble);
  const SdpSolver solver(sdp, opts.solver);

  IKResult res;
  res.warnings = problem.warnings;
  res.setup_time_s = std::chrono::duration<double>(clock::now() - t0).count();

  const int m = layout.m();
  const int d = layout.d;

  Eigen::MatrixXd z;
  Eigen::MatrixXd cost;
  bool have_z = false;
  if (opts.init == DriverOptions::Init::StraightWarmStart) {
    const auto t_init = clock::now();
    z = warm_start(robot, goal, layout);
    cost = rank_cost(z, d);
    have_z = true;
    res.solver_time_s += std::chrono::duration<double>(clock::now() - t_init).count();
  } else {
    cost = Eigen::MatrixXd::Zero(m, m);
  }

  bool converged = false;
  bool solver_failed = false;
  double best_lambda = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_z;
  SolverState state;

  double lambda_prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_outer_iterations; ++it) {
    const auto t_it = clock::now();
    // Inexact early solves: while the rank residual is large the cost matrix
    // is about to change anyway, so precision there is wasted. The tolerance
    // tightens with the rank residual; certificates always come from a solve
    // at the configured precision.
    const double cap = std::max(opts.inexact_eps_cap, opts.solver.eps_primal);
    const double loose = std::clamp(1e-2 * lambda_prev, opts.solver.eps_primal, cap);
    const double eps_p = loose;
    const double eps_d = std::max(opts.solver.eps_dual, loose);
    auto [z_new, st] = solver.solve(cost, state, have_z ? &z : nullptr, eps_p, eps_d);
    res.outer_iterations = it;
    if (st.outcome == SolveOutcome::NumericalFailure) {
      solver_failed = true;
      res.warnings.push_back("inner solve failed numerically at outer iteration " +
                             std::to_string(it));
      res.solver_time_s += std::chrono::duration<double>(clock::now() - t_it).count();
      break;
    }
    z = std::move(z_new);
    have_z = true;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
    if (eig.info() != Eigen::Success) {
      solver_failed = true;
      res.warnings.push_back("eigendecomposition failed at outer iteration " + std::to_string(it));
      res.solver_time_s += std::chrono::duration<double>(clock::now() - t_it).count();
      break;
    }
    const double lambda = eig.eigenvalues()[m - d - 1];
    res.lambda_trace.push_back(lambda);
    lambda_prev = lambda;

    // A rank certificate only counts on an iterate that actually reached the
    // affine rows; best-effort iterates from capped or infeasible inner
    // solves stay candidates for the cost update only.
    const bool feasible = st.primal_residual <= 10.0 * opts.solver.eps_primal;
    if (feasible && lambda < best_lambda) {
      best_lambda = lambda;
      best_z = z;
    }
    if (feasible && lambda < opts.rank_eps) {
      converged = true;
      res.solver_time_s += std::chrono::duration<double>(clock::now() - t_it).count();
      break;
    }
    if (st.outcome == SolveOutcome::PrimalInfeasibleLikely) {
      res.warnings.push_back("inner solver reports likely infeasibility; stopping after outer "
                             "iteration " +
                             std::to_string(it));
      res.solver_time_s += std::chrono::duration<double>(clock::now() - t_it).count();
      break;
    }
    const auto v = eig.eigenvectors().leftCols(m - d);
    cost = v * v.transpose();
    res.solver_time_s += std::chrono::duration<double>(clock::now() - t_it).count();

    if (opts.record_trace) {
      try {
        const Extraction ex = extract(z, layout);
        res.intermediate.push_back(recover_configuration(ex.points, robot, goal, nullptr));
      } catch (const std::exception&) {
        res.intermediate.emplace_back();
      }
    }
  }

  res.status = solver_failed ? IKStatus::SolverFailure
                             : (converged ? IKStatus::Converged : IKStatus::MaxOuterIterations);

  const Eigen::MatrixXd* final_z = nullptr;
  if (converged)
    final_z = &z;
  else if (best_z.size() > 0)
    final_z = &best_z;
  else if (have_z)
    final_z = &z;
  if (final_z == nullptr) return res;

  try {
    const Extraction ex = extract(*final_z, layout);
    res.lambda_final = ex.lambda_d1;
    res.points = ex.points;
    res.scalars = ex.scalars;
    if (!ex.identity_reliable)
      res.warnings.push_back("identity block defect " + std::to_string(ex.identity_defect) +
                             "; extraction unreliable");
    res.configuration = recover_configuration(ex.points, robot, goal, &res.warnings);
    res.validity = validate(res.configuration, robot, goal, env);
  } catch (const std::exception& e) {
    res.warnings.push_back(std::string("extraction failed: ") + e.what());
  }
  return res;
}

}  // namespace ccik
