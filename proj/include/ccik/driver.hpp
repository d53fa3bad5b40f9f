#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ccik/dg_model.hpp"
#include "ccik/sdp_lift.hpp"
#include "ccik/solver.hpp"

namespace ccik {

struct DriverOptions {
  int max_outer_iterations = 200;
  double rank_eps = 1e-7;  ///< convergence threshold on the (d+1)-th eigenvalue
  /// Cap on the relaxed inner tolerance used while the rank residual is
  /// still large; the tolerance tightens as 0.01x the previous rank residual
  /// down to the solver eps. Certificates always come from a solve at the
  /// configured solver precision. Set to 0 to solve tightly throughout.
  double inexact_eps_cap = 1e-5;
  bool record_trace = false;  ///< keep intermediate recovered configurations
  /// StraightWarmStart seeds the first solve and the first cost from the
  /// straight mid-extension configuration; ZeroCost starts from a pure
  /// feasibility solve with no warm start.
  enum class Init { StraightWarmStart, ZeroCost } init = Init::StraightWarmStart;
  SolverOptions solver;
  BuildOptions build;
  AssembleOptions assemble;

  void validate() const;
};

struct ValidityReport {
  double ee_position_error = 0.0;      ///< meters
  double ee_rot_z_error_deg = 0.0;     ///< NaN when no reference tangent
  double ee_rot_y_error_deg = 0.0;     ///< NaN when no reference roll axis
  std::vector<bool> segment_lengths_valid;
  bool obstacle_clearance_ok = true;
  bool self_collision_ok = true;
  bool overall_valid = false;

  bool all_lengths_valid() const;
};

enum class IKStatus { Converged, MaxOuterIterations, SolverFailure };

std::string to_string(IKStatus status);

struct IKResult {
  IKStatus status = IKStatus::SolverFailure;
  Configuration configuration;  ///< empty when extraction failed
  Eigen::MatrixXd points;
  Eigen::VectorXd scalars;
  int outer_iterations = 0;
  double lambda_final = 0.0;
  std::vector<double> lambda_trace;              ///< one entry per outer iteration
  std::vector<Configuration> intermediate;       ///< populated when record_trace
  double setup_time_s = 0.0;
  double solver_time_s = 0.0;  ///< cumulative over all outer iterations
  ValidityReport validity;
  std::vector<std::string> warnings;
};

/// Projector onto the trailing m-d eigenspace of Z: C = V V^T with V the
/// eigenvectors of the m-d smallest eigenvalues, so tr(C Z) equals their sum.
Eigen::MatrixXd rank_cost(const Eigen::MatrixXd& z, int d);

/// Rank-d lift of the straight mid-extension configuration. Satisfies every
/// body constraint; generally violates the goal anchor rows.
Eigen::MatrixXd warm_start(const RobotModel& robot, const GoalSpec& goal, const LiftIndex& layout);

/// Walk the segment triangles in the extracted point set, transporting the
/// frame, to read off (L, theta, delta) per segment. Virtual joints are
/// projected onto the perpendicular bisector plane of their chord first;
/// repairs beyond the isosceles tolerance are reported through `warnings`.
Configuration recover_configuration(const Eigen::MatrixXd& points, const RobotModel& robot,
                                    const GoalSpec& goal,
                                    std::vector<std::string>* warnings = nullptr);

/// Forward-kinematics check of a recovered configuration against the goal and
/// environment: position error below 1% of the mid-extension robot length,
/// constrained rotation errors below 2 degrees (up to the permitted
/// reflection for full-pose goals), segment lengths in range, endpoint
/// obstacle clearance within 0.01 m, and no self-collisions.
ValidityReport validate(const Configuration& config, const RobotModel& robot, const GoalSpec& goal,
                        const Environment& env);

/// Convex-iteration IK: alternate linear-cost SDP solves with closed-form
/// trailing-eigenspace cost updates until the (d+1)-th eigenvalue drops below
/// rank_eps or the outer iteration cap is reached. On the cap, the best
/// iterate by smallest (d+1)-th eigenvalue is extracted.
IKResult solve_ik(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                  const DriverOptions& opts = {});

}  // namespace ccik
