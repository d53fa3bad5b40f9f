#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "ccik/environment.hpp"
#include "ccik/kinematics.hpp"

namespace ccik {

/// End-effector specification modes: position only; position plus approach
/// tangent (yaw/pitch); full pose up to a reflection of the roll axis.
enum class GoalMode { Position, PositionYawPitch, FullPose };

std::string to_string(GoalMode mode);
GoalMode goal_mode_from_string(const std::string& s);

struct GoalSpec {
  GoalMode mode = GoalMode::Position;
  Eigen::VectorXd position;
  /// Desired end-effector tangent (unit). Required for modes beyond Position;
  /// may be present otherwise for error reporting.
  std::optional<Eigen::VectorXd> tangent;
  /// Desired end-effector y axis (unit, orthogonal to tangent). Required for
  /// FullPose; d == 3 only.
  std::optional<Eigen::VectorXd> roll_axis;

  void validate(int d) const;
  /// Tangent/roll axes actually constrained by this mode.
  bool constrains_tangent() const { return mode != GoalMode::Position; }
  bool constrains_roll() const { return mode == GoalMode::FullPose; }
};

/// Fixed points encoding the base pose and the goal. Primed anchors sit a
/// unit distance from their parents: b' behind the base along the base
/// tangent, w' ahead of the goal along the desired tangent, w'' offset along
/// the desired roll axis.
struct AnchorSet {
  Eigen::VectorXd b;
  Eigen::VectorXd b_prime;
  Eigen::VectorXd w;
  std::optional<Eigen::VectorXd> w_prime;
  std::optional<Eigen::VectorXd> w_dprime;

  int count() const { return 3 + (w_prime ? 1 : 0) + (w_dprime ? 1 : 0); }
};

enum class Sense { Eq, Le, Ge };

enum class ConstraintTag {
  Base,
  EeTangent,
  Roll,
  Symmetry,
  Continuity,
  LengthLo,
  LengthHi,
  Obstacle,
  HalfPlane,
  AnchorDistance,
  ScalarNonneg,
  Structural,  ///< lift bookkeeping rows, never produced by build_problem
};

std::string to_string(ConstraintTag tag);

/// One scalar constraint, quadratic in the unanchored points and linear in
/// the nonnegative scalars; anchor contributions are folded into constants.
///
///   sum c <x_i, x_j> + sum omega_s <g, x_i> + sum <v, x_i> + sum c omega_s
///     (=, <=, >=) rhs
struct QuadraticConstraint {
  struct PointPair {
    int i, j;
    double coeff;
  };
  struct ScalarPoint {
    int s, i;
    Eigen::VectorXd g;
  };
  struct PointLinear {
    int i;
    Eigen::VectorXd v;
  };
  struct ScalarLinear {
    int s;
    double coeff;
  };

  std::vector<PointPair> quad;
  std::vector<ScalarPoint> bilinear;
  std::vector<PointLinear> linear_points;
  std::vector<ScalarLinear> linear_scalars;
  double rhs = 0.0;
  Sense sense = Sense::Eq;
  ConstraintTag tag = ConstraintTag::Base;
  int segment = -1;  ///< owning segment index where applicable, else -1

  double lhs_value(const Eigen::MatrixXd& points, const Eigen::VectorXd& scalars) const;
};

struct BuildOptions {
  /// Nonnegativity bounds on all scalar variables.
  bool nonneg_scalars = true;
  /// Chord upper bound policy: automatic keeps it for position-only goals and
  /// drops it when the end-effector tangent is constrained.
  enum class ChordUpper { Auto, On, Off } chord_upper = ChordUpper::Auto;
  /// Apply environment half-planes to every unanchored point.
  bool use_half_planes = false;
  /// Add the base plane (points on the tangent side of the base) as a
  /// half-plane on every unanchored point.
  bool floor_half_plane = false;
};

/// The assembled feasibility problem over unanchored points and scalars.
/// Point columns are ordered q_1, p_1, q_2, ..., p_{n-1}, q_n (j = 2n-1).
/// Scalars are ordered omega_0 (base), omega_1..omega_{n-1} (continuity),
/// then the end-effector scalar when the tangent is constrained.
struct DGProblem {
  int n = 0;
  int d = 3;
  GoalSpec goal;
  RobotModel robot;
  Environment env;
  AnchorSet anchors;
  BuildOptions opts;
  std::vector<QuadraticConstraint> eq_constraints;
  std::vector<QuadraticConstraint> ineq_constraints;
  std::vector<std::string> warnings;

  int num_points() const { return 2 * (n - 1) + 1; }
  int num_scalars() const { return goal.constrains_tangent() ? n + 1 : n; }

  static int q_column(int t) { return 2 * (t - 1); }      // t = 1..n
  static int p_column(int t) { return 2 * t - 1; }        // t = 1..n-1
  int ee_scalar_index() const { return n; }               // modes with tangent only

  std::vector<std::string> point_names() const;
  std::vector<std::string> scalar_names() const;
};

struct Residuals {
  Eigen::VectorXd eq;    ///< lhs - rhs per equality
  Eigen::VectorXd ineq;  ///< violation amount per inequality, 0 when satisfied
  double max_abs_eq() const { return eq.size() ? eq.cwiseAbs().maxCoeff() : 0.0; }
  double max_violation() const { return ineq.size() ? ineq.maxCoeff() : 0.0; }
};

AnchorSet build_anchors(const Pose& base, const GoalSpec& goal);

DGProblem build_problem(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                        const BuildOptions& opts = {});

Residuals eval_residuals(const DGProblem& problem, const Eigen::MatrixXd& points,
                         const Eigen::VectorXd& scalars);

struct PointAssignment {
  Eigen::MatrixXd points;   ///< d x j
  Eigen::VectorXd scalars;  ///< omega values
};

/// Exact point/scalar assignment realizing a configuration: virtual joints
/// from segment triangles, omega_0 = l_1, omega_t = l_{t+1}/l_t, and the
/// end-effector scalar l_n when the goal constrains the tangent.
PointAssignment assignment_from_configuration(const RobotModel& robot, const Configuration& config,
                                              bool with_ee_scalar);

}  // namespace ccik
