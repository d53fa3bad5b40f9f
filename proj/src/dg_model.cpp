#include "ccik/dg_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccik {

namespace {

// Point reference during assembly: an unanchored column or a fixed anchor.
struct PointRef {
  int col = -1;
  Eigen::VectorXd value;
  bool anchored() const { return col < 0; }
};

PointRef unanchored(int col) { return PointRef{col, {}}; }
PointRef anchored(const Eigen::VectorXd& v) { return PointRef{-1, v}; }

// Accumulates terms of one constraint; anchor contributions collect into a
// constant that is folded into the right-hand side at the end.
struct Expr {
  QuadraticConstraint c;
  double constant = 0.0;

  void add_sq_diff(const PointRef& a, const PointRef& b, double coeff) {
    if (!a.anchored() && !b.anchored()) {
      c.quad.push_back({a.col, a.col, coeff});
      c.quad.push_back({b.col, b.col, coeff});
      c.quad.push_back({a.col, b.col, -2.0 * coeff});
    } else if (!a.anchored() || !b.anchored()) {
      const PointRef& u = a.anchored() ? b : a;
      const Eigen::VectorXd& v = a.anchored() ? a.value : b.value;
      c.quad.push_back({u.col, u.col, coeff});
      c.linear_points.push_back({u.col, -2.0 * coeff * v});
      constant += coeff * v.squaredNorm();
    } else {
      constant += coeff * (a.value - b.value).squaredNorm();
    }
  }

  void add_dot(const Eigen::VectorXd& u, const PointRef& x, double coeff) {
    if (x.anchored())
      constant += coeff * u.dot(x.value);
    else
      c.linear_points.push_back({x.col, coeff * u});
  }

  QuadraticConstraint finish(double rhs_target, Sense sense, ConstraintTag tag, int segment) {
    c.rhs = rhs_target - constant;
    c.sense = sense;
    c.tag = tag;
    c.segment = segment;
    return std::move(c);
  }
};

Eigen::VectorXd unit_axis(int d, int r) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e[r] = 1.0;
  return e;
}

}  // namespace

std::string to_string(GoalMode mode) {
  switch (mode) {
    case GoalMode::Position: return "position";
    case GoalMode::PositionYawPitch: return "position_yaw_pitch";
    case GoalMode::FullPose: return "full_pose";
  }
  throw std::invalid_argument("unknown goal mode");
}

GoalMode goal_mode_from_string(const std::string& s) {
  if (s == "position" || s == "pos") return GoalMode::Position;
  if (s == "position_yaw_pitch" || s == "pos-yp") return GoalMode::PositionYawPitch;
  if (s == "full_pose" || s == "pose") return GoalMode::FullPose;
  throw std::invalid_argument("unknown goal mode: " + s);
}

std::string to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::Base: return "base";
    case ConstraintTag::EeTangent: return "ee_tangent";
    case ConstraintTag::Roll: return "roll";
    case ConstraintTag::Symmetry: return "symmetry";
    case ConstraintTag::Continuity: return "continuity";
    case ConstraintTag::LengthLo: return "length_lo";
    case ConstraintTag::LengthHi: return "length_hi";
    case ConstraintTag::Obstacle: return "obstacle";
    case ConstraintTag::HalfPlane: return "halfplane";
    case ConstraintTag::AnchorDistance: return "anchor_distance";
    case ConstraintTag::ScalarNonneg: return "scalar_nonneg";
    case ConstraintTag::Structural: return "structural";
  }
  throw std::invalid_argument("unknown constraint tag");
}

void GoalSpec::validate(int d) const {
  if (position.size() != d) throw std::invalid_argument("goal position dimension mismatch");
  if (mode == GoalMode::FullPose && d != 3)
    throw std::invalid_argument("full pose specification requires d = 3");
  if (constrains_tangent() && !tangent)
    throw std::invalid_argument("goal mode requires an end-effector tangent");
  if (constrains_roll() && !roll_axis)
    throw std::invalid_argument("full pose requires a roll axis");
  if (tangent) {
    if (tangent->size() != d) throw std::invalid_argument("goal tangent dimension mismatch");
    if (std::abs(tangent->norm() - 1.0) > 1e-10)
      throw std::invalid_argument("goal tangent must be unit");
  }
  if (roll_axis) {
    if (d != 3) throw std::invalid_argument("roll axis requires d = 3");
    if (roll_axis->size() != d) throw std::invalid_argument("roll axis dimension mismatch");
    if (std::abs(roll_axis->norm() - 1.0) > 1e-10)
      throw std::invalid_argument("roll axis must be unit");
    if (!tangent || std::abs(roll_axis->dot(*tangent)) > 1e-10)
      throw std::invalid_argument("roll axis must be orthogonal to the tangent");
  }
}

double QuadraticConstraint::lhs_value(const Eigen::MatrixXd& points,
                                      const Eigen::VectorXd& scalars) const {
  double v = 0.0;
  for (const auto& t : quad) v += t.coeff * points.col(t.i).dot(points.col(t.j));
  for (const auto& t : bilinear) v += scalars[t.s] * t.g.dot(points.col(t.i));
  for (const auto& t : linear_points) v += t.v.dot(points.col(t.i));
  for (const auto& t : linear_scalars) v += t.coeff * scalars[t.s];
  return v;
}

std::vector<std::string> DGProblem::point_names() const {
  std::vector<std::string> names;
  for (int t = 1; t <= n; ++t) {
    names.push_back("q" + std::to_string(t));
    if (t < n) names.push_back("p" + std::to_string(t));
  }
  return names;
}

std::vector<std::string> DGProblem::scalar_names() const {
  std::vector<std::string> names;
  for (int t = 0; t < n; ++t) names.push_back("w" + std::to_string(t));
  if (goal.constrains_tangent()) names.push_back("w_ee");
  return names;
}

AnchorSet build_anchors(const Pose& base, const GoalSpec& goal) {
  goal.validate(base.dim());
  AnchorSet a;
  a.b = base.position;
  a.b_prime = base.position - base.tangent();
  a.w = goal.position;
  if (goal.constrains_tangent()) a.w_prime = goal.position + *goal.tangent;
  if (goal.constrains_roll()) a.w_dprime = goal.position + *goal.roll_axis;
  return a;
}

DGProblem build_problem(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                        const BuildOptions& opts) {
  robot.validate();
  goal.validate(robot.d);
  env.validate(robot.d);

  DGProblem prob;
  prob.n = robot.n;
  prob.d = robot.d;
  prob.goal = goal;
  prob.robot = robot;
  prob.env = env;
  prob.opts = opts;
  prob.anchors = build_anchors(robot.base_pose, goal);

  const int n = robot.n;
  const int d = robot.d;
  const AnchorSet& A = prob.anchors;
  const Eigen::VectorXd base_tangent = robot.base_pose.tangent();

  for (const auto& s : env.spheres) {
    if ((s.center - A.b).norm() < s.radius || (s.center - A.w).norm() < s.radius)
      prob.warnings.push_back("anchor inside obstacle sphere; problem infeasible by construction");
  }

  auto p_ref = [&](int t) -> PointRef {
    if (t == 0) return anchored(A.b);
    if (t == n) return anchored(A.w);
    return unanchored(DGProblem::p_column(t));
  };

  // Base collinearity: q_1 = b + omega_0 * (b - b'), one row per coordinate.
  for (int r = 0; r < d; ++r) {
    Expr e;
    e.c.linear_points.push_back({DGProblem::q_column(1), unit_axis(d, r)});
    e.c.linear_scalars.push_back({0, -base_tangent[r]});
    prob.eq_constraints.push_back(e.finish(A.b[r], Sense::Eq, ConstraintTag::Base, 1));
  }

  // End-effector tangent: q_n = w + omega_ee * (w - w').
  if (goal.constrains_tangent()) {
    const Eigen::VectorXd t_ee = *goal.tangent;
    for (int r = 0; r < d; ++r) {
      Expr e;
      e.c.linear_points.push_back({DGProblem::q_column(n), unit_axis(d, r)});
      e.c.linear_scalars.push_back({prob.ee_scalar_index(), t_ee[r]});
      prob.eq_constraints.push_back(e.finish(A.w[r], Sense::Eq, ConstraintTag::EeTangent, n));
    }
  }

  // Roll: (w'' - w) orthogonal to (w - q_n) and (w - p_{n-1}); the expanded
  // form of the Pythagorean identities on the w''-q_n and w''-p_{n-1} legs.
  if (goal.constrains_roll()) {
    const Eigen::VectorXd u = *A.w_dprime - A.w;
    {
      Expr e;
      e.add_dot(u, anchored(A.w), 1.0);
      e.add_dot(u, unanchored(DGProblem::q_column(n)), -1.0);
      prob.eq_constraints.push_back(e.finish(0.0, Sense::Eq, ConstraintTag::Roll, n));
    }
    const PointRef pn1 = p_ref(n - 1);
    if (!pn1.anchored()) {
      Expr e;
      e.add_dot(u, anchored(A.w), 1.0);
      e.add_dot(u, pn1, -1.0);
      prob.eq_constraints.push_back(e.finish(0.0, Sense::Eq, ConstraintTag::Roll, n));
    } else if (std::abs(u.dot(A.w - pn1.value)) > 1e-9) {
      prob.warnings.push_back("roll axis not orthogonal to the single-segment chord; "
                              "problem infeasible by construction");
    }
  }

  // Symmetry: ||p_{t-1} - q_t||^2 = ||p_t - q_t||^2 for every segment.
  for (int t = 1; t <= n; ++t) {
    Expr e;
    e.add_sq_diff(p_ref(t - 1), unanchored(DGProblem::q_column(t)), 1.0);
    e.add_sq_diff(p_ref(t), unanchored(DGProblem::q_column(t)), -1.0);
    prob.eq_constraints.push_back(e.finish(0.0, Sense::Eq, ConstraintTag::Symmetry, t));
  }

  // Continuity: q_{t+1} = p_t + omega_t * (p_t - q_t).
  for (int t = 1; t < n; ++t) {
    for (int r = 0; r < d; ++r) {
      Expr e;
      e.c.linear_points.push_back({DGProblem::q_column(t + 1), unit_axis(d, r)});
      e.c.linear_points.push_back({DGProblem::p_column(t), -unit_axis(d, r)});
      e.c.bilinear.push_back({t, DGProblem::p_column(t), -unit_axis(d, r)});
      e.c.bilinear.push_back({t, DGProblem::q_column(t), unit_axis(d, r)});
      prob.eq_constraints.push_back(e.finish(0.0, Sense::Eq, ConstraintTag::Continuity, t));
    }
  }

  // Chord length bounds: L_min^2 <= ||p_t - p_{t-1}||^2 <= (2 L_max / pi)^2.
  // The chord/arc ratio lies in (2/pi, 1], so these bounds keep recovered arc
  // lengths inside [L_min, L_max]. The upper bound is kept for position-only
  // goals and dropped when the tangent is constrained, unless overridden.
  const bool keep_upper = opts.chord_upper == BuildOptions::ChordUpper::On ||
                          (opts.chord_upper == BuildOptions::ChordUpper::Auto &&
                           !goal.constrains_tangent());
  for (int t = 1; t <= n; ++t) {
    const LengthRange& range = robot.length_ranges[static_cast<size_t>(t - 1)];
    const double lo_sq = range.lo * range.lo;
    const double hi_chord = 2.0 * range.hi / std::numbers::pi;
    const double hi_sq = hi_chord * hi_chord;
    if (n == 1) {
      const double chord_sq = (A.w - A.b).squaredNorm();
      if (chord_sq < lo_sq - 1e-12 || (keep_upper && chord_sq > hi_sq + 1e-12))
        prob.warnings.push_back("goal chord violates the single-segment length bounds");
      break;
    }
    {
      Expr e;
      e.add_sq_diff(p_ref(t), p_ref(t - 1), 1.0);
      prob.ineq_constraints.push_back(e.finish(lo_sq, Sense::Ge, ConstraintTag::LengthLo, t));
    }
    if (keep_upper) {
      Expr e;
      e.add_sq_diff(p_ref(t), p_ref(t - 1), 1.0);
      prob.ineq_constraints.push_back(e.finish(hi_sq, Sense::Le, ConstraintTag::LengthHi, t));
    }
  }

  // Sphere avoidance on the unanchored segment endpoints p_1..p_{n-1}.
  for (const auto& s : env.spheres) {
    for (int t = 1; t < n; ++t) {
      Expr e;
      e.add_sq_diff(unanchored(DGProblem::p_column(t)), anchored(s.center), 1.0);
      prob.ineq_constraints.push_back(
          e.finish(s.radius * s.radius, Sense::Ge, ConstraintTag::Obstacle, t));
    }
  }

  // Half-planes apply to every unanchored point.
  std::vector<HalfPlane> planes;
  if (opts.use_half_planes)
    planes.insert(planes.end(), env.half_planes.begin(), env.half_planes.end());
  if (opts.floor_half_plane)
    planes.push_back(HalfPlane{-base_tangent, -base_tangent.dot(A.b)});
  for (const auto& h : planes) {
    for (int i = 0; i < prob.num_points(); ++i) {
      Expr e;
      e.c.linear_points.push_back({i, h.normal});
      prob.ineq_constraints.push_back(e.finish(h.offset, Sense::Le, ConstraintTag::HalfPlane, -1));
    }
  }

  if (opts.nonneg_scalars) {
    // The base and end-effector scalars are triangle legs, and a leg is at
    // least half its chord: l = (chord/2)/cos(theta/2) >= L_min/2. The
    // continuity scalars are leg ratios with no constant lower bound.
    for (int s = 0; s < prob.num_scalars(); ++s) {
      double bound = 0.0;
      if (s == 0) bound = 0.5 * robot.length_ranges.front().lo;
      if (goal.constrains_tangent() && s == prob.ee_scalar_index())
        bound = 0.5 * robot.length_ranges.back().lo;
      Expr e;
      e.c.linear_scalars.push_back({s, 1.0});
      prob.ineq_constraints.push_back(e.finish(bound, Sense::Ge, ConstraintTag::ScalarNonneg, -1));
    }
  }

  return prob;
}

Residuals eval_residuals(const DGProblem& problem, const Eigen::MatrixXd& points,
                         const Eigen::VectorXd& scalars) {
  if (points.rows() != problem.d || points.cols() != problem.num_points())
    throw std::invalid_argument("point assignment shape mismatch");
  if (scalars.size() != problem.num_scalars())
    throw std::invalid_argument("scalar count mismatch");

  Residuals res;
  res.eq.resize(static_cast<Eigen::Index>(problem.eq_constraints.size()));
  for (size_t i = 0; i < problem.eq_constraints.size(); ++i) {
    const auto& c = problem.eq_constraints[i];
    res.eq[static_cast<Eigen::Index>(i)] = c.lhs_value(points, scalars) - c.rhs;
  }
  res.ineq.resize(static_cast<Eigen::Index>(problem.ineq_constraints.size()));
  for (size_t i = 0; i < problem.ineq_constraints.size(); ++i) {
    const auto& c = problem.ineq_constraints[i];
    const double lhs = c.lhs_value(points, scalars);
    const double viol = c.sense == Sense::Le ? lhs - c.rhs : c.rhs - lhs;
    res.ineq[static_cast<Eigen::Index>(i)] = std::max(0.0, viol);
  }
  return res;
}

PointAssignment assignment_from_configuration(const RobotModel& robot, const Configuration& config,
                                              bool with_ee_scalar) {
  const auto poses = forward_kinematics(config, robot);
  const int n = robot.n;
  PointAssignment out;
  out.points.resize(robot.d, 2 * (n - 1) + 1);
  out.scalars.resize(with_ee_scalar ? n + 1 : n);

  std::vector<double> legs(static_cast<size_t>(n));
  for (int t = 1; t <= n; ++t) {
    const SegmentTriangle tri =
        segment_triangle(config[static_cast<size_t>(t - 1)], poses[static_cast<size_t>(t - 1)]);
    out.points.col(DGProblem::q_column(t)) = tri.q;
    if (t < n) out.points.col(DGProblem::p_column(t)) = tri.p;
    legs[static_cast<size_t>(t - 1)] = (tri.p - tri.q).norm();
  }
  out.scalars[0] = legs[0];
  for (int t = 1; t < n; ++t)
    out.scalars[t] = legs[static_cast<size_t>(t)] / legs[static_cast<size_t>(t - 1)];
  if (with_ee_scalar) out.scalars[n] = legs[static_cast<size_t>(n - 1)];
  return out;
}

}  // namespace ccik
