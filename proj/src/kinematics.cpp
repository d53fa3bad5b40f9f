#include "ccik/kinematics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ccik {

namespace {

constexpr double kPi = std::numbers::pi;

// (1 - cos t) / t, stable near t = 0.
double one_minus_cos_over(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return t * (0.5 - t2 / 24.0 + t2 * t2 / 720.0);
  }
  return (1.0 - std::cos(t)) / t;
}

// sin(t) / t, stable near t = 0.
double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// tan(t/2) / t, stable near t = 0. Ratio of virtual-joint leg to arc length.
double tan_half_over(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 0.5 + t2 / 24.0 + t2 * t2 / 240.0;
  }
  return std::tan(0.5 * t) / t;
}

void check_arc(const ArcParams& arc, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("ambient dimension must be 2 or 3");
  if (!(arc.length > 0.0)) throw std::domain_error("segment length must be positive");
  if (!(arc.theta >= 0.0) || arc.theta >= kPi)
    throw std::domain_error("bending angle must lie in [0, pi)");
  if (d == 2) {
    // Planar bends keep one code path with the spatial case by encoding the
    // side in delta.
    const double s = std::abs(std::sin(arc.delta));
    if (s > 1e-9) throw std::domain_error("planar segments require delta in {0, pi}");
  }
}

// Sign of the planar bend: +1 for delta = 0, -1 for delta = pi.
double planar_side(double delta) { return std::cos(delta) >= 0.0 ? 1.0 : -1.0; }

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  const double c = std::cos(a), s = std::sin(a);
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  const double c = std::cos(a), s = std::sin(a);
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

// Point on the arc at fraction tau in [0, 1], in the segment base frame.
Eigen::VectorXd arc_point_local(const ArcParams& arc, double tau, int d) {
  const double len = tau * arc.length;
  const double ang = tau * arc.theta;
  if (d == 3) {
    Eigen::Vector3d in_plane(len * one_minus_cos_over(ang), 0.0, len * sinc(ang));
    return rot_z(arc.delta) * in_plane;
  }
  const double side = planar_side(arc.delta);
  Eigen::Vector2d p(side * len * one_minus_cos_over(ang), len * sinc(ang));
  return p;
}

}  // namespace

Pose Pose::identity(int d) {
  Pose p;
  p.position = Eigen::VectorXd::Zero(d);
  p.frame = Eigen::MatrixXd::Identity(d, d);
  return p;
}

Pose Pose::compose(const Pose& local) const {
  Pose out;
  out.position = position + frame * local.position;
  out.frame = frame * local.frame;
  return out;
}

double Pose::orthonormality_defect() const {
  const Eigen::MatrixXd g = frame.transpose() * frame;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

RobotModel RobotModel::uniform(int n, int d, double l_min, double l_max) {
  RobotModel r;
  r.n = n;
  r.d = d;
  r.length_ranges.assign(static_cast<size_t>(std::max(n, 0)), LengthRange{l_min, l_max});
  r.base_pose = Pose::identity(d);
  return r;
}

void RobotModel::validate() const {
  if (n < 1) throw std::invalid_argument("robot needs at least one segment");
  if (d != 2 && d != 3) throw std::invalid_argument("ambient dimension must be 2 or 3");
  if (static_cast<int>(length_ranges.size()) != n)
    throw std::invalid_argument("length_ranges size must equal segment count");
  for (const auto& r : length_ranges) {
    if (!(r.lo > 0.0) || !(r.lo <= r.hi))
      throw std::invalid_argument("segment length range must satisfy 0 < lo <= hi");
  }
  if (base_pose.dim() != d || base_pose.frame.rows() != d || base_pose.frame.cols() != d)
    throw std::invalid_argument("base pose dimension mismatch");
  if (base_pose.orthonormality_defect() > 1e-12)
    throw std::invalid_argument("base frame must be orthonormal to 1e-12");
  if (base_pose.frame.determinant() < 0.0)
    throw std::invalid_argument("base frame must be proper (det +1)");
  if (!(body_radius > 0.0)) throw std::invalid_argument("body radius must be positive");
}

double RobotModel::mid_extension_length() const {
  double sum = 0.0;
  for (const auto& r : length_ranges) sum += 0.5 * (r.lo + r.hi);
  return sum;
}

Configuration RobotModel::straight_mid_configuration() const {
  Configuration c(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t)
    c[static_cast<size_t>(t)] = ArcParams{0.5 * (length_ranges[t].lo + length_ranges[t].hi), 0.0, 0.0};
  return c;
}

Pose segment_pose(const ArcParams& arc, int d) {
  check_arc(arc, d);
  Pose out;
  out.position = arc_point_local(arc, 1.0, d);
  if (d == 3) {
    out.frame = rot_z(arc.delta) * rot_y(arc.theta);
  } else {
    const double side = planar_side(arc.delta);
    const double c = std::cos(arc.theta), s = std::sin(arc.theta);
    Eigen::Matrix2d f;
    f << c, side * s, -side * s, c;
    out.frame = f;
  }
  return out;
}

std::vector<Pose> forward_kinematics(const Configuration& config, const RobotModel& robot) {
  robot.validate();
  if (static_cast<int>(config.size()) != robot.n)
    throw std::invalid_argument("configuration length must equal segment count");
  std::vector<Pose> poses;
  poses.reserve(static_cast<size_t>(robot.n) + 1);
  poses.push_back(robot.base_pose);
  for (int t = 0; t < robot.n; ++t) {
    try {
      poses.push_back(poses.back().compose(segment_pose(config[static_cast<size_t>(t)], robot.d)));
    } catch (const std::domain_error& e) {
      throw std::domain_error("segment " + std::to_string(t) + ": " + e.what());
    }
  }
  return poses;
}

SegmentTriangle segment_triangle(const ArcParams& arc, const Pose& base) {
  check_arc(arc, base.dim());
  const double l = arc.length * tan_half_over(arc.theta);
  SegmentTriangle tri;
  tri.p_prev = base.position;
  tri.q = base.position + l * base.tangent();
  tri.p = base.position + base.frame * arc_point_local(arc, 1.0, base.dim());
  return tri;
}

ArcFromTriangle arc_from_triangle(const SegmentTriangle& tri, const Eigen::VectorXd& tangent_in,
                                  const LengthRange& range, double iso_tol) {
  const double l_in = (tri.p_prev - tri.q).norm();
  const double l_out = (tri.p - tri.q).norm();
  if (std::abs(l_in - l_out) > iso_tol)
    throw std::runtime_error("malformed segment triangle: isosceles defect " +
                             std::to_string(std::abs(l_in - l_out)));
  const Eigen::VectorXd leg = tri.p - tri.q;
  const double leg_norm = leg.norm();
  if (leg_norm < 1e-14) throw std::runtime_error("degenerate segment triangle: q equals p");

  const double dot = tangent_in.dot(leg);
  const double cross_sq = std::max(0.0, tangent_in.squaredNorm() * leg_norm * leg_norm - dot * dot);
  const double theta = std::atan2(std::sqrt(cross_sq), dot);
  if (theta >= kPi - 1e-9) throw std::domain_error("bend angle at or beyond pi");

  const double chord = (tri.p - tri.p_prev).norm();
  ArcFromTriangle out;
  if (theta < 1e-8) {
    out.length = chord;
    out.theta = 0.0;
  } else {
    out.length = theta * chord / (2.0 * std::sin(0.5 * theta));
    out.theta = theta;
  }
  out.length_valid = out.length >= range.lo - 1e-9 && out.length <= range.hi + 1e-9;
  return out;
}

std::vector<Eigen::VectorXd> sample_backbone(const Configuration& config, const RobotModel& robot,
                                             int k) {
  if (k < 2) throw std::invalid_argument("need at least 2 samples per segment");
  const auto poses = forward_kinematics(config, robot);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<size_t>(robot.n) * static_cast<size_t>(k));
  for (int t = 0; t < robot.n; ++t) {
    const Pose& base = poses[static_cast<size_t>(t)];
    const ArcParams& arc = config[static_cast<size_t>(t)];
    for (int i = 0; i < k; ++i) {
      const double tau = static_cast<double>(i) / static_cast<double>(k - 1);
      pts.push_back(base.position + base.frame * arc_point_local(arc, tau, robot.d));
    }
  }
  return pts;
}

bool self_collision_free(const Configuration& config, const RobotModel& robot, int k) {
  if (k < 8) throw std::invalid_argument("self-collision check needs k >= 8");
  if (robot.n < 3) return true;  // no non-adjacent pairs
  const auto pts = sample_backbone(config, robot, k);
  const double clearance = 2.0 * robot.body_radius;
  const double clearance_sq = clearance * clearance;
  for (int t1 = 0; t1 < robot.n; ++t1) {
    for (int t2 = t1 + 2; t2 < robot.n; ++t2) {
      for (int i = 0; i < k; ++i) {
        const auto& a = pts[static_cast<size_t>(t1 * k + i)];
        for (int j = 0; j < k; ++j) {
          const auto& b = pts[static_cast<size_t>(t2 * k + j)];
          if ((a - b).squaredNorm() < clearance_sq) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace ccik
