#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ccik {

/// One constant-curvature segment: arc length, in-plane bending angle and
/// rotation of the bending plane about the local tangent.
struct ArcParams {
  double length = 0.0;  ///< arc length in meters, > 0
  double theta = 0.0;   ///< bending angle in radians, [0, pi)
  double delta = 0.0;   ///< bending-plane angle; restricted to {0, pi} when d == 2
};

/// Per-segment arc parameters, base to tip.
using Configuration = std::vector<ArcParams>;

/// Position plus orthonormal frame. The backbone tangent is the last column
/// of the frame (local z for d == 3).
struct Pose {
  Eigen::VectorXd position;
  Eigen::MatrixXd frame;

  static Pose identity(int d);

  int dim() const { return static_cast<int>(position.size()); }
  Eigen::VectorXd tangent() const { return frame.col(frame.cols() - 1); }

  /// Rigid composition: this * local.
  Pose compose(const Pose& local) const;

  /// max |F^T F - I| entry.
  double orthonormality_defect() const;
};

struct LengthRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct RobotModel {
  int n = 0;  ///< segment count
  int d = 3;  ///< ambient dimension, 2 or 3
  std::vector<LengthRange> length_ranges;
  Pose base_pose;
  double body_radius = 0.01;  ///< for self-collision clearance checks

  /// n segments sharing one length range, identity base pose.
  static RobotModel uniform(int n, int d, double l_min = 0.15, double l_max = 0.55);

  /// Throws std::invalid_argument when any invariant is broken.
  void validate() const;

  /// Sum of per-segment mid-range lengths.
  double mid_extension_length() const;

  /// Configuration with every segment straight at mid-extension.
  Configuration straight_mid_configuration() const;
};

/// Isosceles triangle spanning one segment: base point, virtual joint at the
/// intersection of base/tip tangents, tip point.
struct SegmentTriangle {
  Eigen::VectorXd p_prev;
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

struct ArcFromTriangle {
  double length = 0.0;
  double theta = 0.0;
  bool length_valid = true;
};

/// Tip pose of a single segment relative to its base frame.
/// theta = 0 degenerates to a pure translation by `length` along local z.
Pose segment_pose(const ArcParams& arc, int d);

/// Chain forward kinematics. Returns n+1 poses; element 0 is the base pose,
/// element n the end-effector pose.
std::vector<Pose> forward_kinematics(const Configuration& config, const RobotModel& robot);

/// Segment triangle in world coordinates given the segment base pose.
/// The virtual joint sits at distance l = length * tan(theta/2) / theta from
/// both endpoints along the respective tangents; l -> length/2 as theta -> 0,
/// so a straight segment places q at the midpoint.
SegmentTriangle segment_triangle(const ArcParams& arc, const Pose& base);

/// Inverse of segment_triangle: bend angle from the base tangent and the
/// q->p leg, arc length from the chord. theta below 1e-8 is treated as
/// straight (L = chord). The triangle must be isosceles within iso_tol.
ArcFromTriangle arc_from_triangle(const SegmentTriangle& tri, const Eigen::VectorXd& tangent_in,
                                  const LengthRange& range, double iso_tol = 1e-6);

/// k points per segment, evenly spaced in arc parameter, endpoints included.
/// Straight segments sample the chord. Returns n*k points.
std::vector<Eigen::VectorXd> sample_backbone(const Configuration& config, const RobotModel& robot,
                                             int k);

/// True when every pair of backbone samples on non-adjacent segments is at
/// least 2 * body_radius apart.
bool self_collision_free(const Configuration& config, const RobotModel& robot, int k = 10);

}  // namespace ccik
