#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ccik {

struct Sphere {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Closed half-space x . normal <= offset; points must lie on that side.
struct HalfPlane {
  Eigen::VectorXd normal;  ///< unit
  double offset = 0.0;
};

struct Environment {
  std::string name;
  double scale = 1.0;
  std::vector<Sphere> spheres;
  std::vector<HalfPlane> half_planes;

  void validate(int d) const;
  static Environment empty() { return Environment{"free", 1.0, {}, {}}; }
};

enum class EnvironmentKind { Octahedron, Cube, Icosahedron, Columns, Corridor };

EnvironmentKind environment_kind_from_string(const std::string& s);
std::string to_string(EnvironmentKind kind);

/// Procedural obstacle scene around a robot of n segments. Sphere counts per
/// kind: 6 / 8 / 12 / 42 / 261. All centers and radii scale linearly; a
/// non-positive `scale` selects the default n/3 (geometry sized for three
/// mid-extension segments at scale 1).
Environment make_environment(EnvironmentKind kind, int n, double scale = 0.0);

}  // namespace ccik
