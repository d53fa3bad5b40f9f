#include "ccik/environment.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccik {

namespace {

Eigen::Vector3d v3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

void add_sphere(Environment& env, const Eigen::Vector3d& c, double r) {
  env.spheres.push_back(Sphere{c, r});
}

void octahedron(Environment& env) {
  const double radius = 0.55;
  const double r = 0.16;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    c[axis] = radius;
    add_sphere(env, c, r);
    add_sphere(env, -c, r);
  }
}

void cube(Environment& env) {
  const double half = 0.38;
  const double r = 0.15;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) add_sphere(env, v3(sx * half, sy * half, sz * half), r);
}

void icosahedron(Environment& env) {
  const double radius = 0.66;
  const double r = 0.13;
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const double nrm = std::sqrt(1.0 + phi * phi);
  const double a = radius / nrm, b = radius * phi / nrm;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      add_sphere(env, v3(0.0, s1 * a, s2 * b), r);
      add_sphere(env, v3(s1 * a, s2 * b, 0.0), r);
      add_sphere(env, v3(s2 * b, 0.0, s1 * a), r);
    }
}

void columns(Environment& env) {
  // 7 vertical stacks of 6 spheres around the workspace.
  const double ring = 0.62;
  const double r = 0.10;
  for (int c = 0; c < 7; ++c) {
    const double ang = 2.0 * std::numbers::pi * c / 7.0;
    for (int i = 0; i < 6; ++i) {
      const double z = 0.08 + 0.18 * i;
      add_sphere(env, v3(ring * std::cos(ang), ring * std::sin(ang), z), r);
    }
  }
}

void corridor(Environment& env) {
  // Two sphere-tiled walls plus a ceiling over a channel along +x.
  // 90 + 90 + 81 = 261 spheres.
  const double r = 0.11;
  const double wall_y = 0.42;
  for (int sy : {-1, 1})
    for (int ix = 0; ix < 10; ++ix)
      for (int iz = 0; iz < 9; ++iz)
        add_sphere(env, v3(-0.35 + 0.2 * ix, sy * wall_y, 0.10 + 0.2 * iz), r);
  const double ceil_z = 1.92;
  for (int ix = 0; ix < 9; ++ix)
    for (int iy = 0; iy < 9; ++iy)
      add_sphere(env, v3(-0.25 + 0.2 * ix, -0.40 + 0.1 * iy, ceil_z), r);
}

}  // namespace

void Environment::validate(int d) const {
  for (const auto& s : spheres) {
    if (s.center.size() != d) throw std::invalid_argument("sphere center dimension mismatch");
    if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  }
  for (const auto& h : half_planes) {
    if (h.normal.size() != d) throw std::invalid_argument("half-plane normal dimension mismatch");
    if (std::abs(h.normal.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("half-plane normal must be unit");
  }
}

EnvironmentKind environment_kind_from_string(const std::string& s) {
  if (s == "octahedron") return EnvironmentKind::Octahedron;
  if (s == "cube") return EnvironmentKind::Cube;
  if (s == "icosahedron") return EnvironmentKind::Icosahedron;
  if (s == "columns") return EnvironmentKind::Columns;
  if (s == "corridor") return EnvironmentKind::Corridor;
  throw std::invalid_argument("unknown environment kind: " + s);
}

std::string to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::Octahedron: return "octahedron";
    case EnvironmentKind::Cube: return "cube";
    case EnvironmentKind::Icosahedron: return "icosahedron";
    case EnvironmentKind::Columns: return "columns";
    case EnvironmentKind::Corridor: return "corridor";
  }
  throw std::invalid_argument("unknown environment kind");
}

Environment make_environment(EnvironmentKind kind, int n, double scale) {
  if (n < 1) throw std::invalid_argument("environment needs n >= 1");
  Environment env;
  env.name = to_string(kind);
  switch (kind) {
    case EnvironmentKind::Octahedron: octahedron(env); break;
    case EnvironmentKind::Cube: cube(env); break;
    case EnvironmentKind::Icosahedron: icosahedron(env); break;
    case EnvironmentKind::Columns: columns(env); break;
    case EnvironmentKind::Corridor: corridor(env); break;
  }
  const double s = scale > 0.0 ? scale : static_cast<double>(n) / 3.0;
  env.scale = s;
  for (auto& sp : env.spheres) {
    sp.center *= s;
    sp.radius *= s;
  }
  return env;
}

}  // namespace ccik
