#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "ccik/dg_model.hpp"
#include "ccik/kinematics.hpp"

namespace ccik::testing {

// Cyclic Jacobi eigendecomposition, independent of Eigen's solver. Returns
// eigenvalues ascending with matching eigenvector columns.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigs(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = s;
        g(q, p) = -s;
        a = g.transpose() * a * g;
        v = v * g;
      }
    }
  }
  // selection sort by eigenvalue
  Eigen::VectorXd vals(n);
  for (Eigen::Index i = 0; i < n; ++i) vals[i] = a(i, i);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return vals[x] < vals[y]; });
  Eigen::VectorXd sorted_vals(n);
  Eigen::MatrixXd sorted_vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_vals[i] = vals[order[static_cast<size_t>(i)]];
    sorted_vecs.col(i) = v.col(order[static_cast<size_t>(i)]);
  }
  return {sorted_vals, sorted_vecs};
}

// Random arc parameters with the chord inside the feasible band
// [L_min, 2 L_max / pi], so every constraint of the assembled problem holds.
inline ArcParams random_chord_feasible_arc(std::mt19937_64& rng, const LengthRange& range, int d) {
  std::uniform_real_distribution<double> theta_dist(0.0, 175.0 * std::numbers::pi / 180.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta = theta_dist(rng);
  const double ratio = theta < 1e-12 ? 1.0 : 2.0 * std::sin(0.5 * theta) / theta;
  const double lo = range.lo / ratio;
  const double hi = std::min(range.hi, 2.0 * range.hi / (std::numbers::pi * ratio));
  const double length = lo + (hi - lo) * unit(rng);
  double delta;
  if (d == 3) {
    delta = 2.0 * std::numbers::pi * unit(rng);
  } else {
    delta = unit(rng) < 0.5 ? 0.0 : std::numbers::pi;
  }
  return ArcParams{length, theta, delta};
}

inline Configuration random_chord_feasible_config(std::mt19937_64& rng, const RobotModel& robot) {
  Configuration c(static_cast<size_t>(robot.n));
  for (int t = 0; t < robot.n; ++t)
    c[static_cast<size_t>(t)] =
        random_chord_feasible_arc(rng, robot.length_ranges[static_cast<size_t>(t)], robot.d);
  return c;
}

// Goal derived from the forward kinematics of a configuration.
inline GoalSpec goal_from_fk(const RobotModel& robot, const Configuration& config, GoalMode mode) {
  const auto poses = forward_kinematics(config, robot);
  GoalSpec goal;
  goal.mode = mode;
  goal.position = poses.back().position;
  goal.tangent = poses.back().tangent();
  if (robot.d == 3) goal.roll_axis = poses.back().frame.col(1);
  return goal;
}

// Haar-ish random rotation from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace ccik::testing
