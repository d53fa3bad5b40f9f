#include "ccik/sdp_lift.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace ccik {

LiftIndex make_layout(const RobotModel& robot, const GoalSpec& goal) {
  LiftIndex l;
  l.d = robot.d;
  l.j = 2 * (robot.n - 1) + 1;
  l.n_scalars = goal.constrains_tangent() ? robot.n + 1 : robot.n;
  return l;
}

LiftIndex make_layout(const DGProblem& problem) {
  LiftIndex l;
  l.d = problem.d;
  l.j = problem.num_points();
  l.n_scalars = problem.num_scalars();
  return l;
}

void SparseSym::add(int r, int c, double v) {
  if (r > c) std::swap(r, c);
  entries_.push_back(Entry{r, c, v});
}

void SparseSym::compress() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  std::vector<Entry> merged;
  for (const auto& e : entries_) {
    if (!merged.empty() && merged.back().r == e.r && merged.back().c == e.c)
      merged.back().v += e.v;
    else
      merged.push_back(e);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Entry& e) { return e.v == 0.0; }),
               merged.end());
  entries_ = std::move(merged);
}

double SparseSym::dot(const Eigen::MatrixXd& z) const {
  double acc = 0.0;
  for (const auto& e : entries_)
    acc += e.r == e.c ? e.v * z(e.r, e.c) : 2.0 * e.v * z(e.r, e.c);
  return acc;
}

void SparseSym::add_scaled_to(Eigen::MatrixXd& dst, double coeff) const {
  for (const auto& e : entries_) {
    dst(e.r, e.c) += coeff * e.v;
    if (e.r != e.c) dst(e.c, e.r) += coeff * e.v;
  }
}

Eigen::MatrixXd SparseSym::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  add_scaled_to(m, 1.0);
  return m;
}

double SparseSym::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& e : entries_) acc += e.r == e.c ? e.v * e.v : 2.0 * e.v * e.v;
  return std::sqrt(acc);
}

Eigen::MatrixXd lift(const Eigen::MatrixXd& points, const Eigen::VectorXd& scalars,
                     const LiftIndex& layout) {
  if (points.rows() != layout.d || points.cols() != layout.j)
    throw std::invalid_argument("point matrix shape mismatch");
  if (scalars.size() != layout.n_scalars) throw std::invalid_argument("scalar count mismatch");
  Eigen::MatrixXd factor(layout.d, layout.m());
  factor.leftCols(layout.j) = points;
  for (int s = 0; s < layout.n_scalars; ++s)
    factor.block(0, layout.omega_col(s, 0), layout.d, layout.d) =
        scalars[s] * Eigen::MatrixXd::Identity(layout.d, layout.d);
  factor.rightCols(layout.d) = Eigen::MatrixXd::Identity(layout.d, layout.d);
  return factor.transpose() * factor;
}

namespace {

LinearRow row_from_constraint(const QuadraticConstraint& c, const LiftIndex& layout) {
  LinearRow row;
  row.mat = SparseSym(layout.m());
  for (const auto& t : c.quad) {
    if (t.i == t.j)
      row.mat.add(t.i, t.i, t.coeff);
    else
      row.mat.add(t.i, t.j, 0.5 * t.coeff);
  }
  for (const auto& t : c.bilinear)
    for (int r = 0; r < layout.d; ++r)
      row.mat.add(t.i, layout.omega_col(t.s, r), 0.5 * t.g[r]);
  for (const auto& t : c.linear_points)
    for (int r = 0; r < layout.d; ++r) row.mat.add(t.i, layout.id_col(r), 0.5 * t.v[r]);
  for (const auto& t : c.linear_scalars)
    for (int r = 0; r < layout.d; ++r)
      row.mat.add(layout.omega_col(t.s, r), layout.id_col(r),
                  0.5 * t.coeff / static_cast<double>(layout.d));
  row.mat.compress();
  row.rhs = c.rhs;
  row.sense = c.sense;
  row.tag = c.tag;
  return row;
}

}  // namespace

LiftedSDP assemble(const DGProblem& problem, const LiftIndex& layout,
                   const AssembleOptions& opts) {
  LiftedSDP sdp;
  sdp.layout = layout;
  const int d = layout.d;

  for (const auto& c : problem.eq_constraints) {
    LinearRow row = row_from_constraint(c, layout);
    if (row.mat.entries().empty()) continue;  // constant row, checked at build time
    sdp.eq.push_back(std::move(row));
  }
  for (const auto& c : problem.ineq_constraints) {
    LinearRow row = row_from_constraint(c, layout);
    if (row.mat.entries().empty()) continue;
    sdp.ineq.push_back(std::move(row));
  }

  auto structural = [&](SparseSym mat, double rhs, ConstraintTag tag) {
    mat.compress();
    LinearRow row;
    row.mat = std::move(mat);
    row.rhs = rhs;
    row.sense = Sense::Eq;
    row.tag = tag;
    row.structural = true;
    sdp.eq.push_back(std::move(row));
  };

  // Identity block = I_d.
  for (int r1 = 0; r1 < d; ++r1)
    for (int r2 = r1; r2 < d; ++r2) {
      SparseSym a(layout.m());
      a.add(layout.id_col(r1), layout.id_col(r2), r1 == r2 ? 1.0 : 0.5);
      structural(std::move(a), r1 == r2 ? 1.0 : 0.0, ConstraintTag::Structural);
    }

  // Scalar read-out blocks: Z[omega_s rows, identity cols] = omega_s I_d.
  for (int s = 0; s < layout.n_scalars; ++s) {
    for (int r1 = 0; r1 < d; ++r1)
      for (int r2 = 0; r2 < d; ++r2) {
        if (r1 == r2) continue;
        SparseSym a(layout.m());
        a.add(layout.omega_col(s, r1), layout.id_col(r2), 0.5);
        structural(std::move(a), 0.0, ConstraintTag::Structural);
      }
    for (int r = 0; r + 1 < d; ++r) {
      SparseSym a(layout.m());
      a.add(layout.omega_col(s, r), layout.id_col(r), 0.5);
      a.add(layout.omega_col(s, r + 1), layout.id_col(r + 1), -0.5);
      structural(std::move(a), 0.0, ConstraintTag::Structural);
    }
  }

  // Scalar Gram blocks: Z[omega_s rows, omega_s cols] = omega_s^2 I_d.
  for (int s = 0; s < layout.n_scalars; ++s) {
    for (int r1 = 0; r1 < d; ++r1)
      for (int r2 = r1 + 1; r2 < d; ++r2) {
        SparseSym a(layout.m());
        a.add(layout.omega_col(s, r1), layout.omega_col(s, r2), 0.5);
        structural(std::move(a), 0.0, ConstraintTag::Structural);
      }
    for (int r = 0; r + 1 < d; ++r) {
      SparseSym a(layout.m());
      a.add(layout.omega_col(s, r), layout.omega_col(s, r), 1.0);
      a.add(layout.omega_col(s, r + 1), layout.omega_col(s, r + 1), -1.0);
      structural(std::move(a), 0.0, ConstraintTag::Structural);
    }
  }

  if (opts.omega_cross_blocks) {
    for (int s = 0; s < layout.n_scalars; ++s)
      for (int t = s + 1; t < layout.n_scalars; ++t) {
        for (int r1 = 0; r1 < d; ++r1)
          for (int r2 = 0; r2 < d; ++r2) {
            if (r1 == r2) continue;
            SparseSym a(layout.m());
            a.add(layout.omega_col(s, r1), layout.omega_col(t, r2), 0.5);
            structural(std::move(a), 0.0, ConstraintTag::Structural);
          }
        for (int r = 0; r + 1 < d; ++r) {
          SparseSym a(layout.m());
          a.add(layout.omega_col(s, r), layout.omega_col(t, r), 0.5);
          a.add(layout.omega_col(s, r + 1), layout.omega_col(t, r + 1), -0.5);
          structural(std::move(a), 0.0, ConstraintTag::Structural);
        }
      }
  }

  return sdp;
}

Extraction extract(const Eigen::MatrixXd& z, const LiftIndex& layout) {
  const int m = layout.m();
  if (z.rows() != m || z.cols() != m) throw std::invalid_argument("lifted matrix size mismatch");
  const int d = layout.d;

  Extraction out;
  out.points = z.block(m - d, 0, d, layout.j);
  out.scalars.resize(layout.n_scalars);
  for (int s = 0; s < layout.n_scalars; ++s) {
    double acc = 0.0;
    for (int r = 0; r < d; ++r) acc += z(layout.omega_col(s, r), layout.id_col(r));
    out.scalars[s] = acc / static_cast<double>(d);
  }

  out.identity_defect = (z.block(m - d, m - d, d, d) - Eigen::MatrixXd::Identity(d, d))
                            .cwiseAbs()
                            .maxCoeff();
  out.identity_reliable = out.identity_defect <= 1e-6;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  // Eigenvalues come sorted ascending; the (d+1)-th largest is index m-d-1.
  out.lambda_d1 = eig.eigenvalues()[m - d - 1];
  return out;
}

void write_triplets(std::ostream& os, const LiftedSDP& sdp) {
  os << "# m " << sdp.layout.m() << " eq " << sdp.eq.size() << " ineq " << sdp.ineq.size()
     << "\n";
  os.precision(17);
  for (size_t i = 0; i < sdp.eq.size(); ++i) {
    for (const auto& e : sdp.eq[i].mat.entries())
      os << "A " << i << " " << e.r << " " << e.c << " " << e.v << "\n";
    os << "a " << i << " " << sdp.eq[i].rhs << "\n";
  }
  for (size_t i = 0; i < sdp.ineq.size(); ++i) {
    for (const auto& e : sdp.ineq[i].mat.entries())
      os << "B " << i << " " << e.r << " " << e.c << " " << e.v << "\n";
    os << "b " << i << " " << sdp.ineq[i].rhs << " "
       << (sdp.ineq[i].sense == Sense::Le ? "le" : "ge") << "\n";
  }
}

}  // namespace ccik
