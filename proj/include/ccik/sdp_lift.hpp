#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "ccik/dg_model.hpp"

namespace ccik {

/// Column layout of the rank-d factor [X  Omega  I_d] behind the lifted PSD
/// variable Z: point columns first, then d columns per scalar, then the
/// identity block.
struct LiftIndex {
  int d = 0;
  int j = 0;          ///< unanchored point count
  int n_scalars = 0;  ///< omega count

  int m() const { return j + (n_scalars + 1) * d; }
  int x_col(int i) const { return i; }
  int omega_col(int s, int r) const { return j + s * d + r; }
  int id_col(int r) const { return m() - d + r; }
};

LiftIndex make_layout(const RobotModel& robot, const GoalSpec& goal);
LiftIndex make_layout(const DGProblem& problem);

/// Sparse symmetric matrix stored as upper-triangle entries (r <= c); the
/// mirrored entry is implied.
class SparseSym {
 public:
  struct Entry {
    int r, c;
    double v;
  };

  explicit SparseSym(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void add(int r, int c, double v);
  /// Merge duplicate coordinates; drops exact zeros.
  void compress();

  double dot(const Eigen::MatrixXd& z) const;
  void add_scaled_to(Eigen::MatrixXd& dst, double coeff) const;
  Eigen::MatrixXd to_dense() const;
  double frobenius_norm() const;

 private:
  int dim_;
  std::vector<Entry> entries_;
};

/// One linear row tr(A Z) (=, <=, >=) rhs.
struct LinearRow {
  SparseSym mat;
  double rhs = 0.0;
  Sense sense = Sense::Eq;
  ConstraintTag tag = ConstraintTag::Base;
  bool structural = false;
};

struct AssembleOptions {
  /// Also constrain the off-diagonal scalar-scalar blocks of Omega^T Omega to
  /// omega_s omega_t I_d structure.
  bool omega_cross_blocks = false;
};

struct LiftedSDP {
  LiftIndex layout;
  std::vector<LinearRow> eq;
  std::vector<LinearRow> ineq;
};

/// Z = M^T M with M = [X  Omega  I_d], Omega = [omega_0 I_d ... ].
Eigen::MatrixXd lift(const Eigen::MatrixXd& points, const Eigen::VectorXd& scalars,
                     const LiftIndex& layout);

/// Rewrite every quadratic constraint as a linear row on Z and add the
/// structural rows: identity block equal to I_d, scalar read-out blocks equal
/// to omega I_d, and scalar Gram blocks multiples of I_d.
LiftedSDP assemble(const DGProblem& problem, const LiftIndex& layout,
                   const AssembleOptions& opts = {});

struct Extraction {
  Eigen::MatrixXd points;
  Eigen::VectorXd scalars;
  double lambda_d1 = 0.0;        ///< (d+1)-th largest eigenvalue of Z
  double identity_defect = 0.0;  ///< max |Z_id_block - I|
  bool identity_reliable = true;
};

/// Read X and omega out of the bottom block rows of Z and report the rank
/// certificate. identity_reliable is false when the identity block deviates
/// from I_d by more than 1e-6.
Extraction extract(const Eigen::MatrixXd& z, const LiftIndex& layout);

/// Sparse-triplet text dump of all rows for cross-checking with external
/// tools. Lines: "A row r c v" / "a row rhs" for equalities and
/// "B row r c v" / "b row rhs sense" for inequalities, upper triangle only.
void write_triplets(std::ostream& os, const LiftedSDP& sdp);

}  // namespace ccik
