#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ccik/sdp_lift.hpp"

namespace ccik {

struct SolverOptions {
  double eps_primal = 1e-8;  ///< relative affine residual / inequality violation
  double eps_dual = 1e-8;    ///< relative dual residual
  int max_inner_iterations = 50000;
  double over_relaxation = 1.6;
  double penalty = 1.0;  ///< initial ADMM penalty
  bool adaptive_penalty = true;
  bool accept_warm_start = true;
  /// History window for safeguarded Anderson acceleration of the splitting
  /// iteration; 0 disables it.
  int acceleration_window = 10;
  int check_interval = 25;
  std::ostream* iteration_log = nullptr;  ///< CSV lines: iter,primal,dual

  void validate() const;
};

enum class SolveOutcome { Optimal, MaxIterations, PrimalInfeasibleLikely, NumericalFailure };

std::string to_string(SolveOutcome outcome);

struct SolveStatus {
  SolveOutcome outcome = SolveOutcome::NumericalFailure;
  double primal_residual = 0.0;     ///< max of relative equality residual and violation
  double dual_residual = 0.0;       ///< relative
  double duality_gap = 0.0;         ///< relative, reported only
  double max_ineq_violation = 0.0;  ///< absolute, original row scaling
  double objective = 0.0;
  int inner_iterations = 0;
  double wall_time_s = 0.0;
};

/// Nearest PSD matrix in Frobenius norm (eigenvalue clamp).
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& s);

/// The `count` smallest eigenvalues (ascending) with orthonormal eigenvectors.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> smallest_eigs(const Eigen::MatrixXd& z, int count);

/// Iterate state carried between solves against one constraint set: cone
/// copy, inequality slacks, scaled duals and the current penalty. Reusing it
/// lets a sequence of solves with drifting costs skip re-learning the duals.
struct SolverState {
  Eigen::VectorXd cone;    ///< svec of the PSD cone copy
  Eigen::VectorXd slack;
  Eigen::VectorXd dual_cone;
  Eigen::VectorXd dual_slack;
  double penalty = 0.0;

  bool valid() const { return cone.size() > 0; }
};

/// Operator-splitting backend for
///   min tr(C Z)  s.t.  tr(A_i Z) = a_i,  tr(B_k Z) <= b_k,  Z PSD.
///
/// The variable is split into an affine copy and a cone copy (PSD block plus
/// nonnegative inequality slacks); the iteration alternates projection onto
/// the affine set with projection onto the cone, with scaled dual updates and
/// over-relaxation. Rows are normalized and the affine projection operator is
/// factorized once at construction, so repeated solves against the same
/// constraints (different costs) reuse the factorization. A warm start seeds
/// the cone copy; duals start at zero. Deterministic for fixed inputs.
class SdpSolver {
 public:
  explicit SdpSolver(const LiftedSDP& sdp, SolverOptions opts = {});
  ~SdpSolver();
  SdpSolver(SdpSolver&&) noexcept;
  SdpSolver& operator=(SdpSolver&&) noexcept;

  /// Returned Z is the cone copy: exactly PSD, affine-feasible to tolerance
  /// on success. On MaxIterations the best iterate seen is returned.
  std::pair<Eigen::MatrixXd, SolveStatus> solve(const Eigen::MatrixXd& cost,
                                                const Eigen::MatrixXd* warm = nullptr) const;

  /// Stateful variant: resumes from `state` when valid (ignoring `warm`),
  /// otherwise starts as the stateless overload would; writes the terminal
  /// iterate back into `state` either way. Positive tolerance overrides
  /// replace the constructed eps for this call only.
  std::pair<Eigen::MatrixXd, SolveStatus> solve(const Eigen::MatrixXd& cost, SolverState& state,
                                                const Eigen::MatrixXd* warm = nullptr,
                                                double eps_primal_override = 0.0,
                                                double eps_dual_override = 0.0) const;

  int dim() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around SdpSolver.
std::pair<Eigen::MatrixXd, SolveStatus> solve_sdp(const LiftedSDP& sdp,
                                                  const Eigen::MatrixXd& cost,
                                                  const Eigen::MatrixXd* warm = nullptr,
                                                  const SolverOptions& opts = {});

}  // namespace ccik
