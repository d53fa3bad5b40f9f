#include "ccik/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace ccik {

void SolverOptions::validate() const {
  if (!(eps_primal > 0.0) || !(eps_dual > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_inner_iterations < 1) throw std::invalid_argument("max_inner_iterations must be >= 1");
  if (!(over_relaxation > 0.0) || over_relaxation >= 2.0)
    throw std::invalid_argument("over-relaxation parameter must lie in (0, 2)");
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (acceleration_window < 0)
    throw std::invalid_argument("acceleration window must be >= 0");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
}

std::string to_string(SolveOutcome outcome) {
  switch (outcome) {
    case SolveOutcome::Optimal: return "optimal";
    case SolveOutcome::MaxIterations: return "max_iterations";
    case SolveOutcome::PrimalInfeasibleLikely: return "primal_infeasible_likely";
    case SolveOutcome::NumericalFailure: return "numerical_failure";
  }
  throw std::invalid_argument("unknown solve outcome");
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd& vals = eig.eigenvalues();
  if (vals.size() == 0 || vals[0] >= 0.0) return s;

  const Eigen::Index n = vals.size();
  Eigen::Index first_pos = 0;
  while (first_pos < n && vals[first_pos] <= 0.0) ++first_pos;
  const Eigen::Index npos = n - first_pos;
  if (npos == 0) return Eigen::MatrixXd::Zero(n, n);
  const auto vpos = eig.eigenvectors().rightCols(npos);
  return vpos * vals.tail(npos).asDiagonal() * vpos.transpose();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> smallest_eigs(const Eigen::MatrixXd& z, int count) {
  if (z.rows() != z.cols()) throw std::invalid_argument("matrix must be square");
  if (count < 1 || count > z.rows()) throw std::invalid_argument("eigenvalue count out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {eig.eigenvalues().head(count), eig.eigenvectors().leftCols(count)};
}

namespace {

// Scaled vectorization of symmetric matrices: off-diagonal entries carry a
// sqrt(2) weight so the Euclidean inner product of svecs equals <A, B>.
struct SvecMap {
  int m = 0;
  int dim = 0;
  std::vector<int> rs, cs;        // svec index -> (r, c), r <= c
  std::vector<int> index;         // r * m + c -> svec index

  explicit SvecMap(int m_in) : m(m_in), dim(m_in * (m_in + 1) / 2) {
    rs.resize(static_cast<size_t>(dim));
    cs.resize(static_cast<size_t>(dim));
    index.assign(static_cast<size_t>(m) * static_cast<size_t>(m), -1);
    int k = 0;
    for (int c = 0; c < m; ++c)
      for (int r = 0; r <= c; ++r, ++k) {
        rs[static_cast<size_t>(k)] = r;
        cs[static_cast<size_t>(k)] = c;
        index[static_cast<size_t>(r) * static_cast<size_t>(m) + static_cast<size_t>(c)] = k;
        index[static_cast<size_t>(c) * static_cast<size_t>(m) + static_cast<size_t>(r)] = k;
      }
  }

  int at(int r, int c) const {
    return index[static_cast<size_t>(r) * static_cast<size_t>(m) + static_cast<size_t>(c)];
  }

  Eigen::VectorXd to_svec(const Eigen::MatrixXd& a) const {
    const double rt2 = std::numbers::sqrt2;
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) {
      const int r = rs[static_cast<size_t>(k)], c = cs[static_cast<size_t>(k)];
      v[k] = r == c ? a(r, r) : rt2 * 0.5 * (a(r, c) + a(c, r));
    }
    return v;
  }

  Eigen::MatrixXd from_svec(const Eigen::VectorXd& v) const {
    const double inv_rt2 = 1.0 / std::numbers::sqrt2;
    Eigen::MatrixXd a(m, m);
    for (int k = 0; k < dim; ++k) {
      const int r = rs[static_cast<size_t>(k)], c = cs[static_cast<size_t>(k)];
      if (r == c) {
        a(r, r) = v[k];
      } else {
        a(r, c) = v[k] * inv_rt2;
        a(c, r) = v[k] * inv_rt2;
      }
    }
    return a;
  }
};

struct Row {
  std::vector<std::pair<int, double>> entries;  // (svec index, coefficient), sorted
  double rhs = 0.0;
  double scale = 1.0;  // original Frobenius norm, for unscaled residuals

  double dot(const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (const auto& [k, w] : entries) acc += w * v[k];
    return acc;
  }
  void scatter(Eigen::VectorXd& dst, double coeff) const {
    for (const auto& [k, w] : entries) dst[k] += coeff * w;
  }
};

Row make_row(const SparseSym& mat, double rhs, bool negate, const SvecMap& sv) {
  const double rt2 = std::numbers::sqrt2;
  Row row;
  row.entries.reserve(mat.entries().size());
  for (const auto& e : mat.entries()) {
    const double w = (e.r == e.c ? e.v : rt2 * e.v) * (negate ? -1.0 : 1.0);
    row.entries.emplace_back(sv.at(e.r, e.c), w);
  }
  std::sort(row.entries.begin(), row.entries.end());
  row.rhs = negate ? -rhs : rhs;
  double nrm_sq = 0.0;
  for (const auto& [k, w] : row.entries) nrm_sq += w * w;
  row.scale = std::sqrt(nrm_sq);
  if (row.scale <= 0.0) throw std::invalid_argument("zero constraint row");
  for (auto& [k, w] : row.entries) w /= row.scale;
  row.rhs /= row.scale;
  return row;
}

double sparse_dot(const Row& a, const Row& b) {
  double acc = 0.0;
  size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first < b.entries[j].first)
      ++i;
    else if (a.entries[i].first > b.entries[j].first)
      ++j;
    else
      acc += a.entries[i++].second * b.entries[j++].second;
  }
  return acc;
}

}  // namespace

struct IterateInit {
  Eigen::VectorXd zu, su, lz, ls;
  double rho = 0.0;
  double eps_primal = 0.0;  // 0 = use the constructed options
  double eps_dual = 0.0;
};

struct SdpSolver::Impl {
  LiftIndex layout;
  SolverOptions opts;
  SvecMap sv;
  std::vector<Row> rows;  // equalities first, then inequalities (all <=)
  int n_eq = 0;
  int n_ineq = 0;
  Eigen::VectorXd rhs;  // normalized, all rows
  double rhs_eq_norm = 0.0;      // ||a|| in original units
  double rhs_ineq_max = 0.0;     // max |b| in original units
  // Pseudo-inverse factors of the row Gram; tolerant of dependent rows.
  Eigen::MatrixXd gram_q;
  Eigen::VectorXd gram_inv_eigs;

  Impl(const LiftedSDP& sdp, SolverOptions o) : layout(sdp.layout), opts(std::move(o)), sv(sdp.layout.m()) {
    opts.validate();
    n_eq = static_cast<int>(sdp.eq.size());
    n_ineq = static_cast<int>(sdp.ineq.size());
    rows.reserve(static_cast<size_t>(n_eq + n_ineq));
    double a_sq = 0.0;
    for (const auto& r : sdp.eq) {
      rows.push_back(make_row(r.mat, r.rhs, false, sv));
      a_sq += r.rhs * r.rhs;
    }
    rhs_eq_norm = std::sqrt(a_sq);
    for (const auto& r : sdp.ineq) {
      if (r.sense == Sense::Eq) throw std::invalid_argument("equality row in inequality list");
      rows.push_back(make_row(r.mat, r.rhs, r.sense == Sense::Ge, sv));
      rhs_ineq_max = std::max(rhs_ineq_max, std::abs(r.rhs));
    }
    rhs.resize(n_eq + n_ineq);
    for (int i = 0; i < n_eq + n_ineq; ++i) rhs[i] = rows[static_cast<size_t>(i)].rhs;

    // Gram of the affine rows, with the identity slack block on inequalities.
    const int total = n_eq + n_ineq;
    Eigen::MatrixXd g(total, total);
    for (int i = 0; i < total; ++i) {
      for (int k = i; k < total; ++k) {
        double v = sparse_dot(rows[static_cast<size_t>(i)], rows[static_cast<size_t>(k)]);
        if (i == k && i >= n_eq) v += 1.0;
        g(i, k) = v;
        g(k, i) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("constraint Gram factorization failed");
    gram_q = eig.eigenvectors();
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const double cutoff = std::max(vals[vals.size() - 1], 0.0) * 1e-12;
    gram_inv_eigs.resize(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      gram_inv_eigs[i] = vals[i] > cutoff ? 1.0 / vals[i] : 0.0;
  }

  Eigen::VectorXd gram_solve(const Eigen::VectorXd& b) const {
    return gram_q * gram_inv_eigs.cwiseProduct(gram_q.transpose() * b).eval();
  }

  IterateInit fresh_init(const Eigen::MatrixXd* warm) const;
  std::pair<Eigen::MatrixXd, SolveStatus> run(const Eigen::MatrixXd& cost, IterateInit init,
                                              SolverState* write_back) const;
};

SdpSolver::SdpSolver(const LiftedSDP& sdp, SolverOptions opts)
    : impl_(std::make_unique<Impl>(sdp, std::move(opts))) {}
SdpSolver::~SdpSolver() = default;
SdpSolver::SdpSolver(SdpSolver&&) noexcept = default;
SdpSolver& SdpSolver::operator=(SdpSolver&&) noexcept = default;

int SdpSolver::dim() const { return impl_->layout.m(); }

std::pair<Eigen::MatrixXd, SolveStatus> SdpSolver::solve(const Eigen::MatrixXd& cost,
                                                         const Eigen::MatrixXd* warm) const {
  return impl_->run(cost, impl_->fresh_init(warm), nullptr);
}

std::pair<Eigen::MatrixXd, SolveStatus> SdpSolver::solve(const Eigen::MatrixXd& cost,
                                                         SolverState& state,
                                                         const Eigen::MatrixXd* warm,
                                                         double eps_primal_override,
                                                         double eps_dual_override) const {
  const Impl& im = *impl_;
  IterateInit init;
  if (state.valid()) {
    if (state.cone.size() != im.sv.dim || state.slack.size() != im.n_ineq)
      throw std::invalid_argument("solver state size mismatch");
    init = IterateInit{state.cone, state.slack, state.dual_cone, state.dual_slack, state.penalty,
                       0.0, 0.0};
  } else {
    init = im.fresh_init(warm);
  }
  init.eps_primal = eps_primal_override;
  init.eps_dual = eps_dual_override;
  return im.run(cost, std::move(init), &state);
}

IterateInit SdpSolver::Impl::fresh_init(const Eigen::MatrixXd* warm) const {
  const Impl& im = *this;
  const int sd = im.sv.dim;
  const int P = im.n_eq, Q = im.n_ineq;
  IterateInit init;
  if (warm != nullptr && im.opts.accept_warm_start)
    init.zu = im.sv.to_svec(project_psd(*warm));
  else
    init.zu = Eigen::VectorXd::Zero(sd);
  init.su.resize(Q);
  for (int k = 0; k < Q; ++k)
    init.su[k] = std::max(0.0, im.rhs[P + k] - im.rows[static_cast<size_t>(P + k)].dot(init.zu));
  init.lz = Eigen::VectorXd::Zero(sd);
  init.ls = Eigen::VectorXd::Zero(Q);
  init.rho = im.opts.penalty;
  return init;
}

std::pair<Eigen::MatrixXd, SolveStatus> SdpSolver::Impl::run(const Eigen::MatrixXd& cost,
                                                             IterateInit init,
                                                             SolverState* write_back) const {
  const auto t_start = std::chrono::steady_clock::now();
  const SolverOptions& opts = this->opts;
  const int m = layout.m();
  const int sd = sv.dim;
  const int P = n_eq, Q = n_ineq, total = P + Q;
  const int N = sd + Q;
  if (cost.rows() != m || cost.cols() != m) throw std::invalid_argument("cost matrix size mismatch");

  const Eigen::VectorXd c_svec = sv.to_svec(cost);
  const double theta = opts.over_relaxation;
  const double eps_primal = init.eps_primal > 0.0 ? init.eps_primal : opts.eps_primal;
  const double eps_dual = init.eps_dual > 0.0 ? init.eps_dual : opts.eps_dual;
  double rho = init.rho;

  // Free splitting variable: cone copy plus scaled dual.
  Eigen::VectorXd w(N);
  w.head(sd) = init.zu + init.lz;
  w.tail(Q) = init.su + init.ls;

  Eigen::VectorXd x(N), y(N), g(N), shift(N), reflect(N), xi(total), mul(total);

  // One splitting step: affine-prox at w, cone projection at the reflection.
  auto apply = [&](const Eigen::VectorXd& win) {
    shift = win;
    shift.head(sd) -= c_svec / rho;
    for (int i = 0; i < total; ++i)
      xi[i] = rows[static_cast<size_t>(i)].dot(shift.head(sd)) - rhs[i];
    for (int k = 0; k < Q; ++k) xi[P + k] += shift[sd + k];
    mul = gram_solve(xi);
    x = shift;
    {
      auto xz = x.head(sd);
      Eigen::VectorXd xz_copy = xz;
      for (int i = 0; i < total; ++i) rows[static_cast<size_t>(i)].scatter(xz_copy, -mul[i]);
      x.head(sd) = xz_copy;
    }
    x.tail(Q) -= mul.tail(Q);
    reflect = 2.0 * x - win;
    y.head(sd) = sv.to_svec(project_psd(sv.from_svec(reflect.head(sd))));
    y.tail(Q) = reflect.tail(Q).cwiseMax(0.0);
    g = theta * (y - x);
  };

  // Anderson acceleration history (differences of iterates and residuals).
  const int window = opts.acceleration_window;
  std::vector<Eigen::VectorXd> hist_dw, hist_dg;
  Eigen::VectorXd w_prev, g_prev;
  bool have_prev = false;
  bool last_was_aa = false;
  double res_at_aa = 0.0;
  Eigen::VectorXd rewind_target;
  int cooldown = 0;
  constexpr double kAaSafeguard = 4.0;

  auto clear_history = [&]() {
    hist_dw.clear();
    hist_dg.clear();
    have_prev = false;
    last_was_aa = false;
  };

  Eigen::VectorXd y_prev_iter = Eigen::VectorXd::Zero(N);
  bool have_y_prev = false;

  SolveStatus status;
  status.outcome = SolveOutcome::MaxIterations;
  Eigen::VectorXd best_y;
  SolveStatus best_status;
  double best_primal = std::numeric_limits<double>::infinity();
  double prev_consensus = std::numeric_limits<double>::infinity();
  int stall_checks = 0;

  auto finish = [&](SolveOutcome outcome, const Eigen::VectorXd& y_out, SolveStatus st,
                    int iters) {
    st.outcome = outcome;
    st.inner_iterations = iters;
    st.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (write_back != nullptr) {
      write_back->cone = y.head(sd);
      write_back->slack = y.tail(Q);
      write_back->dual_cone = w.head(sd) - y.head(sd);
      write_back->dual_slack = w.tail(Q) - y.tail(Q);
      write_back->penalty = rho;
    }
    return std::make_pair(sv.from_svec(y_out.head(sd)), st);
  };

  for (int iter = 1; iter <= opts.max_inner_iterations; ++iter) {
    apply(w);
    double res = g.norm();

    // Undo an acceleration step that grew the fixed-point residual.
    if (last_was_aa && (!std::isfinite(res) || res > kAaSafeguard * res_at_aa)) {
      w = rewind_target;
      clear_history();
      cooldown = window;
      apply(w);
      res = g.norm();
    }

    if (have_prev && window > 0) {
      hist_dw.push_back(w - w_prev);
      hist_dg.push_back(g - g_prev);
      if (static_cast<int>(hist_dw.size()) > window) {
        hist_dw.erase(hist_dw.begin());
        hist_dg.erase(hist_dg.begin());
      }
    }
    w_prev = w;
    g_prev = g;
    have_prev = true;

    const bool check_now = iter % opts.check_interval == 0 || iter == opts.max_inner_iterations;
    if (check_now) {
      double eq_sq = 0.0;
      double max_viol = 0.0;
      for (int i = 0; i < P; ++i) {
        const Row& r = rows[static_cast<size_t>(i)];
        const double resid = r.scale * (r.dot(y.head(sd)) - rhs[i]);
        eq_sq += resid * resid;
      }
      for (int k = 0; k < Q; ++k) {
        const Row& r = rows[static_cast<size_t>(P + k)];
        max_viol = std::max(max_viol,
                            r.scale * std::max(0.0, r.dot(y.head(sd)) - rhs[P + k]));
      }
      const double eq_rel = std::sqrt(eq_sq) / (1.0 + rhs_eq_norm);
      const double viol_rel = max_viol / (1.0 + rhs_ineq_max);
      const double y_norm = y.norm();
      const double primal_rel = std::max(eq_rel, viol_rel);
      const double dual_rel =
          have_y_prev ? rho * (y - y_prev_iter).norm() / (1.0 + y_norm) : 1.0;
      const double consensus = (x - y).norm() / (1.0 + y_norm);

      const double pobj = c_svec.dot(y.head(sd));
      const double dobj = -rho * mul.dot(rhs);
      const double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

      if (!std::isfinite(primal_rel) || !std::isfinite(dual_rel) || !std::isfinite(pobj)) {
        SolveStatus st =
            best_primal < std::numeric_limits<double>::infinity() ? best_status : status;
        return finish(SolveOutcome::NumericalFailure,
                      best_primal < std::numeric_limits<double>::infinity() ? best_y : y, st,
                      iter);
      }

      status.primal_residual = primal_rel;
      status.dual_residual = dual_rel;
      status.duality_gap = gap_rel;
      status.max_ineq_violation = max_viol;
      status.objective = pobj;

      if (opts.iteration_log)
        (*opts.iteration_log) << iter << "," << primal_rel << "," << dual_rel << "\n";

      if (primal_rel < best_primal) {
        best_primal = primal_rel;
        best_y = y;
        best_status = status;
      }

      if (primal_rel <= eps_primal && dual_rel <= eps_dual)
        return finish(SolveOutcome::Optimal, y, status, iter);

      // Stationary iterates that never reach the affine set indicate an
      // empty intersection with the cone.
      if (consensus > 1e-5 && std::abs(consensus - prev_consensus) <= 1e-3 * consensus)
        ++stall_checks;
      else
        stall_checks = 0;
      prev_consensus = consensus;
      if (iter >= 1000 && stall_checks >= 5 && dual_rel <= std::max(eps_dual, 1e-10))
        return finish(SolveOutcome::PrimalInfeasibleLikely, y, status, iter);

      if (opts.adaptive_penalty) {
        double scale = 0.0;
        if (consensus > 10.0 * dual_rel && rho < 1e6)
          scale = 2.0;
        else if (dual_rel > 10.0 * consensus && rho > 1e-6)
          scale = 0.5;
        if (scale != 0.0) {
          // Rescale the dual content of w and restart the acceleration.
          w = y + (w - y) / scale;
          rho *= scale;
          clear_history();
          cooldown = window;
        }
      }
    }

    y_prev_iter = y;
    have_y_prev = true;

    // Next iterate: plain relaxed step, or the accelerated candidate.
    const Eigen::VectorXd w_plain = w + g;
    last_was_aa = false;
    if (window > 0 && cooldown == 0 && !hist_dg.empty()) {
      const int h = static_cast<int>(hist_dg.size());
      Eigen::MatrixXd dg_mat(N, h), dw_mat(N, h);
      for (int c = 0; c < h; ++c) {
        dg_mat.col(c) = hist_dg[static_cast<size_t>(c)];
        dw_mat.col(c) = hist_dw[static_cast<size_t>(c)];
      }
      Eigen::MatrixXd gram_aa = dg_mat.transpose() * dg_mat;
      gram_aa.diagonal().array() += 1e-10 * gram_aa.trace() + 1e-300;
      const Eigen::VectorXd gamma = gram_aa.ldlt().solve(dg_mat.transpose() * g);
      if (gamma.allFinite()) {
        w = w_plain - (dw_mat + dg_mat) * gamma;
        last_was_aa = true;
        res_at_aa = res;
        rewind_target = w_plain;
      } else {
        w = w_plain;
      }
    } else {
      w = w_plain;
      if (cooldown > 0) --cooldown;
    }
  }

  const bool have_best = best_primal < std::numeric_limits<double>::infinity();
  return finish(SolveOutcome::MaxIterations, have_best ? best_y : y,
                have_best ? best_status : status, opts.max_inner_iterations);
}

std::pair<Eigen::MatrixXd, SolveStatus> solve_sdp(const LiftedSDP& sdp, const Eigen::MatrixXd& cost,
                                                  const Eigen::MatrixXd* warm,
                                                  const SolverOptions& opts) {
  return SdpSolver(sdp, opts).solve(cost, warm);
}

}  // namespace ccik
