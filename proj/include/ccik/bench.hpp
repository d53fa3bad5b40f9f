#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "ccik/driver.hpp"
#include "ccik/environment.hpp"
#include "ccik/stats.hpp"

namespace ccik {

/// A feasible IK query: the sampled collision-free configuration and the goal
/// derived from its end-effector pose. The goal always carries the full pose
/// data; goal.mode selects which parts are constrained.
struct Query {
  Configuration ground_truth;
  GoalSpec goal;
  std::uint64_t seed = 0;
};

/// Deterministic per-query generator, decorrelated across indices.
std::mt19937_64 query_rng(std::uint64_t seed, std::uint64_t index);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Normal draw rejected outside [lo, hi].
double truncated_normal(std::mt19937_64& rng, double mean, double sd, double lo, double hi);

/// Rejection-sample a feasible query: bend angles uniform in [0, 179.5] deg,
/// bending planes uniform (both sides for d = 2), lengths truncated-normal
/// (0.35, 0.075) within the segment range; configurations with
/// self-collisions, backbone points inside spheres or behind the base plane,
/// or half-plane violations are rejected. Throws after max_attempts.
Query sample_query(const RobotModel& robot, const Environment& env, GoalMode mode,
                   std::mt19937_64& rng, int max_attempts = 10000);

/// One solve of one query under one obstacle variant.
struct QueryRecord {
  std::string env_name;
  int n = 0;
  GoalMode mode = GoalMode::Position;
  bool with_obs = false;
  std::uint64_t seed = 0;
  int query_index = 0;
  IKStatus status = IKStatus::SolverFailure;
  bool converged = false;
  bool valid = false;
  int outer_iterations = 0;
  double lambda_final = 0.0;
  double solve_time_s = 0.0;
  double setup_time_s = 0.0;
  double pos_err = 0.0;
  double rot_z_err_deg = 0.0;
  double rot_y_err_deg = 0.0;
  std::string error;  ///< non-empty when the solve threw
};

struct VariantStats {
  int trials = 0;
  int converged = 0;
  int valid = 0;
  int valid_given_converged = 0;
  std::pair<double, double> converged_ci{0.0, 0.0};
  std::pair<double, double> valid_ci{0.0, 0.0};
  RunningStats iterations;   ///< over all solves
  RunningStats solve_time;   ///< seconds, over all solves
  RunningStats pos_err;      ///< over converged solves
  RunningStats rot_z_err;    ///< degrees, over converged solves
  RunningStats rot_y_err;    ///< degrees, over converged solves

  void add(const QueryRecord& rec);
};

/// One (environment, n, mode) row with the free / with-obstacles pair.
struct BenchRow {
  std::string env_name;
  int n = 0;
  GoalMode mode = GoalMode::Position;
  bool has_obs = false;
  VariantStats free_stats;
  VariantStats obs_stats;
};

struct SuiteSpec {
  std::vector<std::string> environments;  ///< kind names, or "free"
  std::vector<int> n_list;
  std::vector<GoalMode> modes;
  int batch = 25;
  std::uint64_t seed = 0;
  int d = 3;
  double scale = 0.0;  ///< environment scale override; 0 = auto (n/3)
  int threads = 0;     ///< 0 = hardware concurrency
  DriverOptions driver;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<QueryRecord> records;
};

/// Run every (environment, n, mode) cell of the suite: sample `batch`
/// feasible queries inside the environment, then solve each query twice on
/// bitwise-identical goals, once without and once with the obstacles.
/// Individual solve failures are recorded, never fatal. Queries run in
/// parallel; per-query seeds derive from (suite seed, cell, index) so the
/// schedule cannot change results.
BenchReport run_benchmark(const SuiteSpec& suite);

/// Success-rate / iteration / timing table, one row per (env, n, mode) with
/// free and with-obs column pairs.
void write_report_csv(std::ostream& os, const BenchReport& report);

/// End-effector error table; error means are over converged solves.
void write_errors_csv(std::ostream& os, const BenchReport& report);

}  // namespace ccik
