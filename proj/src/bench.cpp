#include "ccik/bench.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ccik {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool above_base_plane(const Eigen::VectorXd& pt, const Pose& base) {
  return (pt - base.position).dot(base.tangent()) >= 0.0;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

std::mt19937_64 query_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed, index));
}

double truncated_normal(std::mt19937_64& rng, double mean, double sd, double lo, double hi) {
  std::normal_distribution<double> dist(mean, sd);
  for (int i = 0; i < 100000; ++i) {
    const double x = dist(rng);
    if (x >= lo && x <= hi) return x;
  }
  throw std::runtime_error("truncated normal rejection failed; bounds too tight");
}

Query sample_query(const RobotModel& robot, const Environment& env, GoalMode mode,
                   std::mt19937_64& rng, int max_attempts) {
  robot.validate();
  env.validate(robot.d);
  constexpr double kThetaMaxDeg = 179.5;
  std::uniform_real_distribution<double> theta_dist(0.0, kThetaMaxDeg * std::numbers::pi / 180.0);
  std::uniform_real_distribution<double> delta_dist(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Configuration config(static_cast<size_t>(robot.n));
    for (int t = 0; t < robot.n; ++t) {
      ArcParams& arc = config[static_cast<size_t>(t)];
      arc.theta = theta_dist(rng);
      arc.delta = robot.d == 3 ? delta_dist(rng) : (coin(rng) < 0.5 ? 0.0 : std::numbers::pi);
      const LengthRange& r = robot.length_ranges[static_cast<size_t>(t)];
      arc.length = truncated_normal(rng, 0.35, 0.075, r.lo, r.hi);
    }

    if (!self_collision_free(config, robot, 10)) continue;

    const auto samples = sample_backbone(config, robot, 10);
    bool ok = true;
    for (const auto& pt : samples) {
      if (!above_base_plane(pt, robot.base_pose)) {
        ok = false;
        break;
      }
      for (const auto& s : env.spheres) {
        if ((pt - s.center).norm() < s.radius) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      for (const auto& h : env.half_planes) {
        if (pt.dot(h.normal) > h.offset) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (!ok) continue;

    const auto poses = forward_kinematics(config, robot);
    const Pose& ee = poses.back();
    Query q;
    q.ground_truth = std::move(config);
    q.goal.mode = mode;
    q.goal.position = ee.position;
    q.goal.tangent = ee.tangent();
    if (robot.d == 3) q.goal.roll_axis = ee.frame.col(1);
    return q;
  }
  throw std::runtime_error("environment too dense: no feasible query in " +
                           std::to_string(max_attempts) + " attempts");
}

void VariantStats::add(const QueryRecord& rec) {
  ++trials;
  if (rec.converged) ++converged;
  if (rec.valid) ++valid;
  if (rec.converged && rec.valid) ++valid_given_converged;
  iterations.add(rec.outer_iterations);
  solve_time.add(rec.solve_time_s);
  if (rec.converged) {
    pos_err.add(rec.pos_err);
    if (std::isfinite(rec.rot_z_err_deg)) rot_z_err.add(rec.rot_z_err_deg);
    if (std::isfinite(rec.rot_y_err_deg)) rot_y_err.add(rec.rot_y_err_deg);
  }
}

namespace {

QueryRecord solve_one(const RobotModel& robot, const Query& query, const Environment& env,
                      const DriverOptions& driver, const std::string& env_name, bool with_obs,
                      int index) {
  QueryRecord rec;
  rec.env_name = env_name;
  rec.n = robot.n;
  rec.mode = query.goal.mode;
  rec.with_obs = with_obs;
  rec.seed = query.seed;
  rec.query_index = index;
  try {
    const IKResult res = solve_ik(robot, query.goal, env, driver);
    rec.status = res.status;
    rec.converged = res.status == IKStatus::Converged;
    rec.valid = res.validity.overall_valid;
    rec.outer_iterations = res.outer_iterations;
    rec.lambda_final = res.lambda_final;
    rec.solve_time_s = res.solver_time_s;
    rec.setup_time_s = res.setup_time_s;
    rec.pos_err = res.validity.ee_position_error;
    rec.rot_z_err_deg = res.validity.ee_rot_z_error_deg;
    rec.rot_y_err_deg = res.validity.ee_rot_y_error_deg;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

void run_parallel(int n_tasks, int threads, const std::function<void(int)>& body) {
  if (threads < 1) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, n_tasks);
  if (threads <= 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

BenchReport run_benchmark(const SuiteSpec& suite) {
  if (suite.batch < 1) throw std::invalid_argument("batch size must be >= 1");
  BenchReport report;

  std::uint64_t cell_ordinal = 0;
  for (const auto& env_name : suite.environments) {
    for (int n : suite.n_list) {
      for (GoalMode mode : suite.modes) {
        const std::uint64_t cell_seed = mix_seed(suite.seed, cell_ordinal++);
        const RobotModel robot = RobotModel::uniform(n, suite.d);
        const bool has_obs = env_name != "free";
        Environment env = Environment::empty();
        if (has_obs) env = make_environment(environment_kind_from_string(env_name), n, suite.scale);
        const Environment free_env = Environment::empty();

        // Queries are sampled inside the environment, then solved on
        // identical goals both without and with the obstacles.
        std::vector<Query> queries(static_cast<size_t>(suite.batch));
        std::vector<std::string> gen_errors(static_cast<size_t>(suite.batch));
        run_parallel(suite.batch, suite.threads, [&](int i) {
          auto rng = query_rng(cell_seed, static_cast<std::uint64_t>(i));
          try {
            queries[static_cast<size_t>(i)] = sample_query(robot, env, mode, rng);
            queries[static_cast<size_t>(i)].seed = mix_seed(cell_seed, static_cast<std::uint64_t>(i));
          } catch (const std::exception& e) {
            gen_errors[static_cast<size_t>(i)] = e.what();
          }
        });

        const int variants = has_obs ? 2 : 1;
        std::vector<QueryRecord> records(static_cast<size_t>(suite.batch * variants));
        run_parallel(suite.batch * variants, suite.threads, [&](int task) {
          const int i = task / variants;
          const bool with_obs = (task % variants) == 1;
          if (!gen_errors[static_cast<size_t>(i)].empty()) {
            QueryRecord rec;
            rec.env_name = env_name;
            rec.n = n;
            rec.mode = mode;
            rec.with_obs = with_obs;
            rec.query_index = i;
            rec.error = gen_errors[static_cast<size_t>(i)];
            records[static_cast<size_t>(task)] = rec;
            return;
          }
          records[static_cast<size_t>(task)] =
              solve_one(robot, queries[static_cast<size_t>(i)], with_obs ? env : free_env,
                        suite.driver, env_name, with_obs, i);
        });

        BenchRow row;
        row.env_name = env_name;
        row.n = n;
        row.mode = mode;
        row.has_obs = has_obs;
        for (const auto& rec : records) {
          if (!rec.error.empty()) {
            report.records.push_back(rec);
            continue;
          }
          (rec.with_obs ? row.obs_stats : row.free_stats).add(rec);
          report.records.push_back(rec);
        }
        for (VariantStats* vs : {&row.free_stats, &row.obs_stats}) {
          if (vs->trials == 0) continue;
          vs->converged_ci = jeffreys_interval(vs->converged, vs->trials);
          vs->valid_ci = jeffreys_interval(vs->valid, vs->trials);
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

namespace {

void write_variant_header(std::ostream& os, const std::string& prefix) {
  os << "," << prefix << "_trials," << prefix << "_converged," << prefix << "_valid," << prefix
     << "_conv_rate," << prefix << "_conv_lo," << prefix << "_conv_hi," << prefix << "_valid_rate,"
     << prefix << "_valid_lo," << prefix << "_valid_hi," << prefix << "_valid_given_conv,"
     << prefix << "_iters_mean," << prefix << "_iters_sd," << prefix << "_time_mean_s," << prefix
     << "_time_sd_s";
}

void write_variant(std::ostream& os, const VariantStats& vs) {
  if (vs.trials == 0) {
    os << ",,,,,,,,,,,,,,";
    return;
  }
  const double t = vs.trials;
  os << "," << vs.trials << "," << vs.converged << "," << vs.valid << "," << vs.converged / t
     << "," << vs.converged_ci.first << "," << vs.converged_ci.second << "," << vs.valid / t << ","
     << vs.valid_ci.first << "," << vs.valid_ci.second << ","
     << (vs.converged > 0 ? static_cast<double>(vs.valid_given_converged) / vs.converged : 0.0)
     << "," << vs.iterations.mean << "," << vs.iterations.sd() << "," << vs.solve_time.mean << ","
     << vs.solve_time.sd();
}

}  // namespace

void write_report_csv(std::ostream& os, const BenchReport& report) {
  os << "env,n,mode";
  write_variant_header(os, "free");
  write_variant_header(os, "obs");
  os << "\n";
  for (const auto& row : report.rows) {
    os << row.env_name << "," << row.n << "," << to_string(row.mode);
    write_variant(os, row.free_stats);
    write_variant(os, row.obs_stats);
    os << "\n";
  }
}

void write_errors_csv(std::ostream& os, const BenchReport& report) {
  os << "env,n,mode,variant,pos_err_mean_m,pos_err_sd_m,rot_z_err_mean_deg,rot_z_err_sd_deg,"
        "rot_y_err_mean_deg,rot_y_err_sd_deg,pct_converged,pct_valid\n";
  for (const auto& row : report.rows) {
    for (const auto* vs : {&row.free_stats, &row.obs_stats}) {
      if (vs->trials == 0) continue;
      const bool is_obs = vs == &row.obs_stats;
      os << row.env_name << "," << row.n << "," << to_string(row.mode) << ","
         << (is_obs ? "with_obs" : "free") << "," << vs->pos_err.mean << "," << vs->pos_err.sd()
         << "," << vs->rot_z_err.mean << "," << vs->rot_z_err.sd() << "," << vs->rot_y_err.mean
         << "," << vs->rot_y_err.sd() << ","
         << 100.0 * vs->converged / static_cast<double>(vs->trials) << ","
         << 100.0 * vs->valid / static_cast<double>(vs->trials) << "\n";
    }
  }
}

}  // namespace ccik
