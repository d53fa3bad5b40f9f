#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ccik/bench.hpp"
#include "ccik/json_io.hpp"
#include "ccik/sdp_lift.hpp"

using namespace ccik;
namespace fs = std::filesystem;

namespace {

RobotModel load_robot(const std::string& path) {
  RobotModel robot = load_json_file(path).get<RobotModel>();
  robot.validate();
  return robot;
}

Environment load_env(const std::string& path, int d) {
  if (path.empty()) return Environment::empty();
  Environment env = load_json_file(path).get<Environment>();
  env.validate(d);
  return env;
}

int run_robot_emit(int n, int d, double lmin, double lmax, double body_radius,
                   const std::string& out) {
  RobotModel robot = RobotModel::uniform(n, d, lmin, lmax);
  robot.body_radius = body_radius;
  robot.validate();
  save_json_file(out, json(robot));
  std::cout << "wrote " << out << " (n=" << n << ", d=" << d << ")\n";
  return 0;
}

int run_env_emit(const std::string& kind, int n, double scale, const std::string& out) {
  const Environment env = make_environment(environment_kind_from_string(kind), n, scale);
  save_json_file(out, json(env));
  std::cout << "wrote " << out << " (" << env.spheres.size() << " spheres)\n";
  return 0;
}

int run_gen(const std::string& robot_path, const std::string& env_path, const std::string& mode_str,
            int count, std::uint64_t seed, const std::string& out) {
  const RobotModel robot = load_robot(robot_path);
  const Environment env = load_env(env_path, robot.d);
  const GoalMode mode = goal_mode_from_string(mode_str);
  json queries = json::array();
  for (int i = 0; i < count; ++i) {
    auto rng = query_rng(seed, static_cast<std::uint64_t>(i));
    Query q = sample_query(robot, env, mode, rng);
    q.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    queries.push_back(q);
  }
  json file{{"robot", robot}, {"mode", mode_str}, {"seed", seed}, {"queries", queries}};
  if (!env_path.empty()) file["env"] = env;
  save_json_file(out, file);
  std::cout << "wrote " << out << " (" << count << " queries)\n";
  return 0;
}

GoalSpec goal_from_query_file(const json& j, int index) {
  if (j.contains("queries")) {
    const auto& arr = j.at("queries");
    if (index < 0 || index >= static_cast<int>(arr.size()))
      throw std::runtime_error("query index out of range");
    return arr.at(static_cast<size_t>(index)).get<Query>().goal;
  }
  if (j.contains("goal")) return j.at("goal").get<GoalSpec>();
  return j.get<GoalSpec>();  // bare goal file
}

int run_solve(const std::string& robot_path, const std::string& env_path,
              const std::string& query_path, int index, bool trace, const std::string& out,
              const std::string& driver_path, const std::string& dump_problem,
              const std::string& dump_sdp) {
  const RobotModel robot = load_robot(robot_path);
  const Environment env = load_env(env_path, robot.d);
  const GoalSpec goal = goal_from_query_file(load_json_file(query_path), index);

  DriverOptions opts;
  if (!driver_path.empty()) load_json_file(driver_path).get_to(opts);
  opts.record_trace = trace || opts.record_trace;

  if (!dump_problem.empty() || !dump_sdp.empty()) {
    const DGProblem problem = build_problem(robot, goal, env, opts.build);
    if (!dump_problem.empty()) save_json_file(dump_problem, problem_to_json(problem));
    if (!dump_sdp.empty()) {
      std::ofstream f(dump_sdp);
      if (!f) throw std::runtime_error("cannot write " + dump_sdp);
      write_triplets(f, assemble(problem, make_layout(problem), opts.assemble));
    }
  }

  const IKResult result = solve_ik(robot, goal, env, opts);
  save_json_file(out, result_file_json(robot, goal, env, result));
  std::cout << to_string(result.status) << " in " << result.outer_iterations
            << " iterations, rank residual " << result.lambda_final << ", position error "
            << result.validity.ee_position_error << " m, valid "
            << (result.validity.overall_valid ? "yes" : "no") << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_bench(const std::string& suite_path, const std::string& out_dir) {
  SuiteSpec suite = load_json_file(suite_path).get<SuiteSpec>();
  fs::create_directories(out_dir);
  const BenchReport report = run_benchmark(suite);

  {
    std::ofstream f(out_dir + "/report.csv");
    if (!f) throw std::runtime_error("cannot write report.csv");
    write_report_csv(f, report);
  }
  {
    std::ofstream f(out_dir + "/errors.csv");
    if (!f) throw std::runtime_error("cannot write errors.csv");
    write_errors_csv(f, report);
  }
  {
    std::ofstream f(out_dir + "/results.jsonl");
    if (!f) throw std::runtime_error("cannot write results.jsonl");
    for (const auto& rec : report.records) f << json(rec).dump() << "\n";
  }
  int failures = 0;
  for (const auto& rec : report.records)
    if (!rec.error.empty()) ++failures;
  std::cout << "wrote " << out_dir << "/report.csv, errors.csv, results.jsonl ("
            << report.records.size() << " solves, " << failures << " errored)\n";
  return 0;  // per-query failures never fail the suite
}

int run_validate(const std::string& result_path) {
  const json j = load_json_file(result_path);
  const RobotModel robot = j.at("robot").get<RobotModel>();
  robot.validate();
  const GoalSpec goal = j.at("goal").get<GoalSpec>();
  Environment env = Environment::empty();
  if (j.contains("env")) env = j.at("env").get<Environment>();
  const Configuration config = j.at("result").at("configuration").get<Configuration>();
  if (config.empty()) throw std::runtime_error("result carries no recovered configuration");
  const ValidityReport rep = validate(config, robot, goal, env);
  std::cout << json(rep).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-geometric inverse kinematics for extensible constant-curvature "
               "continuum robots"};
  app.require_subcommand(1);

  // robot emit
  auto* robot_cmd = app.add_subcommand("robot", "robot model files");
  auto* robot_emit = robot_cmd->add_subcommand("emit", "write a uniform robot model");
  int rn = 3, rd = 3;
  double rlmin = 0.15, rlmax = 0.55, rbody = 0.01;
  std::string robot_out = "robot.json";
  robot_emit->add_option("--n", rn, "segment count");
  robot_emit->add_option("--d", rd, "ambient dimension (2 or 3)");
  robot_emit->add_option("--lmin", rlmin, "segment minimum length [m]");
  robot_emit->add_option("--lmax", rlmax, "segment maximum length [m]");
  robot_emit->add_option("--body-radius", rbody, "body radius for collision checks [m]");
  robot_emit->add_option("-o,--output", robot_out, "output path");

  // env emit
  auto* env_cmd = app.add_subcommand("env", "obstacle environment files");
  auto* env_emit = env_cmd->add_subcommand("emit", "write a procedural obstacle scene");
  std::string env_kind = "octahedron";
  int env_n = 3;
  double env_scale = 0.0;
  std::string env_out = "env.json";
  env_emit->add_option("--kind", env_kind,
                       "octahedron | cube | icosahedron | columns | corridor");
  env_emit->add_option("--n", env_n, "segment count the scene is sized for");
  env_emit->add_option("--scale", env_scale, "scale override (default n/3)");
  env_emit->add_option("-o,--output", env_out, "output path");

  // gen
  auto* gen = app.add_subcommand("gen", "sample feasible queries by rejection");
  std::string gen_robot, gen_env, gen_mode = "pose", gen_out = "queries.json";
  int gen_count = 25;
  std::uint64_t gen_seed = 0;
  gen->add_option("--robot", gen_robot, "robot model JSON")->required();
  gen->add_option("--env", gen_env, "environment JSON (optional)");
  gen->add_option("--mode", gen_mode, "pos | pos-yp | pose");
  gen->add_option("--count", gen_count, "number of queries");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("-o,--output", gen_out, "output path");

  // solve
  auto* solve = app.add_subcommand("solve", "solve one query");
  std::string solve_robot, solve_env, solve_query, solve_out = "result.json", solve_driver;
  std::string solve_dump_problem, solve_dump_sdp;
  int solve_index = 0;
  bool solve_trace = false;
  solve->add_option("--robot", solve_robot, "robot model JSON")->required();
  solve->add_option("--env", solve_env, "environment JSON (optional)");
  solve->add_option("--query", solve_query, "queries file, single query, or bare goal JSON")
      ->required();
  solve->add_option("--index", solve_index, "query index within a queries file");
  solve->add_flag("--trace", solve_trace, "record intermediate recovered configurations");
  solve->add_option("--driver", solve_driver, "driver options JSON (optional)");
  solve->add_option("--dump-problem", solve_dump_problem,
                    "also write the constraint list as JSON");
  solve->add_option("--dump-sdp", solve_dump_sdp,
                    "also write the lifted rows as sparse triplets");
  solve->add_option("-o,--output", solve_out, "output path");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string bench_suite, bench_out = "report";
  bench->add_option("--suite", bench_suite, "suite spec JSON")->required();
  bench->add_option("-o,--output", bench_out, "report directory");

  // validate
  auto* val = app.add_subcommand("validate", "recheck a result file");
  std::string val_result;
  val->add_option("--result", val_result, "result JSON from solve")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (robot_emit->parsed())
      return run_robot_emit(rn, rd, rlmin, rlmax, rbody, robot_out);
    if (env_emit->parsed()) return run_env_emit(env_kind, env_n, env_scale, env_out);
    if (gen->parsed()) return run_gen(gen_robot, gen_env, gen_mode, gen_count, gen_seed, gen_out);
    if (solve->parsed())
      return run_solve(solve_robot, solve_env, solve_query, solve_index, solve_trace, solve_out,
                       solve_driver, solve_dump_problem, solve_dump_sdp);
    if (bench->parsed()) return run_bench(bench_suite, bench_out);
    if (val->parsed()) return run_validate(val_result);
    std::cerr << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
