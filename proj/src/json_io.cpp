#include "ccik/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace ccik {

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<size_t>(i)).get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd();
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    m.row(r) = vec_from_json(j.at(static_cast<size_t>(r))).transpose();
  return m;
}

}  // namespace

void to_json(json& j, const Pose& p) {
  j = json{{"position", vec_to_json(p.position)}, {"frame", mat_to_json(p.frame)}};
}

void from_json(const json& j, Pose& p) {
  p.position = vec_from_json(j.at("position"));
  p.frame = mat_from_json(j.at("frame"));
}

void to_json(json& j, const ArcParams& a) {
  j = json{{"length", a.length}, {"theta", a.theta}, {"delta", a.delta}};
}

void from_json(const json& j, ArcParams& a) {
  j.at("length").get_to(a.length);
  j.at("theta").get_to(a.theta);
  j.at("delta").get_to(a.delta);
}

void to_json(json& j, const RobotModel& r) {
  json ranges = json::array();
  for (const auto& lr : r.length_ranges) ranges.push_back(json::array({lr.lo, lr.hi}));
  j = json{{"n", r.n},
           {"d", r.d},
           {"length_ranges", ranges},
           {"base_pose", r.base_pose},
           {"body_radius", r.body_radius}};
}

void from_json(const json& j, RobotModel& r) {
  j.at("n").get_to(r.n);
  j.at("d").get_to(r.d);
  r.length_ranges.clear();
  for (const auto& lr : j.at("length_ranges"))
    r.length_ranges.push_back(LengthRange{lr.at(0).get<double>(), lr.at(1).get<double>()});
  r.base_pose = j.at("base_pose").get<Pose>();
  r.body_radius = j.value("body_radius", 0.01);
}

void to_json(json& j, const GoalSpec& g) {
  j = json{{"mode", to_string(g.mode)}, {"position", vec_to_json(g.position)}};
  if (g.tangent) j["tangent"] = vec_to_json(*g.tangent);
  if (g.roll_axis) j["roll_axis"] = vec_to_json(*g.roll_axis);
}

void from_json(const json& j, GoalSpec& g) {
  g.mode = goal_mode_from_string(j.at("mode").get<std::string>());
  g.position = vec_from_json(j.at("position"));
  g.tangent.reset();
  g.roll_axis.reset();
  if (j.contains("tangent") && !j.at("tangent").is_null())
    g.tangent = vec_from_json(j.at("tangent"));
  if (j.contains("roll_axis") && !j.at("roll_axis").is_null())
    g.roll_axis = vec_from_json(j.at("roll_axis"));
}

void to_json(json& j, const Sphere& s) {
  j = json{{"center", vec_to_json(s.center)}, {"radius", s.radius}};
}

void from_json(const json& j, Sphere& s) {
  s.center = vec_from_json(j.at("center"));
  j.at("radius").get_to(s.radius);
}

void to_json(json& j, const HalfPlane& h) {
  j = json{{"normal", vec_to_json(h.normal)}, {"offset", h.offset}};
}

void from_json(const json& j, HalfPlane& h) {
  h.normal = vec_from_json(j.at("normal"));
  j.at("offset").get_to(h.offset);
}

void to_json(json& j, const Environment& e) {
  j = json{{"name", e.name},
           {"scale", e.scale},
           {"spheres", e.spheres},
           {"half_planes", e.half_planes}};
}

void from_json(const json& j, Environment& e) {
  e.name = j.value("name", "");
  e.scale = j.value("scale", 1.0);
  e.spheres.clear();
  if (j.contains("spheres")) e.spheres = j.at("spheres").get<std::vector<Sphere>>();
  e.half_planes.clear();
  if (j.contains("half_planes"))
    e.half_planes = j.at("half_planes").get<std::vector<HalfPlane>>();
}

void to_json(json& j, const Query& q) {
  j = json{{"seed", q.seed}, {"ground_truth", q.ground_truth}, {"goal", q.goal}};
}

void from_json(const json& j, Query& q) {
  q.seed = j.value("seed", static_cast<std::uint64_t>(0));
  q.ground_truth = j.at("ground_truth").get<Configuration>();
  q.goal = j.at("goal").get<GoalSpec>();
}

void to_json(json& j, const ValidityReport& v) {
  j = json{{"ee_position_error", v.ee_position_error},
           {"ee_rot_z_error_deg", v.ee_rot_z_error_deg},
           {"ee_rot_y_error_deg", v.ee_rot_y_error_deg},
           {"segment_lengths_valid", v.segment_lengths_valid},
           {"obstacle_clearance_ok", v.obstacle_clearance_ok},
           {"self_collision_ok", v.self_collision_ok},
           {"overall_valid", v.overall_valid}};
}

void from_json(const json& j, ValidityReport& v) {
  v.ee_position_error = j.value("ee_position_error", 0.0);
  v.ee_rot_z_error_deg =
      j.at("ee_rot_z_error_deg").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                           : j.at("ee_rot_z_error_deg").get<double>();
  v.ee_rot_y_error_deg =
      j.at("ee_rot_y_error_deg").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                           : j.at("ee_rot_y_error_deg").get<double>();
  v.segment_lengths_valid = j.at("segment_lengths_valid").get<std::vector<bool>>();
  v.obstacle_clearance_ok = j.value("obstacle_clearance_ok", true);
  v.self_collision_ok = j.value("self_collision_ok", true);
  v.overall_valid = j.value("overall_valid", false);
}

void to_json(json& j, const IKResult& r) {
  j = json{{"status", to_string(r.status)},
           {"configuration", r.configuration},
           {"points", mat_to_json(r.points)},
           {"scalars", vec_to_json(r.scalars)},
           {"outer_iterations", r.outer_iterations},
           {"lambda_final", r.lambda_final},
           {"lambda_trace", r.lambda_trace},
           {"setup_time_s", r.setup_time_s},
           {"solver_time_s", r.solver_time_s},
           {"validity", r.validity},
           {"warnings", r.warnings}};
  if (!r.intermediate.empty()) j["intermediate"] = r.intermediate;
}

void to_json(json& j, const QueryRecord& r) {
  j = json{{"env", r.env_name},
           {"n", r.n},
           {"mode", to_string(r.mode)},
           {"with_obs", r.with_obs},
           {"seed", r.seed},
           {"query_index", r.query_index},
           {"status", to_string(r.status)},
           {"converged", r.converged},
           {"valid", r.valid},
           {"outer_iterations", r.outer_iterations},
           {"lambda_final", r.lambda_final},
           {"solve_time_s", r.solve_time_s},
           {"setup_time_s", r.setup_time_s},
           {"pos_err", r.pos_err},
           {"rot_z_err_deg", r.rot_z_err_deg},
           {"rot_y_err_deg", r.rot_y_err_deg}};
  if (!r.error.empty()) j["error"] = r.error;
}

void to_json(json& j, const SolverOptions& o) {
  j = json{{"eps_primal", o.eps_primal},
           {"eps_dual", o.eps_dual},
           {"max_inner_iterations", o.max_inner_iterations},
           {"over_relaxation", o.over_relaxation},
           {"penalty", o.penalty},
           {"adaptive_penalty", o.adaptive_penalty},
           {"accept_warm_start", o.accept_warm_start},
           {"acceleration_window", o.acceleration_window},
           {"check_interval", o.check_interval}};
}

void from_json(const json& j, SolverOptions& o) {
  o.eps_primal = j.value("eps_primal", o.eps_primal);
  o.eps_dual = j.value("eps_dual", o.eps_dual);
  o.max_inner_iterations = j.value("max_inner_iterations", o.max_inner_iterations);
  o.over_relaxation = j.value("over_relaxation", o.over_relaxation);
  o.penalty = j.value("penalty", o.penalty);
  o.adaptive_penalty = j.value("adaptive_penalty", o.adaptive_penalty);
  o.accept_warm_start = j.value("accept_warm_start", o.accept_warm_start);
  o.acceleration_window = j.value("acceleration_window", o.acceleration_window);
  o.check_interval = j.value("check_interval", o.check_interval);
}

void to_json(json& j, const BuildOptions& o) {
  const char* chord = o.chord_upper == BuildOptions::ChordUpper::Auto
                          ? "auto"
                          : (o.chord_upper == BuildOptions::ChordUpper::On ? "on" : "off");
  j = json{{"nonneg_scalars", o.nonneg_scalars},
           {"chord_upper", chord},
           {"use_half_planes", o.use_half_planes},
           {"floor_half_plane", o.floor_half_plane}};
}

void from_json(const json& j, BuildOptions& o) {
  o.nonneg_scalars = j.value("nonneg_scalars", o.nonneg_scalars);
  const std::string chord = j.value("chord_upper", std::string("auto"));
  if (chord == "auto")
    o.chord_upper = BuildOptions::ChordUpper::Auto;
  else if (chord == "on")
    o.chord_upper = BuildOptions::ChordUpper::On;
  else if (chord == "off")
    o.chord_upper = BuildOptions::ChordUpper::Off;
  else
    throw std::invalid_argument("chord_upper must be auto/on/off");
  o.use_half_planes = j.value("use_half_planes", o.use_half_planes);
  o.floor_half_plane = j.value("floor_half_plane", o.floor_half_plane);
}

void to_json(json& j, const DriverOptions& o) {
  j = json{{"max_outer_iterations", o.max_outer_iterations},
           {"rank_eps", o.rank_eps},
           {"inexact_eps_cap", o.inexact_eps_cap},
           {"record_trace", o.record_trace},
           {"init", o.init == DriverOptions::Init::StraightWarmStart ? "straight" : "zero_cost"},
           {"solver", o.solver},
           {"build", o.build}};
}

void from_json(const json& j, DriverOptions& o) {
  o.max_outer_iterations = j.value("max_outer_iterations", o.max_outer_iterations);
  o.rank_eps = j.value("rank_eps", o.rank_eps);
  o.inexact_eps_cap = j.value("inexact_eps_cap", o.inexact_eps_cap);
  o.record_trace = j.value("record_trace", o.record_trace);
  const std::string init = j.value("init", std::string("straight"));
  if (init == "straight")
    o.init = DriverOptions::Init::StraightWarmStart;
  else if (init == "zero_cost")
    o.init = DriverOptions::Init::ZeroCost;
  else
    throw std::invalid_argument("init must be straight/zero_cost");
  if (j.contains("solver")) j.at("solver").get_to(o.solver);
  if (j.contains("build")) j.at("build").get_to(o.build);
}

void to_json(json& j, const SuiteSpec& s) {
  json modes = json::array();
  for (GoalMode m : s.modes) modes.push_back(to_string(m));
  j = json{{"environments", s.environments},
           {"n_list", s.n_list},
           {"modes", modes},
           {"batch", s.batch},
           {"seed", s.seed},
           {"d", s.d},
           {"scale", s.scale},
           {"threads", s.threads},
           {"driver", s.driver}};
}

void from_json(const json& j, SuiteSpec& s) {
  s.environments = j.at("environments").get<std::vector<std::string>>();
  s.n_list = j.at("n_list").get<std::vector<int>>();
  s.modes.clear();
  for (const auto& m : j.at("modes")) s.modes.push_back(goal_mode_from_string(m.get<std::string>()));
  s.batch = j.value("batch", 25);
  s.seed = j.value("seed", static_cast<std::uint64_t>(0));
  s.d = j.value("d", 3);
  s.scale = j.value("scale", 0.0);
  s.threads = j.value("threads", 0);
  if (j.contains("driver")) j.at("driver").get_to(s.driver);
}

namespace {

json constraint_to_json(const QuadraticConstraint& c) {
  json terms;
  for (const auto& t : c.quad) terms["quad"].push_back(json::array({t.i, t.j, t.coeff}));
  for (const auto& t : c.bilinear)
    terms["bilinear"].push_back(json{{"s", t.s}, {"i", t.i}, {"g", vec_to_json(t.g)}});
  for (const auto& t : c.linear_points)
    terms["linear_points"].push_back(json{{"i", t.i}, {"v", vec_to_json(t.v)}});
  for (const auto& t : c.linear_scalars)
    terms["linear_scalars"].push_back(json::array({t.s, t.coeff}));
  const char* sense = c.sense == Sense::Eq ? "=" : (c.sense == Sense::Le ? "<=" : ">=");
  return json{{"tag", to_string(c.tag)},
              {"segment", c.segment},
              {"sense", sense},
              {"rhs", c.rhs},
              {"terms", terms}};
}

}  // namespace

json problem_to_json(const DGProblem& problem) {
  json j;
  j["n"] = problem.n;
  j["d"] = problem.d;
  j["points"] = problem.point_names();
  j["scalars"] = problem.scalar_names();
  j["anchors"] = json{{"b", vec_to_json(problem.anchors.b)},
                      {"b_prime", vec_to_json(problem.anchors.b_prime)},
                      {"w", vec_to_json(problem.anchors.w)}};
  if (problem.anchors.w_prime) j["anchors"]["w_prime"] = vec_to_json(*problem.anchors.w_prime);
  if (problem.anchors.w_dprime) j["anchors"]["w_dprime"] = vec_to_json(*problem.anchors.w_dprime);
  for (const auto& c : problem.eq_constraints) j["eq"].push_back(constraint_to_json(c));
  for (const auto& c : problem.ineq_constraints) j["ineq"].push_back(constraint_to_json(c));
  j["warnings"] = problem.warnings;
  return j;
}

json result_file_json(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                      const IKResult& result) {
  return json{{"robot", robot}, {"goal", goal}, {"env", env}, {"result", result}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ccik
