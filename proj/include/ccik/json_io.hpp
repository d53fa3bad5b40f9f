#pragma once

#include <json.hpp>

#include <string>

#include "ccik/bench.hpp"
#include "ccik/dg_model.hpp"
#include "ccik/driver.hpp"
#include "ccik/environment.hpp"
#include "ccik/kinematics.hpp"

namespace ccik {

using nlohmann::json;

// Files store SI units and radians; reports convert to degrees where noted.

void to_json(json& j, const Pose& p);
void from_json(const json& j, Pose& p);

void to_json(json& j, const ArcParams& a);
void from_json(const json& j, ArcParams& a);

void to_json(json& j, const RobotModel& r);
void from_json(const json& j, RobotModel& r);

void to_json(json& j, const GoalSpec& g);
void from_json(const json& j, GoalSpec& g);

void to_json(json& j, const Sphere& s);
void from_json(const json& j, Sphere& s);
void to_json(json& j, const HalfPlane& h);
void from_json(const json& j, HalfPlane& h);
void to_json(json& j, const Environment& e);
void from_json(const json& j, Environment& e);

void to_json(json& j, const Query& q);
void from_json(const json& j, Query& q);

void to_json(json& j, const ValidityReport& v);
void from_json(const json& j, ValidityReport& v);

void to_json(json& j, const IKResult& r);

void to_json(json& j, const QueryRecord& r);

void to_json(json& j, const SolverOptions& o);
void from_json(const json& j, SolverOptions& o);
void to_json(json& j, const BuildOptions& o);
void from_json(const json& j, BuildOptions& o);
void to_json(json& j, const DriverOptions& o);
void from_json(const json& j, DriverOptions& o);

void to_json(json& j, const SuiteSpec& s);
void from_json(const json& j, SuiteSpec& s);

/// Debug dump of the assembled constraint list with tags.
json problem_to_json(const DGProblem& problem);

/// Self-contained solve artifact: robot, goal, environment and the result.
json result_file_json(const RobotModel& robot, const GoalSpec& goal, const Environment& env,
                      const IKResult& result);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace ccik
