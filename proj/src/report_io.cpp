#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hipose/error.hpp"
#include "hipose/solver.hpp"

namespace hipose {

using nlohmann::json;

namespace {

json pose_json(const Pose& p) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) r.push_back({p.R(i, 0), p.R(i, 1), p.R(i, 2)});
  return {{"R", r}, {"t", {p.t.x(), p.t.y(), p.t.z()}}};
}

Pose pose_from(const json& j) {
  Pose p;
  const auto& r = j.at("R");
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) p.R(i, k) = r.at(i).at(k).get<double>();
  }
  const auto& t = j.at("t");
  p.t = Vec3(t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>());
  return p;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string report_to_json(const SolveReport& report, int indent) {
  json iters = json::array();
  for (const IterationRecord& rec : report.iterations) {
    iters.push_back({{"iteration", rec.iteration},
                     {"inliers", rec.inliers},
                     {"median_distance", number_or_null(rec.median_distance)},
                     {"threshold", number_or_null(rec.threshold)},
                     {"flagged", rec.flagged},
                     {"pose", pose_json(rec.pose)}});
  }
  json out = {{"solver", report.solver},
              {"pose", pose_json(report.pose)},
              {"kabsch_solves", report.kabsch_solves},
              {"iterations", iters},
              {"final_inliers", report.final_inliers}};
  return out.dump(indent);
}

SolveReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SolveReport r;
    r.solver = j.at("solver").get<std::string>();
    r.pose = pose_from(j.at("pose"));
    r.kabsch_solves = j.at("kabsch_solves").get<std::size_t>();
    for (const json& it : j.at("iterations")) {
      IterationRecord rec;
      rec.iteration = it.at("iteration").get<int>();
      rec.inliers = it.at("inliers").get<std::size_t>();
      rec.median_distance = number_from(it.at("median_distance"));
      rec.threshold = number_from(it.at("threshold"));
      rec.flagged = it.at("flagged").get<std::vector<std::uint32_t>>();
      rec.pose = pose_from(it.at("pose"));
      r.iterations.push_back(std::move(rec));
    }
    r.final_inliers = j.at("final_inliers").get<std::vector<std::uint32_t>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed solve report: ") + e.what());
  }
}

}  // namespace hipose
