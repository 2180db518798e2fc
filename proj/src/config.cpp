// TOML front end for solver and benchmark settings. Unknown keys are errors.
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "hipose/bench.hpp"
#include "hipose/error.hpp"
#include "hipose/solver.hpp"

namespace hipose {
namespace {

template <typename T>
T get(const toml::node& node, std::string_view section, std::string_view key) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node.value<double>()) return *v;  // integers convert too
  } else if constexpr (std::is_same_v<T, std::int64_t>) {
    if (node.is_integer()) return *node.value<std::int64_t>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (node.is_boolean()) return *node.value<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (node.is_string()) return *node.value<std::string>();
  }
  throw ParseError("config key " + std::string(section) + "." + std::string(key) + " has the wrong type");
}

int get_int(const toml::node& node, std::string_view section, std::string_view key) {
  return static_cast<int>(get<std::int64_t>(node, section, key));
}

[[noreturn]] void unknown(std::string_view section, std::string_view key) {
  throw ParseError("unknown config key " + std::string(section) + "." + std::string(key));
}

const toml::table& as_table(const toml::node& node, std::string_view name) {
  const toml::table* t = node.as_table();
  if (!t) throw ParseError("[" + std::string(name) + "] must be a table");
  return *t;
}

void apply_solver(const toml::table& t, SolverSettings& s) {
  for (auto&& [k, v] : t) {
    const std::string_view key = k.str();
    if (key == "name") {
      s.solver = get<std::string>(v, "solver", key);
    } else if (key == "m_default") {
      s.hierarchical.m_default = get_int(v, "solver", key);
    } else if (key == "tau") {
      s.hierarchical.tau = get<double>(v, "solver", key);
    } else if (key == "beta") {
      s.hierarchical.beta = get<double>(v, "solver", key);
    } else if (key == "min_inliers") {
      s.hierarchical.min_inliers = get_int(v, "solver", key);
    } else if (key == "inlier_rule") {
      const auto rule = get<std::string>(v, "solver", key);
      if (rule == "median") {
        s.hierarchical.inlier_rule = InlierRule::median;
      } else if (rule == "mean") {
        s.hierarchical.inlier_rule = InlierRule::mean;
      } else {
        throw ParseError("solver.inlier_rule must be \"median\" or \"mean\"");
      }
    } else {
      unknown("solver", key);
    }
  }
}

void apply_ransac(const toml::table& t, RansacParams& r) {
  for (auto&& [k, v] : t) {
    const std::string_view key = k.str();
    if (key == "sample_size") {
      r.sample_size = get_int(v, "ransac", key);
    } else if (key == "iterations") {
      r.iterations = get_int(v, "ransac", key);
    } else if (key == "inlier_distance") {
      r.inlier_distance = get<double>(v, "ransac", key);
    } else if (key == "min_inliers") {
      r.min_inliers = get_int(v, "ransac", key);
    } else if (key == "seed") {
      r.seed = static_cast<std::uint64_t>(get<std::int64_t>(v, "ransac", key));
    } else {
      unknown("ransac", key);
    }
  }
}

void apply_scenario(const toml::table& t, ScenarioConfig& c) {
  for (auto&& [k, v] : t) {
    const std::string_view key = k.str();
    if (key == "n_points") {
      const auto n = get<std::int64_t>(v, "scenario", key);
      if (n < 1) throw ParseError("scenario.n_points must be positive");
      c.n_points = static_cast<std::size_t>(n);
    } else if (key == "translation_box") {
      c.translation_box = get<double>(v, "scenario", key);
    } else if (key == "depth") {
      c.depth = get<double>(v, "scenario", key);
    } else if (key == "flip_first") {
      c.flip.first = get<double>(v, "scenario", key);
    } else if (key == "flip_last") {
      c.flip.last = get<double>(v, "scenario", key);
    } else if (key == "jitter_first") {
      c.code_jitter.first = get<double>(v, "scenario", key);
    } else if (key == "jitter_last") {
      c.code_jitter.last = get<double>(v, "scenario", key);
    } else if (key == "sigma_xyz") {
      c.sigma_xyz = get<double>(v, "scenario", key);
    } else if (key == "outlier_fraction") {
      c.outlier_fraction = get<double>(v, "scenario", key);
    } else if (key == "drop_fraction") {
      c.drop_fraction = get<double>(v, "scenario", key);
    } else {
      unknown("scenario", key);
    }
  }
}

toml::table parse_doc(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML: " << e.description() << " at line " << e.source().begin.line;
    throw ParseError(msg.str());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_solver_name(const std::string& name) {
  if (name != "hierarchical" && name != "plain" && name != "ransac") {
    throw ParseError("solver name must be hierarchical, plain or ransac, got '" + name + "'");
  }
}

}  // namespace

SolverSettings parse_solver_settings(std::string_view toml_text) {
  const toml::table doc = parse_doc(toml_text);
  SolverSettings s;
  for (auto&& [key, node] : doc) {
    if (key == "solver") {
      apply_solver(as_table(node, "solver"), s);
    } else if (key == "ransac") {
      apply_ransac(as_table(node, "ransac"), s.ransac);
    } else {
      throw ParseError("unknown config section '" + std::string(key.str()) + "'");
    }
  }
  check_solver_name(s.solver);
  return s;
}

SolverSettings load_solver_settings(const std::filesystem::path& path) {
  return parse_solver_settings(slurp(path));
}

BenchSettings parse_bench_settings(std::string_view toml_text) {
  const toml::table doc = parse_doc(toml_text);
  BenchSettings out;
  SolverSettings solver;
  std::vector<std::string> names = {"plain", "ransac", "hierarchical"};
  for (auto&& [key, node] : doc) {
    if (key == "bench") {
      for (auto&& [k, v] : as_table(node, "bench")) {
        const std::string_view bk = k.str();
        if (bk == "preset") {
          out.preset = get<std::string>(v, "bench", bk);
        } else if (bk == "seeds") {
          out.config.n_seeds = get_int(v, "bench", bk);
        } else if (bk == "first_seed") {
          out.config.first_seed = static_cast<std::uint64_t>(get<std::int64_t>(v, "bench", bk));
        } else if (bk == "threads") {
          out.config.threads = get_int(v, "bench", bk);
        } else if (bk == "symmetric") {
          out.config.symmetric = get<bool>(v, "bench", bk);
        } else if (bk == "precision") {
          out.config.precision = get<bool>(v, "bench", bk);
        } else if (bk == "mesh") {
          out.mesh = get<std::string>(v, "bench", bk);
        } else if (bk == "bits") {
          out.bits = get_int(v, "bench", bk);
        } else if (bk == "encoding_seed") {
          out.encoding_seed = static_cast<std::uint64_t>(get<std::int64_t>(v, "bench", bk));
        } else if (bk == "solvers") {
          const toml::array* arr = v.as_array();
          if (!arr) throw ParseError("bench.solvers must be an array of strings");
          names.clear();
          for (const toml::node& item : *arr) names.push_back(get<std::string>(item, "bench", "solvers"));
        } else {
          unknown("bench", bk);
        }
      }
    } else if (key == "scenario") {
      apply_scenario(as_table(node, "scenario"), out.config.scenario);
    } else if (key == "solver") {
      apply_solver(as_table(node, "solver"), solver);
    } else if (key == "ransac") {
      apply_ransac(as_table(node, "ransac"), solver.ransac);
    } else {
      throw ParseError("unknown config section '" + std::string(key.str()) + "'");
    }
  }
  if (out.config.n_seeds < 1) throw ParseError("bench.seeds must be positive");
  out.config.scenario.validate();
  for (const std::string& name : names) {
    check_solver_name(name);
    SolverSpec spec = make_solver_spec(name);
    spec.hierarchical = solver.hierarchical;
    spec.ransac = solver.ransac;
    out.config.solvers.push_back(std::move(spec));
  }
  return out;
}

BenchSettings load_bench_settings(const std::filesystem::path& path) {
  return parse_bench_settings(slurp(path));
}

}  // namespace hipose
