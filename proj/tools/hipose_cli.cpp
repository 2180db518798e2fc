// hipose: encode meshes, generate synthetic scenes, solve poses, run benchmarks.
//
// Exit codes: 0 success, 1 usage or parse error, 2 invariant violation
// (degenerate mesh, bad encoding file, out-of-range parameter), 3 solver failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "hipose/bench.hpp"
#include "hipose/encoding.hpp"
#include "hipose/error.hpp"
#include "hipose/kernels.hpp"
#include "hipose/mesh.hpp"
#include "hipose/solver.hpp"

namespace fs = std::filesystem;
using namespace hipose;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvariant = 2, kSolver = 3 };

struct Global {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string log_level = "info";
  std::string output_dir;
};

Global g;

bool verbose() { return g.log_level == "info" || g.log_level == "debug"; }

void info(const std::string& msg) {
  if (verbose()) std::cerr << msg << '\n';
}

fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (!g.output_dir.empty() && path.is_relative()) path = fs::path(g.output_dir) / path;
  return path;
}

void check_writable(const fs::path& path) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw ParseError("output directory does not exist: " + dir.string());
}

int resolved_threads() {
  if (g.threads > 0) return g.threads;
  const char* env = std::getenv("HIPOSE_THREADS");
  if (env && *env) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw ParseError("HIPOSE_THREADS must be a positive integer");
  }
  return 1;
}

TriangleMesh mesh_from_spec(const std::string& spec) {
  if (spec == "builtin:box") return default_bench_mesh();
  if (spec == "builtin:cube") return make_box(100.0, 100.0, 100.0);
  if (spec == "builtin:sphere") return make_icosphere(60.0, 3);
  return load_mesh(spec);
}

std::string pose_line(const Pose& p) {
  std::ostringstream s;
  s << std::setprecision(9) << "R=[";
  for (int i = 0; i < 3; ++i) {
    s << (i ? "; " : "") << p.R(i, 0) << ' ' << p.R(i, 1) << ' ' << p.R(i, 2);
  }
  s << "] t=[" << p.t.x() << ' ' << p.t.y() << ' ' << p.t.z() << ']';
  return s.str();
}

// ---- encode ----------------------------------------------------------------

struct EncodeArgs {
  std::string mesh;
  int bits = 16;
  std::optional<std::uint64_t> seed;
  std::string out = "model.hsenc";
};

int cmd_encode(const EncodeArgs& a) {
  const fs::path out = output_path(a.out);
  check_writable(out);
  const auto seed = a.seed.value_or(g.seed);
  const auto start = std::chrono::steady_clock::now();
  const TriangleMesh mesh = mesh_from_spec(a.mesh);
  const TriangleMesh dense = upsample_mesh(mesh, a.bits, seed);
  const SurfaceEncoding enc = build_encoding(dense, a.bits, seed);
  save_encoding(enc, out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "d=" << enc.bits() << " N=" << enc.size() << " diameter_mm=" << std::setprecision(9)
            << mesh.diameter() << " build_s=" << std::setprecision(4) << secs << " out=" << out.string()
            << '\n';
  return kOk;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
  std::string encoding;
  std::string out = "scene.jsonl";
  std::string truth = "scene_truth.json";
  std::string config;
  std::optional<std::uint64_t> seed;
  bool noise_free = false;
  std::optional<double> outliers, sigma_xyz, drop;
  std::optional<std::size_t> points;
};

int cmd_generate(const GenerateArgs& a) {
  const fs::path out = output_path(a.out), truth = output_path(a.truth);
  check_writable(out);
  check_writable(truth);
  const SurfaceEncoding enc = load_encoding(a.encoding);
  ScenarioConfig cfg;
  if (!a.config.empty()) cfg = load_bench_settings(a.config).config.scenario;
  if (a.noise_free) cfg = ScenarioConfig::noise_free(0, cfg.n_points);
  if (a.outliers) cfg.outlier_fraction = *a.outliers;
  if (a.sigma_xyz) cfg.sigma_xyz = *a.sigma_xyz;
  if (a.drop) cfg.drop_fraction = *a.drop;
  if (a.points) cfg.n_points = *a.points;
  cfg.seed = a.seed.value_or(g.seed);
  const Scenario sc = generate_scenario(enc, compute_diameter(enc.vertices()), cfg);
  write_correspondences(out, sc.corrs);
  write_truth(truth, sc);
  std::cout << "points=" << sc.corrs.size() << " seed=" << sc.seed << " out=" << out.string()
            << " truth=" << truth.string() << '\n';
  return kOk;
}

// ---- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string encoding;
  std::string corrs;
  std::string config;
  std::string report = "report.json";
  std::string truth;
  std::string solver = "hierarchical";
  std::optional<std::uint64_t> seed;
  std::optional<int> m_default;
  std::optional<double> tau, beta;
};

int cmd_solve(const SolveArgs& a) {
  const fs::path report_path = output_path(a.report);
  check_writable(report_path);
  SolverSettings s;
  s.solver = a.solver;
  s.ransac.seed = a.seed.value_or(g.seed);
  if (a.m_default) s.hierarchical.m_default = *a.m_default;
  if (a.tau) s.hierarchical.tau = *a.tau;
  if (a.beta) s.hierarchical.beta = *a.beta;
  if (!a.config.empty()) {
    // The config file replaces every flag value.
    s = load_solver_settings(a.config);
  }

  const SurfaceEncoding enc = load_encoding(a.encoding);
  const auto corrs = read_correspondences(a.corrs);
  info("loaded " + std::to_string(corrs.size()) + " correspondences, d=" + std::to_string(enc.bits()) +
       ", kernels=" + std::string(kernels::isa_name(kernels::active_isa())));

  SolveReport report;
  try {
    if (s.solver == "plain") {
      report = plain_kabsch_solve(enc, corrs);
    } else if (s.solver == "ransac") {
      report = ransac_kabsch_solve(enc, corrs, s.ransac);
    } else if (s.solver == "hierarchical") {
      report = hierarchical_solve(enc, corrs, s.hierarchical);
    } else {
      throw ParseError("unknown solver '" + s.solver + "'");
    }
  } catch (const SolverError& e) {
    std::cerr << "solver failure at iteration " << e.iteration() << ": " << e.what() << '\n';
    return kSolver;
  } catch (const DegenerateError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }

  nlohmann::json doc = nlohmann::json::parse(report_to_json(report));
  if (!a.truth.empty()) {
    const Pose gt = read_truth(a.truth);
    doc["truth"] = {{"rotation_error_rad", rotation_distance(report.pose.R, gt.R)},
                    {"translation_error_mm", (report.pose.t - gt.t).norm()}};
  }
  std::ofstream out(report_path);
  if (!out) throw Error("cannot write " + report_path.string());
  out << doc.dump(2) << '\n';

  std::cout << "solver=" << report.solver << " " << pose_line(report.pose) << '\n';
  for (const IterationRecord& rec : report.iterations) {
    std::cout << "  iteration " << rec.iteration << ": inliers=" << rec.inliers;
    if (rec.iteration > 0) {
      std::cout << " median_l=" << std::setprecision(6) << rec.median_distance << " flagged=" << rec.flagged.size();
    }
    std::cout << '\n';
  }
  std::cout << "final_inliers=" << report.final_inliers.size() << " kabsch_solves=" << report.kabsch_solves << '\n';
  if (doc.contains("truth")) {
    std::cout << "rotation_error_rad=" << std::setprecision(6) << doc["truth"]["rotation_error_rad"].get<double>()
              << " translation_error_mm=" << doc["truth"]["translation_error_mm"].get<double>() << '\n';
  }
  return kOk;
}

// ---- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string preset;
  std::string mesh;
  std::string encoding;
  std::optional<int> bits;
  std::optional<int> seeds;
  std::string out;
  bool no_timing = false;
};

int cmd_bench(const BenchArgs& a) {
  std::optional<fs::path> out;
  if (!a.out.empty()) {
    out = output_path(a.out);
    check_writable(*out);
  }
  BenchSettings settings;
  if (!a.config.empty()) settings = load_bench_settings(a.config);
  std::string preset_name = a.preset;
  if (preset_name.empty() && settings.preset) preset_name = *settings.preset;
  if (a.config.empty() && preset_name.empty()) preset_name = "table3";
  if (!a.mesh.empty()) settings.mesh = a.mesh;
  if (a.bits) settings.bits = *a.bits;
  const int threads = a.config.empty() || g.threads > 0 ? resolved_threads() : settings.config.threads;

  const auto start = std::chrono::steady_clock::now();
  std::optional<BenchModel> model;
  if (!a.encoding.empty()) {
    SurfaceEncoding enc = load_encoding(a.encoding);
    const double diameter = compute_diameter(enc.vertices());
    model.emplace(std::move(enc), diameter);
  } else {
    model.emplace(make_bench_model(mesh_from_spec(settings.mesh), settings.bits, settings.encoding_seed));
  }
  info("model ready: N=" + std::to_string(model->encoding().size()) + ", kernels=" +
       std::string(kernels::isa_name(kernels::active_isa())));

  Preset preset;
  if (!preset_name.empty()) {
    preset = make_preset(preset_name, a.seeds.value_or(a.config.empty() ? 100 : settings.config.n_seeds));
  } else {
    preset.name = "custom";
    BenchConfig cfg = settings.config;
    if (a.seeds) cfg.n_seeds = *a.seeds;
    preset.variants.push_back({"custom", cfg});
  }
  for (auto& v : preset.variants) {
    if (preset_name.empty() || a.seeds) continue;
    v.config.first_seed = settings.config.first_seed;
  }

  const auto rows = run_preset(*model, preset, threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  if (preset.name == "fig4") {
    write_fig4_csv(csv, rows);
  } else if (preset.name == "table2") {
    write_table2_csv(csv, rows);
  } else {
    write_csv(csv, rows, !a.no_timing);
  }
  if (out) {
    std::ofstream f(*out);
    if (!f) throw Error("cannot write " + out->string());
    f << csv.str();
  } else {
    std::cout << csv.str();
  }

  const auto summary = summarize(rows, model->diameter());
  write_summary(std::cout, summary);
  if (preset.name == "table2") {
    const auto med = median_precision_by_step(rows);
    std::cout << "median precision by step:";
    for (std::size_t s = 0; s < med.size(); ++s) {
      std::cout << ' ' << (s + 1 == med.size() ? std::string("final") : std::to_string(s + 1)) << '='
                << std::fixed << std::setprecision(2) << 100.0 * med[s];
    }
    std::cout << '\n';
  }
  info("bench '" + preset.name + "' finished in " + std::to_string(secs) + " s with " +
       std::to_string(threads) + " thread(s)");

  const bool all_failed = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return !r.ok; });
  return all_failed ? kSolver : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical binary surface encoding and coarse-to-fine pose solver"};
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "Default seed for subcommands that take one");
  app.add_option("--threads", g.threads, "Worker threads for bench (default: HIPOSE_THREADS or 1)")
      ->check(CLI::Range(1, 256));
  app.add_option("--log-level", g.log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
  app.add_option("--output-dir", g.output_dir, "Directory for relative output paths")
      ->check(CLI::ExistingDirectory);

  EncodeArgs ea;
  auto* enc = app.add_subcommand("encode", "Upsample a mesh to 2^bits vertices and build its encoding");
  enc->add_option("--mesh", ea.mesh, "PLY/OBJ path or builtin:box|cube|sphere")->required();
  enc->add_option("--bits", ea.bits, "Code length d")->check(CLI::Range(1, kMaxEncodingBits));
  enc->add_option("--seed", ea.seed, "Sampling and k-means seed");
  enc->add_option("--out", ea.out, "Output .hsenc file");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a synthetic correspondence scene");
  gen->add_option("--encoding", ga.encoding, ".hsenc file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", ga.out, "Correspondence JSON-lines output");
  gen->add_option("--truth", ga.truth, "Ground-truth pose JSON output");
  gen->add_option("--config", ga.config, "Bench TOML whose [scenario] table is used")->check(CLI::ExistingFile);
  gen->add_option("--seed", ga.seed, "Scenario seed");
  gen->add_flag("--noise-free", ga.noise_free, "Exact codes and points, no outliers");
  gen->add_option("--outliers", ga.outliers, "Gross outlier fraction")->check(CLI::Range(0.0, 0.999));
  gen->add_option("--sigma-xyz", ga.sigma_xyz, "Point noise (mm)")->check(CLI::NonNegativeNumber);
  gen->add_option("--drop", ga.drop, "Fraction of points to drop")->check(CLI::Range(0.0, 0.999));
  gen->add_option("--points", ga.points, "Number of sampled points")->check(CLI::PositiveNumber);

  SolveArgs sa;
  auto* sol = app.add_subcommand("solve", "Estimate a pose from a correspondence file");
  sol->add_option("--encoding", sa.encoding, ".hsenc file")->required()->check(CLI::ExistingFile);
  sol->add_option("--corrs", sa.corrs, "Correspondence JSON-lines")->required()->check(CLI::ExistingFile);
  sol->add_option("--config", sa.config, "Solver TOML ([solver], [ransac]); overrides flags")
      ->check(CLI::ExistingFile);
  sol->add_option("--report", sa.report, "Report JSON output");
  sol->add_option("--truth", sa.truth, "Ground-truth pose JSON; adds errors to the report")
      ->check(CLI::ExistingFile);
  sol->add_option("--solver", sa.solver, "hierarchical, plain or ransac")
      ->check(CLI::IsMember({"hierarchical", "plain", "ransac"}));
  sol->add_option("--seed", sa.seed, "RANSAC seed");
  sol->add_option("--m-default", sa.m_default, "Default initial bit")->check(CLI::PositiveNumber);
  sol->add_option("--tau", sa.tau, "Trust margin around 0.5");
  sol->add_option("--beta", sa.beta, "Outlier threshold multiplier");

  BenchArgs ba;
  auto* ben = app.add_subcommand("bench", "Run solvers over seeded synthetic scenes");
  ben->add_option("--config", ba.config, "Bench TOML")->check(CLI::ExistingFile);
  ben->add_option("--preset", ba.preset, "table3, table2, fig4 or noise")
      ->check(CLI::IsMember({"table3", "table2", "fig4", "noise"}));
  ben->add_option("--mesh", ba.mesh, "PLY/OBJ path or builtin:box|cube|sphere");
  ben->add_option("--encoding", ba.encoding, "Use a prebuilt .hsenc instead of --mesh")->check(CLI::ExistingFile);
  ben->add_option("--bits", ba.bits, "Code length d when building from a mesh")
      ->check(CLI::Range(1, kMaxEncodingBits));
  ben->add_option("--seeds", ba.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  ben->add_option("--out", ba.out, "CSV output (default: stdout)");
  ben->add_flag("--no-timing", ba.no_timing, "Write 0 in the time_ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*enc) return cmd_encode(ea);
    if (*gen) return cmd_generate(ga);
    if (*sol) return cmd_solve(sa);
    if (*ben) return cmd_bench(ba);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariant;
  }
  return kUsage;
}
