#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hipose/correspondence.hpp"
#include "hipose/encoding.hpp"
#include "hipose/kdtree.hpp"
#include "hipose/mesh.hpp"
#include "hipose/solver.hpp"

namespace hipose {

/// Linear ramp over bit index k in [0, d): value(k) = first + (last - first) * k / (d - 1).
struct BitRamp {
  double first = 0.0;
  double last = 0.0;

  double at(int k, int bits) const {
    return bits <= 1 ? first : first + (last - first) * k / static_cast<double>(bits - 1);
  }
};

/// Parameters of the synthetic stand-in for network predictions.
struct ScenarioConfig {
  std::size_t n_points = 2730;
  /// Translations are uniform in a cube of this edge (mm) centered at (0, 0, depth).
  double translation_box = 400.0;
  double depth = 1000.0;
  /// Per-bit flip probability; must be non-decreasing in the bit index.
  BitRamp flip{0.01, 0.30};
  /// Per-bit standard deviation of the pull toward 0.5 applied to every soft value.
  BitRamp code_jitter{0.05, 0.25};
  double sigma_xyz = 0.0;
  double outlier_fraction = 0.0;
  double drop_fraction = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
  /// Exact codes, exact points, no outliers.
  static ScenarioConfig noise_free(std::uint64_t seed, std::size_t n_points = 2730);
};

struct Scenario {
  Pose truth;
  std::vector<Correspondence> corrs;
  std::uint64_t seed = 0;
};

/// Samples a pose, n_points encoded vertices, their noisy camera points and
/// corrupted soft codes, replaces outlier_fraction of them by gross outliers and
/// finally drops drop_fraction of the points. Independent RNG streams per stage,
/// so e.g. enabling point noise leaves the pose and the codes unchanged.
Scenario generate_scenario(const SurfaceEncoding& enc, double diameter, const ScenarioConfig& cfg);

/// Sidecar ground truth: {"R": [[...]], "t": [...], "seed": n}.
void write_truth(const std::filesystem::path& path, const Scenario& scenario);
Pose read_truth(const std::filesystem::path& path);

// ---- metrics -----------------------------------------------------------------

/// Mean over model vertices of |T_est v - T_gt v|.
double add_error(const Pose& est, const Pose& gt, kernels::PointsView model);
/// Mean over model vertices of the distance from T_est v to the closest T_gt w.
/// `tree` indexes the same model vertices (in the model frame).
double adds_error(const Pose& est, const Pose& gt, std::span<const Vec3> model, const KdTree& tree);
/// Strict: success iff error < 0.1 * diameter.
bool add_success(double error, double diameter);

/// Area under the recall-vs-threshold curve on [0, max_threshold], normalized to [0, 1].
double auc(std::span<const double> errors, double max_threshold = 100.0);
/// One error's share of auc(): max(0, 1 - e / max_threshold).
double auc_contribution(double error, double max_threshold = 100.0);

/// Fraction of retained correspondences whose fully decoded model point lies
/// within `threshold` mm of the true model point, for each solve in the report
/// (initial, every pruning iteration, then the final solve). Gross outliers count
/// as false. Throws InvalidArgument if no correspondence carries ground truth.
std::vector<double> outlier_precision(const SolveReport& report, const SurfaceEncoding& enc,
                                      std::span<const Correspondence> corrs,
                                      double threshold = 10.0);

// ---- benchmark ---------------------------------------------------------------

enum class SolverKind { plain, ransac, hierarchical };

struct SolverSpec {
  std::string label;
  SolverKind kind = SolverKind::hierarchical;
  SolverConfig hierarchical;
  RansacParams ransac;
};

SolverSpec make_solver_spec(std::string_view name);

struct BenchConfig {
  ScenarioConfig scenario;
  std::vector<SolverSpec> solvers;
  int n_seeds = 100;
  std::uint64_t first_seed = 0;
  int threads = 1;
  /// Use ADD-S instead of ADD for the AUC column.
  bool symmetric = false;
  /// Compute outlier precision for hierarchical rows.
  bool precision = false;
};

struct BenchRow {
  std::string solver;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double add = 0.0;    ///< ADD error (mm); +inf on failure
  double add_s = 0.0;  ///< ADD-S error (mm); +inf on failure
  double auc = 0.0;    ///< AUC contribution of the ADD(-S) error
  double time_ms = 0.0;
  int iterations = 0;
  std::size_t final_inliers = 0;
  std::vector<double> precision;
};

/// Shared, read-only inputs for a benchmark: the encoding, the object diameter
/// and a kd-tree over the encoded vertices for ADD-S.
class BenchModel {
 public:
  BenchModel(SurfaceEncoding enc, double diameter);

  const SurfaceEncoding& encoding() const { return enc_; }
  double diameter() const { return diameter_; }
  const KdTree& tree() const { return tree_; }

 private:
  SurfaceEncoding enc_;
  double diameter_;
  KdTree tree_;
};

/// Runs every solver on every seed's scenario (paired). Rows are ordered by seed,
/// then by solver, independent of `threads`. Solver failures become failed rows.
std::vector<BenchRow> run_benchmark(const BenchModel& model, const BenchConfig& cfg);

struct SolverSummary {
  std::string solver;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double add_recall = 0.0;   ///< fraction in [0, 1]
  double adds_recall = 0.0;  ///< fraction in [0, 1]
  double auc = 0.0;
  double median_add = 0.0;
  double mean_time_ms = 0.0;
};

/// Per-solver aggregates in first-appearance order.
std::vector<SolverSummary> summarize(std::span<const BenchRow> rows, double diameter);

/// CSV header: solver,seed,add,add_s,auc,time_ms,iterations,final_inliers.
/// With `timing == false` the time column is written as 0 so output is reproducible.
void write_csv(std::ostream& out, std::span<const BenchRow> rows, bool timing = true);
void write_summary(std::ostream& out, std::span<const SolverSummary> summary);

/// Default benchmark object: a 150 x 100 x 60 mm box.
TriangleMesh default_bench_mesh();
/// Upsamples to 2^bits and builds the encoding.
BenchModel make_bench_model(const TriangleMesh& mesh, int bits, std::uint64_t encoding_seed);

// ---- presets -------------------------------------------------------------------

/// Named ablation setups: table3, table2, fig4, noise.
struct Preset {
  std::string name;
  /// One entry per scenario variant; rows of variant v get "@<label>" appended
  /// to the solver label when there is more than one variant.
  struct Variant {
    std::string label;
    BenchConfig config;
  };
  std::vector<Variant> variants;
};

Preset make_preset(std::string_view name, int n_seeds = 100);
/// Runs every variant and concatenates the rows.
std::vector<BenchRow> run_preset(const BenchModel& model, const Preset& preset, int threads);

/// Wide m_default sweep table: one column per bit (header "m5,...,m16"), one row
/// per seed holding the ADD error, failed runs as inf.
void write_fig4_csv(std::ostream& out, std::span<const BenchRow> rows);
/// Per-iteration precision table: seed,step,precision (step "final" for the last).
void write_table2_csv(std::ostream& out, std::span<const BenchRow> rows);
/// Median over seeds of the precision at each step.
std::vector<double> median_precision_by_step(std::span<const BenchRow> rows);

/// Bench settings from TOML: [bench], [scenario], [solver], [ransac] tables.
struct BenchSettings {
  BenchConfig config;
  std::optional<std::string> preset;
  std::string mesh = "builtin:box";
  int bits = 16;
  std::uint64_t encoding_seed = 0;
};
BenchSettings parse_bench_settings(std::string_view toml_text);
BenchSettings load_bench_settings(const std::filesystem::path& path);

}  // namespace hipose
