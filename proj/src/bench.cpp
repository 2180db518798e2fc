#include "hipose/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "hipose/error.hpp"

namespace hipose {
namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SolveReport run_solver(const SolverSpec& spec, const SurfaceEncoding& enc, const Scenario& sc) {
  switch (spec.kind) {
    case SolverKind::plain:
      return plain_kabsch_solve(enc, sc.corrs);
    case SolverKind::ransac: {
      RansacParams params = spec.ransac;
      params.seed = mix_seed(spec.ransac.seed, sc.seed);
      return ransac_kabsch_solve(enc, sc.corrs, params);
    }
    case SolverKind::hierarchical:
      return hierarchical_solve(enc, sc.corrs, spec.hierarchical);
  }
  throw InvalidArgument("unknown solver kind");
}

BenchRow evaluate(const BenchModel& model, const BenchConfig& cfg, const SolverSpec& spec,
                  const Scenario& sc) {
  BenchRow row;
  row.solver = spec.label;
  row.seed = sc.seed;
  const SurfaceEncoding& enc = model.encoding();
  const auto start = std::chrono::steady_clock::now();
  try {
    const SolveReport report = run_solver(spec, enc, sc);
    row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.ok = true;
    row.add = add_error(report.pose, sc.truth, enc.code_ordered_points());
    row.add_s = adds_error(report.pose, sc.truth, enc.vertices(), model.tree());
    row.auc = auc_contribution(cfg.symmetric ? row.add_s : row.add);
    row.iterations = static_cast<int>(report.iterations.size());
    row.final_inliers = report.final_inliers.size();
    if (cfg.precision && spec.kind == SolverKind::hierarchical) {
      row.precision = outlier_precision(report, enc, sc.corrs);
    }
  } catch (const SolverError& e) {
    row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.error = e.what();
    row.iterations = e.iteration();
  } catch (const DegenerateError& e) {
    row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.error = e.what();
  }
  if (!row.ok) {
    row.add = row.add_s = std::numeric_limits<double>::infinity();
    row.auc = 0.0;
  }
  return row;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

BenchModel::BenchModel(SurfaceEncoding enc, double diameter)
    : enc_(std::move(enc)), diameter_(diameter), tree_(enc_.vertices()) {
  if (!(diameter_ > 0.0)) throw InvalidArgument("object diameter must be positive");
}

SolverSpec make_solver_spec(std::string_view name) {
  SolverSpec spec;
  spec.label = std::string(name);
  if (name == "plain") {
    spec.kind = SolverKind::plain;
  } else if (name == "ransac") {
    spec.kind = SolverKind::ransac;
  } else if (name == "hierarchical") {
    spec.kind = SolverKind::hierarchical;
  } else {
    throw InvalidArgument("unknown solver '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<BenchRow> run_benchmark(const BenchModel& model, const BenchConfig& cfg) {
  cfg.scenario.validate();
  if (cfg.n_seeds < 1) throw InvalidArgument("n_seeds must be positive");
  if (cfg.solvers.empty()) throw InvalidArgument("no solvers configured");
  for (const SolverSpec& s : cfg.solvers) {
    if (s.kind == SolverKind::hierarchical) s.hierarchical.validate(model.encoding().bits());
    if (s.kind == SolverKind::ransac) s.ransac.validate();
  }

  const auto n_seeds = static_cast<std::size_t>(cfg.n_seeds);
  const std::size_t n_solvers = cfg.solvers.size();
  std::vector<BenchRow> rows(n_seeds * n_solvers);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < n_seeds; k = next.fetch_add(1)) {
      ScenarioConfig sc_cfg = cfg.scenario;
      sc_cfg.seed = cfg.first_seed + k;
      const Scenario sc = generate_scenario(model.encoding(), model.diameter(), sc_cfg);
      for (std::size_t s = 0; s < n_solvers; ++s) {
        rows[k * n_solvers + s] = evaluate(model, cfg, cfg.solvers[s], sc);
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(cfg.threads, 1, 256));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n_seeds); ++t) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<SolverSummary> summarize(std::span<const BenchRow> rows, double diameter) {
  std::vector<SolverSummary> out;
  std::vector<std::vector<double>> adds;
  for (const BenchRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SolverSummary& s) { return s.solver == r.solver; });
    if (it == out.end()) {
      out.push_back({r.solver});
      adds.emplace_back();
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    ++it->runs;
    if (!r.ok) ++it->failures;
    it->add_recall += add_success(r.add, diameter) ? 1.0 : 0.0;
    it->adds_recall += add_success(r.add_s, diameter) ? 1.0 : 0.0;
    it->auc += r.auc;
    it->mean_time_ms += r.time_ms;
    adds[idx].push_back(r.add);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = static_cast<double>(out[i].runs);
    out[i].add_recall /= n;
    out[i].adds_recall /= n;
    out[i].auc /= n;
    out[i].mean_time_ms /= n;
    auto& v = adds[i];
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    out[i].median_add = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  }
  return out;
}

void write_csv(std::ostream& out, std::span<const BenchRow> rows, bool timing) {
  out << "solver,seed,add,add_s,auc,time_ms,iterations,final_inliers\n";
  for (const BenchRow& r : rows) {
    out << r.solver << ',' << r.seed << ',' << format_double(r.add) << ',' << format_double(r.add_s)
        << ',' << format_double(r.auc) << ',' << (timing ? format_double(r.time_ms) : "0") << ','
        << r.iterations << ',' << r.final_inliers << '\n';
  }
}

void write_summary(std::ostream& out, std::span<const SolverSummary> summary) {
  out << std::left << std::setw(26) << "solver" << std::right << std::setw(6) << "runs"
      << std::setw(7) << "fail" << std::setw(11) << "ADD(%)" << std::setw(11) << "ADD-S(%)"
      << std::setw(9) << "AUC" << std::setw(13) << "medADD(mm)" << std::setw(11) << "ms/solve"
      << '\n';
  out << std::fixed;
  for (const SolverSummary& s : summary) {
    out << std::left << std::setw(26) << s.solver << std::right << std::setw(6) << s.runs
        << std::setw(7) << s.failures << std::setw(11) << std::setprecision(2) << 100.0 * s.add_recall
        << std::setw(11) << 100.0 * s.adds_recall << std::setw(9) << std::setprecision(4) << s.auc
        << std::setw(13) << std::setprecision(3) << s.median_add << std::setw(11)
        << std::setprecision(2) << s.mean_time_ms << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

TriangleMesh default_bench_mesh() { return make_box(150.0, 100.0, 60.0); }

BenchModel make_bench_model(const TriangleMesh& mesh, int bits, std::uint64_t encoding_seed) {
  const TriangleMesh dense = upsample_mesh(mesh, bits, encoding_seed);
  return BenchModel(build_encoding(dense, bits, encoding_seed), mesh.diameter());
}

Preset make_preset(std::string_view name, int n_seeds) {
  Preset p;
  p.name = std::string(name);
  BenchConfig base;
  base.n_seeds = n_seeds;
  base.scenario.outlier_fraction = 0.2;

  if (name == "table3") {
    base.solvers = {make_solver_spec("plain"), make_solver_spec("ransac"), make_solver_spec("hierarchical")};
    p.variants.push_back({"default", base});
  } else if (name == "table2") {
    base.solvers = {make_solver_spec("hierarchical")};
    base.precision = true;
    p.variants.push_back({"default", base});
  } else if (name == "fig4") {
    for (int m = 5; m <= 16; ++m) {
      SolverSpec s = make_solver_spec("hierarchical");
      s.label = "m" + std::to_string(m);
      s.hierarchical.m_default = m;
      base.solvers.push_back(std::move(s));
    }
    p.variants.push_back({"default", base});
  } else if (name == "noise") {
    base.solvers = {make_solver_spec("hierarchical")};
    p.variants.push_back({"baseline", base});
    BenchConfig gauss = base;
    gauss.scenario.sigma_xyz = 10.0;
    p.variants.push_back({"gauss10", gauss});
    BenchConfig drop = base;
    drop.scenario.drop_fraction = 0.2;
    p.variants.push_back({"drop20", drop});
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (table3, table2, fig4, noise)");
  }
  return p;
}

std::vector<BenchRow> run_preset(const BenchModel& model, const Preset& preset, int threads) {
  std::vector<BenchRow> all;
  for (const Preset::Variant& v : preset.variants) {
    BenchConfig cfg = v.config;
    cfg.threads = threads;
    auto rows = run_benchmark(model, cfg);
    if (preset.variants.size() > 1) {
      for (BenchRow& r : rows) r.solver += "@" + v.label;
    }
    all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return all;
}

void write_fig4_csv(std::ostream& out, std::span<const BenchRow> rows) {
  std::vector<std::string> labels;
  for (const BenchRow& r : rows) {
    if (std::find(labels.begin(), labels.end(), r.solver) == labels.end()) labels.push_back(r.solver);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? "," : "") << labels[i];
  out << '\n';
  const std::size_t per_seed = labels.size();
  for (std::size_t k = 0; k + per_seed <= rows.size(); k += per_seed) {
    for (std::size_t i = 0; i < per_seed; ++i) out << (i ? "," : "") << format_double(rows[k + i].add);
    out << '\n';
  }
}

void write_table2_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "seed,step,precision\n";
  for (const BenchRow& r : rows) {
    for (std::size_t s = 0; s < r.precision.size(); ++s) {
      out << r.seed << ',';
      if (s + 1 == r.precision.size()) {
        out << "final";
      } else {
        out << s + 1;
      }
      out << ',' << format_double(r.precision[s]) << '\n';
    }
  }
}

std::vector<double> median_precision_by_step(std::span<const BenchRow> rows) {
  std::size_t steps = 0;
  for (const BenchRow& r : rows) steps = std::max(steps, r.precision.size());
  std::vector<double> out;
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<double> v;
    for (const BenchRow& r : rows) {
      if (r.precision.size() == steps) v.push_back(r.precision[s]);
    }
    if (v.empty()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    out.push_back(v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]));
  }
  return out;
}

}  // namespace hipose
