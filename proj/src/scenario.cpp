#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "hipose/bench.hpp"
#include "hipose/error.hpp"

namespace hipose {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { pose = 1, pick, code, noise, outlier, drop };

std::mt19937_64 stream(std::uint64_t seed, Stream s) {
  return std::mt19937_64(splitmix64(seed * 0x100000001b3ULL ^ static_cast<std::uint64_t>(s)));
}

// Uniform on SO(3): normalized 4D Gaussian as a unit quaternion.
Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng));
  } while (q.norm() < 1e-12);
  return q.normalized().toRotationMatrix();
}

// Indices of `count` distinct elements of [0, n), in ascending order.
std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < count; ++k) {
    std::swap(idx[k], idx[k + std::uniform_int_distribution<std::size_t>(0, n - 1 - k)(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

void ScenarioConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (n_points < 1) throw InvalidArgument("n_points must be positive");
  if (!prob(flip.first) || !prob(flip.last)) throw InvalidArgument("flip probabilities must be in [0, 1]");
  if (flip.last < flip.first) throw InvalidArgument("flip schedule must be non-decreasing in bit index");
  if (!(code_jitter.first >= 0.0) || !(code_jitter.last >= 0.0)) {
    throw InvalidArgument("code jitter must be >= 0");
  }
  if (!(sigma_xyz >= 0.0)) throw InvalidArgument("sigma_xyz must be >= 0");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw InvalidArgument("outlier fraction must be in [0, 1)");
  }
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) throw InvalidArgument("drop fraction must be in [0, 1)");
  if (!(translation_box >= 0.0) || !std::isfinite(depth)) throw InvalidArgument("invalid pose sampler box");
}

ScenarioConfig ScenarioConfig::noise_free(std::uint64_t seed, std::size_t n_points) {
  ScenarioConfig cfg;
  cfg.n_points = n_points;
  cfg.flip = {0.0, 0.0};
  cfg.code_jitter = {0.0, 0.0};
  cfg.seed = seed;
  return cfg;
}

Scenario generate_scenario(const SurfaceEncoding& enc, double diameter, const ScenarioConfig& cfg) {
  cfg.validate();
  const int d = enc.bits();
  Scenario sc;
  sc.seed = cfg.seed;

  auto pose_rng = stream(cfg.seed, Stream::pose);
  std::uniform_real_distribution<double> box(-0.5 * cfg.translation_box, 0.5 * cfg.translation_box);
  sc.truth.R = random_rotation(pose_rng);
  sc.truth.t = Vec3(box(pose_rng), box(pose_rng), cfg.depth + box(pose_rng));

  auto pick_rng = stream(cfg.seed, Stream::pick);
  auto code_rng = stream(cfg.seed, Stream::code);
  auto noise_rng = stream(cfg.seed, Stream::noise);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(enc.size() - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // One distribution per engine: normal_distribution caches a spare draw.
  std::normal_distribution<double> code_gauss(0.0, 1.0), noise_gauss(0.0, 1.0);
  // Pulls stop just short of 0.5 so jitter never changes the quantized bit.
  const double max_pull = std::nextafter(0.5, 0.0);

  sc.corrs.resize(cfg.n_points);
  std::vector<double> soft(static_cast<std::size_t>(d));
  for (Correspondence& c : sc.corrs) {
    const std::uint32_t v = pick(pick_rng);
    const std::uint32_t code = enc.code(v);
    for (int k = 0; k < d; ++k) {
      int bit = static_cast<int>((code >> (d - 1 - k)) & 1u);
      if (unit(code_rng) < cfg.flip.at(k, d)) bit ^= 1;
      const double pull = std::min(std::abs(code_gauss(code_rng)) * cfg.code_jitter.at(k, d), max_pull);
      soft[static_cast<std::size_t>(k)] = bit ? 1.0 - pull : pull;
    }
    const Vec3 noise(noise_gauss(noise_rng), noise_gauss(noise_rng), noise_gauss(noise_rng));
    c.point = sc.truth.apply(enc.vertices()[v]) + cfg.sigma_xyz * noise;
    c.code = SoftCode(soft);
    c.gt_vertex = v;
  }

  // Gross outliers: uniform in the region any object placement can occupy.
  auto outlier_rng = stream(cfg.seed, Stream::outlier);
  const auto n_out = static_cast<std::size_t>(std::llround(cfg.outlier_fraction * static_cast<double>(cfg.n_points)));
  const double half = 0.5 * cfg.translation_box + 0.5 * diameter;
  std::uniform_real_distribution<double> scene(-half, half);
  for (std::size_t i : random_subset(outlier_rng, cfg.n_points, n_out)) {
    Correspondence& c = sc.corrs[i];
    c.point = Vec3(scene(outlier_rng), scene(outlier_rng), cfg.depth + scene(outlier_rng));
    for (double& s : soft) s = unit(outlier_rng);
    c.code = SoftCode(soft);
    c.gt_vertex.reset();
  }

  auto drop_rng = stream(cfg.seed, Stream::drop);
  const auto n_drop = static_cast<std::size_t>(std::llround(cfg.drop_fraction * static_cast<double>(cfg.n_points)));
  if (n_drop > 0) {
    const auto dropped = random_subset(drop_rng, cfg.n_points, n_drop);
    std::vector<Correspondence> kept;
    kept.reserve(cfg.n_points - n_drop);
    std::size_t next = 0;
    for (std::size_t i = 0; i < sc.corrs.size(); ++i) {
      if (next < dropped.size() && dropped[next] == i) {
        ++next;
        continue;
      }
      kept.push_back(std::move(sc.corrs[i]));
    }
    sc.corrs = std::move(kept);
  }
  return sc;
}

void write_truth(const std::filesystem::path& path, const Scenario& scenario) {
  nlohmann::json r = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    r.push_back({scenario.truth.R(i, 0), scenario.truth.R(i, 1), scenario.truth.R(i, 2)});
  }
  const nlohmann::json j = {
      {"R", r},
      {"t", {scenario.truth.t.x(), scenario.truth.t.y(), scenario.truth.t.z()}},
      {"seed", scenario.seed}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Pose read_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ground-truth file " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    Pose p;
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) p.R(i, k) = j.at("R").at(i).at(k).get<double>();
      p.t[i] = j.at("t").at(i).get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ground-truth file: ") + e.what());
  }
}

}  // namespace hipose
