#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hipose/geometry.hpp"

namespace hipose {

/// Per-bit prediction in [0, 1]; entry k is the soft value of code bit k (coarsest first).
class SoftCode {
 public:
  SoftCode() = default;
  /// Throws InvalidArgument if any entry is outside [0, 1] or not finite.
  explicit SoftCode(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  bool operator==(const SoftCode&) const = default;

 private:
  std::vector<double> values_;
};

/// One observed camera-frame point (millimeters) with its soft code.
struct Correspondence {
  Vec3 point = Vec3::Zero();
  SoftCode code;
  /// Benchmark-only: vertex the point was sampled from. Empty for gross outliers
  /// and for real predictions.
  std::optional<std::uint32_t> gt_vertex;
};

/// Bitwise rounding; 0.5 rounds up.
std::vector<std::uint8_t> quantize(std::span<const double> soft);
/// Same as quantize(), packed MSB-first into an integer (requires d <= 32).
std::uint32_t quantize_packed(std::span<const double> soft);

/// 1 - |c - round(c)| per bit, each in [0.5, 1].
std::vector<double> confidence(std::span<const double> soft);

/// Length of the longest prefix whose confidences are all >= 0.5 + tau.
/// Throws InvalidArgument unless 0 < tau < 0.5.
int trust_bit(std::span<const double> confidences, double tau);
/// Fused quantize/confidence/trust_bit over the raw soft values.
int trust_bit_of_soft(std::span<const double> soft, double tau);

/// max(j, m_default), clamped to d.
int initial_bit(int trust, int m_default, int bits);

/// JSON-lines: {"p":[x,y,z], "code":[...], "gt_vertex":int?}. Blank lines are skipped.
/// Throws ParseError naming the offending line.
std::vector<Correspondence> read_correspondences(std::istream& in);
std::vector<Correspondence> read_correspondences(const std::filesystem::path& path);
void write_correspondences(std::ostream& out, std::span<const Correspondence> corrs);
void write_correspondences(const std::filesystem::path& path, std::span<const Correspondence> corrs);

}  // namespace hipose
