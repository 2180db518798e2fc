#include "hipose/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hipose/error.hpp"

namespace hipose {

SoftCode::SoftCode(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidArgument("soft code entry " + std::to_string(k) + " = " + std::to_string(v) +
                            " outside [0, 1]");
    }
  }
}

std::vector<std::uint8_t> quantize(std::span<const double> soft) {
  std::vector<std::uint8_t> out(soft.size());
  std::transform(soft.begin(), soft.end(), out.begin(),
                 [](double v) { return static_cast<std::uint8_t>(v >= 0.5 ? 1 : 0); });
  return out;
}

std::uint32_t quantize_packed(std::span<const double> soft) {
  if (soft.size() > 32) throw InvalidArgument("packed codes hold at most 32 bits");
  std::uint32_t code = 0;
  for (double v : soft) code = (code << 1) | (v >= 0.5 ? 1u : 0u);
  return code;
}

std::vector<double> confidence(std::span<const double> soft) {
  std::vector<double> out(soft.size());
  std::transform(soft.begin(), soft.end(), out.begin(), [](double v) {
    const double bit = v >= 0.5 ? 1.0 : 0.0;
    return 1.0 - std::abs(v - bit);
  });
  return out;
}

namespace {
void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 0.5)) throw InvalidArgument("trust margin must satisfy 0 < tau < 0.5");
}
}  // namespace

int trust_bit(std::span<const double> confidences, double tau) {
  check_tau(tau);
  const double bar = 0.5 + tau;
  int j = 0;
  while (j < static_cast<int>(confidences.size()) && confidences[j] >= bar) ++j;
  return j;
}

int trust_bit_of_soft(std::span<const double> soft, double tau) {
  check_tau(tau);
  const double bar = 0.5 + tau;
  int j = 0;
  for (double v : soft) {
    const double p = 1.0 - std::abs(v - (v >= 0.5 ? 1.0 : 0.0));
    if (!(p >= bar)) break;
    ++j;
  }
  return j;
}

int initial_bit(int trust, int m_default, int bits) {
  return std::min(std::max(trust, m_default), bits);
}

}  // namespace hipose
