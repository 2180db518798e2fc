#include <atomic>
#include <cstdlib>
#include <string_view>

#include "hipose/kernels.hpp"

namespace hipose::kernels {
namespace {

constexpr KernelTable kScalarTable{
    scalar::min_sq_distance_posed,
    scalar::count_within_posed,
    scalar::sum_distance_between_poses,
    scalar::max_sq_distance,
};

#if HIPOSE_HAS_AVX2
constexpr KernelTable kAvx2Table{
    avx2::min_sq_distance_posed,
    avx2::count_within_posed,
    avx2::sum_distance_between_poses,
    avx2::max_sq_distance,
};
#endif

bool cpu_has_avx2() {
#if HIPOSE_HAS_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("HIPOSE_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const KernelTable& current() { return table(active().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return cpu_has_avx2();
}

const KernelTable& table(Isa isa) {
#if HIPOSE_HAS_AVX2
  if (isa == Isa::avx2 && cpu_has_avx2()) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa_available(isa)) active().store(isa, std::memory_order_relaxed);
}

double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]) {
  return current().min_sq_distance_posed(verts, pose, p);
}

std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq) {
  return current().count_within_posed(model, camera, pose, max_sq);
}

double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b) {
  return current().sum_distance_between_poses(verts, a, b);
}

double max_sq_distance(PointsView pts, const double q[3]) {
  return current().max_sq_distance(pts, q);
}

}  // namespace hipose::kernels
