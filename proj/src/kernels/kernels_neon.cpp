// NEON kernels (AArch64, where Advanced SIMD is always present). Two float64x2
// registers stand in for the four reduction stripes.

#include "tables.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace citerank::kernels::detail {
namespace {

// Two rows per step, one per lane, each accumulated in storage order.
void pull(const PullMatrix& m, std::span<const double> x, std::span<double> y) {
  const std::uint32_t* order = m.row_order.data();
  const std::size_t rows = m.rows();
  const std::size_t paired = rows - rows % 2;
  const double* shares = m.shares.data();
  const std::uint32_t* sources = m.sources.data();

  for (std::size_t g = 0; g < paired; g += 2) {
    const std::uint32_t r0 = order[g], r1 = order[g + 1];
    const std::uint32_t s0 = m.offsets[r0], s1 = m.offsets[r1];
    const std::uint32_t n0 = m.offsets[r0 + 1] - s0, n1 = m.offsets[r1 + 1] - s1;
    const std::uint32_t shortest = n0 < n1 ? n0 : n1;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::uint32_t k = 0; k < shortest; ++k) {
      float64x2_t w = vcombine_f64(vld1_f64(shares + s0 + k), vld1_f64(shares + s1 + k));
      float64x2_t xv =
          vcombine_f64(vld1_f64(x.data() + sources[s0 + k]), vld1_f64(x.data() + sources[s1 + k]));
      acc = vaddq_f64(acc, vmulq_f64(w, xv));
    }
    double a0 = vgetq_lane_f64(acc, 0);
    double a1 = vgetq_lane_f64(acc, 1);
    for (std::uint32_t k = shortest; k < n0; ++k) a0 = a0 + shares[s0 + k] * x[sources[s0 + k]];
    for (std::uint32_t k = shortest; k < n1; ++k) a1 = a1 + shares[s1 + k] * x[sources[s1 + k]];
    y[r0] = a0;
    y[r1] = a1;
  }
  for (std::size_t g = paired; g < rows; ++g) {
    const std::uint32_t r = order[g];
    double acc = 0.0;
    for (std::uint32_t k = m.offsets[r]; k < m.offsets[r + 1]; ++k) {
      acc = acc + shares[k] * x[sources[k]];
    }
    y[r] = acc;
  }
}

double sum(std::span<const double> x) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x.data() + i));
    hi = vaddq_f64(hi, vld1q_f64(x.data() + i + 2));
  }
  double lane[kStripes];
  vst1q_f64(lane, lo);
  vst1q_f64(lane + 2, hi);
  for (std::size_t r = 0; i < x.size(); ++i, ++r) lane[r] += x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_indexed(std::span<const double> x, std::span<const std::uint32_t> index) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  const std::size_t n = index.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vcombine_f64(vld1_f64(x.data() + index[i]), vld1_f64(x.data() + index[i + 1])));
    hi = vaddq_f64(hi,
                   vcombine_f64(vld1_f64(x.data() + index[i + 2]), vld1_f64(x.data() + index[i + 3])));
  }
  double lane[kStripes];
  vst1q_f64(lane, lo);
  vst1q_f64(lane + 2, hi);
  for (std::size_t r = 0; i < n; ++i, ++r) lane[r] += x[index[i]];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
    hi = vaddq_f64(hi, vabdq_f64(vld1q_f64(a.data() + i + 2), vld1q_f64(b.data() + i + 2)));
  }
  double lane[kStripes];
  vst1q_f64(lane, lo);
  vst1q_f64(lane + 2, hi);
  for (std::size_t r = 0; i < n; ++i, ++r) lane[r] += std::fabs(a[i] - b[i]);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void affine(std::span<const double> y, double base, double scale, std::span<double> out) {
  const float64x2_t vbase = vdupq_n_f64(base);
  const float64x2_t vscale = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= y.size(); i += 2) {
    vst1q_f64(out.data() + i, vaddq_f64(vbase, vmulq_f64(vscale, vld1q_f64(y.data() + i))));
  }
  for (; i < y.size(); ++i) out[i] = base + scale * y[i];
}

void divide(std::span<double> x, double divisor) {
  const float64x2_t vd = vdupq_n_f64(divisor);
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) vst1q_f64(x.data() + i, vdivq_f64(vld1q_f64(x.data() + i), vd));
  for (; i < x.size(); ++i) x[i] = x[i] / divisor;
}

constexpr KernelTable kNeon{Isa::Neon, pull, sum, sum_indexed, l1_distance, affine, divide};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace citerank::kernels::detail

#else

namespace citerank::kernels::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace citerank::kernels::detail

#endif
