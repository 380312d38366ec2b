// AVX2 kernels. Compiled with -mavx2 and only reached after a CPUID check, so
// this file avoids out-of-line library templates that could leak AVX2 code
// into shared instantiations.

#include "tables.hpp"

#if defined(CITERANK_BUILD_AVX2) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace citerank::kernels::detail {
namespace {

void spill(__m256d acc, double (&lane)[kStripes]) { _mm256_storeu_pd(lane, acc); }

double finish(const double (&lane)[kStripes]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

// Rows are handed out four at a time in row_order, one row per lane. A lane
// accumulates its own row strictly in storage order, so every row sees the same
// additions as the scalar loop. Up to the shortest row of the group all lanes
// are live; after that inactive lanes are frozen with a blend.
void pull(const PullMatrix& m, std::span<const double> x, std::span<double> y) {
  const std::uint32_t* order = m.row_order.data();
  const std::size_t rows = m.rows();
  const std::size_t grouped = rows - rows % 4;
  const int* sources = reinterpret_cast<const int*>(m.sources.data());
  const double* shares = m.shares.data();
  const double* xs = x.data();

  for (std::size_t g = 0; g < grouped; g += 4) {
    alignas(16) std::int32_t start[4];
    alignas(16) std::int32_t length[4];
    std::int32_t shortest = 0, longest = 0;
    for (int l = 0; l < 4; ++l) {
      const std::uint32_t r = order[g + l];
      start[l] = static_cast<std::int32_t>(m.offsets[r]);
      length[l] = static_cast<std::int32_t>(m.offsets[r + 1] - m.offsets[r]);
      shortest = l == 0 || length[l] < shortest ? length[l] : shortest;
      longest = length[l] > longest ? length[l] : longest;
    }

    const __m128i vstart = _mm_load_si128(reinterpret_cast<const __m128i*>(start));
    const __m128i vlength = _mm_load_si128(reinterpret_cast<const __m128i*>(length));
    __m256d acc = _mm256_setzero_pd();

    std::int32_t k = 0;
    for (; k < shortest; ++k) {
      const __m128i pos = _mm_add_epi32(vstart, _mm_set1_epi32(k));
      const __m128i src = _mm_i32gather_epi32(sources, pos, 4);
      const __m256d w = _mm256_i32gather_pd(shares, pos, 8);
      const __m256d xv = _mm256_i32gather_pd(xs, src, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, xv));
    }
    for (; k < longest; ++k) {
      const __m128i vk = _mm_set1_epi32(k);
      const __m128i live = _mm_cmpgt_epi32(vlength, vk);
      const __m256d live64 = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(live));
      const __m128i pos = _mm_add_epi32(vstart, vk);
      const __m128i src = _mm_mask_i32gather_epi32(_mm_setzero_si128(), sources, pos, live, 4);
      const __m256d w = _mm256_mask_i32gather_pd(_mm256_setzero_pd(), shares, pos, live64, 8);
      const __m256d xv = _mm256_mask_i32gather_pd(_mm256_setzero_pd(), xs, src, live64, 8);
      acc = _mm256_blendv_pd(acc, _mm256_add_pd(acc, _mm256_mul_pd(w, xv)), live64);
    }

    alignas(32) double out[4];
    _mm256_store_pd(out, acc);
    for (int l = 0; l < 4; ++l) y[order[g + l]] = out[l];
  }

  for (std::size_t g = grouped; g < rows; ++g) {
    const std::uint32_t r = order[g];
    double acc = 0.0;
    for (std::uint32_t k = m.offsets[r]; k < m.offsets[r + 1]; ++k) {
      acc = acc + shares[k] * xs[m.sources[k]];
    }
    y[r] = acc;
  }
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double lane[kStripes];
  spill(acc, lane);
  for (std::size_t r = 0; i < n; ++i, ++r) lane[r] += x[i];
  return finish(lane);
}

double sum_indexed(std::span<const double> x, std::span<const std::uint32_t> index) {
  const std::size_t n = index.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index.data() + i));
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(x.data(), idx, 8));
  }
  double lane[kStripes];
  spill(acc, lane);
  for (std::size_t r = 0; i < n; ++i, ++r) lane[r] += x[index[i]];
  return finish(lane);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double lane[kStripes];
  spill(acc, lane);
  for (std::size_t r = 0; i < n; ++i, ++r) {
    lane[r] += std::fabs(a[i] - b[i]);
  }
  return finish(lane);
}

void affine(std::span<const double> y, double base, double scale, std::span<double> out) {
  const std::size_t n = y.size();
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(vbase, _mm256_mul_pd(vscale, v)));
  }
  for (; i < n; ++i) out[i] = base + scale * y[i];
}

void divide(std::span<double> x, double divisor) {
  const std::size_t n = x.size();
  const __m256d vd = _mm256_set1_pd(divisor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x.data() + i, _mm256_div_pd(_mm256_loadu_pd(x.data() + i), vd));
  }
  for (; i < n; ++i) x[i] = x[i] / divisor;
}

constexpr KernelTable kAvx2{Isa::Avx2, pull, sum, sum_indexed, l1_distance, affine, divide};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace citerank::kernels::detail

#else

namespace citerank::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace citerank::kernels::detail

#endif
