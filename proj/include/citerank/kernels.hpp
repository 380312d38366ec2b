#pragma once

// Arithmetic inner loops of the power iteration.
//
// Every kernel has a scalar reference implementation and SIMD variants (AVX2 on
// x86-64, NEON on AArch64) chosen at runtime. The variants are bit-identical
// to the reference, which fixes the summation order as follows:
//
//  * pull: each output row accumulates its in-edges one at a time, in storage
//    order (ascending source index), starting from +0.0. SIMD variants put
//    different rows in different lanes; they never split a row.
//  * reductions (sum, sum_indexed, l1_distance): element k is added to
//    partial sum k % 4 in increasing k, and the result is
//    (p0 + p1) + (p2 + p3).
//  * elementwise kernels round each element independently.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace citerank::kernels {

enum class Isa { Auto, Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);
std::optional<Isa> isa_from_string(std::string_view name);

/// Sparse matrix in "pull" (compressed by destination row) form.
struct PullMatrix {
  std::vector<std::uint32_t> offsets;    // rows + 1
  std::vector<std::uint32_t> sources;
  std::vector<double> shares;
  std::vector<std::uint32_t> row_order;  // rows by descending length, then ascending index

  std::size_t rows() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t entries() const noexcept { return sources.size(); }
};

/// Fills row_order from offsets.
void schedule_rows(PullMatrix& m);

struct KernelTable {
  Isa isa;
  // y[i] = sum over row i of shares[k] * x[sources[k]]
  void (*pull)(const PullMatrix& m, std::span<const double> x, std::span<double> y);
  double (*sum)(std::span<const double> x);
  double (*sum_indexed)(std::span<const double> x, std::span<const std::uint32_t> index);
  double (*l1_distance)(std::span<const double> a, std::span<const double> b);
  // out[i] = base + scale * y[i]
  void (*affine)(std::span<const double> y, double base, double scale, std::span<double> out);
  // x[i] = x[i] / divisor
  void (*divide)(std::span<double> x, double divisor);
};

bool available(Isa isa);

/// Auto picks the widest available variant. Throws std::invalid_argument for
/// an ISA this build or CPU cannot run.
Isa resolve(Isa requested);

const KernelTable& table(Isa isa);

}  // namespace citerank::kernels
