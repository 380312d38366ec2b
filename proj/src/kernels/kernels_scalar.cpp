// Reference kernels. The SIMD variants must reproduce these bit for bit.

#include <cmath>

#include "tables.hpp"

namespace citerank::kernels::detail {
namespace {

double combine(const double (&lane)[kStripes]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

void pull(const PullMatrix& m, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = m.rows();
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::uint32_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
      acc = acc + m.shares[k] * x[m.sources[k]];
    }
    y[i] = acc;
  }
}

double sum(std::span<const double> x) {
  double lane[kStripes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) lane[i % kStripes] += x[i];
  return combine(lane);
}

double sum_indexed(std::span<const double> x, std::span<const std::uint32_t> index) {
  double lane[kStripes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < index.size(); ++i) lane[i % kStripes] += x[index[i]];
  return combine(lane);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double lane[kStripes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) lane[i % kStripes] += std::fabs(a[i] - b[i]);
  return combine(lane);
}

void affine(std::span<const double> y, double base, double scale, std::span<double> out) {
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = base + scale * y[i];
}

void divide(std::span<double> x, double divisor) {
  for (double& v : x) v = v / divisor;
}

constexpr KernelTable kScalar{Isa::Scalar, pull, sum, sum_indexed, l1_distance, affine, divide};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace citerank::kernels::detail
