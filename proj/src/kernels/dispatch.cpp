#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tables.hpp"

namespace citerank::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Auto: return "auto";
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> isa_from_string(std::string_view name) {
  for (Isa isa : {Isa::Auto, Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (to_string(isa) == name) return isa;
  }
  return std::nullopt;
}

void schedule_rows(PullMatrix& m) {
  const std::size_t n = m.rows();
  m.row_order.resize(n);
  std::iota(m.row_order.begin(), m.row_order.end(), 0u);
  auto length = [&](std::uint32_t r) { return m.offsets[r + 1] - m.offsets[r]; };
  std::stable_sort(m.row_order.begin(), m.row_order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return length(a) > length(b); });
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Auto:
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

Isa resolve(Isa requested) {
  if (requested == Isa::Auto) {
    if (available(Isa::Avx2)) return Isa::Avx2;
    if (available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
  }
  if (!available(requested)) {
    throw std::invalid_argument("kernel '" + std::string(to_string(requested)) +
                                "' is not available on this machine");
  }
  return requested;
}

const KernelTable& table(Isa isa) {
  switch (resolve(isa)) {
    case Isa::Avx2: return *detail::avx2_table();
    case Isa::Neon: return *detail::neon_table();
    default: return detail::scalar_table();
  }
}

}  // namespace citerank::kernels
