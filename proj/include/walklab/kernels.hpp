#pragma once

// Data-parallel inner loops, each with a scalar reference implementation and
// an AVX2 variant. The active variant is chosen at runtime from CPUID and can
// be pinned for equivalence testing. Both variants are bit-identical: integer
// kernels trivially, floating-point kernels because the project is built with
// -ffp-contract=off and the vector code performs the same IEEE operations in
// the same order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace walklab::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by the running CPU.
Isa detected_isa();

/// Variant used by the dispatching entry points below.
Isa active_isa();

/// Pins the dispatch. Requesting Avx2 on a CPU without it falls back to
/// Scalar. Returns the previously active variant.
Isa set_active_isa(Isa isa);

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function.
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

/// 64-bit draws 2b and 2b+1 of a stream come from block b with counter
/// {b_lo, b_hi, stream_lo, stream_hi} and the 64-bit seed as key.
/// Writes 2 * nblocks draws starting with block `first_block`.
void philox_draws(Isa isa, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::span<std::uint64_t> out);

/// steps[i] = draws[i] < threshold ? +1 : -1
void bernoulli_steps(Isa isa, std::span<const std::uint64_t> draws,
                     std::uint64_t threshold, std::span<std::int8_t> steps);

/// out[i] = a * x[i] + b * y[i]
void axpby(Isa isa, double a, std::span<const double> x, double b,
           std::span<const double> y, std::span<double> out);

// Dispatching overloads.
inline void philox_draws(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t first_block,
                         std::span<std::uint64_t> out) {
  philox_draws(active_isa(), seed, stream, first_block, out);
}
inline void bernoulli_steps(std::span<const std::uint64_t> draws,
                            std::uint64_t threshold,
                            std::span<std::int8_t> steps) {
  bernoulli_steps(active_isa(), draws, threshold, steps);
}
inline void axpby(double a, std::span<const double> x, double b,
                  std::span<const double> y, std::span<double> out) {
  axpby(active_isa(), a, x, b, y, out);
}

namespace scalar {
void philox_draws(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::uint64_t* out,
                  std::size_t nblocks);
void bernoulli_steps(const std::uint64_t* draws, std::size_t n,
                     std::uint64_t threshold, std::int8_t* steps);
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);
}  // namespace scalar

namespace avx2 {
void philox_draws(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::uint64_t* out,
                  std::size_t nblocks);
void bernoulli_steps(const std::uint64_t* draws, std::size_t n,
                     std::uint64_t threshold, std::int8_t* steps);
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);
}  // namespace avx2

}  // namespace walklab::kernels
