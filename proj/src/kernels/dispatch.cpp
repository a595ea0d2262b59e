#include <atomic>
#include <cassert>

#include "walklab/kernels.hpp"

namespace walklab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

Isa detected_isa() {
#ifdef WALKLAB_HAVE_AVX2
  static const Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return isa;
#else
  return Isa::Scalar;
#endif
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  return active().exchange(isa);
}

void philox_draws(Isa isa, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::span<std::uint64_t> out) {
  assert(out.size() % 2 == 0);
  const std::size_t nblocks = out.size() / 2;
#ifdef WALKLAB_HAVE_AVX2
  if (isa == Isa::Avx2) {
    avx2::philox_draws(seed, stream, first_block, out.data(), nblocks);
    return;
  }
#endif
  (void)isa;
  scalar::philox_draws(seed, stream, first_block, out.data(), nblocks);
}

void bernoulli_steps(Isa isa, std::span<const std::uint64_t> draws,
                     std::uint64_t threshold, std::span<std::int8_t> steps) {
  assert(steps.size() >= draws.size());
#ifdef WALKLAB_HAVE_AVX2
  if (isa == Isa::Avx2) {
    avx2::bernoulli_steps(draws.data(), draws.size(), threshold, steps.data());
    return;
  }
#endif
  (void)isa;
  scalar::bernoulli_steps(draws.data(), draws.size(), threshold, steps.data());
}

void axpby(Isa isa, double a, std::span<const double> x, double b,
           std::span<const double> y, std::span<double> out) {
  assert(x.size() == out.size() && y.size() == out.size());
#ifdef WALKLAB_HAVE_AVX2
  if (isa == Isa::Avx2) {
    avx2::axpby(a, x.data(), b, y.data(), out.data(), out.size());
    return;
  }
#endif
  (void)isa;
  scalar::axpby(a, x.data(), b, y.data(), out.data(), out.size());
}

}  // namespace walklab::kernels
