#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "walklab/kernels.hpp"
#include "walklab/rng.hpp"

using namespace walklab;
using namespace walklab::kernels;

namespace {

bool have_avx2() { return detected_isa() == Isa::Avx2; }

struct IsaGuard {
  Isa saved = active_isa();
  ~IsaGuard() { set_active_isa(saved); }
};

}  // namespace

TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                   {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                   {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox draws follow the documented counter layout") {
  const std::uint64_t seed = 0x0123456789abcdefULL;
  const std::uint64_t stream = 0xfedcba9876543210ULL;
  std::vector<std::uint64_t> out(6);
  philox_draws(Isa::Scalar, seed, stream, 9, out);
  for (std::uint64_t b = 0; b < 3; ++b) {
    const std::uint64_t block = 9 + b;
    const PhiloxCounter r = philox4x32(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const std::uint64_t d0 = out[2 * b];
    const std::uint64_t d1 = out[2 * b + 1];
    // Every 32-bit lane of the block ends up in the two draws.
    std::vector<std::uint32_t> lanes{static_cast<std::uint32_t>(d0),
                                     static_cast<std::uint32_t>(d0 >> 32),
                                     static_cast<std::uint32_t>(d1),
                                     static_cast<std::uint32_t>(d1 >> 32)};
    std::sort(lanes.begin(), lanes.end());
    std::vector<std::uint32_t> expect(r.begin(), r.end());
    std::sort(expect.begin(), expect.end());
    CHECK(lanes == expect);
  }
}

TEST_CASE("scalar and AVX2 philox are bit-identical") {
  if (!have_avx2()) return;
  for (std::uint64_t seed : {0ULL, 42ULL, 0xffffffffffffffffULL}) {
    for (std::uint64_t stream : {0ULL, 7ULL, (1ULL << 40) + 3}) {
      for (std::size_t len : {2u, 6u, 16u, 18u, 4096u}) {
        for (std::uint64_t first : {0ULL, 5ULL, 0xfffffffeULL}) {
          std::vector<std::uint64_t> a(len), b(len);
          philox_draws(Isa::Scalar, seed, stream, first, a);
          philox_draws(Isa::Avx2, seed, stream, first, b);
          CHECK(a == b);
        }
      }
    }
  }
}

TEST_CASE("scalar and AVX2 Bernoulli steps are identical") {
  if (!have_avx2()) return;
  std::mt19937_64 rng(3);
  for (std::size_t len : {1u, 7u, 32u, 33u, 4096u}) {
    std::vector<std::uint64_t> draws(len);
    for (auto& d : draws) d = rng();
    // Edge values around the threshold and the signed/unsigned boundary.
    const std::uint64_t t = step_threshold(0.75);
    if (len > 4) {
      draws[0] = t;
      draws[1] = t - 1;
      draws[2] = 0x8000000000000000ULL;
      draws[3] = std::numeric_limits<std::uint64_t>::max();
    }
    for (std::uint64_t threshold : std::vector<std::uint64_t>{t, 0, 0x8000000000000000ULL,
                                    std::numeric_limits<std::uint64_t>::max()}) {
      std::vector<std::int8_t> a(len), b(len);
      bernoulli_steps(Isa::Scalar, draws, threshold, a);
      bernoulli_steps(Isa::Avx2, draws, threshold, b);
      CHECK(a == b);
      for (std::size_t i = 0; i < len; ++i) {
        CHECK(a[i] == (draws[i] < threshold ? 1 : -1));
      }
    }
  }
}

TEST_CASE("scalar and AVX2 axpby are bit-identical") {
  if (!have_avx2()) return;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 1023u}) {
    std::vector<double> x(len), y(len), a(len), b(len);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    axpby(Isa::Scalar, 0.3, x, -1.7, y, a);
    axpby(Isa::Avx2, 0.3, x, -1.7, y, b);
    CHECK(std::memcmp(a.data(), b.data(), len * sizeof(double)) == 0);
    for (std::size_t i = 0; i < len; ++i) CHECK(a[i] == 0.3 * x[i] + -1.7 * y[i]);
  }
}

TEST_CASE("dispatch") {
  IsaGuard guard;
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_name(Isa::Avx2) == "avx2");
  set_active_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  set_active_isa(Isa::Avx2);
  CHECK(active_isa() == (have_avx2() ? Isa::Avx2 : Isa::Scalar));
}

TEST_CASE("step streams do not depend on the kernel variant") {
  IsaGuard guard;
  const WalkParams w = make_params(0.75);
  std::vector<int> a, b;
  set_active_isa(Isa::Scalar);
  StepStream s1(w, 42, 7);
  for (int i = 0; i < 10000; ++i) a.push_back(s1.next());
  set_active_isa(Isa::Avx2);
  StepStream s2(w, 42, 7);
  for (int i = 0; i < 10000; ++i) b.push_back(s2.next());
  CHECK(a == b);
  CHECK(s2.consumed() == 10000);
}

TEST_CASE("step threshold") {
  CHECK(step_threshold(0.75) == 0xC000000000000000ULL);
  CHECK(step_threshold(0.5) == 0x8000000000000000ULL);
  // Fraction of up steps over a long stream.
  const WalkParams w = make_params(0.75);
  StepStream s(w, 1, 0);
  int up = 0;
  const int N = 1'000'000;
  for (int i = 0; i < N; ++i) up += s.next() > 0;
  const double sd = std::sqrt(N * 0.75 * 0.25);
  CHECK(std::abs(up - 0.75 * N) < 4.0 * sd);
}
