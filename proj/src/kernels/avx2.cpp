// Compiled with -mavx2; only reached through dispatch after a CPUID check.

#include <immintrin.h>

#include "walklab/kernels.hpp"

namespace walklab::kernels::avx2 {

namespace {

// 32x32 -> 64 multiply of all eight lanes, split into high and low halves.
inline void mulhilo8(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

}  // namespace

void philox_draws(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::uint64_t* out,
                  std::size_t nblocks) {
  const __m256i mul0 = _mm256_set1_epi32(static_cast<int>(0xD2511F53u));
  const __m256i mul1 = _mm256_set1_epi32(static_cast<int>(0xCD9E8D57u));
  const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  const std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  const __m256i s_lo = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream)));
  const __m256i s_hi = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream >> 32)));

  std::size_t i = 0;
  alignas(32) std::uint32_t w[4][8];
  for (; i + 8 <= nblocks; i += 8) {
    const std::uint64_t b = first_block + i;
    const std::uint32_t b_lo = static_cast<std::uint32_t>(b);
    const std::uint32_t b_hi = static_cast<std::uint32_t>(b >> 32);
    __m256i c0 = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(b_lo)), lane);
    // Carry into the high word for lanes whose low word wrapped.
    const __m256i wrapped = _mm256_cmpgt_epi32(
        _mm256_xor_si256(_mm256_set1_epi32(static_cast<int>(b_lo)), _mm256_set1_epi32(INT32_MIN)),
        _mm256_xor_si256(c0, _mm256_set1_epi32(INT32_MIN)));
    __m256i c1 = _mm256_sub_epi32(_mm256_set1_epi32(static_cast<int>(b_hi)), wrapped);
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    std::uint32_t key0 = k0;
    std::uint32_t key1 = k1;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key0 += 0x9E3779B9u;
        key1 += 0xBB67AE85u;
      }
      __m256i hi0, lo0, hi1, lo1;
      mulhilo8(c0, mul0, hi0, lo0);
      mulhilo8(c2, mul1, hi1, lo1);
      const __m256i kk0 = _mm256_set1_epi32(static_cast<int>(key0));
      const __m256i kk1 = _mm256_set1_epi32(static_cast<int>(key1));
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), kk0);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), kk1);
      c3 = lo0;
    }
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), c3);
    for (int j = 0; j < 8; ++j) {
      out[2 * (i + j)] = w[0][j] | (static_cast<std::uint64_t>(w[1][j]) << 32);
      out[2 * (i + j) + 1] = w[2][j] | (static_cast<std::uint64_t>(w[3][j]) << 32);
    }
  }
  if (i < nblocks) {
    scalar::philox_draws(seed, stream, first_block + i, out + 2 * i, nblocks - i);
  }
}

void bernoulli_steps(const std::uint64_t* draws, std::size_t n,
                     std::uint64_t threshold, std::int8_t* steps) {
  const __m256i flip = _mm256_set1_epi64x(INT64_MIN);
  const __m256i t = _mm256_xor_si256(
      _mm256_set1_epi64x(static_cast<long long>(threshold)), flip);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i d = _mm256_xor_si256(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(draws + i)), flip);
    const int up = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(t, d)));
    for (int j = 0; j < 4; ++j) {
      steps[i + j] = (up >> j) & 1 ? std::int8_t{1} : std::int8_t{-1};
    }
  }
  if (i < n) scalar::bernoulli_steps(draws + i, n - i, threshold, steps + i);
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(ax, by));
  }
  if (i < n) scalar::axpby(a, x + i, b, y + i, out + i, n - i);
}

}  // namespace walklab::kernels::avx2
