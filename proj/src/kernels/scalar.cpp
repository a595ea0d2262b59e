#include "walklab/kernels.hpp"

namespace walklab::kernels {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

namespace scalar {

void philox_draws(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first_block, std::uint64_t* out,
                  std::size_t nblocks) {
  const PhiloxKey key{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
  for (std::size_t i = 0; i < nblocks; ++i) {
    const std::uint64_t b = first_block + i;
    const PhiloxCounter r = philox4x32(
        {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
         static_cast<std::uint32_t>(stream),
         static_cast<std::uint32_t>(stream >> 32)},
        key);
    out[2 * i] = r[0] | (static_cast<std::uint64_t>(r[1]) << 32);
    out[2 * i + 1] = r[2] | (static_cast<std::uint64_t>(r[3]) << 32);
  }
}

void bernoulli_steps(const std::uint64_t* draws, std::size_t n,
                     std::uint64_t threshold, std::int8_t* steps) {
  for (std::size_t i = 0; i < n; ++i) {
    steps[i] = draws[i] < threshold ? std::int8_t{1} : std::int8_t{-1};
  }
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

}  // namespace scalar
}  // namespace walklab::kernels
