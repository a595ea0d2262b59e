#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "walklab/kernels.hpp"
#include "walklab/model.hpp"

namespace walklab {

/// Up-step threshold on 64-bit uniforms: P(draw < threshold) = p up to 2^-64.
inline std::uint64_t step_threshold(double p) {
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

/// +-1 increments of one walk. Draw i of the stream is a pure function of
/// (seed, stream, i), so any replica can be regenerated independently of the
/// order in which replicas are scheduled.
class StepStream {
 public:
  static constexpr std::size_t kBlockDraws = 4096;

  StepStream(const WalkParams& params, std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), threshold_(step_threshold(params.p)) {}

  int next() {
    if (pos_ == kBlockDraws) refill();
    return steps_[pos_++];
  }

  /// Number of steps handed out so far.
  std::uint64_t consumed() const {
    return next_block_ * 2 - (kBlockDraws - pos_);
  }

 private:
  void refill() {
    kernels::philox_draws(seed_, stream_, next_block_, draws_);
    kernels::bernoulli_steps(draws_, threshold_, steps_);
    next_block_ += kBlockDraws / 2;
    pos_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t threshold_;
  std::uint64_t next_block_ = 0;
  std::size_t pos_ = kBlockDraws;
  std::array<std::uint64_t, kBlockDraws> draws_{};
  std::array<std::int8_t, kBlockDraws> steps_{};
};

}  // namespace walklab
