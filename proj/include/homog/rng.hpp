#pragma once

#include <cstdint>

#include "homog/kernels/kernels.hpp"

namespace homog {

// scalar draw interface over one counter-based stream. Distribution draws
// consume whole counter blocks, so interleaving different draw kinds stays
// reproducible: the sequence of block indices depends only on the sequence of
// draw calls, never on wall-clock or thread scheduling.
class rng_stream {
 public:
  rng_stream(std::uint64_t master_seed, std::uint64_t stream_index)
      : st_(kernels::derive_stream(master_seed, stream_index)) {}
  explicit rng_stream(const kernels::stream_state& st) : st_(st) {}

  // uniform on the open interval (0,1); two per block
  double uniform();

  // standard normal via Box-Muller; the paired draw is cached
  double normal();

  // rate-1 exponential
  double exponential();

  // Gamma(shape, scale), Marsaglia-Tsang squeeze; shape < 1 uses the
  // boost-by-one power trick
  double gamma(double shape, double scale);

  // Poisson(lambda); inversion for small lambda, additive split above so the
  // inversion loop length stays bounded
  long poisson(double lambda);

  // standardized alpha-stable draw (Chambers-Mallows-Stuck), unit scale,
  // exponent in (1,2], skew in [-1,1]
  double stable(double exponent, double skew);

  // direct access for the batch kernels; they consume blocks from the same
  // counter, so mixing scalar draws and kernel fills stays deterministic
  kernels::stream_state& state() { return st_; }
  const kernels::stream_state& state() const { return st_; }

 private:
  kernels::stream_state st_;
  double u_cache_ = 0.0;
  bool has_u_ = false;
  double z_cache_ = 0.0;
  bool has_z_ = false;
};

}  // namespace homog
