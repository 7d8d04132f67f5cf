#pragma once

// Philox4x32-10 counter-based generator (Salmon et al. 2011 constants),
// templated over the lane backend. Counter-based means lanes are free: four
// consecutive counter blocks, or four different realizations' streams, run in
// the four AVX2 lanes with no shared state.
//
// Stream derivation: realization i of master seed s owns the 128-bit hash
// (two SplitMix64 outputs) of (s, i) as (key, counter salt). The 64-bit block
// index n occupies counter words 0-1 and the salt words 2-3, so every stream
// is a disjoint 2^64-block segment of the keyed Philox sequence.
//
// Verified against the published known-answer vectors (zero, all-ones, and
// pi-digit counter/key inputs) in the kernel tests.

#include <cstdint>

#include "homog/kernels/lane.hpp"

namespace homog::kernels {

inline uint64_t splitmix_mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// per-realization stream descriptor plus draw position
struct stream_state {
  uint32_t key0, key1, salt0, salt1;
  uint64_t n;  // next unread counter block
};

inline stream_state derive_stream(uint64_t master_seed, uint64_t index) {
  constexpr uint64_t g = 0x9E3779B97F4A7C15ull;  // SplitMix64 increment
  uint64_t h1 = splitmix_mix(master_seed + (2 * index + 1) * g);
  uint64_t h2 = splitmix_mix(master_seed + (2 * index + 2) * g);
  return stream_state{uint32_t(h1), uint32_t(h1 >> 32), uint32_t(h2),
                      uint32_t(h2 >> 32), 0};
}

template <class B>
struct philox {
  using U = typename B::u64;

  // One 4x32 block per lane. Counter and key words arrive zero-extended to 64
  // bits per lane; outputs are packed as lo = x0 | x1<<32, hi = x2 | x3<<32.
  static void block(U c0, U c1, U c2, U c3, U k0, U k1, U* out_lo, U* out_hi) {
    const U m0 = U(0xD2511F53ull), m1 = U(0xCD9E8D57ull);
    const U w0 = U(0x9E3779B9ull), w1 = U(0xBB67AE85ull);
    const U mask = U(0xFFFFFFFFull);
    for (int r = 0; r < 10; ++r) {
      if (r) {
        k0 = (k0 + w0) & mask;
        k1 = (k1 + w1) & mask;
      }
      U p0 = mul_lo32(c0, m0);
      U p1 = mul_lo32(c2, m1);
      U n0 = shr<32>(p1) ^ c1 ^ k0;
      U n1 = p1 & mask;
      U n2 = shr<32>(p0) ^ c3 ^ k1;
      U n3 = p0 & mask;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
    }
    *out_lo = c0 | shl<32>(c1);
    *out_hi = c2 | shl<32>(c3);
  }
};

}  // namespace homog::kernels
