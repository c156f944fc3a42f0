#pragma once

#include <cmath>
#include <cstdint>

namespace uvlc {

// Philox4x32-10 counter block cipher (Salmon et al. constants).
// Used as a splittable generator: the 128-bit counter carries a 64-bit
// stream id and a 64-bit draw index, the 64-bit key carries the run seed,
// so any (seed, stream) pair is an independent sequence regardless of how
// work is partitioned across threads.
struct PhiloxBlock {
  uint32_t v[4];
};

PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                       uint32_t k0, uint32_t k1);

// Domain tags keep streams used by different subsystems disjoint even when
// their local indices collide.
enum class StreamDomain : uint64_t {
  photon = 0,
  fading = 1,
  history = 2,
  waveform_bits = 3,
  waveform_noise = 4,
  waveform_fading = 5,
  mc_integration = 6,
};

inline uint64_t stream_id(StreamDomain d, uint64_t index) {
  return (static_cast<uint64_t>(d) << 56) | (index & 0x00FFFFFFFFFFFFFFull);
}

class RandomStream {
 public:
  RandomStream(uint64_t seed, uint64_t stream)
      : k0_(static_cast<uint32_t>(seed)),
        k1_(static_cast<uint32_t>(seed >> 32)),
        s0_(static_cast<uint32_t>(stream)),
        s1_(static_cast<uint32_t>(stream >> 32)) {}

  RandomStream(uint64_t seed, StreamDomain d, uint64_t index)
      : RandomStream(seed, stream_id(d, index)) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    uint64_t bits = next64();
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe argument for log().
  double uniform_open() { return 1.0 - uniform01(); }

  double exponential() { return -std::log(uniform_open()); }

  // One standard normal draw (Box-Muller; caches the pair partner).
  double gaussian();

 private:
  uint64_t next64();

  uint32_t k0_, k1_, s0_, s1_;
  uint64_t draw_ = 0;
  uint32_t buf_[4] = {0, 0, 0, 0};
  int buf_pos_ = 4; // in units of u32 lanes consumed
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

} // namespace uvlc
