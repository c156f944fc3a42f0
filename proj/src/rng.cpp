#include "uvlc/rng.hpp"

namespace uvlc {

namespace {

constexpr uint32_t kM0 = 0xD2511F53u;
constexpr uint32_t kM1 = 0xCD9E8D57u;
constexpr uint32_t kW0 = 0x9E3779B9u;
constexpr uint32_t kW1 = 0xBB67AE85u;

inline void round_once(uint32_t c[4], uint32_t& k0, uint32_t& k1) {
  uint64_t p0 = static_cast<uint64_t>(kM0) * c[0];
  uint64_t p1 = static_cast<uint64_t>(kM1) * c[2];
  uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  uint32_t n0 = hi1 ^ c[1] ^ k0;
  uint32_t n1 = lo1;
  uint32_t n2 = hi0 ^ c[3] ^ k1;
  uint32_t n3 = lo0;
  c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
  k0 += kW0; k1 += kW1;
}

} // namespace

PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                       uint32_t k0, uint32_t k1) {
  uint32_t c[4] = {c0, c1, c2, c3};
  for (int r = 0; r < 10; ++r) round_once(c, k0, k1);
  return PhiloxBlock{{c[0], c[1], c[2], c[3]}};
}

uint64_t RandomStream::next64() {
  if (buf_pos_ > 2) {
    PhiloxBlock b = philox4x32(static_cast<uint32_t>(draw_),
                               static_cast<uint32_t>(draw_ >> 32), s0_, s1_,
                               k0_, k1_);
    buf_[0] = b.v[0]; buf_[1] = b.v[1]; buf_[2] = b.v[2]; buf_[3] = b.v[3];
    ++draw_;
    buf_pos_ = 0;
  }
  uint64_t out = (static_cast<uint64_t>(buf_[buf_pos_ + 1]) << 32) |
                 buf_[buf_pos_];
  buf_pos_ += 2;
  return out;
}

double RandomStream::gaussian() {
  if (has_cached_gauss_) {
    has_cached_gauss_ = false;
    return cached_gauss_;
  }
  double u = uniform_open();
  double v = uniform01();
  double r = std::sqrt(-2.0 * std::log(u));
  double a = 2.0 * M_PI * v;
  cached_gauss_ = r * std::sin(a);
  has_cached_gauss_ = true;
  return r * std::cos(a);
}

} // namespace uvlc
