#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace levy {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t M0 = 0xD2511F53u;
  static constexpr std::uint32_t M1 = 0xCD9E8D57u;
  static constexpr std::uint32_t W0 = 0x9E3779B9u;
  static constexpr std::uint32_t W1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) {
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  static Counter generate(Counter c, Key k) {
    for (int i = 0; i < 10; ++i) {
      if (i > 0) {
        k[0] += W0;
        k[1] += W1;
      }
      c = round(c, k);
    }
    return c;
  }
};

// Stream tags keep independent uses of one (seed, path) pair apart.
enum class StreamTag : std::uint32_t {
  Main = 1,
  Pilot = 2,
  Walk = 3,
  Marginal = 4,
  Overshoot = 5,
  Skeleton = 6,
};

// One independent stream per (seed, tag, path index). Satisfies the
// UniformRandomBitGenerator requirements so Boost distributions can draw from it.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamTag tag, std::uint64_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        tag_(static_cast<std::uint32_t>(tag)),
        index_(index) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ >= 4) refill();
    std::uint64_t hi = buf_[pos_++];
    std::uint64_t lo = buf_[pos_++];
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  double exponential() { return exponential_(*this); }

  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 12.0) {
      // Inversion; exact for small means.
      double u = uniform();
      double p = std::exp(-mean);
      double cdf = p;
      long k = 0;
      while (u > cdf && k < 1000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
      }
      return k;
    }
    boost::random::poisson_distribution<long, double> d(mean);
    return d(*this);
  }

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill() {
    Philox4x32::Counter c{static_cast<std::uint32_t>(block_), tag_, static_cast<std::uint32_t>(index_),
                          static_cast<std::uint32_t>(index_ >> 32)};
    // Blocks beyond 2^32 fold the high bits into the tag word.
    c[1] ^= static_cast<std::uint32_t>(block_ >> 32) << 8;
    buf_ = Philox4x32::generate(c, key_);
    ++block_;
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t tag_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
};

}  // namespace levy
