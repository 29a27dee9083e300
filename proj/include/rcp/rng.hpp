#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace rcp::rng {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). A block is a pure function of
// (key, counter), so any replication/bridge/time-step can be addressed
// directly and streams never collide.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            const std::array<std::uint32_t, 4>& counter);
};

// Stream identity: (seed; id0, id1, tag). The tag separates domains that
// draw from the same (seed, replication) pair, e.g. bridge index vs.
// generator noise.
struct StreamId {
  std::uint32_t id0 = 0;
  std::uint32_t id1 = 0;
  std::uint32_t tag = 0;
};

namespace tags {
inline constexpr std::uint32_t kBridge = 1;
inline constexpr std::uint32_t kArch = 2;
inline constexpr std::uint32_t kVar = 3;
inline constexpr std::uint32_t kNoise = 4;
}  // namespace tags

// Sequential view over the counter space of one stream.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamId id)
      : key_(seed), id_(id), block_(0), pos_(4) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits; strictly positive variant for logs.
  double next_double();
  double next_double_pos();

  // N(0,1) via a 256-layer ziggurat over Philox words.
  double normal();

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze (boosted for shape < 1).
  double gamma(double shape);
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  double cauchy();
  double exponential();

 private:
  std::uint64_t key_;
  StreamId id_;
  std::uint32_t block_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_;
};

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16),
// accurate to ~1e-16 over (0,1).
double normal_quantile(double p);

// Quantile of the chi-squared distribution with one degree of freedom via
// q(a) = z^2 with z the ((1+a)/2) normal quantile.
double chi_squared1_quantile(double level);

}  // namespace rcp::rng
