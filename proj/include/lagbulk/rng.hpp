#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lagbulk {

/*
 * Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
 * numbers: as easy as 1, 2, 3").  The 64-bit key is the user seed; the upper
 * half of the 128-bit counter is the stream id and the lower half counts blocks,
 * so every (seed, stream) pair owns an independent 2^64-block sequence.
 */
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Raw bijection, exposed for known-answer tests.
  static Block encrypt(Block counter, Key key);

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int used_ = 4;
};

/// Deterministic per-replica random stream.  Same (seed, stream_id) yields a
/// bit-identical sequence; distinct stream ids are independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  // Gamma(shape, scale 1); valid for every shape > 0.
  double gamma(double shape);
  // log of a Gamma(shape, 1) draw; stays finite when the draw itself underflows.
  double log_gamma_draw(double shape);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Philox4x32 engine_;
};

/// Mixes a seed with a domain tag so that independent parts of an experiment
/// (matrix side, SDE side, ...) never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain);

}  // namespace lagbulk
