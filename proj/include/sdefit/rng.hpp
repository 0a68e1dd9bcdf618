#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sdefit {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the
/// output is a pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based random stream keyed by (seed, stream). Draw number `k` of a
/// stream depends only on (seed, stream, k), so streams can be consumed in any
/// order and from any thread with identical results.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  /// Two uniforms in (0, 1) for block `block`.
  std::array<double, 2> uniforms(std::uint64_t block) const noexcept;
  /// Raw 64-bit words for block `block`.
  std::array<std::uint64_t, 2> words(std::uint64_t block) const noexcept;

  /// Standard normal draw number `index` (Box-Muller on block index/2).
  double normal(std::uint64_t index) const noexcept;
  /// Fills out[j] with normal(first + j).
  void fill_normals(std::span<double> out, std::uint64_t first = 0) const noexcept;

  /// Uniform integer in [0, bound) from draw number `index`.
  std::uint64_t below(std::uint64_t index, std::uint64_t bound) const noexcept;
  /// Uniform in (0, 1) from draw number `index`.
  double uniform(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace sdefit
