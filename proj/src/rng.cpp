#include "sdefit/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdefit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream) {
  const std::uint64_t k = splitmix64(seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint64_t, 2> RandomStream::words(std::uint64_t block) const noexcept {
  const auto out = philox4x32({static_cast<std::uint32_t>(block),
                               static_cast<std::uint32_t>(block >> 32),
                               static_cast<std::uint32_t>(stream_),
                               static_cast<std::uint32_t>(stream_ >> 32)},
                              key_);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

std::array<double, 2> RandomStream::uniforms(std::uint64_t block) const noexcept {
  const auto w = words(block);
  return {to_open_unit(w[0]), to_open_unit(w[1])};
}

double RandomStream::normal(std::uint64_t index) const noexcept {
  const auto u = uniforms(index >> 1);
  const double r = std::sqrt(-2.0 * std::log(u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return (index & 1u) ? r * std::sin(angle) : r * std::cos(angle);
}

void RandomStream::fill_normals(std::span<double> out, std::uint64_t first) const noexcept {
  std::size_t j = 0;
  std::uint64_t index = first;
  if ((index & 1u) && j < out.size()) out[j++] = normal(index++);
  for (; j + 1 < out.size(); j += 2, index += 2) {
    const auto u = uniforms(index >> 1);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    out[j] = r * std::cos(angle);
    out[j + 1] = r * std::sin(angle);
  }
  if (j < out.size()) out[j] = normal(index);
}

__extension__ using uint128 = unsigned __int128;

std::uint64_t RandomStream::below(std::uint64_t index, std::uint64_t bound) const noexcept {
  const auto w = words(index >> 1);
  const std::uint64_t x = (index & 1u) ? w[1] : w[0];
  return static_cast<std::uint64_t>((static_cast<uint128>(x) * bound) >> 64);
}

double RandomStream::uniform(std::uint64_t index) const noexcept {
  const auto u = uniforms(index >> 1);
  return (index & 1u) ? u[1] : u[0];
}

}  // namespace sdefit
