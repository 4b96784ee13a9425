#pragma once

#include <cstdint>
#include <random>

namespace cvae {

using Rng = std::mt19937_64;

/// Named sub-streams derived from the single run seed.
enum class Stream : std::uint32_t {
  init = 1,
  split = 2,
  shuffle = 3,
  eps = 4,
  synth = 5,
  sparsify = 6,
  gradcheck = 7,
};

/// Generator for `stream` of `seed`, further keyed by up to two integers
/// (phase, epoch, user, ...). Distinct keys give independent streams.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), static_cast<std::uint32_t>(stream),
                    lo(a),    hi(a),    lo(b),
                    hi(b)};
  return Rng(seq);
}

}  // namespace cvae
