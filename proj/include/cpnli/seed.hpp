#pragma once

#include <cstdint>

namespace cpnli {

// Seed splitting: every random stream is keyed by (parent seed, stream id)
// and derived with one splitmix64 step over parent + golden * (id + 1).
// Streams used by the library:
//   bin measurement:   derive_seed(root, bin_stream(bin_index))
//   bootstrap resample: derive_seed(measurement_seed, 1 + resample)
//   full-band record:  derive_seed(root, kFullBandStream)
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64(parent + 0x9E3779B97F4A7C15ull * (stream + 1));
}

/// Zig-zag map of signed wavelength-bin index onto stream ids.
inline std::uint64_t bin_stream(long long bin_index) {
  return bin_index >= 0 ? 2ull * static_cast<std::uint64_t>(bin_index)
                        : 2ull * static_cast<std::uint64_t>(-bin_index) - 1ull;
}

inline constexpr std::uint64_t kFullBandStream = 0xFFFF'FFFF'FFFF'0000ull;

}  // namespace cpnli
