#pragma once

#include <cmath>
#include <cstdint>

namespace shocklab {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-row key of the cell hash.
inline std::uint64_t row_key(std::uint64_t seed, std::int64_t j) {
  return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) ^ (static_cast<std::uint64_t>(j) * 0xd1b54a32d192ed03ULL));
}

// Counter-based hash of a lattice cell; the same (seed, i, j) always gives the same bits.
inline std::uint64_t cell_hash_keyed(std::uint64_t key, std::int64_t i) {
  return mix64(key ^ (static_cast<std::uint64_t>(i) * 0x9fb21c651e98df25ULL));
}
inline std::uint64_t cell_hash(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return cell_hash_keyed(row_key(seed, j), i);
}

// Uniform in the open interval (0,1): midpoints of the 2^53 grid.
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Seed for replicate k of a run seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  return mix64(mix64(base) + 0x632be59bd9b4e019ULL * (k + 1));
}

// Exponential(rate) by inverse CDF.
inline double exp_by_inverse_cdf(double u, double rate) { return -std::log(u) / rate; }

}  // namespace shocklab
