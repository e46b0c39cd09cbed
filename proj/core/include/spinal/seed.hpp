#pragma once

#include <cstdint>
#include <random>

namespace spinal {

using Rng = std::mt19937_64;

/// Independent random streams derived from one root seed.
enum class SeedStream : std::uint64_t {
  init = 1,        // weight initialization
  shuffle = 2,     // per-epoch batch order (epoch index is mixed in)
  dropout = 3,     // dropout masks
  data_train = 4,  // synthetic training set
  data_test = 5,   // synthetic test set
};

/// splitmix64(root ^ splitmix64((stream << 32) + salt)): stable across platforms.
std::uint64_t derive_seed(std::uint64_t root, SeedStream stream, std::uint64_t salt = 0);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace spinal
