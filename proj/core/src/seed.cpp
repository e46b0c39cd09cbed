#include "spinal/seed.hpp"

namespace spinal {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, SeedStream stream, std::uint64_t salt) {
  const auto tag = splitmix64((static_cast<std::uint64_t>(stream) << 32) + salt);
  return splitmix64(root ^ tag);
}

}  // namespace spinal
