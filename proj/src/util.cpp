#include "bmolab/util.hpp"

#include <cstdio>

namespace bmolab {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_rng(uint64_t seed, uint64_t stream) {
  uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x51ed270b0b10ce25ULL));
  std::seed_seq seq{static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(seed)};
  return std::mt19937_64(seq);
}

std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace bmolab
