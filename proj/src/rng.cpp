#include "qdb/rng.hpp"

namespace qdb {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t seed_for(uint64_t base, uint64_t a, uint64_t b, uint64_t c,
                  uint64_t d) {
  uint64_t s = splitmix64(base ^ 0x243f6a8885a308d3ull);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  s = splitmix64(s ^ d);
  return s;
}

}  // namespace qdb
