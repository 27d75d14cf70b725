#pragma once

#include <cstdint>
#include <random>

#include "qdb/types.hpp"

namespace qdb {

// Seed-stream derivation. Every noise source in a simulation draws from its
// own stream keyed by (base seed, trial, channel, role); streams never alias
// as long as the key tuples differ.
uint64_t splitmix64(uint64_t x);
uint64_t seed_for(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0,
                  uint64_t d = 0);

// Roles for seed derivation, documented in the run manifest.
enum class SeedRole : uint64_t {
  payload_x = 1,
  payload_y = 2,
  training = 3,
  filler = 4,
  tx_laser = 5,
  lo_laser = 6,
  ase = 7,
};

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

  double uniform() { return unif_(gen_); }           // [0,1)
  double gaussian() { return norm_(gen_); }          // N(0,1)
  Complex cgaussian() {                              // CN(0,1), E|z|^2 = 1
    const double re = norm_(gen_);
    const double im = norm_(gen_);
    return Complex(re, im) * std::numbers::inv_sqrt2;
  }
  int bit() { return static_cast<int>(gen_() & 1u); }
  int uniform_int(int n) {  // [0, n)
    return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(gen_));
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> norm_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace qdb
