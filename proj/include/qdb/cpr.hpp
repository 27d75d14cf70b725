#pragma once

#include <vector>

#include "qdb/types.hpp"

namespace qdb {

// Returns raw_phi + k*period with k chosen to land closest to prev_phi.
double unwrap(double prev_phi, double raw_phi, double ambiguity_period);

// Sliding-window decision-aided ML phase tracker: phi = arg(sum r*conj(d))
// over the last `window` reference products, unwrapped for continuity.
// Zero-modulus references (the center constellation point) are skipped.
class PhaseTracker {
 public:
  explicit PhaseTracker(int window = 20);

  double update(Complex r, Complex d);  // returns the new estimate
  double phi() const { return phi_; }
  void reset();

 private:
  int window_;
  std::vector<Complex> ring_;
  int head_ = 0;
  int count_ = 0;
  Complex sum_{0, 0};
  double phi_ = 0.0;
};

double daml_update(PhaseTracker& tracker, Complex r, Complex d);

// Viterbi-and-Viterbi over 4-fold symmetric constellations. Returns one
// unwrapped phase per input symbol (constant within each block); the pi/2
// ambiguity is left to differential decoding.
RArr vv_phase(const CArr& symbols, int block_len);

// Blind phase search: num_test_phases trial rotations over [0, pi/2), the
// winner minimizes the summed squared distance to the nearest constellation
// point. One unwrapped phase per symbol.
RArr bps_phase(const CArr& symbols, const std::vector<Complex>& constellation,
               int num_test_phases, int block_len);

}  // namespace qdb
