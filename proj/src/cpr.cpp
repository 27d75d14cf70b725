#include "qdb/cpr.hpp"

#include <stdexcept>

#include "qdb/sigcore.hpp"

namespace qdb {

double unwrap(double prev_phi, double raw_phi, double ambiguity_period) {
  const double k = std::round((prev_phi - raw_phi) / ambiguity_period);
  return raw_phi + k * ambiguity_period;
}

PhaseTracker::PhaseTracker(int window) : window_(window), ring_(window) {
  if (window <= 0) throw std::invalid_argument("PhaseTracker: window must be > 0");
}

void PhaseTracker::reset() {
  head_ = 0;
  count_ = 0;
  sum_ = Complex(0, 0);
  phi_ = 0.0;
  std::fill(ring_.begin(), ring_.end(), Complex(0, 0));
}

double PhaseTracker::update(Complex r, Complex d) {
  if (std::abs(d) == 0.0) return phi_;  // center point carries no phase
  const Complex prod = r * std::conj(d);
  if (count_ == window_) sum_ -= ring_[head_];
  ring_[head_] = prod;
  head_ = (head_ + 1) % window_;
  if (count_ < window_) ++count_;
  // running sum is refreshed periodically to stop error accumulation
  if (head_ == 0) {
    sum_ = Complex(0, 0);
    for (int i = 0; i < count_; ++i) sum_ += ring_[i];
  } else {
    sum_ += prod;
  }
  if (std::abs(sum_) > 0) phi_ = unwrap(phi_, std::arg(sum_), kTwoPi);
  return phi_;
}

double daml_update(PhaseTracker& tracker, Complex r, Complex d) {
  return tracker.update(r, d);
}

RArr vv_phase(const CArr& symbols, int block_len) {
  if (block_len < 1) throw std::invalid_argument("vv_phase: block_len must be >= 1");
  const int n = static_cast<int>(symbols.size());
  RArr phi(n);
  double prev = 0.0;
  for (int start = 0; start < n; start += block_len) {
    const int len = std::min(block_len, n - start);
    Complex acc(0, 0);
    for (int i = 0; i < len; ++i) {
      const Complex z = symbols(start + i);
      acc += z * z * z * z;
    }
    if (std::abs(acc) == 0.0)
      throw std::invalid_argument("vv_phase: zero-energy block");
    // diagonal QPSK-style constellations put z^4 on the negative real axis
    double raw = (std::arg(acc) - kPi) / 4.0;
    raw -= std::round(raw / (kPi / 2.0)) * (kPi / 2.0);
    const double ph = (start == 0) ? raw : unwrap(prev, raw, kPi / 2.0);
    for (int i = 0; i < len; ++i) phi(start + i) = ph;
    prev = ph;
  }
  return phi;
}

RArr bps_phase(const CArr& symbols, const std::vector<Complex>& constellation,
               int num_test_phases, int block_len) {
  if (symbols.size() == 0) throw std::invalid_argument("bps_phase: empty block");
  if (num_test_phases < 16)
    throw std::invalid_argument("bps_phase: need at least 16 test phases");
  const int n = static_cast<int>(symbols.size());
  std::vector<Complex> rot(num_test_phases);
  for (int b = 0; b < num_test_phases; ++b)
    rot[b] = std::polar(1.0, -(kPi / 2.0) * b / num_test_phases);

  RArr phi(n);
  double prev = 0.0;
  for (int start = 0; start < n; start += block_len) {
    const int len = std::min(block_len, n - start);
    double best_cost = std::numeric_limits<double>::infinity();
    int best_b = 0;
    for (int b = 0; b < num_test_phases; ++b) {
      double cost = 0;
      for (int i = 0; i < len; ++i) {
        const Complex z = symbols(start + i) * rot[b];
        double dmin = std::numeric_limits<double>::infinity();
        for (const Complex& p : constellation)
          dmin = std::min(dmin, std::norm(z - p));
        cost += dmin;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_b = b;
      }
    }
    const double raw = (kPi / 2.0) * best_b / num_test_phases;
    const double ph = (start == 0) ? raw : unwrap(prev, raw, kPi / 2.0);
    for (int i = 0; i < len; ++i) phi(start + i) = ph;
    prev = ph;
  }
  return phi;
}

}  // namespace qdb
