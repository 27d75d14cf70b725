#pragma once

#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace qdb {

using Real = double;
using Complex = std::complex<double>;

// Waveforms and symbol streams are dense complex arrays (elementwise math);
// filter taps and equalizer windows are vectors (dot products).
using CArr = Eigen::ArrayXcd;
using RArr = Eigen::ArrayXd;
using IArr = Eigen::ArrayXi;
using CVec = Eigen::VectorXcd;
using Jones = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 0.1 nm at 1550 nm, the reference bandwidth OSNR is quoted against.
inline constexpr double kOsnrRefBandwidthHz = 12.5e9;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double wrap_pi(double x) {
  x = std::fmod(x + kPi, kTwoPi);
  if (x < 0) x += kTwoPi;
  return x - kPi;
}

}  // namespace qdb
