#pragma once

#include "qdb/sigcore.hpp"
#include "qdb/types.hpp"

namespace qdb {

// Complex baseband sample streams for both polarizations on a declared grid.
struct DualPolWaveform {
  CArr x, y;
  SimGrid grid;
  double center_offset_hz = 0.0;

  int size() const { return static_cast<int>(x.size()); }
  double mean_power_dual_pol() const {
    return (x.abs2().sum() + y.abs2().sum()) / static_cast<double>(x.size());
  }
};

}  // namespace qdb
