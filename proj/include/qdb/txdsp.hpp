#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdb/sigcore.hpp"
#include "qdb/types.hpp"
#include "qdb/waveform.hpp"

namespace qdb {

// Frame structure: n1 training symbols up front, then n2 training symbols
// after every nb payload symbols (including after a trailing partial block).
struct FrameLayout {
  int n1 = 1000;
  int n2 = 24;
  int nb = 1000;
  int total_payload = 10000;

  enum class Pos : uint8_t { TRAINING, PAYLOAD };

  int num_bursts() const { return (total_payload + nb - 1) / nb; }
  int num_training() const { return n1 + n2 * num_bursts(); }
  int frame_len() const { return n1 + total_payload + n2 * num_bursts(); }
  std::vector<Pos> index_map() const;
  void validate() const;
};

enum class FrameEncoding { PRECODED_QDB, DIFFERENTIAL_QDB };

struct SymbolFrame {
  CArr x, y;              // QDB symbols on the integer grid (unnormalized)
  FrameLayout layout;
  FrameEncoding encoding = FrameEncoding::PRECODED_QDB;
  QamSpec spec;

  std::vector<int> labels_x, labels_y;  // packed m-ary label per position
  std::vector<int> payload_positions;   // frame indices of payload symbols
  std::vector<int> training_positions;
  double norm_x = 1.0, norm_y = 1.0;    // empirical unit-power scales

  std::vector<uint8_t> payload_bits(int pol) const;  // 0 = x, 1 = y
};

std::vector<uint8_t> generate_bits(uint64_t seed, int n);

// Modulo-L precoder: p(n) = (a(n) - p(n-1)) mod L with p(-1) = 0, so that
// (p(n) + p(n-1)) mod L returns a(n).
std::vector<int> precode_rail(const std::vector<int>& levels, int L);

// Duobinary adder d(n) = s(n) + s(n-1).
RArr duobinary_rail(const RArr& amps, double s_init);

// Training labels drawn uniformly from the two allowed off-axis labels.
std::vector<std::string> generate_training_symbols(const QamSpec& spec, int n,
                                                   uint64_t seed);
const std::vector<std::string>& training_alphabet(const QamSpec& spec);

// Ensemble scale putting the QDB symbol stream at unit average power.
double qdb_unit_power_scale(const QamSpec& spec);
double qam_unit_power_scale(const QamSpec& spec);

// Builds the precoded QDB frame used by the TS-LMS path: training and payload
// labels share one precoder/duobinary chain per rail, so training symbols
// land on their multi-point candidate sets.
SymbolFrame assemble_frame(const std::vector<uint8_t>& payload_bits_x,
                           const std::vector<uint8_t>& payload_bits_y,
                           const FrameLayout& layout, const QamSpec& spec,
                           uint64_t training_seed);

// Quadrant-differential QAM encoder for the CMA baseline. Returns integer
// grid QAM symbols; a constant k*90-degree rotation of the stream leaves the
// decoded labels unchanged (except possibly the first).
CArr differential_encode(const std::vector<int>& labels, const QamSpec& spec);

// Baseline frame: differentially encoded labels through the duobinary adder
// (no modulo-L precoder; the differential code carries the memory instead).
// Positions marked TRAINING get filler labels and are never counted.
SymbolFrame assemble_frame_differential(
    const std::vector<uint8_t>& payload_bits_x,
    const std::vector<uint8_t>& payload_bits_y, const FrameLayout& layout,
    const QamSpec& spec, uint64_t filler_seed);

// Root-raised-cosine shaper; bandwidth_3db_hz is the two-sided 3-dB width
// (equal to the symbol rate for the classic matched design).
struct PulseShaper {
  double rolloff = 0.1;
  double bandwidth_3db_hz = 32e9;
  int span_symbols = 32;
  int sps = 16;
  RArr taps;  // sum of squares = sps, so unit-power symbols give a
              // unit-power waveform

  static PulseShaper design(double rolloff, double bandwidth_3db_hz,
                            int span_symbols, int sps, double symbol_rate);
};

// Zero-stuff to grid.sps and shape. Group delay is compensated: symbol k's
// pulse center lands on dense sample k*sps. Applies the frame's unit-power
// normalization.
DualPolWaveform rrc_shape(const SymbolFrame& frame, const PulseShaper& shaper,
                          const SimGrid& grid);

// Single-stream variant used by the validation path and tests.
CArr rrc_shape_stream(const CArr& symbols, const PulseShaper& shaper,
                      const SimGrid& grid);

}  // namespace qdb
