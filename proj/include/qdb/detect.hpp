#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qdb/sigcore.hpp"
#include "qdb/types.hpp"

namespace qdb {

struct BerStats {
  int64_t bits_compared = 0;
  int64_t bit_errors = 0;
  int64_t errors_x = 0, errors_y = 0;
  int64_t bits_x = 0, bits_y = 0;
  int skip_head = 0;

  double ber() const {
    return bits_compared > 0
               ? static_cast<double>(bit_errors) / bits_compared
               : 1.0;
  }
};

// Memoryless mod-L decode of a QDB symbol stream scaled by `scale` relative
// to the integer grid. Bit order per symbol: I rail bits then Q rail bits.
std::vector<uint8_t> sbs_decode(const CArr& symbols, const QamSpec& spec,
                                double scale);
int sbs_decode_rail_level(double value, int L, double scale);

// Viterbi over the L-state rail trellis (state = previous precoded level,
// branch emits s(p) + s(p')); full-sequence traceback, initial state p(-1)=0.
std::vector<int> mlsd_decode_rail(const RArr& rail, int L, double scale);
std::vector<uint8_t> mlsd_decode(const CArr& symbols, const QamSpec& spec,
                                 double scale);

// Generic rail Viterbi used by both decoders: emissions(prev, cur) is the
// noiseless branch output; init_state < 0 means all start states are free.
std::vector<int> viterbi_rail(const RArr& obs, const Eigen::MatrixXd& emissions,
                              int init_state);

// Inverse of the quadrant-differential encoder; invariant to a constant
// k*90-degree rotation of the input stream (except possibly the first label).
std::vector<int> differential_decode(const CArr& symbols, const QamSpec& spec,
                                     double scale);

// MLSD for the baseline path on the alpha-weighted two-symbol alphabet
// {s_i + alpha*s_j}; returns per-symbol QAM levels, then labels via the
// differential rule.
std::vector<int> differential_decode_mlsd(const CArr& post_filtered,
                                          const QamSpec& spec, double scale,
                                          double alpha);

BerStats count_errors(const std::vector<uint8_t>& tx_bits,
                      const std::vector<uint8_t>& rx_bits, int skip_head_bits);

// Dual-polarization comparison with tributary permutation and small symbol
// lags resolved by correlation against both truth streams. Inputs are
// full-frame bit arrays (bits_per_symbol bits per frame position); only
// payload positions are compared, skipping the first skip_head of them.
struct AlignedBer {
  BerStats stats;
  bool aligned = false;
  bool swapped = false;
  int lag_x = 0, lag_y = 0;
  double match_x = 0, match_y = 0;
};

AlignedBer count_errors_aligned(const std::vector<uint8_t>& truth_frame_x,
                                const std::vector<uint8_t>& truth_frame_y,
                                const std::vector<uint8_t>& rx_frame_x,
                                const std::vector<uint8_t>& rx_frame_y,
                                const std::vector<int>& payload_positions,
                                int bits_per_symbol, int skip_head_symbols,
                                int max_lag_symbols);

// Log-linear interpolation of the OSNR where a monotone BER curve crosses
// target_ber. Curve points are (osnr_db, ber).
struct OsnrCrossing {
  bool found = false;
  double osnr_db = 0.0;
};

OsnrCrossing required_osnr(const std::vector<std::pair<double, double>>& curve,
                           double target_ber);

}  // namespace qdb
