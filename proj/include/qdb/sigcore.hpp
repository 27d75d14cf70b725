#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdb/types.hpp"

namespace qdb {

// Square-QAM description: m-ary with L = sqrt(m) levels per rail and a fixed
// Gray map between rail bit tuples and level indices 0..L-1.
struct QamSpec {
  int m = 4;
  int L = 2;
  int bits_per_rail = 1;
  // gray tables indexed by packed rail bits (big-endian string order)
  std::vector<int> bits_to_level;
  std::vector<int> level_to_bits;

  static QamSpec make(int m);
  int bits_per_symbol() const { return 2 * bits_per_rail; }
};

int gray_bits_to_level(std::span<const int> bits, const QamSpec& spec);
std::vector<int> gray_level_to_bits(int level, const QamSpec& spec);

// Amplitude of precoded level p: 2p - (L-1), i.e. {-(L-1), ..., L-1} step 2.
double level_amplitude(int level, int L);

// Duobinary rail grid value d decodes to level ((d + 2(L-1))/2) mod L.
int mod_decode_rail(int d_grid, int L);

// Per-rail duobinary candidates of level a: all grid values decoding to a.
std::vector<int> rail_candidates(int level, int L);

// The t = 1, 2 or 4 constellation points a given bit label can occupy after
// the duobinary adder, depending on the previous precoder state.
struct CandidateSet {
  std::string label;
  std::vector<Complex> points;
  int t() const { return static_cast<int>(points.size()); }
};

struct QdbConstellation {
  QamSpec spec;
  std::vector<Complex> points;           // all (2L-1)^2 grid points, row-major
  std::vector<std::string> label_of;     // per point
  std::vector<CandidateSet> candidates;  // indexed by packed label

  const CandidateSet& candidates_of(const std::string& label) const;
  const CandidateSet& candidates_of(int packed_label) const;
};

QdbConstellation build_constellation(const QamSpec& spec);
CandidateSet candidate_set(const std::string& label, const QamSpec& spec);

// Euclidean nearest point; ties break to the lowest index.
std::pair<int, Complex> nearest_point(Complex z,
                                      std::span<const Complex> points);

// Label string <-> packed int (first half of the string is the I rail).
int pack_label(const std::string& label);
std::string unpack_label(int packed, int nbits);

// Validates label length/charset for the given spec; throws on malformed.
void check_label(const std::string& label, const QamSpec& spec);

// Simulation time base. The dense grid carries the WDM multiplex; the
// receiver DSP runs at dsp_sps samples per symbol.
struct SimGrid {
  double symbol_rate = 32e9;
  int sps = 16;
  int dsp_sps = 2;

  double sample_rate() const { return symbol_rate * sps; }
  double dt() const { return 1.0 / sample_rate(); }
  void validate() const;
};

}  // namespace qdb
