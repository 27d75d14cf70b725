#include "qdb/txdsp.hpp"

#include <stdexcept>

#include "qdb/rng.hpp"

namespace qdb {

void FrameLayout::validate() const {
  if (n1 <= 0 || n2 <= 0 || nb <= 0 || total_payload <= 0)
    throw std::invalid_argument("layout: n1, n2, nb, total_payload must be > 0");
}

std::vector<FrameLayout::Pos> FrameLayout::index_map() const {
  validate();
  std::vector<Pos> map;
  map.reserve(frame_len());
  for (int i = 0; i < n1; ++i) map.push_back(Pos::TRAINING);
  int remaining = total_payload;
  while (remaining > 0) {
    const int block = std::min(nb, remaining);
    for (int i = 0; i < block; ++i) map.push_back(Pos::PAYLOAD);
    remaining -= block;
    for (int i = 0; i < n2; ++i) map.push_back(Pos::TRAINING);
  }
  return map;
}

std::vector<uint8_t> generate_bits(uint64_t seed, int n) {
  if (n <= 0) throw std::invalid_argument("generate_bits: n must be > 0");
  Rng rng(seed);
  std::vector<uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
  return bits;
}

std::vector<int> precode_rail(const std::vector<int>& levels, int L) {
  std::vector<int> out(levels.size());
  int prev = 0;  // p(-1) = 0
  for (size_t n = 0; n < levels.size(); ++n) {
    if (levels[n] < 0 || levels[n] >= L)
      throw std::invalid_argument("precode_rail: level out of range");
    prev = ((levels[n] - prev) % L + L) % L;
    out[n] = prev;
  }
  return out;
}

RArr duobinary_rail(const RArr& amps, double s_init) {
  RArr out(amps.size());
  double prev = s_init;
  for (Eigen::Index n = 0; n < amps.size(); ++n) {
    out(n) = amps(n) + prev;
    prev = amps(n);
  }
  return out;
}

const std::vector<std::string>& training_alphabet(const QamSpec& spec) {
  static const std::vector<std::string> qpsk = {"01", "10"};
  static const std::vector<std::string> qam16 = {"1100", "0011"};
  if (spec.m == 4) return qpsk;
  if (spec.m == 16) return qam16;
  throw std::invalid_argument("training_alphabet: unsupported m");
}

std::vector<std::string> generate_training_symbols(const QamSpec& spec, int n,
                                                   uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("generate_training_symbols: n must be > 0");
  const auto& alphabet = training_alphabet(spec);
  Rng rng(seed);
  std::vector<std::string> out(n);
  for (auto& s : out) s = alphabet[rng.bit()];
  return out;
}

namespace {

double rail_mean_square(int L) {
  double acc = 0;
  for (int p = 0; p < L; ++p) acc += level_amplitude(p, L) * level_amplitude(p, L);
  return acc / L;
}

// packed label -> (I level, Q level) through the Gray tables
std::pair<int, int> label_levels(int packed, const QamSpec& spec) {
  const int nb = spec.bits_per_rail;
  const int mask = (1 << nb) - 1;
  const int bits_i = (packed >> nb) & mask;
  const int bits_q = packed & mask;
  return {spec.bits_to_level[bits_i], spec.bits_to_level[bits_q]};
}

std::vector<int> merge_labels(const std::vector<uint8_t>& payload_bits,
                              const std::vector<int>& special_labels,
                              const FrameLayout& layout, const QamSpec& spec) {
  const auto map = layout.index_map();
  const int bps = spec.bits_per_symbol();
  if (static_cast<int>(payload_bits.size()) != layout.total_payload * bps)
    throw std::invalid_argument("assemble_frame: payload bit count mismatch");
  std::vector<int> labels(map.size());
  size_t bit_pos = 0, t_pos = 0;
  for (size_t i = 0; i < map.size(); ++i) {
    if (map[i] == FrameLayout::Pos::TRAINING) {
      labels[i] = special_labels[t_pos++];
    } else {
      int packed = 0;
      for (int b = 0; b < bps; ++b) packed = (packed << 1) | payload_bits[bit_pos++];
      labels[i] = packed;
    }
  }
  return labels;
}

CArr qdb_chain(const std::vector<int>& labels, const QamSpec& spec) {
  const int n = static_cast<int>(labels.size());
  std::vector<int> lev_i(n), lev_q(n);
  for (int k = 0; k < n; ++k) {
    auto [ai, aq] = label_levels(labels[k], spec);
    lev_i[k] = ai;
    lev_q[k] = aq;
  }
  const auto p_i = precode_rail(lev_i, spec.L);
  const auto p_q = precode_rail(lev_q, spec.L);
  RArr s_i(n), s_q(n);
  for (int k = 0; k < n; ++k) {
    s_i(k) = level_amplitude(p_i[k], spec.L);
    s_q(k) = level_amplitude(p_q[k], spec.L);
  }
  const double s0 = level_amplitude(0, spec.L);
  const RArr d_i = duobinary_rail(s_i, s0);
  const RArr d_q = duobinary_rail(s_q, s0);
  CArr sym(n);
  for (int k = 0; k < n; ++k) sym(k) = Complex(d_i(k), d_q(k));
  return sym;
}

void finish_frame(SymbolFrame& f) {
  const auto map = f.layout.index_map();
  for (size_t i = 0; i < map.size(); ++i) {
    if (map[i] == FrameLayout::Pos::PAYLOAD)
      f.payload_positions.push_back(static_cast<int>(i));
    else
      f.training_positions.push_back(static_cast<int>(i));
  }
  f.norm_x = 1.0 / std::sqrt(f.x.abs2().mean());
  f.norm_y = 1.0 / std::sqrt(f.y.abs2().mean());
}

}  // namespace

double qdb_unit_power_scale(const QamSpec& spec) {
  return 1.0 / std::sqrt(4.0 * rail_mean_square(spec.L));
}

double qam_unit_power_scale(const QamSpec& spec) {
  return 1.0 / std::sqrt(2.0 * rail_mean_square(spec.L));
}

std::vector<uint8_t> SymbolFrame::payload_bits(int pol) const {
  const auto& labels = (pol == 0) ? labels_x : labels_y;
  const int bps = spec.bits_per_symbol();
  std::vector<uint8_t> bits;
  bits.reserve(payload_positions.size() * bps);
  for (int pos : payload_positions)
    for (int b = bps - 1; b >= 0; --b)
      bits.push_back(static_cast<uint8_t>((labels[pos] >> b) & 1));
  return bits;
}

SymbolFrame assemble_frame(const std::vector<uint8_t>& payload_bits_x,
                           const std::vector<uint8_t>& payload_bits_y,
                           const FrameLayout& layout, const QamSpec& spec,
                           uint64_t training_seed) {
  SymbolFrame f;
  f.layout = layout;
  f.spec = spec;
  f.encoding = FrameEncoding::PRECODED_QDB;
  const int nt = layout.num_training();
  for (int pol = 0; pol < 2; ++pol) {
    const auto strs =
        generate_training_symbols(spec, nt, seed_for(training_seed, pol));
    std::vector<int> tlabels(nt);
    for (int i = 0; i < nt; ++i) tlabels[i] = pack_label(strs[i]);
    auto labels = merge_labels(pol == 0 ? payload_bits_x : payload_bits_y,
                               tlabels, layout, spec);
    CArr sym = qdb_chain(labels, spec);
    if (pol == 0) {
      f.labels_x = std::move(labels);
      f.x = std::move(sym);
    } else {
      f.labels_y = std::move(labels);
      f.y = std::move(sym);
    }
  }
  finish_frame(f);
  return f;
}

namespace {

// quadrant Gray map: 00 -> 0, 01 -> 1, 11 -> 2, 10 -> 3
constexpr int kQuadGrayToIdx[4] = {0, 1, 3, 2};
constexpr int kQuadIdxToGray[4] = {0, 1, 3, 2};

Complex rotate90(Complex z, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    default: return {z.imag(), -z.real()};
  }
}

// first-quadrant representatives indexed by packed intra bits
const std::vector<Complex>& intra_points(const QamSpec& spec) {
  static const std::vector<Complex> m4 = {{1, 1}};
  static const std::vector<Complex> m16 = {{1, 1}, {1, 3}, {3, 3}, {3, 1}};
  return spec.m == 4 ? m4 : m16;
}

}  // namespace

CArr differential_encode(const std::vector<int>& labels, const QamSpec& spec) {
  const int nb = spec.bits_per_symbol();
  const int intra_bits = nb - 2;
  const auto& reps = intra_points(spec);
  CArr out(labels.size());
  int quad = 0;  // Q(-1) = 0
  for (size_t n = 0; n < labels.size(); ++n) {
    const int packed = labels[n];
    const int dq_gray = (packed >> intra_bits) & 3;
    const int intra = intra_bits ? (packed & ((1 << intra_bits) - 1)) : 0;
    quad = (quad + kQuadGrayToIdx[dq_gray]) & 3;
    out(n) = rotate90(reps[intra], quad);
  }
  return out;
}

SymbolFrame assemble_frame_differential(
    const std::vector<uint8_t>& payload_bits_x,
    const std::vector<uint8_t>& payload_bits_y, const FrameLayout& layout,
    const QamSpec& spec, uint64_t filler_seed) {
  SymbolFrame f;
  f.layout = layout;
  f.spec = spec;
  f.encoding = FrameEncoding::DIFFERENTIAL_QDB;
  const int nt = layout.num_training();
  for (int pol = 0; pol < 2; ++pol) {
    Rng rng(seed_for(filler_seed, pol));
    std::vector<int> filler(nt);
    for (auto& v : filler) v = rng.uniform_int(spec.m);
    auto labels = merge_labels(pol == 0 ? payload_bits_x : payload_bits_y,
                               filler, layout, spec);
    const CArr q = differential_encode(labels, spec);
    CArr sym(q.size());
    Complex prev = intra_points(spec)[0];  // q(-1)
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      sym(k) = q(k) + prev;
      prev = q(k);
    }
    if (pol == 0) {
      f.labels_x = std::move(labels);
      f.x = std::move(sym);
    } else {
      f.labels_y = std::move(labels);
      f.y = std::move(sym);
    }
  }
  finish_frame(f);
  return f;
}

PulseShaper PulseShaper::design(double rolloff, double bandwidth_3db_hz,
                                int span_symbols, int sps,
                                double symbol_rate) {
  if (rolloff <= 0 || rolloff > 1)
    throw std::invalid_argument("rrc rolloff must be in (0, 1]");
  if (span_symbols < 16)
    throw std::invalid_argument("rrc span must be >= 16 symbols");
  PulseShaper p;
  p.rolloff = rolloff;
  p.bandwidth_3db_hz = bandwidth_3db_hz;
  p.span_symbols = span_symbols;
  p.sps = sps;
  const int ntaps = span_symbols * sps + 1;
  const int center = ntaps / 2;
  // time normalized to the design period 1/bandwidth (classic RRC when
  // bandwidth equals the symbol rate)
  const double step = bandwidth_3db_hz / (symbol_rate * sps);
  p.taps.resize(ntaps);
  const double b = rolloff;
  for (int k = 0; k < ntaps; ++k) {
    const double t = (k - center) * step;
    double v;
    if (std::abs(t) < 1e-12) {
      v = 1.0 + b * (4.0 / kPi - 1.0);
    } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
      const double a = kPi / (4.0 * b);
      v = (b / std::numbers::sqrt2) *
          ((1 + 2 / kPi) * std::sin(a) + (1 - 2 / kPi) * std::cos(a));
    } else {
      const double num = std::sin(kPi * t * (1 - b)) +
                         4 * b * t * std::cos(kPi * t * (1 + b));
      const double den = kPi * t * (1 - 16 * b * b * t * t);
      v = num / den;
    }
    p.taps(k) = v;
  }
  p.taps *= std::sqrt(sps / p.taps.square().sum());
  return p;
}

CArr rrc_shape_stream(const CArr& symbols, const PulseShaper& shaper,
                      const SimGrid& grid) {
  const int sps = grid.sps;
  if (shaper.sps != sps)
    throw std::invalid_argument("rrc_shape: shaper sps does not match grid");
  const int nsym = static_cast<int>(symbols.size());
  const int ntaps = static_cast<int>(shaper.taps.size());
  const int delay = ntaps / 2;
  CArr out = CArr::Zero(static_cast<Eigen::Index>(nsym) * sps);
  const int nout = static_cast<int>(out.size());
  for (int k = 0; k < nsym; ++k) {
    const Complex s = symbols(k);
    const int base = k * sps - delay;
    const int i0 = std::max(0, -base);
    const int i1 = std::min(ntaps, nout - base);
    for (int i = i0; i < i1; ++i) out(base + i) += s * shaper.taps(i);
  }
  return out;
}

DualPolWaveform rrc_shape(const SymbolFrame& frame, const PulseShaper& shaper,
                          const SimGrid& grid) {
  DualPolWaveform w;
  w.grid = grid;
  w.x = rrc_shape_stream(frame.x * frame.norm_x, shaper, grid);
  w.y = rrc_shape_stream(frame.y * frame.norm_y, shaper, grid);
  return w;
}

}  // namespace qdb
