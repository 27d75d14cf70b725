#include "qdb/sigcore.hpp"

#include <stdexcept>

namespace qdb {

QamSpec QamSpec::make(int m) {
  if (m != 4 && m != 16) throw std::invalid_argument("QamSpec: m must be 4 or 16");
  QamSpec s;
  s.m = m;
  s.L = (m == 4) ? 2 : 4;
  s.bits_per_rail = (m == 4) ? 1 : 2;
  if (s.L == 2) {
    s.bits_to_level = {0, 1};
    s.level_to_bits = {0, 1};
  } else {
    // 00 -> 0, 01 -> 1, 11 -> 2, 10 -> 3
    s.bits_to_level = {0, 1, 3, 2};
    s.level_to_bits = {0b00, 0b01, 0b11, 0b10};
  }
  return s;
}

int gray_bits_to_level(std::span<const int> bits, const QamSpec& spec) {
  if (static_cast<int>(bits.size()) != spec.bits_per_rail)
    throw std::invalid_argument("gray_bits_to_level: wrong bit-tuple length");
  int packed = 0;
  for (int b : bits) packed = (packed << 1) | (b & 1);
  return spec.bits_to_level[packed];
}

std::vector<int> gray_level_to_bits(int level, const QamSpec& spec) {
  if (level < 0 || level >= spec.L)
    throw std::invalid_argument("gray_level_to_bits: level out of range");
  const int packed = spec.level_to_bits[level];
  std::vector<int> bits(spec.bits_per_rail);
  for (int i = 0; i < spec.bits_per_rail; ++i)
    bits[i] = (packed >> (spec.bits_per_rail - 1 - i)) & 1;
  return bits;
}

double level_amplitude(int level, int L) {
  if (level < 0 || level >= L)
    throw std::invalid_argument("level_amplitude: level out of range");
  return 2.0 * level - (L - 1);
}

int mod_decode_rail(int d_grid, int L) {
  const int k = (d_grid + 2 * (L - 1)) / 2;
  return ((k % L) + L) % L;
}

std::vector<int> rail_candidates(int level, int L) {
  std::vector<int> out;
  for (int d = -2 * (L - 1); d <= 2 * (L - 1); d += 2)
    if (mod_decode_rail(d, L) == level) out.push_back(d);
  return out;
}

int pack_label(const std::string& label) {
  int packed = 0;
  for (char c : label) packed = (packed << 1) | (c == '1' ? 1 : 0);
  return packed;
}

std::string unpack_label(int packed, int nbits) {
  std::string s(nbits, '0');
  for (int i = 0; i < nbits; ++i)
    if ((packed >> (nbits - 1 - i)) & 1) s[i] = '1';
  return s;
}

void check_label(const std::string& label, const QamSpec& spec) {
  if (static_cast<int>(label.size()) != spec.bits_per_symbol())
    throw std::invalid_argument("label '" + label + "': wrong length for m=" +
                                std::to_string(spec.m));
  for (char c : label)
    if (c != '0' && c != '1')
      throw std::invalid_argument("label '" + label + "': not a bit string");
}

CandidateSet candidate_set(const std::string& label, const QamSpec& spec) {
  check_label(label, spec);
  const int nb = spec.bits_per_rail;
  std::vector<int> bits_i(nb), bits_q(nb);
  for (int i = 0; i < nb; ++i) {
    bits_i[i] = label[i] - '0';
    bits_q[i] = label[nb + i] - '0';
  }
  const int a_i = gray_bits_to_level(bits_i, spec);
  const int a_q = gray_bits_to_level(bits_q, spec);
  const auto ci = rail_candidates(a_i, spec.L);
  const auto cq = rail_candidates(a_q, spec.L);

  CandidateSet set;
  set.label = label;
  for (int di : ci)
    for (int dq : cq) set.points.emplace_back(di, dq);
  return set;
}

QdbConstellation build_constellation(const QamSpec& spec) {
  QdbConstellation c;
  c.spec = spec;
  const int L = spec.L;
  const int span = 2 * (L - 1);
  for (int dq = -span; dq <= span; dq += 2)
    for (int di = -span; di <= span; di += 2) {
      c.points.emplace_back(di, dq);
      const int a_i = mod_decode_rail(di, L);
      const int a_q = mod_decode_rail(dq, L);
      std::string label;
      for (int b : gray_level_to_bits(a_i, spec)) label += char('0' + b);
      for (int b : gray_level_to_bits(a_q, spec)) label += char('0' + b);
      c.label_of.push_back(label);
    }
  c.candidates.resize(spec.m);
  for (int packed = 0; packed < spec.m; ++packed)
    c.candidates[packed] =
        candidate_set(unpack_label(packed, spec.bits_per_symbol()), spec);
  return c;
}

const CandidateSet& QdbConstellation::candidates_of(
    const std::string& label) const {
  check_label(label, spec);
  return candidates[pack_label(label)];
}

const CandidateSet& QdbConstellation::candidates_of(int packed_label) const {
  return candidates.at(packed_label);
}

std::pair<int, Complex> nearest_point(Complex z,
                                      std::span<const Complex> points) {
  if (points.empty())
    throw std::invalid_argument("nearest_point: empty point list");
  int best = 0;
  double best_d2 = std::norm(z - points[0]);
  for (int i = 1; i < static_cast<int>(points.size()); ++i) {
    const double d2 = std::norm(z - points[i]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return {best, points[best]};
}

void SimGrid::validate() const {
  if (symbol_rate <= 0) throw std::invalid_argument("grid.symbol_rate_hz must be > 0");
  if (dsp_sps != 2) throw std::invalid_argument("grid.dsp_sps is fixed at 2");
  if (sps < 2 * dsp_sps || (sps & (sps - 1)) != 0)
    throw std::invalid_argument("grid.sps must be a power of two >= 4");
}

}  // namespace qdb
