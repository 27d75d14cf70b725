#include "qdb/detect.hpp"

#include <limits>
#include <stdexcept>

namespace qdb {

int sbs_decode_rail_level(double value, int L, double scale) {
  const double lim = 2.0 * (L - 1);
  double d = std::round(value / (2.0 * scale)) * 2.0;
  d = std::clamp(d, -lim, lim);
  return mod_decode_rail(static_cast<int>(d), L);
}

std::vector<uint8_t> sbs_decode(const CArr& symbols, const QamSpec& spec,
                                double scale) {
  const int n = static_cast<int>(symbols.size());
  std::vector<uint8_t> bits;
  bits.reserve(static_cast<size_t>(n) * spec.bits_per_symbol());
  for (int k = 0; k < n; ++k) {
    const int ai = sbs_decode_rail_level(symbols(k).real(), spec.L, scale);
    const int aq = sbs_decode_rail_level(symbols(k).imag(), spec.L, scale);
    for (int b : gray_level_to_bits(ai, spec)) bits.push_back(uint8_t(b));
    for (int b : gray_level_to_bits(aq, spec)) bits.push_back(uint8_t(b));
  }
  return bits;
}

std::vector<int> viterbi_rail(const RArr& obs, const Eigen::MatrixXd& emissions,
                              int init_state) {
  const int n = static_cast<int>(obs.size());
  const int L = static_cast<int>(emissions.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> metric(L, kInf), next(L);
  if (init_state < 0) {
    std::fill(metric.begin(), metric.end(), 0.0);
  } else {
    metric[init_state] = 0.0;
  }
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> from(n, L);

  for (int k = 0; k < n; ++k) {
    for (int cur = 0; cur < L; ++cur) {
      double best = kInf;
      int arg = 0;
      for (int prev = 0; prev < L; ++prev) {
        if (metric[prev] == kInf) continue;
        const double d = obs(k) - emissions(prev, cur);
        const double m = metric[prev] + d * d;
        if (m < best) {
          best = m;
          arg = prev;
        }
      }
      next[cur] = best;
      from(k, cur) = static_cast<uint8_t>(arg);
    }
    metric = next;
  }

  int state = 0;
  double best = kInf;
  for (int s = 0; s < L; ++s)
    if (metric[s] < best) {
      best = metric[s];
      state = s;
    }
  std::vector<int> path(n);
  for (int k = n - 1; k >= 0; --k) {
    path[k] = state;
    state = from(k, state);
  }
  return path;
}

std::vector<int> mlsd_decode_rail(const RArr& rail, int L, double scale) {
  Eigen::MatrixXd em(L, L);
  for (int prev = 0; prev < L; ++prev)
    for (int cur = 0; cur < L; ++cur)
      em(prev, cur) =
          scale * (level_amplitude(cur, L) + level_amplitude(prev, L));
  const auto p = viterbi_rail(rail, em, 0);
  std::vector<int> levels(p.size());
  int prev = 0;  // p(-1) = 0
  for (size_t k = 0; k < p.size(); ++k) {
    levels[k] = (p[k] + prev) % L;
    prev = p[k];
  }
  return levels;
}

std::vector<uint8_t> mlsd_decode(const CArr& symbols, const QamSpec& spec,
                                 double scale) {
  const int n = static_cast<int>(symbols.size());
  const auto ai = mlsd_decode_rail(symbols.real(), spec.L, scale);
  const auto aq = mlsd_decode_rail(symbols.imag(), spec.L, scale);
  std::vector<uint8_t> bits;
  bits.reserve(static_cast<size_t>(n) * spec.bits_per_symbol());
  for (int k = 0; k < n; ++k) {
    for (int b : gray_level_to_bits(ai[k], spec)) bits.push_back(uint8_t(b));
    for (int b : gray_level_to_bits(aq[k], spec)) bits.push_back(uint8_t(b));
  }
  return bits;
}

namespace {

constexpr int kQuadIdxToGray[4] = {0, 1, 3, 2};

int quadrant_of(Complex z) {
  const double a = std::arg(z);  // (-pi, pi]
  const double q = a / (kPi / 2.0);
  const int k = static_cast<int>(std::floor(q));
  return ((k % 4) + 4) % 4;
}

Complex rotate90(Complex z, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    default: return {z.imag(), -z.real()};
  }
}

const std::vector<Complex>& intra_points(const QamSpec& spec) {
  static const std::vector<Complex> m4 = {{1, 1}};
  static const std::vector<Complex> m16 = {{1, 1}, {1, 3}, {3, 3}, {3, 1}};
  return spec.m == 4 ? m4 : m16;
}

std::vector<int> labels_from_qam(const std::vector<Complex>& qam,
                                 const QamSpec& spec, double scale) {
  const auto& reps = intra_points(spec);
  const int intra_bits = spec.bits_per_symbol() - 2;
  std::vector<int> labels(qam.size());
  int prev_quad = 0;  // receiver reference; first label may be wrong
  for (size_t n = 0; n < qam.size(); ++n) {
    const int quad = quadrant_of(qam[n]);
    const int dq = ((quad - prev_quad) % 4 + 4) % 4;
    prev_quad = quad;
    int intra = 0;
    if (intra_bits > 0) {
      const Complex base = rotate90(qam[n], -quad);
      double best = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < reps.size(); ++i) {
        const double d = std::norm(base - reps[i] * scale);
        if (d < best) {
          best = d;
          intra = static_cast<int>(i);
        }
      }
    }
    labels[n] = (kQuadIdxToGray[dq] << intra_bits) | intra;
  }
  return labels;
}

}  // namespace

std::vector<int> differential_decode(const CArr& symbols, const QamSpec& spec,
                                     double scale) {
  std::vector<Complex> qam(symbols.size());
  for (Eigen::Index k = 0; k < symbols.size(); ++k) qam[k] = symbols(k);
  return labels_from_qam(qam, spec, scale);
}

std::vector<int> differential_decode_mlsd(const CArr& post_filtered,
                                          const QamSpec& spec, double scale,
                                          double alpha) {
  const int L = spec.L;
  Eigen::MatrixXd em(L, L);
  for (int prev = 0; prev < L; ++prev)
    for (int cur = 0; cur < L; ++cur)
      em(prev, cur) = scale * (level_amplitude(cur, L) +
                               alpha * level_amplitude(prev, L));
  const auto li = viterbi_rail(post_filtered.real(), em, -1);
  const auto lq = viterbi_rail(post_filtered.imag(), em, -1);
  std::vector<Complex> qam(li.size());
  for (size_t k = 0; k < li.size(); ++k)
    qam[k] = scale * Complex(level_amplitude(li[k], L),
                             level_amplitude(lq[k], L));
  return labels_from_qam(qam, spec, scale);
}

BerStats count_errors(const std::vector<uint8_t>& tx_bits,
                      const std::vector<uint8_t>& rx_bits,
                      int skip_head_bits) {
  if (tx_bits.size() != rx_bits.size())
    throw std::invalid_argument("count_errors: length mismatch");
  BerStats st;
  st.skip_head = skip_head_bits;
  for (size_t i = skip_head_bits; i < tx_bits.size(); ++i) {
    ++st.bits_compared;
    if (tx_bits[i] != rx_bits[i]) ++st.bit_errors;
  }
  return st;
}

namespace {

// agreement of rx against truth over payload positions, rx delayed by lag
double agreement(const std::vector<uint8_t>& truth,
                 const std::vector<uint8_t>& rx,
                 const std::vector<int>& payload_positions, int bps, int lag,
                 int skip) {
  const int nsym = static_cast<int>(truth.size()) / bps;
  int64_t match = 0, total = 0;
  for (size_t j = skip; j < payload_positions.size(); ++j) {
    const int p = payload_positions[j];
    const int rp = p + lag;
    if (rp < 0 || rp >= nsym) continue;
    for (int b = 0; b < bps; ++b) {
      ++total;
      if (truth[p * bps + b] == rx[rp * bps + b]) ++match;
    }
  }
  return total > 0 ? static_cast<double>(match) / total : 0.0;
}

void count_stream(const std::vector<uint8_t>& truth,
                  const std::vector<uint8_t>& rx,
                  const std::vector<int>& payload_positions, int bps, int lag,
                  int skip, int64_t& bits, int64_t& errs) {
  const int nsym = static_cast<int>(truth.size()) / bps;
  for (size_t j = skip; j < payload_positions.size(); ++j) {
    const int p = payload_positions[j];
    const int rp = p + lag;
    if (rp < 0 || rp >= nsym) continue;
    for (int b = 0; b < bps; ++b) {
      ++bits;
      if (truth[p * bps + b] != rx[rp * bps + b]) ++errs;
    }
  }
}

}  // namespace

AlignedBer count_errors_aligned(const std::vector<uint8_t>& truth_frame_x,
                                const std::vector<uint8_t>& truth_frame_y,
                                const std::vector<uint8_t>& rx_frame_x,
                                const std::vector<uint8_t>& rx_frame_y,
                                const std::vector<int>& payload_positions,
                                int bits_per_symbol, int skip_head_symbols,
                                int max_lag_symbols) {
  AlignedBer out;
  out.stats.skip_head = skip_head_symbols;

  // best lag for every (truth, rx) pairing
  double best[2][2] = {{0, 0}, {0, 0}};
  int best_lag[2][2] = {{0, 0}, {0, 0}};
  const std::vector<uint8_t>* truths[2] = {&truth_frame_x, &truth_frame_y};
  const std::vector<uint8_t>* rxs[2] = {&rx_frame_x, &rx_frame_y};
  for (int t = 0; t < 2; ++t)
    for (int r = 0; r < 2; ++r)
      for (int lag = -max_lag_symbols; lag <= max_lag_symbols; ++lag) {
        const double a = agreement(*truths[t], *rxs[r], payload_positions,
                                   bits_per_symbol, lag, skip_head_symbols);
        if (a > best[t][r]) {
          best[t][r] = a;
          best_lag[t][r] = lag;
        }
      }

  const double straight = best[0][0] + best[1][1];
  const double crossed = best[0][1] + best[1][0];
  out.swapped = crossed > straight;
  const int rx_for_x = out.swapped ? 1 : 0;
  const int rx_for_y = 1 - rx_for_x;
  out.match_x = best[0][rx_for_x];
  out.match_y = best[1][rx_for_y];
  out.lag_x = best_lag[0][rx_for_x];
  out.lag_y = best_lag[1][rx_for_y];
  out.aligned = out.match_x >= 0.7 && out.match_y >= 0.7;

  count_stream(truth_frame_x, *rxs[rx_for_x], payload_positions,
               bits_per_symbol, out.lag_x, skip_head_symbols, out.stats.bits_x,
               out.stats.errors_x);
  count_stream(truth_frame_y, *rxs[rx_for_y], payload_positions,
               bits_per_symbol, out.lag_y, skip_head_symbols, out.stats.bits_y,
               out.stats.errors_y);
  out.stats.bits_compared = out.stats.bits_x + out.stats.bits_y;
  out.stats.bit_errors = out.stats.errors_x + out.stats.errors_y;
  return out;
}

OsnrCrossing required_osnr(const std::vector<std::pair<double, double>>& curve,
                           double target_ber) {
  OsnrCrossing out;
  for (size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].second == target_ber) {
      out.found = true;
      out.osnr_db = curve[i].first;
      return out;
    }
    if (i + 1 < curve.size() && curve[i].second > target_ber &&
        curve[i + 1].second < target_ber && curve[i + 1].second > 0) {
      const double l1 = std::log10(curve[i].second);
      const double l2 = std::log10(curve[i + 1].second);
      const double lt = std::log10(target_ber);
      out.found = true;
      out.osnr_db = curve[i].first + (l1 - lt) / (l1 - l2) *
                                         (curve[i + 1].first - curve[i].first);
      return out;
    }
  }
  return out;
}

}  // namespace qdb
