#include "qdb/channel.hpp"

#include <stdexcept>

#include "qdb/fftops.hpp"
#include "qdb/rng.hpp"

namespace qdb {

void ChannelConfig::validate() const {
  if (delta_f_hz <= 0) throw std::invalid_argument("channel.delta_f_hz must be > 0");
  if (num_channels <= 0 || num_channels % 2 == 0)
    throw std::invalid_argument("channel.num_channels must be odd and > 0");
  if (omega_hz <= 0) throw std::invalid_argument("channel.omega_hz must be > 0");
  if (rolloff <= 0 || rolloff > 1)
    throw std::invalid_argument("channel.rolloff must be in (0, 1]");
  if (dgd_s < 0) throw std::invalid_argument("channel.dgd_s must be >= 0");
  if (linewidth_hz < 0) throw std::invalid_argument("channel.linewidth_hz must be >= 0");
  if (obpf_bw_hz <= 0) throw std::invalid_argument("channel.obpf_bw_hz must be > 0");
}

double wdm_channel_offset(int index, int num_channels, double delta_f_hz) {
  return (index - (num_channels - 1) / 2) * delta_f_hz;
}

void frequency_shift(DualPolWaveform& w, double f_hz) {
  if (f_hz == 0.0) return;
  const Complex step = std::polar(1.0, kTwoPi * f_hz * w.grid.dt());
  Complex rot(1.0, 0.0);
  for (int i = 0; i < w.size(); ++i) {
    w.x(i) *= rot;
    w.y(i) *= rot;
    rot *= step;
  }
}

DualPolWaveform wdm_multiplex(const std::vector<DualPolWaveform>& channels,
                              double delta_f_hz, double omega_hz) {
  if (channels.empty()) throw std::invalid_argument("wdm_multiplex: no channels");
  const int n = static_cast<int>(channels.size());
  const SimGrid grid = channels.front().grid;
  const double half_span = (n - 1) / 2 * delta_f_hz + omega_hz / 2;
  if (half_span >= grid.sample_rate() / 2)
    throw std::invalid_argument("wdm_multiplex: channel span exceeds Nyquist band");

  DualPolWaveform out;
  out.grid = grid;
  out.x = CArr::Zero(channels.front().x.size());
  out.y = CArr::Zero(channels.front().y.size());
  for (int i = 0; i < n; ++i) {
    if (channels[i].x.size() != out.x.size())
      throw std::invalid_argument("wdm_multiplex: channel lengths differ");
    DualPolWaveform shifted = channels[i];
    frequency_shift(shifted, wdm_channel_offset(i, n, delta_f_hz));
    out.x += shifted.x;
    out.y += shifted.y;
  }
  return out;
}

RArr wiener_phase(int n, double linewidth_hz, double dt, uint64_t seed) {
  RArr theta = RArr::Zero(n);
  if (linewidth_hz <= 0 || n == 0) return theta;
  Rng rng(seed);
  const double sigma = std::sqrt(kTwoPi * linewidth_hz * dt);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    theta(i) = acc;
    acc += sigma * rng.gaussian();
  }
  return theta;
}

void apply_phase(DualPolWaveform& w, const RArr& theta) {
  for (int i = 0; i < w.size(); ++i) {
    const Complex r = std::polar(1.0, theta(i));
    w.x(i) *= r;
    w.y(i) *= r;
  }
}

void apply_phase_noise(DualPolWaveform& w, double linewidth_hz,
                       uint64_t seed) {
  if (linewidth_hz <= 0) return;
  apply_phase(w, wiener_phase(w.size(), linewidth_hz, w.grid.dt(), seed));
}

void apply_pmd(DualPolWaveform& w, double dgd_s, double sop_offset_deg) {
  const double phi = sop_offset_deg * kPi / 180.0;
  const double c = std::cos(phi), s = std::sin(phi);
  apply_freq_response_2x2(w.x, w.y, w.grid.sample_rate(), [&](double f) {
    const double wt = kTwoPi * f * dgd_s / 2.0;
    Jones j;
    j(0, 0) = std::polar(1.0, wt) * c;
    j(0, 1) = std::polar(1.0, wt) * s;
    j(1, 0) = std::polar(1.0, -wt) * -s;
    j(1, 1) = std::polar(1.0, -wt) * c;
    return j;
  });
}

void load_ase(DualPolWaveform& w, double osnr_db, uint64_t seed,
              double signal_power_dual_pol) {
  if (!std::isfinite(osnr_db)) return;
  double psig = signal_power_dual_pol;
  if (psig < 0) psig = w.mean_power_dual_pol();
  if (psig <= 0) throw std::invalid_argument("load_ase: nonpositive signal power");
  const double osnr = db_to_lin(osnr_db);
  // dual-pol noise power in the reference bandwidth = psig/osnr; flat over
  // the simulation band and split equally between polarizations
  const double var_per_pol =
      psig / (2.0 * osnr) * (w.grid.sample_rate() / kOsnrRefBandwidthHz);
  const double amp = std::sqrt(var_per_pol);
  Rng rng(seed);
  for (int i = 0; i < w.size(); ++i) w.x(i) += amp * rng.cgaussian();
  for (int i = 0; i < w.size(); ++i) w.y(i) += amp * rng.cgaussian();
}

double obpf_gain(double f_hz, double bw_hz) {
  const double u = 2.0 * f_hz / bw_hz;
  return std::exp(-0.5 * std::numbers::ln2 * u * u * u * u);
}

void obpf(DualPolWaveform& w, double bw_hz) {
  if (bw_hz >= w.grid.sample_rate())
    throw std::invalid_argument("obpf: bandwidth exceeds simulation band");
  auto h = [bw_hz](double f) { return Complex(obpf_gain(f, bw_hz), 0.0); };
  w.x = apply_freq_response(w.x, w.grid.sample_rate(), h);
  w.y = apply_freq_response(w.y, w.grid.sample_rate(), h);
}

namespace {

// Matched-filter and decimate: out(k) = sum_i h(i) x(k*step + delay - i) / sps.
CArr matched_decimate(const CArr& x, const RArr& taps, int sps, int step) {
  const int n = static_cast<int>(x.size());
  const int ntaps = static_cast<int>(taps.size());
  const int delay = ntaps / 2;
  const int nout = n / step;
  CArr out = CArr::Zero(nout);
  for (int k = 0; k < nout; ++k) {
    const int base = k * step + delay;
    const int i0 = std::max(0, base - n + 1);
    const int i1 = std::min(ntaps, base + 1);
    Complex acc(0, 0);
    for (int i = i0; i < i1; ++i) acc += taps(i) * x(base - i);
    out(k) = acc / static_cast<double>(sps);
  }
  return out;
}

}  // namespace

DualPolWaveform coherent_receive(const DualPolWaveform& w,
                                 double lo_linewidth_hz,
                                 const PulseShaper& shaper, uint64_t seed,
                                 RArr* lo_phase_out) {
  const int sps = w.grid.sps;
  const int step = sps / w.grid.dsp_sps;
  if (step * w.grid.dsp_sps != sps)
    throw std::invalid_argument("coherent_receive: sps not divisible by dsp_sps");

  DualPolWaveform mixed = w;
  RArr lo = wiener_phase(mixed.size(), lo_linewidth_hz, w.grid.dt(), seed);
  if (lo_linewidth_hz > 0) apply_phase(mixed, -lo);
  if (lo_phase_out) *lo_phase_out = std::move(lo);

  DualPolWaveform out;
  out.grid = w.grid;
  out.x = matched_decimate(mixed.x, shaper.taps, sps, step);
  out.y = matched_decimate(mixed.y, shaper.taps, sps, step);
  return out;
}

}  // namespace qdb
