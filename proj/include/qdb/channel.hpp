#pragma once

#include <vector>

#include "qdb/txdsp.hpp"
#include "qdb/types.hpp"
#include "qdb/waveform.hpp"

namespace qdb {

struct ChannelConfig {
  double delta_f_hz = 30e9;
  int num_channels = 5;
  double omega_hz = 32e9;  // TX RRC 3-dB bandwidth
  double rolloff = 0.1;
  double dgd_s = 50e-12;
  double sop_offset_deg = 45.0;
  double linewidth_hz = 100e3;
  double osnr_db = 16.0;  // infinity = noiseless
  double obpf_bw_hz = 50e9;

  void validate() const;
};

// Channel i of n sits at offset (i - (n-1)/2) * delta_f.
double wdm_channel_offset(int index, int num_channels, double delta_f_hz);

DualPolWaveform wdm_multiplex(const std::vector<DualPolWaveform>& channels,
                              double delta_f_hz, double omega_hz);

// Frequency shift by f (multiplication by exp(j*2*pi*f*t)).
void frequency_shift(DualPolWaveform& w, double f_hz);

// Wiener phase walk: increments N(0, 2*pi*linewidth*dt), theta(0) = 0.
RArr wiener_phase(int n, double linewidth_hz, double dt, uint64_t seed);

// Multiplies both polarizations by exp(+j*theta) (one laser).
void apply_phase(DualPolWaveform& w, const RArr& theta);
void apply_phase_noise(DualPolWaveform& w, double linewidth_hz, uint64_t seed);

// First-order PMD: J(w) = diag(e^{+j w tau/2}, e^{-j w tau/2}) * R(dphi).
void apply_pmd(DualPolWaveform& w, double dgd_s, double sop_offset_deg);

// ASE loading. signal_power_dual_pol is the dual-polarization power of the
// channel the OSNR refers to; pass a negative value to measure the waveform
// itself (single-channel use). osnr_db = +inf leaves the waveform untouched.
void load_ase(DualPolWaveform& w, double osnr_db, uint64_t seed,
              double signal_power_dual_pol = -1.0);

// Order-2 super-Gaussian optical bandpass, -3 dB at +-bw/2, phase-free.
void obpf(DualPolWaveform& w, double bw_hz);
double obpf_gain(double f_hz, double bw_hz);

// LO mixing (conjugate Wiener phase), matched RRC and decimation to
// grid.dsp_sps samples per symbol with group-delay compensation. Sample 2n of
// the output is symbol n's instant. The first and last ~span/2 symbols carry
// filter edge transients.
DualPolWaveform coherent_receive(const DualPolWaveform& w,
                                 double lo_linewidth_hz,
                                 const PulseShaper& shaper, uint64_t seed,
                                 RArr* lo_phase_out = nullptr);

}  // namespace qdb
