#pragma once

#include <functional>
#include <utility>

#include "qdb/types.hpp"

namespace qdb {

// Smallest power of two >= n.
int next_pow2(int n);

// FFT bin center frequency for bin k of an n-point transform at rate fs.
// Bins above n/2 map to negative frequencies.
double fft_bin_freq(int k, int n, double fs);

CArr fft(const CArr& x);
CArr ifft(const CArr& x);

// Applies a scalar frequency response H(f) to x (sample rate fs). The signal
// is zero-padded by guard samples on both sides before the circular pass, so
// filters with impulse responses shorter than the guard see no wraparound.
CArr apply_freq_response(const CArr& x, double fs,
                         const std::function<Complex(double)>& h,
                         int guard = 4096);

// Same idea for a 2x2 Jones response acting on a polarization pair.
void apply_freq_response_2x2(CArr& x, CArr& y, double fs,
                             const std::function<Jones(double)>& j,
                             int guard = 4096);

// Welch periodogram, Hann window, 50% overlap. Returns (freqs, psd) with
// frequencies in ascending order (negative first) and psd in power/Hz.
std::pair<RArr, RArr> psd_welch(const CArr& x, int nfft, double fs);

}  // namespace qdb
