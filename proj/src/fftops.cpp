#include "qdb/fftops.hpp"

#include <unsupported/Eigen/FFT>

namespace qdb {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

double fft_bin_freq(int k, int n, double fs) {
  const int kk = (k <= n / 2) ? k : k - n;
  return fs * static_cast<double>(kk) / static_cast<double>(n);
}

CArr fft(const CArr& x) {
  Eigen::FFT<double> engine;
  CVec in = x.matrix();
  CVec out(in.size());
  engine.fwd(out, in);
  return out.array();
}

CArr ifft(const CArr& x) {
  Eigen::FFT<double> engine;
  CVec in = x.matrix();
  CVec out(in.size());
  engine.inv(out, in);
  return out.array();
}

CArr apply_freq_response(const CArr& x, double fs,
                         const std::function<Complex(double)>& h, int guard) {
  const int n = static_cast<int>(x.size());
  const int nfft = next_pow2(n + 2 * guard);
  CArr buf = CArr::Zero(nfft);
  buf.segment(guard, n) = x;
  CArr spec = fft(buf);
  for (int k = 0; k < nfft; ++k) spec(k) *= h(fft_bin_freq(k, nfft, fs));
  CArr out = ifft(spec);
  return out.segment(guard, n);
}

void apply_freq_response_2x2(CArr& x, CArr& y, double fs,
                             const std::function<Jones(double)>& j,
                             int guard) {
  const int n = static_cast<int>(x.size());
  const int nfft = next_pow2(n + 2 * guard);
  CArr bx = CArr::Zero(nfft), by = CArr::Zero(nfft);
  bx.segment(guard, n) = x;
  by.segment(guard, n) = y;
  CArr sx = fft(bx), sy = fft(by);
  for (int k = 0; k < nfft; ++k) {
    const Jones m = j(fft_bin_freq(k, nfft, fs));
    const Complex a = sx(k), b = sy(k);
    sx(k) = m(0, 0) * a + m(0, 1) * b;
    sy(k) = m(1, 0) * a + m(1, 1) * b;
  }
  x = ifft(sx).segment(guard, n);
  y = ifft(sy).segment(guard, n);
}

std::pair<RArr, RArr> psd_welch(const CArr& x, int nfft, double fs) {
  const int n = static_cast<int>(x.size());
  const int hop = nfft / 2;
  RArr win(nfft);
  for (int i = 0; i < nfft; ++i)
    win(i) = 0.5 - 0.5 * std::cos(kTwoPi * i / (nfft - 1));
  const double wpow = win.square().sum();

  RArr acc = RArr::Zero(nfft);
  int nseg = 0;
  for (int start = 0; start + nfft <= n; start += hop) {
    CArr seg = x.segment(start, nfft) * win.cast<Complex>();
    CArr spec = fft(seg);
    acc += spec.abs2();
    ++nseg;
  }
  if (nseg == 0) {  // short input: single zero-padded segment
    CArr seg = CArr::Zero(nfft);
    seg.head(n) = x;
    acc = fft(seg).abs2();
    nseg = 1;
  }
  acc /= static_cast<double>(nseg) * wpow * fs;

  // fftshift so frequencies ascend
  RArr freqs(nfft), psd(nfft);
  for (int k = 0; k < nfft; ++k) {
    const int src = (k + nfft / 2) % nfft;
    freqs(k) = fft_bin_freq(src, nfft, fs);
    psd(k) = acc(src);
  }
  return {freqs, psd};
}

}  // namespace qdb
