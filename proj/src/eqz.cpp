#include "qdb/eqz.hpp"

#include <stdexcept>

#include "qdb/rng.hpp"

namespace qdb {

ButterflyState init_taps(int n_taps) {
  if (n_taps <= 0 || n_taps % 2 == 0)
    throw std::invalid_argument("init_taps: tap count must be odd");
  ButterflyState st;
  st.h_xx = CVec::Zero(n_taps);
  st.h_xy = CVec::Zero(n_taps);
  st.h_yx = CVec::Zero(n_taps);
  st.h_yy = CVec::Zero(n_taps);
  st.h_xx(n_taps / 2) = Complex(1, 0);
  st.h_yy(n_taps / 2) = Complex(1, 0);
  return st;
}

std::pair<Complex, Complex> equalize_symbol(const ButterflyState& st,
                                            const CVec& wx, const CVec& wy) {
  if (wx.size() != st.h_xx.size() || wy.size() != st.h_xx.size())
    throw std::invalid_argument("equalize_symbol: window length mismatch");
  const Complex ex =
      (st.h_xx.array() * wx.array()).sum() + (st.h_xy.array() * wy.array()).sum();
  const Complex ey =
      (st.h_yx.array() * wx.array()).sum() + (st.h_yy.array() * wy.array()).sum();
  return {ex, ey};
}

namespace {

Complex nearest_of(Complex z, std::span<const Complex> pts) {
  return nearest_point(z, pts).second;
}

// Exact nearest point of the scaled duobinary square grid.
Complex nearest_grid(Complex z, int L, double scale) {
  const double s2 = 2.0 * scale;
  const double lim = L - 1.0;
  double ri = std::round(z.real() / s2);
  double rq = std::round(z.imag() / s2);
  ri = std::clamp(ri, -lim, lim);
  rq = std::clamp(rq, -lim, lim);
  return {s2 * ri, s2 * rq};
}

struct Decision {
  Complex chosen;
};

// Shared LMS body: error in the derotated domain, re-rotated for the tap
// gradient. h += mu * (eps * e^{+j phi}) * conj(window).
template <typename DecideX, typename DecideY>
EqOutput lms_step(ButterflyState& st, const CVec& wx, const CVec& wy,
                  DecideX&& decide_x, DecideY&& decide_y, double phi_x,
                  double phi_y, double mu) {
  EqOutput out;
  auto [ex, ey] = equalize_symbol(st, wx, wy);
  out.e_x = ex;
  out.e_y = ey;
  const Complex rx = std::polar(1.0, -phi_x);
  const Complex ry = std::polar(1.0, -phi_y);
  out.derot_x = ex * rx;
  out.derot_y = ey * ry;
  out.chosen_x = decide_x(out.derot_x);
  out.chosen_y = decide_y(out.derot_y);
  const Complex eps_x = out.chosen_x - out.derot_x;
  const Complex eps_y = out.chosen_y - out.derot_y;
  out.err2_x = std::norm(eps_x);
  out.err2_y = std::norm(eps_y);
  const Complex gx = mu * eps_x * std::conj(rx);
  const Complex gy = mu * eps_y * std::conj(ry);
  st.h_xx.noalias() += gx * wx.conjugate();
  st.h_xy.noalias() += gx * wy.conjugate();
  st.h_yx.noalias() += gy * wx.conjugate();
  st.h_yy.noalias() += gy * wy.conjugate();
  return out;
}

}  // namespace

EqOutput ts_lms_step(ButterflyState& st, const CVec& wx, const CVec& wy,
                     std::span<const Complex> cand_x,
                     std::span<const Complex> cand_y, double phi_x,
                     double phi_y, double mu) {
  if (cand_x.empty() || cand_y.empty())
    throw std::invalid_argument("ts_lms_step: missing training candidates");
  return lms_step(
      st, wx, wy, [&](Complex z) { return nearest_of(z, cand_x); },
      [&](Complex z) { return nearest_of(z, cand_y); }, phi_x, phi_y, mu);
}

EqOutput dd_lms_step(ButterflyState& st, const CVec& wx, const CVec& wy,
                     double phi_x, double phi_y,
                     std::span<const Complex> grid_points, double mu) {
  return lms_step(
      st, wx, wy, [&](Complex z) { return nearest_of(z, grid_points); },
      [&](Complex z) { return nearest_of(z, grid_points); }, phi_x, phi_y, mu);
}

CArr pre_filter(const CArr& samples, double alpha) {
  if (alpha >= 1.0 || alpha < 0.0)
    throw std::invalid_argument("pre_filter: alpha must be in [0, 1)");
  CArr out(samples.size());
  Complex y1(0, 0), y2(0, 0);
  for (Eigen::Index k = 0; k < samples.size(); ++k) {
    const Complex y = samples(k) - alpha * y2;
    out(k) = y;
    y2 = y1;
    y1 = y;
  }
  return out;
}

CArr post_filter(const CArr& symbols, double alpha) {
  CArr out(symbols.size());
  Complex prev(0, 0);
  for (Eigen::Index n = 0; n < symbols.size(); ++n) {
    out(n) = symbols(n) + alpha * prev;
    prev = symbols(n);
  }
  return out;
}

double cma_radius_for(const QamSpec& spec, double alpha) {
  // moments of the symbol-rate pre-filtered reference for a unit-power
  // transmitted QDB stream; fixed seed keeps the constant reproducible
  const int n = 1 << 15;
  Rng rng(0xC0FFEEu);
  const double g = qdb_unit_power_scale(spec);
  Complex prev_q(1, 1);
  Complex y1(0, 0);
  double p2 = 0, p4 = 0;
  int counted = 0;
  for (int k = 0; k < n; ++k) {
    const Complex q(level_amplitude(rng.uniform_int(spec.L), spec.L),
                    level_amplitude(rng.uniform_int(spec.L), spec.L));
    const Complex d = (q + prev_q) * g;
    prev_q = q;
    const Complex y = d - alpha * y1;
    y1 = y;
    if (k >= 100) {
      const double m2 = std::norm(y);
      p2 += m2;
      p4 += m2 * m2;
      ++counted;
    }
  }
  return (p4 / counted) / (p2 / counted);
}

void cma_step(ButterflyState& st, const CVec& wx, const CVec& wy,
              double radius, double mu) {
  auto [ex, ey] = equalize_symbol(st, wx, wy);
  const double eps_x = radius - std::norm(ex);
  const double eps_y = radius - std::norm(ey);
  const Complex gx = mu * eps_x * ex;
  const Complex gy = mu * eps_y * ey;
  st.h_xx.noalias() += gx * wx.conjugate();
  st.h_xy.noalias() += gx * wy.conjugate();
  st.h_yx.noalias() += gy * wx.conjugate();
  st.h_yy.noalias() += gy * wy.conjugate();
}

double row_correlation(const ButterflyState& st) {
  const int n = st.num_taps();
  const double nu = std::sqrt(st.h_xx.squaredNorm() + st.h_xy.squaredNorm());
  const double nv = std::sqrt(st.h_yx.squaredNorm() + st.h_yy.squaredNorm());
  if (nu == 0 || nv == 0) return 0.0;
  double best = 0.0;
  for (int k = -(n - 1); k <= n - 1; ++k) {
    Complex acc(0, 0);
    for (int i = 0; i < n; ++i) {
      const int j = i - k;
      if (j < 0 || j >= n) continue;
      acc += st.h_yx(i) * std::conj(st.h_xx(j));
      acc += st.h_yy(i) * std::conj(st.h_xy(j));
    }
    best = std::max(best, std::abs(acc) / (nu * nv));
  }
  return best;
}

bool singularity_guard(ButterflyState& st, double corr_threshold) {
  if (row_correlation(st) <= corr_threshold) return false;
  st.h_yx = -st.h_xy.reverse().conjugate();
  st.h_yy = st.h_xx.reverse().conjugate();
  return true;
}

EqRun run_equalizer(const CArr& in_x, const CArr& in_y,
                    const SymbolFrame& frame, const QdbConstellation& constel,
                    double grid_scale, Engine engine, const EqConfig& eq_cfg,
                    const CmaConfig& cma_cfg, const CprConfig& cpr_cfg) {
  const QamSpec& spec = constel.spec;
  const auto map = frame.layout.index_map();
  const int n_sym = static_cast<int>(map.size());
  const int dsp_sps = 2;
  if (in_x.size() != in_y.size() ||
      in_x.size() < static_cast<Eigen::Index>(n_sym) * dsp_sps)
    throw std::invalid_argument("run_equalizer: input too short for frame");

  const int ntaps = eq_cfg.num_taps;
  const int half = ntaps / 2;

  EqRun run;
  run.sym_x.resize(n_sym);
  run.sym_y.resize(n_sym);
  run.err2_x.resize(n_sym);
  run.err2_y.resize(n_sym);
  run.mode_timeline.resize(n_sym);
  if (engine != Engine::CMA) {
    run.phi_x.resize(n_sym);
    run.phi_y.resize(n_sym);
  }

  ButterflyState st = init_taps(ntaps);
  st.mu_train = eq_cfg.mu_train;
  st.mu_dd = eq_cfg.mu_dd;
  st.mu_cma = cma_cfg.mu;

  // CMA consumes the pre-filtered stream; the LMS engines the plain one.
  CArr fx, fy;
  const CArr* sx = &in_x;
  const CArr* sy = &in_y;
  double radius = cma_cfg.radius;
  if (engine == Engine::CMA) {
    fx = pre_filter(in_x, cma_cfg.alpha);
    fy = pre_filter(in_y, cma_cfg.alpha);
    sx = &fx;
    sy = &fy;
    if (radius <= 0) radius = cma_radius_for(spec, cma_cfg.alpha);
    st.mode = EqMode::CMA;
  } else if (engine == Engine::DD_LMS) {
    st.mode = EqMode::TRACKING;  // training stage bypassed
  }

  // scaled candidate sets per packed label, and the scaled full grid
  std::vector<std::vector<Complex>> cand(spec.m);
  for (int p = 0; p < spec.m; ++p) {
    for (Complex pt : constel.candidates_of(p).points)
      cand[p].push_back(pt * grid_scale);
  }

  PhaseTracker trk_x(cpr_cfg.daml_window), trk_y(cpr_cfg.daml_window);
  const int L = spec.L;

  CVec wx(ntaps), wy(ntaps);
  auto fill_windows = [&](int n) {
    const int nin = static_cast<int>(sx->size());
    for (int i = 0; i < ntaps; ++i) {
      const int idx = dsp_sps * n + half - i;
      if (idx < 0 || idx >= nin) {
        wx(i) = Complex(0, 0);
        wy(i) = Complex(0, 0);
      } else {
        wx(i) = (*sx)(idx);
        wy(i) = (*sy)(idx);
      }
    }
  };

  for (int n = 0; n < n_sym; ++n) {
    fill_windows(n);
    if (engine == Engine::CMA) {
      auto [ex, ey] = equalize_symbol(st, wx, wy);
      run.sym_x(n) = ex;
      run.sym_y(n) = ey;
      run.err2_x(n) = std::pow(radius - std::norm(ex), 2);
      run.err2_y(n) = std::pow(radius - std::norm(ey), 2);
      cma_step(st, wx, wy, radius, st.mu_cma);
      if (n + 1 == cma_cfg.guard_after)
        run.guard_fired = singularity_guard(st, cma_cfg.corr_threshold);
      run.mode_timeline[n] = static_cast<uint8_t>(EqMode::CMA);
      continue;
    }

    const bool at_training = map[n] == FrameLayout::Pos::TRAINING;
    const bool use_candidates = (engine == Engine::TS_LMS) && at_training;
    if (engine == Engine::TS_LMS && n == frame.layout.n1)
      st.mode = EqMode::TRACKING;  // one-way switch after the initial block
    const double mu = (n < frame.layout.n1)
                          ? st.mu_train
                          : (use_candidates ? st.mu_train : st.mu_dd);
    const double phi_x = trk_x.phi();
    const double phi_y = trk_y.phi();

    EqOutput out;
    if (use_candidates) {
      out = ts_lms_step(st, wx, wy, cand[frame.labels_x[n]],
                        cand[frame.labels_y[n]], phi_x, phi_y, mu);
    } else {
      out = lms_step(
          st, wx, wy,
          [&](Complex z) { return nearest_grid(z, L, grid_scale); },
          [&](Complex z) { return nearest_grid(z, L, grid_scale); }, phi_x,
          phi_y, mu);
    }
    trk_x.update(out.e_x, out.chosen_x);
    trk_y.update(out.e_y, out.chosen_y);

    run.sym_x(n) = out.derot_x;
    run.sym_y(n) = out.derot_y;
    run.err2_x(n) = out.err2_x;
    run.err2_y(n) = out.err2_y;
    run.phi_x(n) = phi_x;
    run.phi_y(n) = phi_y;
    run.mode_timeline[n] = static_cast<uint8_t>(st.mode);
  }

  run.final_state = std::move(st);
  return run;
}

}  // namespace qdb
