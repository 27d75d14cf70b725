#pragma once

#include <span>
#include <vector>

#include "qdb/cpr.hpp"
#include "qdb/sigcore.hpp"
#include "qdb/txdsp.hpp"
#include "qdb/types.hpp"

namespace qdb {

enum class EqMode : uint8_t { TRAINING = 0, TRACKING = 1, CMA = 2 };
enum class Engine { TS_LMS, DD_LMS, CMA };

// 2x2 butterfly equalizer state, T/2-spaced taps. Output symbols are plain
// FIR sums E_x = h_xx.w_x + h_xy.w_y (no conjugation on the taps).
struct ButterflyState {
  CVec h_xx, h_xy, h_yx, h_yy;
  double mu_train = 1e-3;
  double mu_dd = 1e-4;
  double mu_cma = 1e-3;
  EqMode mode = EqMode::TRAINING;

  int num_taps() const { return static_cast<int>(h_xx.size()); }
  double tap_energy() const {
    return h_xx.squaredNorm() + h_xy.squaredNorm() + h_yx.squaredNorm() +
           h_yy.squaredNorm();
  }
};

ButterflyState init_taps(int n_taps);

std::pair<Complex, Complex> equalize_symbol(const ButterflyState& st,
                                            const CVec& wx, const CVec& wy);

struct EqOutput {
  Complex e_x, e_y;            // equalizer outputs
  Complex derot_x, derot_y;    // after e^{-j phi}
  Complex chosen_x, chosen_y;  // decision / resolved training point
  double err2_x = 0, err2_y = 0;
};

// One training-mode update: resolve the training symbol to its nearest
// candidate position in the derotated domain, then LMS.
EqOutput ts_lms_step(ButterflyState& st, const CVec& wx, const CVec& wy,
                     std::span<const Complex> cand_x,
                     std::span<const Complex> cand_y, double phi_x,
                     double phi_y, double mu);

// Decision-directed update against the full constellation grid.
EqOutput dd_lms_step(ButterflyState& st, const CVec& wx, const CVec& wy,
                     double phi_x, double phi_y,
                     std::span<const Complex> grid_points, double mu);

struct CmaConfig {
  double alpha = 0.7;
  double mu = 1e-3;
  double radius = 0.0;  // 0 = derive from the pre-filtered reference
  int guard_after = 5000;
  double corr_threshold = 0.9;
};

// Leaky inverse of the duobinary adder, one-symbol delay on the 2-sps
// stream: y(k) = x(k) - alpha*y(k-2).
CArr pre_filter(const CArr& samples, double alpha);

// Partial-response reshaping at symbol rate: y(n) = x(n) + alpha*x(n-1).
CArr post_filter(const CArr& symbols, double alpha);

// CMA modulus R = E|y|^4 / E|y|^2 of the pre-filtered reference stream for
// a unit-power transmitted QDB signal.
double cma_radius_for(const QamSpec& spec, double alpha);

void cma_step(ButterflyState& st, const CVec& wx, const CVec& wy,
              double radius, double mu);

// Reinitializes the y output row from the x row when the two rows have
// collapsed onto the same tributary. Returns true when the guard fired.
bool singularity_guard(ButterflyState& st, double corr_threshold);
double row_correlation(const ButterflyState& st);

struct EqConfig {
  int num_taps = 11;
  double mu_train = 1e-3;
  double mu_dd = 1e-4;
};

struct CprConfig {
  int daml_window = 20;
  int vv_block = 64;
  int bps_block = 64;
  int bps_test_phases = 32;
};

struct EqRun {
  CArr sym_x, sym_y;   // symbol-rate outputs; TS/DD: derotated decisions
                       // domain, CMA: raw equalizer output (CPR external)
  RArr phi_x, phi_y;   // per-symbol carrier phase (TS/DD engines)
  RArr err2_x, err2_y; // per-symbol error power
  std::vector<uint8_t> mode_timeline;  // EqMode per symbol
  bool guard_fired = false;
  ButterflyState final_state;
};

// Runs one frame through the selected engine. Inputs are 2-sps streams with
// sample 2n aligned to symbol n. grid_scale maps the integer constellation
// grid to the nominal received amplitude.
EqRun run_equalizer(const CArr& in_x, const CArr& in_y,
                    const SymbolFrame& frame, const QdbConstellation& constel,
                    double grid_scale, Engine engine, const EqConfig& eq_cfg,
                    const CmaConfig& cma_cfg, const CprConfig& cpr_cfg);

}  // namespace qdb
