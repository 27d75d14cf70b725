#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdb/channel.hpp"
#include "qdb/detect.hpp"
#include "qdb/eqz.hpp"
#include "qdb/txdsp.hpp"
#include "qdb/types.hpp"

namespace qdb {

enum class Detector { SBS, MLSD };

std::string to_string(Engine e);
std::string to_string(Detector d);

// Configuration / validation error carrying the offending key path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key(key) {}
  std::string key;
};

struct EqualizerParams {
  std::vector<Engine> engines = {Engine::TS_LMS, Engine::CMA};
  int num_taps = 11;
  double mu_train = 1e-3;
  double mu_dd = 1e-4;
  double mu_cma = 1e-3;
  double cma_alpha = 0.7;
  int cma_guard_after = 5000;
  double cma_corr_threshold = 0.9;
  int cma_skip_head = 6000;  // payload symbols dropped before counting
  int ts_skip_head = 0;
  int max_lag = 8;
};

struct SweepParams {
  std::vector<double> osnr_list_db;      // empty = per-m default
  std::vector<double> dphi_list_deg;     // empty = 0:5:90
  std::vector<double> delta_f_list_ghz;  // empty = default grid
  double target_ber = 2e-2;
  double spacing_baseline_ghz = 40.0;
};

struct SimConfig {
  std::string scheme = "QDB";
  int m = 4;
  SimGrid grid;
  ChannelConfig channel;
  FrameLayout layout;
  EqualizerParams eq;
  CprConfig cpr;
  std::vector<Detector> detectors = {Detector::SBS, Detector::MLSD};
  int trials = 1;
  uint64_t base_seed = 1;
  SweepParams sweeps;
  int workers = 0;           // 0 = hardware concurrency
  std::string trace_dir;     // non-empty = emit per-trial traces

  void validate() const;
  std::vector<double> osnr_grid() const;
  std::vector<double> dphi_grid() const;
  std::vector<double> delta_f_grid_ghz() const;
};

// Strict parse: unknown keys, type mismatches and constraint violations all
// throw ConfigError naming the key path. An empty or missing file yields the
// full defaults. The effective config can be echoed with config_to_json.
SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text);
std::string config_to_json(const SimConfig& cfg);

struct EngineDetectorResult {
  Engine engine = Engine::TS_LMS;
  Detector detector = Detector::SBS;
  BerStats stats;
  bool converged = false;
  bool aligned = false;
  bool swapped = false;
  double last_half_ber = 1.0;
  double err_power_tail = 0.0;
  int slip_count = 0;
};

struct TrialResult {
  uint64_t trial_key = 0;
  std::vector<EngineDetectorResult> results;
  double wall_time_s = 0.0;  // excluded from the determinism digest

  const EngineDetectorResult* find(Engine e, Detector d) const;
  std::string digest() const;
};

// One full tx -> channel -> rx -> detection pass. trial_key feeds the seed
// derivation together with the config base seed.
TrialResult run_trial(const SimConfig& cfg, uint64_t trial_key);

struct ConvergenceRow {
  double dphi_deg;
  Engine engine;
  int trials;
  int converged;
  double probability, ci_low, ci_high;
};

struct BerRow {
  double osnr_db;
  Engine engine;
  Detector detector;
  int64_t bits, errors;
  double ber, ci_low, ci_high;
};

struct SpacingRow {
  double delta_f_ghz;
  Engine engine;
  Detector detector;
  bool found;
  double required_osnr_db;
};

struct SpacingSummary {
  Engine engine;
  Detector detector;
  bool found = false;
  double baseline_osnr_db = 0;
  double one_db_spacing_ghz = 0;
};

struct ValidateRow {
  double osnr_db;
  int64_t bits, errors;
  double ber, ber_analytic, effective_osnr_db, delta_db;
};

std::vector<ConvergenceRow> convergence_sweep(const SimConfig& cfg,
                                              const std::vector<double>& dphi,
                                              int trials);
std::vector<BerRow> ber_sweep(const SimConfig& cfg,
                              const std::vector<double>& osnr_list);
std::pair<std::vector<SpacingRow>, std::vector<SpacingSummary>> spacing_sweep(
    const SimConfig& cfg, const std::vector<double>& delta_f_ghz,
    double target_ber);

// Plain PDM-QPSK loopback against the closed-form Gaussian-channel curve;
// pins the OSNR definition of the whole chain.
std::vector<ValidateRow> validate_qpsk(const SimConfig& cfg,
                                       const std::vector<double>& osnr_list,
                                       int symbols_per_point);
double qpsk_ber_analytic(double osnr_db, double symbol_rate);

double qfunc(double x);
double qfunc_inv(double p);

// Wilson 95% score interval.
std::pair<double, double> wilson_interval(int64_t successes, int64_t n);

// Deterministic worker pool: results must be written to index-addressed
// slots; the order of execution never affects the output.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// CSV + manifest emission. Rows come pre-sorted; files are byte-stable for
// a fixed (config, seed).
void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);
void write_ber_csv(const std::string& path, const std::vector<BerRow>& rows);
void write_spacing_csv(const std::string& path,
                       const std::vector<SpacingRow>& rows,
                       const std::vector<SpacingSummary>& summaries);
void write_validate_csv(const std::string& path,
                        const std::vector<ValidateRow>& rows);
void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const SimConfig& cfg,
                    const std::vector<std::string>& outputs);

std::string format_double(double v);

}  // namespace qdb
