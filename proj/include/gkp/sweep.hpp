#pragma once

// Parameter sweeps over squeezing, interaction strength and channel noise,
// emitted as long-format tables (one row per strategy and parameter point).

#include <iosfwd>
#include <string>
#include <vector>

#include "gkp/gkp_states.hpp"
#include "gkp/readout.hpp"

namespace gkp::sweep {

enum class Figure { Strategies, FixedLambda, MixedStates };
enum class LambdaPolicy { Optimized, Fixed, Zero };
enum class KappaPolicy { InverseDelta, Fixed };
enum class CutoffPolicy { Auto, Fixed };
enum class OutputFormat { Csv, Json };

struct SweepConfig {
  double delta_db_min = 5.0;
  double delta_db_max = 14.0;
  int delta_db_points = 19;

  LambdaPolicy lambda_policy = LambdaPolicy::Optimized;
  std::vector<double> lambda_fixed = {0.02, 0.05, 0.1, 0.15};

  std::vector<int> rounds_list = {1, 3, 5};

  // Channel strengths. When purity_targets is non-empty, the mixed-state sweep
  // replaces sigma_list with the strengths that reach each purity at
  // purity_reference_db of effective squeezing.
  std::vector<double> sigma_list = {0.0};
  std::vector<double> purity_targets;
  double purity_reference_db = 10.0;

  KappaPolicy kappa_policy = KappaPolicy::InverseDelta;
  std::vector<double> kappa_factors = {1.0};  // kappa = factor / delta
  double kappa_fixed = 3.0;

  CutoffPolicy cutoff_policy = CutoffPolicy::Auto;
  int cutoff = 150;      // fixed cutoff, or the starting point for auto
  int max_cutoff = 1200;

  std::string output_path = "-";
  OutputFormat format = OutputFormat::Csv;
  bool allow_out_of_range = false;  // lift the [4, 16] dB guard
  int threads = 0;                  // 0: hardware concurrency

  static SweepConfig defaults_for(Figure figure);

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Assigns one `key = value` setting. `line` is reported in errors.
void set_config_value(SweepConfig& config, const std::string& key, const std::string& value, int line = 0);

// Flat key-value text: `key = value`, `#` comments, list values comma-separated.
SweepConfig parse_config(std::istream& in, SweepConfig base = {});
SweepConfig load_config(const std::string& path, SweepConfig base = {});

struct SweepRow {
  std::string strategy;
  double delta_db = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  double purity = 1.0;
  double delta_eff_db = 0.0;
  double lambda_used = 0.0;
  int rounds = 1;
  double p_err_simulated = 0.0;
  double p_err_formula = 0.0;  // NaN when no closed form applies
  double p_err_homodyne_formula = 0.0;
  double p_err_helstrom = 0.0;  // NaN for mixed inputs
  int cutoff_n = 0;
  bool converged = true;
};

// Column names in emission order.
const std::vector<std::string>& column_names();

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_json(std::ostream& out, const std::vector<SweepRow>& rows);
void write_rows(std::ostream& out, const std::vector<SweepRow>& rows, OutputFormat format);

struct CutoffChoice {
  int cutoff = 0;
  bool converged = false;
};

// Auto: doubles the cutoff from config.cutoff until the pure pair passes the
// leakage bound and the readout probabilities move by < 1e-8 when the cutoff
// doubles. Fixed: config.cutoff, converged when the leakage bound holds.
// The channel output is checked separately when the mixed pair is built.
CutoffChoice choose_cutoff(double delta, double kappa, double sigma, const SweepConfig& config);

// Golden-section bracket for lambda at a given effective squeezing:
// [0, min(3 sqrt(pi) delta_eff^2, delta_eff)].
double lambda_search_upper(double delta_eff);

// Envelope for input squeezing `delta` under the config's kappa policy.
double kappa_for(double delta, double kappa_factor, const SweepConfig& config);

// Channel strength giving `target` purity of the logical-0 state at effective
// squeezing `delta_eff` (input delta = sqrt(delta_eff^2 - 2 sigma^2)).
// Throws ConfigError when the target cannot be reached within max_cutoff.
double sigma_for_purity(double target, double delta_eff, double kappa_factor, const SweepConfig& config);

std::vector<double> delta_db_grid(const SweepConfig& config);

std::vector<SweepRow> run_fig1a(const SweepConfig& config);
std::vector<SweepRow> run_fig1b(const SweepConfig& config);
std::vector<SweepRow> run_fig1c(const SweepConfig& config);

// True when any row failed its convergence checks.
bool any_unconverged(const std::vector<SweepRow>& rows);

}  // namespace gkp::sweep
