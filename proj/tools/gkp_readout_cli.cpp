// gkp-readout: sweeps, lambda optimization, state diagnostics and self-checks.
//
// Exit codes: 0 ok, 1 internal error or failed self-check, 2 bad configuration,
// 3 convergence failure. Failures print one JSON object to stderr.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gkp/analytics.hpp"
#include "gkp/errors.hpp"
#include "gkp/gkp_states.hpp"
#include "gkp/readout.hpp"
#include "gkp/sweep.hpp"
#include "gkp/validate.hpp"

using namespace gkp;
using nlohmann::ordered_json;

namespace {

int fail(int code, const std::string& kind, const std::string& message, const std::string& field = "", int line = 0) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (!field.empty()) j["field"] = field;
  if (line > 0) j["line"] = line;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  return code;
}

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

struct SweepArgs {
  std::string config_path;
  std::string out;
  std::string format;
  std::vector<std::string> overrides;
  int threads = -1;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
  cmd->add_option("--config", a.config_path, "key = value config file");
  cmd->add_option("--out", a.out, "output file ('-' for stdout)");
  cmd->add_option("--format", a.format, "csv or json");
  cmd->add_option("--set", a.overrides, "override one setting, key=value (repeatable)");
  cmd->add_option("--threads", a.threads, "worker threads (0: all cores)");
}

sweep::SweepConfig build_config(sweep::Figure figure, const SweepArgs& a) {
  sweep::SweepConfig c = sweep::SweepConfig::defaults_for(figure);
  if (!a.config_path.empty()) c = sweep::load_config(a.config_path, c);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'", kv);
    sweep::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.format.empty()) sweep::set_config_value(c, "format", a.format);
  if (!a.out.empty()) sweep::set_config_value(c, "output_path", a.out);
  if (a.threads >= 0) c.threads = a.threads;
  c.validate();
  return c;
}

int run_sweep(sweep::Figure figure, const SweepArgs& a) {
  const sweep::SweepConfig c = build_config(figure, a);
  std::vector<sweep::SweepRow> rows;
  switch (figure) {
    case sweep::Figure::Strategies: rows = sweep::run_fig1a(c); break;
    case sweep::Figure::FixedLambda: rows = sweep::run_fig1b(c); break;
    case sweep::Figure::MixedStates: rows = sweep::run_fig1c(c); break;
  }
  if (c.output_path == "-") {
    sweep::write_rows(std::cout, rows, c.format);
  } else {
    std::ofstream f(c.output_path);
    if (!f) throw ConfigError("cannot write '" + c.output_path + "'", "output_path");
    sweep::write_rows(f, rows, c.format);
  }
  if (sweep::any_unconverged(rows)) {
    return fail(3, "convergence", "one or more rows failed the cutoff or quadrature convergence checks");
  }
  return 0;
}

// Cutoff for a single point: explicit, or chosen as in the sweeps.
int point_cutoff(double delta, double kappa, double sigma, int requested) {
  if (requested > 0) return requested;
  const auto choice = sweep::choose_cutoff(delta, kappa, sigma, sweep::SweepConfig{});
  if (!choice.converged) {
    throw ConvergenceError("no cutoff up to " + std::to_string(sweep::SweepConfig{}.max_cutoff) +
                           " passes the convergence checks");
  }
  return choice.cutoff;
}

double checked_delta(double db) {
  if (!(db > 0.0)) throw ConfigError("squeezing must be positive in dB", "delta-db");
  return db_to_delta(db);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GKP qubit readout simulator"};
  app.require_subcommand(1);

  SweepArgs a1, a2, a3;
  add_sweep_options(app.add_subcommand("fig1a", "simple, improved and homodyne readout vs squeezing"), a1);
  add_sweep_options(app.add_subcommand("fig1b", "improved readout at fixed lambda vs squeezing"), a2);
  add_sweep_options(app.add_subcommand("fig1c", "readout of channel-degraded states vs effective squeezing"), a3);

  double opt_db = 0.0;
  bool opt_simulate = false;
  int opt_cutoff = 0;
  auto* opt = app.add_subcommand("optimize-lambda", "optimal interaction strength at one squeezing");
  opt->add_option("--delta-db", opt_db, "squeezing in dB")->required();
  opt->add_flag("--simulate", opt_simulate, "also minimize the simulated error (kappa = 1/delta)");
  opt->add_option("--cutoff", opt_cutoff, "Fock cutoff for --simulate (default: automatic)");

  double si_db = 0.0, si_sigma = 0.0, si_kappa = 0.0;
  int si_cutoff = 0;
  std::string si_export, si_export_format = "json";
  auto* si = app.add_subcommand("state-info", "diagnostics of one code state");
  si->add_option("--delta-db", si_db, "squeezing in dB")->required();
  si->add_option("--sigma", si_sigma, "Gaussian displacement channel strength")->required();
  si->add_option("--kappa", si_kappa, "envelope width (default: 1/delta)");
  si->add_option("--cutoff", si_cutoff, "Fock cutoff (default: automatic)");
  si->add_option("--export", si_export, "write the |0~> state to this file");
  si->add_option("--export-format", si_export_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  double br_db = 0.0, br_lambda = 0.0, br_sigma = 0.0;
  int br_rounds = 3, br_cutoff = 0;
  auto* br = app.add_subcommand("branches", "measurement branch tree of a multi-round readout");
  br->add_option("--delta-db", br_db, "squeezing in dB")->required();
  br->add_option("--lambda", br_lambda, "interaction strength");
  br->add_option("--rounds", br_rounds, "odd number of rounds");
  br->add_option("--sigma", br_sigma, "Gaussian displacement channel strength");
  br->add_option("--cutoff", br_cutoff, "Fock cutoff (default: automatic)");

  auto* val = app.add_subcommand("validate", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (app.got_subcommand("fig1a")) return run_sweep(sweep::Figure::Strategies, a1);
    if (app.got_subcommand("fig1b")) return run_sweep(sweep::Figure::FixedLambda, a2);
    if (app.got_subcommand("fig1c")) return run_sweep(sweep::Figure::MixedStates, a3);

    if (*opt) {
      const double delta = checked_delta(opt_db);
      if (delta > 0.5) throw ConfigError("optimize-lambda needs delta <= 0.5 (at least 6.02 dB)", "delta-db");
      const double lambda = analytics::optimal_lambda(delta);
      ordered_json j;
      j["delta_db"] = opt_db;
      j["delta"] = delta;
      j["lambda_star"] = lambda;
      j["lambda_seed"] = analytics::optimal_lambda_seed(delta);
      j["p_err"] = analytics::p_err_improved_formula(delta, lambda);
      j["fidelity"] = 1.0 - analytics::p_err_improved_formula(delta, lambda);
      if (opt_simulate) {
        const int n = point_cutoff(delta, 1.0 / delta, 0.0, opt_cutoff);
        const GkpStatePair pair = make_gkp_pair(HilbertSpec(n), delta, 1.0 / delta);
        const auto best = optimize_lambda_simulated(pair, 0.0, sweep::lambda_search_upper(delta));
        j["cutoff_n"] = n;
        j["lambda_simulated"] = best.lambda;
        j["p_err_simulated"] = best.p_err;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*si) {
      const double delta = checked_delta(si_db);
      const double kappa = si_kappa > 0.0 ? si_kappa : 1.0 / delta;
      if (!(si_sigma >= 0.0)) throw ConfigError("sigma must be >= 0", "sigma");
      const int n = point_cutoff(delta, kappa, si_sigma, si_cutoff);
      const GkpStatePair pair = make_gkp_pair(HilbertSpec(n), delta, kappa, si_sigma);
      const OscillatorState& s = pair.state0;
      const double d_eff = effective_squeezing(s);
      ordered_json j;
      j["delta_db"] = si_db;
      j["delta"] = delta;
      j["kappa"] = kappa;
      j["sigma"] = si_sigma;
      j["cutoff_n"] = n;
      j["purity"] = purity(s);
      j["trace"] = s.norm();
      j["delta_eff"] = num(d_eff);
      j["delta_eff_db"] = num(effective_squeezing_db(s));
      j["delta_eff_predicted"] = std::sqrt(delta * delta + 2.0 * si_sigma * si_sigma);
      j["leakage"] = leakage(s);
      j["displacement_expectation_re"] = displacement_expectation(s, cplx(0.0, std::sqrt(std::numbers::pi / 2.0))).real();
      j["helstrom_bound"] = s.is_pure() ? num(helstrom_bound(pair.state0, pair.state1)) : ordered_json(nullptr);
      if (!si_export.empty()) {
        std::ofstream f(si_export);
        if (!f) throw ConfigError("cannot write '" + si_export + "'", "export");
        if (si_export_format == "csv") write_state_csv(f, s);
        else write_state_json(f, s);
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*br) {
      const double delta = checked_delta(br_db);
      const CircuitParams params{br_lambda, br_rounds};
      params.validate();
      const int n = point_cutoff(delta, 1.0 / delta, br_sigma, br_cutoff);
      const GkpStatePair pair = make_gkp_pair(HilbertSpec(n), delta, 1.0 / delta, br_sigma);
      write_branch_tree_json(std::cout, simulated_p_err(pair, params, true));
      return 0;
    }

    if (*val) {
      bool all = true;
      for (const auto& c : run_invariant_suite()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what(), e.field(), e.line());
  } catch (const std::invalid_argument& e) {
    return fail(2, "invalid_argument", e.what());
  } catch (const TruncationError& e) {
    return fail(3, "truncation", e.what());
  } catch (const ConvergenceError& e) {
    return fail(3, "convergence", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
