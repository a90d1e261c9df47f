#include "gkp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "gkp/analytics.hpp"
#include "gkp/errors.hpp"
#include "gkp/numerics.hpp"

namespace gkp::sweep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kProbeTolerance = 1e-8;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text, int line) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("expected a number, got '" + t + "'", key, line);
}

int parse_int(const std::string& key, const std::string& text, int line) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const long v = std::stol(t, &used);
    if (used == t.size() && v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max()) {
      return static_cast<int>(v);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("expected an integer, got '" + t + "'", key, line);
}

bool parse_bool(const std::string& key, const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("expected true or false, got '" + t + "'", key, line);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& text, int line, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(key, item, line));
  return out;
}

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(message, field);
}

}  // namespace

SweepConfig SweepConfig::defaults_for(Figure figure) {
  SweepConfig c;
  switch (figure) {
    case Figure::Strategies:
      break;
    case Figure::FixedLambda:
      c.lambda_policy = LambdaPolicy::Fixed;
      c.rounds_list = {1};
      break;
    case Figure::MixedStates:
      // The grid is effective squeezing here; it stops at the reference point so
      // every purity target stays reachable.
      c.delta_db_min = 5.0;
      c.delta_db_max = 10.0;
      c.delta_db_points = 11;
      c.rounds_list = {1};
      c.purity_targets = {1.0, 0.9, 0.7, 0.5};
      break;
  }
  return c;
}

void SweepConfig::validate() const {
  check(delta_db_points >= 2, "delta_db_points", "need at least 2 points");
  check(delta_db_min < delta_db_max, "delta_db_min", "delta_db_min must be below delta_db_max");
  if (!allow_out_of_range) {
    check(delta_db_min >= 4.0, "delta_db_min", "below the 4 dB guard (set allow_out_of_range = true to lift it)");
    check(delta_db_max <= 16.0, "delta_db_max", "above the 16 dB guard (set allow_out_of_range = true to lift it)");
  }
  check(delta_db_min > 0.0, "delta_db_min", "squeezing must be positive in dB (delta < 1)");
  check(!rounds_list.empty(), "rounds_list", "empty");
  for (int r : rounds_list) {
    check(r >= 1 && r <= kMaxRounds && r % 2 == 1, "rounds_list",
          "rounds must be odd and between 1 and " + std::to_string(kMaxRounds));
  }
  if (lambda_policy == LambdaPolicy::Fixed) check(!lambda_fixed.empty(), "lambda_fixed", "empty");
  for (double l : lambda_fixed) check(std::abs(l) < 1.0, "lambda_fixed", "|lambda| must be below 1");
  check(!sigma_list.empty() || !purity_targets.empty(), "sigma_list", "empty");
  for (double s : sigma_list) check(s >= 0.0, "sigma_list", "sigma must be >= 0");
  for (double p : purity_targets) check(p > 0.0 && p <= 1.0, "purity_targets", "purity must lie in (0, 1]");
  check(purity_reference_db > 0.0, "purity_reference_db", "must be positive");
  check(!kappa_factors.empty(), "kappa_factors", "empty");
  for (double k : kappa_factors) check(k > 0.0, "kappa_factors", "must be positive");
  check(kappa_fixed >= 1.0, "kappa_fixed", "kappa must be >= 1");
  check(cutoff >= 1, "cutoff", "must be >= 1");
  check(max_cutoff >= cutoff, "max_cutoff", "must be >= cutoff");
  check(threads >= 0, "threads", "must be >= 0");
}

void set_config_value(SweepConfig& c, const std::string& key_in, const std::string& value, int line) {
  const std::string key = trim(key_in);
  const std::string v = trim(value);
  if (key == "delta_db_min") {
    c.delta_db_min = parse_double(key, v, line);
  } else if (key == "delta_db_max") {
    c.delta_db_max = parse_double(key, v, line);
  } else if (key == "delta_db_points") {
    c.delta_db_points = parse_int(key, v, line);
  } else if (key == "lambda_policy") {
    if (v == "optimized") c.lambda_policy = LambdaPolicy::Optimized;
    else if (v == "fixed") c.lambda_policy = LambdaPolicy::Fixed;
    else if (v == "zero") c.lambda_policy = LambdaPolicy::Zero;
    else throw ConfigError("expected optimized, fixed or zero, got '" + v + "'", key, line);
  } else if (key == "lambda_fixed") {
    c.lambda_fixed = parse_list<double>(key, v, line, parse_double);
  } else if (key == "rounds_list") {
    c.rounds_list = parse_list<int>(key, v, line, parse_int);
  } else if (key == "sigma_list") {
    c.sigma_list = parse_list<double>(key, v, line, parse_double);
  } else if (key == "purity_targets") {
    c.purity_targets = parse_list<double>(key, v, line, parse_double);
  } else if (key == "purity_reference_db") {
    c.purity_reference_db = parse_double(key, v, line);
  } else if (key == "kappa_policy") {
    if (v == "inverse_delta") c.kappa_policy = KappaPolicy::InverseDelta;
    else if (v == "fixed") c.kappa_policy = KappaPolicy::Fixed;
    else throw ConfigError("expected inverse_delta or fixed, got '" + v + "'", key, line);
  } else if (key == "kappa_factors") {
    c.kappa_factors = parse_list<double>(key, v, line, parse_double);
  } else if (key == "kappa_fixed") {
    c.kappa_fixed = parse_double(key, v, line);
  } else if (key == "cutoff_policy") {
    if (v == "auto") c.cutoff_policy = CutoffPolicy::Auto;
    else if (v == "fixed") c.cutoff_policy = CutoffPolicy::Fixed;
    else throw ConfigError("expected auto or fixed, got '" + v + "'", key, line);
  } else if (key == "cutoff") {
    c.cutoff = parse_int(key, v, line);
  } else if (key == "max_cutoff") {
    c.max_cutoff = parse_int(key, v, line);
  } else if (key == "output_path") {
    if (v.empty()) throw ConfigError("empty path", key, line);
    c.output_path = v;
  } else if (key == "format") {
    if (v == "csv") c.format = OutputFormat::Csv;
    else if (v == "json") c.format = OutputFormat::Json;
    else throw ConfigError("expected csv or json, got '" + v + "'", key, line);
  } else if (key == "allow_out_of_range") {
    c.allow_out_of_range = parse_bool(key, v, line);
  } else if (key == "threads") {
    c.threads = parse_int(key, v, line);
  } else {
    throw ConfigError("unknown key '" + key + "'", key, line);
  }
}

SweepConfig parse_config(std::istream& in, SweepConfig base) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", "", line);
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", "", line);
    set_config_value(base, key, text.substr(eq + 1), line);
  }
  return base;
}

SweepConfig load_config(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "config");
  return parse_config(in, std::move(base));
}

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names = {
      "strategy",        "delta_db",    "delta",           "kappa",           "sigma",
      "purity",          "delta_eff_db", "lambda_used",    "rounds",          "p_err_simulated",
      "p_err_formula",   "p_err_homodyne_formula", "p_err_helstrom", "cutoff_n", "converged"};
  return names;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto& names = column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.strategy << ',' << fmt(r.delta_db) << ',' << fmt(r.delta) << ',' << fmt(r.kappa) << ','
        << fmt(r.sigma) << ',' << fmt(r.purity) << ',' << fmt(r.delta_eff_db) << ',' << fmt(r.lambda_used)
        << ',' << r.rounds << ',' << fmt(r.p_err_simulated) << ',' << fmt(r.p_err_formula) << ','
        << fmt(r.p_err_homodyne_formula) << ',' << fmt(r.p_err_helstrom) << ',' << r.cutoff_n << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy;
    j["delta_db"] = jnum(r.delta_db);
    j["delta"] = jnum(r.delta);
    j["kappa"] = jnum(r.kappa);
    j["sigma"] = jnum(r.sigma);
    j["purity"] = jnum(r.purity);
    j["delta_eff_db"] = jnum(r.delta_eff_db);
    j["lambda_used"] = jnum(r.lambda_used);
    j["rounds"] = r.rounds;
    j["p_err_simulated"] = jnum(r.p_err_simulated);
    j["p_err_formula"] = jnum(r.p_err_formula);
    j["p_err_homodyne_formula"] = jnum(r.p_err_homodyne_formula);
    j["p_err_helstrom"] = jnum(r.p_err_helstrom);
    j["cutoff_n"] = r.cutoff_n;
    j["converged"] = r.converged;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void write_rows(std::ostream& out, const std::vector<SweepRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Json) write_json(out, rows);
  else write_csv(out, rows);
}

namespace {

// Qubit outcome-1 probability of |0~> for the plain and the improved circuit.
std::array<double, 2> readout_probe(const OscillatorState& state, double delta) {
  const double seed = analytics::optimal_lambda_seed(std::min(delta, 0.5));
  return {ReadoutCircuit::simple(state.space()).run(state).p1, ReadoutCircuit(state.space(), seed).run(state).p1};
}

std::optional<OscillatorState> try_pure(int cutoff, double delta, double kappa) {
  try {
    return make_pure_gkp(HilbertSpec(cutoff), GkpSpec{0, delta, kappa, 0.0});
  } catch (const TruncationError&) {
    return std::nullopt;
  }
}

struct PreparedPair {
  std::optional<GkpStatePair> pair;
  int cutoff = 0;
  bool converged = false;
};

PreparedPair prepare(double delta, double kappa, double sigma, const SweepConfig& config) {
  CutoffChoice choice = choose_cutoff(delta, kappa, sigma, config);
  PreparedPair out;
  out.cutoff = choice.cutoff;
  out.converged = choice.converged;
  while (true) {
    try {
      GkpStatePair pair = make_gkp_pair(HilbertSpec(out.cutoff), delta, kappa, sigma);
      if (sigma > 0.0 && !(is_converged(pair.state0) && is_converged(pair.state1))) {
        // The channel spreads the state upwards in Fock space.
        if (config.cutoff_policy == CutoffPolicy::Auto && 2 * out.cutoff <= config.max_cutoff) {
          out.cutoff *= 2;
          continue;
        }
        out.converged = false;
      }
      out.pair = std::move(pair);
    } catch (const TruncationError&) {
      out.converged = false;
    } catch (const ConvergenceError&) {
      out.converged = false;
    }
    return out;
  }
}

}  // namespace

CutoffChoice choose_cutoff(double delta, double kappa, double /*sigma*/, const SweepConfig& config) {
  if (config.cutoff_policy == CutoffPolicy::Fixed) {
    return {config.cutoff, try_pure(config.cutoff, delta, kappa).has_value()};
  }
  int n = config.cutoff;
  std::optional<OscillatorState> state;
  while (!(state = try_pure(n, delta, kappa))) {
    if (2 * n > config.max_cutoff) return {n, false};
    n *= 2;
  }
  std::array<double, 2> here = readout_probe(*state, delta);
  while (2 * n <= config.max_cutoff) {
    const auto finer = try_pure(2 * n, delta, kappa);
    if (!finer) return {n, false};
    const std::array<double, 2> there = readout_probe(*finer, delta);
    if (std::abs(there[0] - here[0]) < kProbeTolerance && std::abs(there[1] - here[1]) < kProbeTolerance) {
      return {n, true};
    }
    n *= 2;
    here = there;
  }
  return {n, false};
}

double lambda_search_upper(double delta_eff) {
  return std::min(3.0 * std::sqrt(kPi) * delta_eff * delta_eff, delta_eff);
}

double kappa_for(double delta, double kappa_factor, const SweepConfig& config) {
  return config.kappa_policy == KappaPolicy::Fixed ? config.kappa_fixed : kappa_factor / delta;
}

double sigma_for_purity(double target, double delta_eff, double kappa_factor, const SweepConfig& config) {
  if (target >= 1.0) return 0.0;
  const double sigma_cap = delta_eff / std::sqrt(2.0);
  auto purity_at = [&](double sigma) {
    const double delta = std::sqrt(delta_eff * delta_eff - 2.0 * sigma * sigma);
    const double kappa = kappa_for(delta, kappa_factor, config);
    const PreparedPair p = prepare(delta, kappa, sigma, config);
    if (!p.pair) {
      throw ConfigError("purity target " + fmt(target) + " needs a cutoff above max_cutoff", "purity_targets");
    }
    return purity(p.pair->state0);
  };
  // Purity falls monotonically as sigma grows at fixed delta_eff. Walk the
  // input squeezing up in 1 dB steps until the target is bracketed.
  double lo = 0.0;
  double hi = 0.0;
  for (double db = delta_to_db(delta_eff) + 1.0;; db += 1.0) {
    if (!config.allow_out_of_range && db > 16.0 + 1e-9) {
      throw ConfigError("purity target " + fmt(target) + " needs input squeezing above 16 dB", "purity_targets");
    }
    const double d = db_to_delta(db);
    const double s = std::sqrt(0.5 * (delta_eff * delta_eff - d * d));
    if (!(s < sigma_cap)) break;
    if (purity_at(s) <= target) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi == 0.0) throw ConfigError("purity target " + fmt(target) + " unreachable", "purity_targets");
  return numerics::find_root([&](double s) { return purity_at(s) - target; }, lo, hi, 1e-6);
}

std::vector<double> delta_db_grid(const SweepConfig& config) {
  std::vector<double> grid;
  const int n = config.delta_db_points;
  for (int i = 0; i < n; ++i) {
    grid.push_back(config.delta_db_min + (config.delta_db_max - config.delta_db_min) * i / (n - 1));
  }
  return grid;
}

bool any_unconverged(const std::vector<SweepRow>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.converged; });
}

namespace {

struct Tagged {
  int series;
  std::size_t job;
  SweepRow row;
};

using Job = std::function<std::vector<Tagged>()>;

// Runs the jobs on a worker pool and orders rows by (series, job index) so the
// thread schedule never shows up in the output.
std::vector<SweepRow> run_jobs(const std::vector<Job>& jobs, int threads) {
  std::vector<std::vector<Tagged>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        results[i] = jobs[i]();
        for (auto& t : results[i]) t.job = i;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(jobs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Tagged> all;
  for (auto& r : results) all.insert(all.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return a.series != b.series ? a.series < b.series : a.job < b.job;
  });
  std::vector<SweepRow> rows;
  rows.reserve(all.size());
  for (auto& t : all) rows.push_back(std::move(t.row));
  return rows;
}

// Shared per-point context: the prepared pair and the columns every row carries.
struct PointContext {
  PreparedPair prepared;
  SweepRow base;
  double delta_eff = 0.0;

  bool ok() const { return prepared.pair.has_value(); }
  const GkpStatePair& pair() const { return *prepared.pair; }
};

PointContext make_point(double delta, double kappa, double sigma, const SweepConfig& config) {
  PointContext c;
  c.prepared = prepare(delta, kappa, sigma, config);
  SweepRow& b = c.base;
  b.delta_db = delta_to_db(delta);
  b.delta = delta;
  b.kappa = kappa;
  b.sigma = sigma;
  b.p_err_homodyne_formula = analytics::p_err_homodyne_formula(delta);
  b.cutoff_n = c.prepared.cutoff;
  b.converged = c.prepared.converged;
  b.p_err_simulated = kNaN;
  b.p_err_formula = kNaN;
  b.lambda_used = kNaN;
  if (!c.ok()) {
    b.purity = kNaN;
    b.delta_eff_db = kNaN;
    b.p_err_helstrom = kNaN;
    c.delta_eff = std::sqrt(delta * delta + 2.0 * sigma * sigma);
    return c;
  }
  b.purity = purity(c.pair().state0);
  c.delta_eff = effective_squeezing(c.pair().state0);
  b.delta_eff_db = delta_to_db(c.delta_eff);
  b.p_err_helstrom = c.pair().state0.is_pure() ? helstrom_bound(c.pair().state0, c.pair().state1) : kNaN;
  return c;
}

SweepRow circuit_row(const PointContext& c, const std::string& strategy, const ReadoutCircuit* circuit,
                     double lambda, int rounds, double formula) {
  SweepRow r = c.base;
  r.strategy = strategy;
  r.lambda_used = lambda;
  r.rounds = rounds;
  r.p_err_formula = formula;
  if (c.ok()) r.p_err_simulated = simulated_p_err(c.pair(), *circuit, rounds).p_err;
  return r;
}

double optimized_lambda(const PointContext& c) {
  return optimize_lambda_simulated(c.pair(), 0.0, lambda_search_upper(c.delta_eff)).lambda;
}

// Improved-circuit lambdas under the config's policy. NaN marks "optimize here".
std::vector<double> policy_lambdas(const SweepConfig& config) {
  switch (config.lambda_policy) {
    case LambdaPolicy::Optimized:
      return {kNaN};
    case LambdaPolicy::Fixed:
      return config.lambda_fixed;
    case LambdaPolicy::Zero:
      return {0.0};
  }
  return {};
}

void add_improved_rows(std::vector<Tagged>& out, int& series, const PointContext& c, const SweepConfig& config,
                       bool pure_formula) {
  for (double l : policy_lambdas(config)) {
    double lambda = std::isnan(l) ? (c.ok() ? optimized_lambda(c) : kNaN) : l;
    const std::string name = std::isnan(l) ? "improved" : "improved_fixed";
    std::optional<ReadoutCircuit> circuit;
    if (c.ok()) circuit.emplace(c.pair().state0.space(), lambda);
    const double formula = pure_formula ? analytics::p_err_improved_formula(c.base.delta, lambda) : kNaN;
    out.push_back({series++, 0, circuit_row(c, name, circuit ? &*circuit : nullptr, lambda, 1, formula)});
  }
}

std::vector<double> kappa_series(const SweepConfig& config) {
  return config.kappa_policy == KappaPolicy::Fixed ? std::vector<double>{config.kappa_fixed} : config.kappa_factors;
}

}  // namespace

std::vector<SweepRow> run_fig1a(const SweepConfig& config) {
  config.validate();
  const auto grid = delta_db_grid(config);
  const auto kappas = kappa_series(config);
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    for (double db : grid) {
      jobs.push_back([&config, db, factor = kappas[k], offset = static_cast<int>(k) * 1000] {
        const double delta = db_to_delta(db);
        const PointContext c = make_point(delta, kappa_for(delta, factor, config), 0.0, config);
        std::vector<Tagged> out;
        int series = offset;
        std::optional<ReadoutCircuit> simple;
        if (c.ok()) simple.emplace(ReadoutCircuit::simple(c.pair().state0.space()));
        for (int rounds : config.rounds_list) {
          const double formula = rounds == 1 ? analytics::p_err_simple_formula(delta) : kNaN;
          out.push_back({series++, 0, circuit_row(c, "simple", simple ? &*simple : nullptr, 0.0, rounds, formula)});
        }
        add_improved_rows(out, series, c, config, true);

        SweepRow h = c.base;
        h.strategy = "homodyne";
        h.p_err_formula = h.p_err_homodyne_formula;
        if (c.ok()) {
          try {
            h.p_err_simulated = homodyne_p_err_numeric(c.pair());
          } catch (const ConvergenceError&) {
            h.converged = false;
          }
        }
        out.push_back({series++, 0, h});
        return out;
      });
    }
  }
  return run_jobs(jobs, config.threads);
}

std::vector<SweepRow> run_fig1b(const SweepConfig& config) {
  config.validate();
  check(!config.lambda_fixed.empty(), "lambda_fixed", "empty");
  const auto grid = delta_db_grid(config);
  const auto kappas = kappa_series(config);
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    for (double db : grid) {
      jobs.push_back([&config, db, factor = kappas[k], offset = static_cast<int>(k) * 1000] {
        const double delta = db_to_delta(db);
        const PointContext c = make_point(delta, kappa_for(delta, factor, config), 0.0, config);
        std::vector<Tagged> out;
        int series = offset;
        const HilbertSpec spec(c.prepared.cutoff);
        for (double lambda : config.lambda_fixed) {
          std::optional<ReadoutCircuit> circuit;
          if (c.ok()) circuit.emplace(spec, lambda);
          out.push_back({series++, 0,
                         circuit_row(c, "improved_fixed", circuit ? &*circuit : nullptr, lambda, 1,
                                     analytics::p_err_improved_formula(delta, lambda))});
        }
        const double best = c.ok() ? optimized_lambda(c) : kNaN;
        std::optional<ReadoutCircuit> optimal, simple;
        if (c.ok()) {
          optimal.emplace(spec, best);
          simple.emplace(ReadoutCircuit::simple(spec));
        }
        out.push_back({series++, 0,
                       circuit_row(c, "improved_optimal", optimal ? &*optimal : nullptr, best, 1,
                                   analytics::p_err_improved_formula(delta, best))});
        out.push_back({series++, 0,
                       circuit_row(c, "simple", simple ? &*simple : nullptr, 0.0, 1,
                                   analytics::p_err_simple_formula(delta))});
        return out;
      });
    }
  }
  return run_jobs(jobs, config.threads);
}

std::vector<SweepRow> run_fig1c(const SweepConfig& config) {
  config.validate();
  const auto grid = delta_db_grid(config);
  const auto kappas = kappa_series(config);

  // (kappa index, sigma) curves; purity targets are resolved per envelope.
  std::vector<std::pair<std::size_t, double>> curves;
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    if (config.purity_targets.empty()) {
      for (double s : config.sigma_list) curves.emplace_back(k, s);
    } else {
      const double reference = db_to_delta(config.purity_reference_db);
      for (double t : config.purity_targets) curves.emplace_back(k, sigma_for_purity(t, reference, kappas[k], config));
    }
  }
  for (const auto& [k, sigma] : curves) {
    for (double db : grid) {
      const double d = db_to_delta(db);
      if (!(d * d - 2.0 * sigma * sigma > 0.0)) {
        throw ConfigError("sigma " + fmt(sigma) + " exceeds the effective squeezing at " + fmt(db) + " dB",
                          config.purity_targets.empty() ? "sigma_list" : "purity_targets");
      }
    }
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (double db : grid) {
      jobs.push_back([&config, db, factor = kappas[curves[i].first], sigma = curves[i].second,
                      offset = static_cast<int>(i) * 1000] {
        // The grid is effective squeezing; the input squeezing absorbs the channel.
        const double delta_eff = db_to_delta(db);
        const double delta = std::sqrt(delta_eff * delta_eff - 2.0 * sigma * sigma);
        const PointContext c = make_point(delta, kappa_for(delta, factor, config), sigma, config);
        std::vector<Tagged> out;
        int series = offset;
        add_improved_rows(out, series, c, config, sigma == 0.0);
        std::optional<ReadoutCircuit> simple;
        if (c.ok()) simple.emplace(ReadoutCircuit::simple(c.pair().state0.space()));
        for (int rounds : config.rounds_list) {
          const double formula = rounds == 1 ? analytics::p_err_simple_formula(delta_eff) : kNaN;
          out.push_back({series++, 0, circuit_row(c, "simple", simple ? &*simple : nullptr, 0.0, rounds, formula)});
        }
        return out;
      });
    }
  }
  return run_jobs(jobs, config.threads);
}

}  // namespace gkp::sweep
