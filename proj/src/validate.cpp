#include "gkp/validate.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <numbers>

#include "gkp/analytics.hpp"
#include "gkp/errors.hpp"
#include "gkp/fock.hpp"
#include "gkp/gkp_states.hpp"
#include "gkp/readout.hpp"

namespace gkp {

namespace {

// Each probe returns (measured, bound); passing means measured <= bound.
using Probe = std::function<std::pair<double, double>()>;

InvariantCheck run_probe(const std::string& name, const Probe& probe) {
  InvariantCheck c{name, false, ""};
  try {
    const auto [value, bound] = probe();
    c.passed = value <= bound;
    c.detail = format_sci(value) + " <= " + format_sci(bound);
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::vector<InvariantCheck> run_invariant_suite() {
  const HilbertSpec spec(150);
  const double delta = std::sqrt(0.1);
  const double lambda_star = analytics::optimal_lambda(delta);
  const GkpStatePair pure = make_gkp_pair(spec, delta, 1.0 / delta);

  std::vector<std::pair<std::string, Probe>> probes = {
      {"displacement unitarity",
       [&] { return std::pair{unitarity_defect(displacement(spec, cplx(0.7, -0.4)).matrix, 5), 1e-9}; }},
      {"rabi gate unitarity",
       [&] { return std::pair{unitarity_defect(rabi_gate(HilbertSpec(60), Pauli::Y, cplx(0.3, 0.2)).matrix, 10), 1e-9}; }},
      {"canonical commutator",
       [&] {
         const auto [x, p] = make_quadratures(HilbertSpec(40));
         const Mat c = x.matrix * p.matrix - p.matrix * x.matrix;
         const Eigen::Index m = c.rows() - 2;
         return std::pair{(c.topLeftCorner(m, m) - cplx(0.0, 1.0) * Mat::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-12};
       }},
      {"probability conservation",
       [&] {
         const ShotResult r = run_readout_once(pure.state0, lambda_star);
         return std::pair{std::abs(r.p0 + r.p1 - 1.0), 1e-10};
       }},
      {"back-action consistency",
       [&] {
         // The unmeasured oscillator marginal after both gates, via dense hybrid unitaries.
         const ShotResult r = run_readout_once(pure.state0, lambda_star);
         const Mat mix = r.p0 * r.post0->density() + r.p1 * r.post1->density();
         const LinearOp u = LinearOp{rabi_gate(spec, Pauli::X, cplx(0.0, std::sqrt(std::numbers::pi) / 2.0)).matrix *
                                         rabi_gate(spec, Pauli::Y, cplx(-lambda_star, 0.0)).matrix,
                                     false, true};
         const HybridState out = apply(u, HybridState::product(Eigen::Vector2cd(1.0, 0.0), pure.state0));
         return std::pair{(mix - reduced_oscillator(out)).cwiseAbs().maxCoeff(), 1e-9};
       }},
      {"global phase invariance",
       [&] {
         const OscillatorState rotated = OscillatorState::pure(std::polar(1.0, 0.83) * pure.state0.ket());
         return std::pair{std::abs(run_readout_once(rotated, lambda_star).p1 - run_readout_once(pure.state0, lambda_star).p1),
                          1e-14};
       }},
      {"lambda = 0 reduction",
       [&] {
         const double with_gate = ReadoutCircuit(spec, 0.0).run(pure.state0).p1;
         const double without = ReadoutCircuit::simple(spec).run(pure.state0).p1;
         return std::pair{std::abs(with_gate - without), 1e-14};
       }},
      {"simple circuit vs closed form",
       [&] {
         const double sim = simulated_p_err(pure, CircuitParams{0.0, 1}).p_err;
         return std::pair{std::abs(sim - analytics::p_err_simple_formula(delta)), 5e-3};
       }},
      {"improved circuit vs closed form",
       [&] {
         const double sim = simulated_p_err(pure, CircuitParams{lambda_star, 1}).p_err;
         return std::pair{relative_gap(sim, analytics::p_err_improved_formula(delta, lambda_star)), 0.1};
       }},
      {"helstrom dominance",
       [&] {
         const double bound = helstrom_bound(pure.state0, pure.state1);
         const double sim = simulated_p_err(pure, CircuitParams{lambda_star, 1}).p_err;
         return std::pair{bound - sim, 1e-10};
       }},
      {"convergence in cutoff",
       [&] {
         const GkpStatePair finer = make_gkp_pair(HilbertSpec(300), delta, 1.0 / delta);
         return std::pair{std::abs(simulated_p_err(finer, CircuitParams{lambda_star, 1}).p_err -
                                   simulated_p_err(pure, CircuitParams{lambda_star, 1}).p_err),
                          1e-8};
       }},
      {"channel semigroup",
       [&] {
         const HilbertSpec small(100);
         const OscillatorState s = make_pure_gkp(small, GkpSpec{0, 0.45, 1.0 / 0.45, 0.0});
         const OscillatorState twice = gaussian_displacement_channel(gaussian_displacement_channel(s, 0.06), 0.08);
         const OscillatorState once = gaussian_displacement_channel(s, 0.1);
         return std::pair{(twice.density() - once.density()).cwiseAbs().maxCoeff(), 1e-6};
       }},
      {"effective squeezing under the channel",
       [&] {
         const OscillatorState mixed = gaussian_displacement_channel(pure.state0, 0.1);
         return std::pair{std::abs(effective_squeezing(mixed) - std::sqrt(0.1 + 2 * 0.01)), 2e-3};
       }},
      {"majority vote helps the simple circuit",
       [&] {
         const double r1 = simulated_p_err(pure, CircuitParams{0.0, 1}).p_err;
         const double r3 = simulated_p_err(pure, CircuitParams{0.0, 3}).p_err;
         return std::pair{r3 - r1, -1e-12};
       }},
  };

  std::vector<InvariantCheck> out;
  for (const auto& [name, probe] : probes) out.push_back(run_probe(name, probe));
  return out;
}

}  // namespace gkp
