#include "doctest.h"

#include "approx.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "gkp/analytics.hpp"
#include "gkp/errors.hpp"
#include "gkp/fock.hpp"
#include "gkp/gkp_states.hpp"
#include "gkp/readout.hpp"
#include "json.hpp"

using namespace gkp;

namespace {

const double kTen = std::sqrt(0.1);
const double kSqrtPi = std::sqrt(std::numbers::pi);

const GkpStatePair& pair_at(double delta, int n = 150) {
  // Few distinct pairs; cache them so the suite stays quick.
  static std::map<std::pair<double, int>, GkpStatePair> cache;
  auto it = cache.find({delta, n});
  if (it == cache.end()) it = cache.emplace(std::pair{delta, n}, make_gkp_pair(HilbertSpec(n), delta, 1.0 / delta)).first;
  return it->second;
}

Vec coherent(int n, cplx alpha) {
  Vec v = Vec::Zero(n + 1);
  v(0) = 1.0;
  return displacement(HilbertSpec(n), alpha).matrix * v;
}

GkpStatePair swapped(const GkpStatePair& p) { return GkpStatePair{p.state1, p.state0, p.spec1, p.spec0}; }

}  // namespace

TEST_CASE("simple circuit separates well-squeezed states") {
  const GkpStatePair& p = pair_at(0.15, 600);
  const ShotResult r = ReadoutCircuit::simple(HilbertSpec(600)).run(p.state0);
  CHECK(r.p1 < 1e-2);
  CHECK(r.p1 == rel(analytics::p_err_simple_formula(0.15), 0.15));
}

TEST_CASE("simple circuit at 10 dB") {
  const double e = simulated_p_err(pair_at(kTen), CircuitParams{0.0, 1}).p_err;
  CHECK(std::abs(e - 0.0378) < 5e-3);
}

TEST_CASE("lambda = 0 matches the circuit without the Y gate") {
  const GkpStatePair& p = pair_at(kTen);
  const ReadoutCircuit with_gate(HilbertSpec(150), 0.0);
  const ReadoutCircuit without = ReadoutCircuit::simple(HilbertSpec(150));
  CHECK(with_gate.has_y_interaction());
  CHECK_FALSE(without.has_y_interaction());
  for (const auto* s : {&p.state0, &p.state1}) CHECK(std::abs(with_gate.run(*s).p1 - without.run(*s).p1) < 1e-14);
}

TEST_CASE("optimized lambda at 10 dB") {
  const GkpStatePair& p = pair_at(kTen);
  const double l = analytics::optimal_lambda(kTen);
  const double e = simulated_p_err(p, CircuitParams{l, 1}).p_err;
  CHECK(e <= 3e-4);
  // First converged value at N = 150, frozen.
  CHECK(e == rel(1.8996786e-4, 0.05));
  const LambdaOptimum opt = optimize_lambda_simulated(p, 0.0, 0.2);
  CHECK(opt.p_err <= e + 1e-12);
  CHECK(std::abs(opt.lambda - l) < 0.01);
}

TEST_CASE("majority vote helps the simple circuit") {
  const GkpStatePair& p = pair_at(kTen);
  const double r1 = simulated_p_err(p, CircuitParams{0.0, 1}).p_err;
  const double r3 = simulated_p_err(p, CircuitParams{0.0, 3}).p_err;
  const double r5 = simulated_p_err(p, CircuitParams{0.0, 5}).p_err;
  CHECK(r3 < r1);
  CHECK(r5 < r3);
}

TEST_CASE("numeric homodyne tracks the erfc model") {
  for (double delta : {0.25, kTen, 0.4}) {
    const double num = homodyne_p_err_numeric(pair_at(delta, delta < 0.26 ? 300 : 150));
    CHECK(std::abs(num - analytics::p_err_homodyne_formula(delta)) < 0.2 * analytics::p_err_homodyne_formula(delta));
  }
}

TEST_CASE("homodyne stays below 1/2 for poorly squeezed states") {
  const GkpStatePair p = make_gkp_pair(HilbertSpec(80), 0.95, 1.0 / 0.95);
  const double e = homodyne_p_err_numeric(p);
  CHECK(e > 0.0);
  CHECK(e < 0.5);
}

TEST_CASE("swapping the logical labels with the decoding parity leaves homodyne unchanged") {
  const GkpStatePair& p = pair_at(kTen);
  CHECK(std::abs(homodyne_p_err_numeric(p) - homodyne_p_err_numeric(swapped(p), {}, 1)) < 1e-10);
}

TEST_CASE("outcome probabilities sum to one") {
  const GkpStatePair& p = pair_at(0.3);
  const OscillatorState mixed = gaussian_displacement_channel(p.state0, 0.1);
  for (double l : {-0.3, 0.0, 0.08, 0.5, 0.9}) {
    const ReadoutCircuit c(HilbertSpec(150), l);
    const ShotResult a = c.run(p.state0);
    const ShotResult b = c.run(mixed);
    CHECK(std::abs(a.p0 + a.p1 - 1.0) < 1e-10);
    CHECK(std::abs(b.p0 + b.p1 - 1.0) < 1e-10);
    CHECK(a.p0 >= 0.0);
    CHECK(b.p1 >= 0.0);
  }
}

TEST_CASE("spectral propagation agrees with the dense hybrid blocks") {
  const GkpStatePair& p = pair_at(0.3);
  const ReadoutCircuit c(HilbertSpec(150), 0.07);
  const auto parts = c.propagate(p.state0.ket());
  for (int k = 0; k < 2; ++k) {
    const Vec dense = c.block(k) * p.state0.ket();
    CHECK((dense - parts[k]).cwiseAbs().maxCoeff() < 1e-10);
  }
  // Same input, once as a ket and once as a density operator.
  const ShotResult a = c.run(p.state0);
  const ShotResult b = c.run(OscillatorState::mixed(p.state0.density()));
  CHECK(std::abs(a.p1 - b.p1) < 1e-12);
  CHECK((a.post0->density() - b.post0->density()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("post-measurement states average to the unmeasured marginal") {
  const HilbertSpec spec(150);
  const GkpStatePair& p = pair_at(kTen);
  const double l = analytics::optimal_lambda(kTen);
  const ShotResult r = run_readout_once(p.state1, l);
  const Mat mix = r.p0 * r.post0->density() + r.p1 * r.post1->density();
  const LinearOp u{rabi_gate(spec, Pauli::X, cplx(0.0, kSqrtPi / 2.0)).matrix * rabi_gate(spec, Pauli::Y, cplx(-l, 0.0)).matrix,
                   false, true};
  const HybridState out = apply(u, HybridState::product(Eigen::Vector2cd(1.0, 0.0), p.state1));
  CHECK((mix - reduced_oscillator(out)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.post0->norm() == rel(1.0, 1e-12));
}

TEST_CASE("simple readout depends on the input only through one characteristic value") {
  // p0 - p1 = Re <D(i sqrt(pi/2))>, whatever the state.
  const int n = 150;
  const ReadoutCircuit c = ReadoutCircuit::simple(HilbertSpec(n));
  const cplx beta(0.0, std::sqrt(std::numbers::pi / 2.0));
  std::vector<OscillatorState> inputs = {OscillatorState::pure(coherent(n, cplx(0.4, -0.3))),
                                         OscillatorState::pure(coherent(n, cplx(-1.1, 0.6))), pair_at(0.3).state0,
                                         gaussian_displacement_channel(pair_at(0.3).state1, 0.15)};
  for (const auto& s : inputs) {
    const ShotResult r = c.run(s);
    CHECK(std::abs((r.p0 - r.p1) - displacement_expectation(s, beta).real()) < 1e-10);
  }
}

TEST_CASE("simulation agrees with the closed form in its regime") {
  for (double delta : {0.2, 0.25, 0.3, 0.35}) {
    const int n = delta < 0.26 ? 300 : 150;
    const GkpStatePair& p = pair_at(delta, n);
    for (double l : {-0.15, -0.05, 0.0, 0.05, 0.1, 0.15}) {
      const double sim = simulated_p_err(p, CircuitParams{l, 1}).p_err;
      const double formula = analytics::p_err_improved_formula(delta, l);
      CHECK(std::abs(sim - formula) <= 0.1 * formula + 1e-6);
    }
  }
}

TEST_CASE("no circuit beats the Helstrom bound") {
  for (double delta : {0.25, kTen, 0.4}) {
    const GkpStatePair& p = pair_at(delta, delta < 0.26 ? 300 : 150);
    const double bound = helstrom_bound(p.state0, p.state1);
    for (double l : {0.0, analytics::optimal_lambda(delta), 0.3}) {
      for (int rounds : {1, 3}) CHECK(simulated_p_err(p, CircuitParams{l, rounds}).p_err >= bound - 1e-10);
    }
    CHECK(homodyne_p_err_numeric(p) >= bound - 1e-10);
  }
}

TEST_CASE("repeating the improved readout gains nothing at the optimum") {
  for (double delta : {0.25, 0.3, 0.35}) {
    const GkpStatePair& p = pair_at(delta, delta < 0.26 ? 300 : 150);
    const double l = analytics::optimal_lambda(delta);
    const double r1 = simulated_p_err(p, CircuitParams{l, 1}).p_err;
    const double r3 = simulated_p_err(p, CircuitParams{l, 3}).p_err;
    CHECK(r3 >= 0.9 * r1);
  }
}

TEST_CASE("branch enumeration") {
  const GkpStatePair& p = pair_at(kTen);
  const ReadoutOutcome o = simulated_p_err(p, CircuitParams{0.0, 3}, true);
  REQUIRE(o.branches0.size() == 8);
  REQUIRE(o.branches1.size() == 8);
  double s0 = 0.0, s1 = 0.0, wrong0 = 0.0;
  for (const auto& b : o.branches0) {
    s0 += b.probability;
    if (b.verdict == 1) wrong0 += b.probability;
    CHECK(b.outcomes.size() == 3);
  }
  for (const auto& b : o.branches1) s1 += b.probability;
  CHECK(std::abs(s0 - 1.0) < 1e-10);
  CHECK(std::abs(s1 - 1.0) < 1e-10);
  CHECK(std::abs(wrong0 - o.p_1_given_0) < 1e-14);
  CHECK(o.p_err == rel(0.5 * (o.p_1_given_0 + o.p_0_given_1), 1e-14));
  CHECK(o.branches0.front().outcomes == "000");

  std::ostringstream os;
  write_branch_tree_json(os, o);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j.dump().find("000") != std::string::npos);
}

TEST_CASE("mixed inputs run through the same enumeration") {
  const GkpStatePair p = make_gkp_pair(HilbertSpec(150), 0.3, 1.0 / 0.3, 0.1);
  const ReadoutOutcome o1 = simulated_p_err(p, CircuitParams{0.05, 1});
  const ReadoutOutcome o3 = simulated_p_err(p, CircuitParams{0.0, 3});
  CHECK(o1.p_err > 0.0);
  CHECK(o1.p_err < 0.5);
  CHECK(o3.p_err < simulated_p_err(p, CircuitParams{0.0, 1}).p_err);
  // The simple circuit only sees delta_eff.
  const double d_eff = std::sqrt(0.09 + 2 * 0.01);
  CHECK(std::abs(simulated_p_err(p, CircuitParams{0.0, 1}).p_err - analytics::p_err_simple_formula(d_eff)) <
        0.1 * analytics::p_err_simple_formula(d_eff));
  const LambdaOptimum opt = optimize_lambda_simulated(p, 0.0, 0.2);
  CHECK(opt.p_err <= simulated_p_err(p, CircuitParams{0.0, 1}).p_err);
}

TEST_CASE("circuit parameter validation") {
  CHECK_THROWS_AS((CircuitParams{0.0, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((CircuitParams{0.0, 11}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((CircuitParams{0.0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((CircuitParams{1.0, 1}).validate(), std::invalid_argument);
  CHECK_NOTHROW((CircuitParams{0.6, 9}).validate());
  CHECK((CircuitParams{0.6, 1}).beyond_soft_bound());
  CHECK_THROWS_AS(simulated_p_err(pair_at(kTen), CircuitParams{0.0, 4}), std::invalid_argument);
}
