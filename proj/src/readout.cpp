#include "gkp/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gkp/numerics.hpp"

namespace gkp {

namespace {

constexpr double kPi = std::numbers::pi;

const cplx kReadoutKick(0.0, std::sqrt(kPi) / 2.0);

// Projects B_k onto the input and returns (probability, normalized post-state).
std::pair<double, std::optional<OscillatorState>> project(const Mat& block, const OscillatorState& state) {
  if (state.is_pure()) {
    Vec out = block * state.ket();
    const double p = out.squaredNorm();
    if (!(p > 0.0)) return {0.0, std::nullopt};
    return {p, OscillatorState::pure(out / std::sqrt(p))};
  }
  Mat out = block * state.density() * block.adjoint();
  const double p = out.trace().real();
  if (!(p > 0.0)) return {0.0, std::nullopt};
  out /= p;
  return {p, OscillatorState::mixed(0.5 * (out + out.adjoint()))};
}

}  // namespace

std::array<std::pair<double, std::optional<OscillatorState>>, 2> measure(const ReadoutCircuit& circuit,
                                                                         const OscillatorState& state);

namespace {

struct TreeWalk {
  const ReadoutCircuit& circuit;
  int rounds;
  bool record;
  double verdict_mass[2] = {0.0, 0.0};
  std::vector<MeasurementBranch> branches;

  void descend(const OscillatorState& state, double prob, std::string& path, int ones) {
    if (static_cast<int>(path.size()) == rounds) {
      const int verdict = 2 * ones > rounds ? 1 : 0;
      verdict_mass[verdict] += prob;
      if (record) {
        MeasurementBranch b;
        b.outcomes = path;
        b.probability = prob;
        b.verdict = verdict;
        b.post_delta_eff = effective_squeezing(state);
        b.post_state = state;
        branches.push_back(std::move(b));
      }
      return;
    }
    auto outcomes = measure(circuit, state);
    for (int k = 0; k < 2; ++k) {
      auto& [p, post] = outcomes[k];
      if (!post) continue;
      path.push_back(static_cast<char>('0' + k));
      descend(*post, prob * p, path, ones + k);
      path.pop_back();
    }
  }
};

}  // namespace

void CircuitParams::validate() const {
  if (rounds < 1 || rounds > kMaxRounds) {
    throw std::invalid_argument("CircuitParams: rounds must lie in [1, " + std::to_string(kMaxRounds) + "]");
  }
  if (rounds % 2 == 0) throw std::invalid_argument("CircuitParams: rounds must be odd");
  if (!(std::abs(lambda) < 1.0)) throw std::invalid_argument("CircuitParams: |lambda| must be < 1");
}

ReadoutCircuit::ReadoutCircuit(const HilbertSpec& spec, double lambda)
    : ReadoutCircuit(FockSpace::get(spec), lambda, true) {}

ReadoutCircuit ReadoutCircuit::simple(const HilbertSpec& spec) {
  return ReadoutCircuit(FockSpace::get(spec), 0.0, false);
}

ReadoutCircuit::ReadoutCircuit(std::shared_ptr<const FockSpace> space, double lambda, bool with_y)
    : space_(std::move(space)), lambda_(lambda), with_y_(with_y), blocks_(std::make_shared<Blocks>()) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("ReadoutCircuit: lambda must be finite");
}

namespace {

// exp(i A sigma) on (q0 (x) in0 + q1 (x) in1), A = -Re[beta] P + Im[beta] X:
// sum over s = +-1 of Pi_s (x) exp(i s A).
std::array<Vec, 2> apply_rabi(const FockSpace& space, Pauli k, cplx beta, const std::array<Vec, 2>& in) {
  const Eigen::Matrix2cd sigma = pauli_matrix(k);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  std::array<Vec, 2> out{Vec::Zero(in[0].size()), Vec::Zero(in[0].size())};
  for (int s = -1; s <= 1; s += 2) {
    const Eigen::Matrix2cd proj = 0.5 * (id + static_cast<double>(s) * sigma);
    for (int r = 0; r < 2; ++r) {
      if (in[r].size() == 0 || (proj(0, r) == 0.0 && proj(1, r) == 0.0)) continue;
      const Vec moved = space.phase_space_exp_apply(static_cast<double>(s) * beta, in[r]);
      for (int q = 0; q < 2; ++q) {
        if (proj(q, r) != 0.0) out[q] += proj(q, r) * moved;
      }
    }
  }
  return out;
}

}  // namespace

std::array<Vec, 2> ReadoutCircuit::propagate(const Vec& ket) const {
  if (ket.size() != space_->spec().dim()) throw DimensionError("ReadoutCircuit: state cutoff differs from circuit");
  std::array<Vec, 2> comps{ket, Vec()};
  if (with_y_ && lambda_ != 0.0) {
    comps[1] = Vec::Zero(ket.size());
    comps = apply_rabi(*space_, Pauli::Y, cplx(-lambda_, 0.0), comps);
  }
  return apply_rabi(*space_, Pauli::X, kReadoutKick, comps);
}

const Mat& ReadoutCircuit::block(int outcome) const {
  if (outcome != 0 && outcome != 1) throw std::out_of_range("ReadoutCircuit::block: outcome must be 0 or 1");
  std::call_once(blocks_->once, [this] {
    const HilbertSpec& spec = space_->spec();
    const Eigen::Index d = spec.dim();
    const Mat ux = rabi_gate(spec, Pauli::X, kReadoutKick).matrix;
    // Columns acting on qubit |0>.
    const Mat circuit =
        with_y_ ? Mat(ux * rabi_gate(spec, Pauli::Y, cplx(-lambda_, 0.0)).matrix.leftCols(d)) : Mat(ux.leftCols(d));
    blocks_->b[0] = circuit.topRows(d);
    blocks_->b[1] = circuit.bottomRows(d);
  });
  return blocks_->b[outcome];
}

namespace {

std::pair<double, std::optional<OscillatorState>> normalized(Vec v) {
  const double p = v.squaredNorm();
  if (!(p > 0.0)) return {0.0, std::nullopt};
  return {p, OscillatorState::pure(v / std::sqrt(p))};
}

}  // namespace

std::array<std::pair<double, std::optional<OscillatorState>>, 2> measure(const ReadoutCircuit& circuit,
                                                                         const OscillatorState& state) {
  if (state.is_pure()) {
    auto comps = circuit.propagate(state.ket());
    return {normalized(std::move(comps[0])), normalized(std::move(comps[1]))};
  }
  if (state.size() != circuit.spec().dim()) throw DimensionError("ReadoutCircuit: state cutoff differs from circuit");
  return {project(circuit.block(0), state), project(circuit.block(1), state)};
}

ShotResult ReadoutCircuit::run(const OscillatorState& state) const {
  auto m = measure(*this, state);
  ShotResult r;
  std::tie(r.p0, r.post0) = std::move(m[0]);
  std::tie(r.p1, r.post1) = std::move(m[1]);
  return r;
}

ShotResult run_readout_once(const OscillatorState& state, double lambda) {
  return ReadoutCircuit(state.space(), lambda).run(state);
}

ReadoutOutcome simulated_p_err(const GkpStatePair& pair, const CircuitParams& params, bool record_branches) {
  params.validate();
  return simulated_p_err(pair, ReadoutCircuit(pair.state0.space(), params.lambda), params.rounds,
                         record_branches);
}

ReadoutOutcome simulated_p_err(const GkpStatePair& pair, const ReadoutCircuit& circuit, int rounds,
                               bool record_branches) {
  CircuitParams{circuit.lambda(), rounds}.validate();
  ReadoutOutcome out;
  for (int mu = 0; mu < 2; ++mu) {
    TreeWalk walk{circuit, rounds, record_branches, {0.0, 0.0}, {}};
    std::string path;
    walk.descend(mu == 0 ? pair.state0 : pair.state1, 1.0, path, 0);
    if (mu == 0) {
      out.p_1_given_0 = walk.verdict_mass[1];
      out.branches0 = std::move(walk.branches);
    } else {
      out.p_0_given_1 = walk.verdict_mass[0];
      out.branches1 = std::move(walk.branches);
    }
  }
  out.p_err = 0.5 * (out.p_1_given_0 + out.p_0_given_1);
  return out;
}

void write_branch_tree_json(std::ostream& out, const ReadoutOutcome& outcome) {
  auto dump = [](const std::vector<MeasurementBranch>& branches) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : branches) {
      nlohmann::json j;
      j["outcomes"] = b.outcomes;
      j["probability"] = b.probability;
      j["verdict"] = b.verdict;
      if (std::isfinite(b.post_delta_eff)) j["post_delta_eff"] = b.post_delta_eff;
      else j["post_delta_eff"] = nullptr;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  nlohmann::json j;
  j["p_1_given_0"] = outcome.p_1_given_0;
  j["p_0_given_1"] = outcome.p_0_given_1;
  j["p_err"] = outcome.p_err;
  j["input0"] = dump(outcome.branches0);
  j["input1"] = dump(outcome.branches1);
  out << j.dump(2) << '\n';
}

namespace {

// rho = sum_i w_i |v_i><v_i| with eigenvalues below 1e-16 dropped.
struct Ensemble {
  std::vector<double> weights;
  std::vector<Vec> kets;
};

Ensemble ensemble_of(const OscillatorState& state) {
  if (state.is_pure()) return {{1.0}, {state.ket()}};
  Eigen::SelfAdjointEigenSolver<Mat> solver(state.density());
  Ensemble e;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double w = solver.eigenvalues()(i);
    if (w > 1e-16) {
      e.weights.push_back(w);
      e.kets.push_back(solver.eigenvectors().col(i));
    }
  }
  return e;
}

double wrong_outcome_probability(const ReadoutCircuit& circuit, const Ensemble& e, int wrong) {
  double p = 0.0;
  for (std::size_t i = 0; i < e.kets.size(); ++i) {
    p += e.weights[i] * circuit.propagate(e.kets[i])[wrong].squaredNorm();
  }
  return p;
}

}  // namespace

LambdaOptimum optimize_lambda_simulated(const GkpStatePair& pair, double lo, double hi, double tol) {
  const HilbertSpec spec = pair.state0.space();
  const Ensemble e0 = ensemble_of(pair.state0);
  const Ensemble e1 = ensemble_of(pair.state1);
  auto objective = [&](double lambda) {
    const ReadoutCircuit circuit(spec, lambda);
    return 0.5 * (wrong_outcome_probability(circuit, e0, 1) + wrong_outcome_probability(circuit, e1, 0));
  };
  const auto best = numerics::golden_section_minimize(objective, lo, hi, tol);
  return {best.argmin, best.value};
}

std::vector<double> position_density(const OscillatorState& state, const std::vector<double>& xs) {
  const int cutoff = state.space().cutoff();
  std::vector<double> out;
  out.reserve(xs.size());
  const bool pure = state.is_pure();
  const Mat rho = pure ? Mat() : state.density();
  for (double x : xs) {
    const auto phi = numerics::hermite_functions(cutoff, x);
    const Eigen::Map<const Eigen::VectorXd> basis(phi.data(), cutoff + 1);
    if (pure) {
      out.push_back(std::norm(basis.cast<cplx>().dot(state.ket())));
    } else {
      const Eigen::VectorXcd b = basis.cast<cplx>();
      out.push_back(b.dot(rho * b).real());
    }
  }
  return out;
}

double homodyne_p_err_numeric(const GkpStatePair& pair, const HomodyneGrid& grid, int zero_parity) {
  if (zero_parity != 0 && zero_parity != 1) throw std::invalid_argument("homodyne: zero_parity must be 0 or 1");
  const double half_width =
      grid.half_width > 0.0 ? grid.half_width : pair.spec0.kappa * std::sqrt(2.0 * kPi) + 6.0;
  const double spacing = std::sqrt(kPi);
  const int k_max = static_cast<int>(std::ceil(half_width / spacing));

  auto misclassified = [&](int nodes) {
    const auto rule = numerics::gauss_legendre(nodes);
    std::vector<double> xs, ws;
    std::vector<int> parity;
    for (int k = -k_max; k <= k_max; ++k) {
      const double centre = k * spacing;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        xs.push_back(centre + 0.5 * spacing * rule.nodes[j]);
        ws.push_back(0.5 * spacing * rule.weights[j]);
        parity.push_back(((k % 2) + 2) % 2);
      }
    }
    const auto rho0 = position_density(pair.state0, xs);
    const auto rho1 = position_density(pair.state1, xs);
    double p10 = 0.0, p01 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const int decoded = parity[i] == zero_parity ? 0 : 1;
      if (decoded == 1) p10 += ws[i] * rho0[i];
      else p01 += ws[i] * rho1[i];
    }
    return 0.5 * (p10 + p01);
  };

  const double coarse = misclassified(grid.nodes_per_bin);
  const double fine = misclassified(2 * grid.nodes_per_bin);
  if (std::abs(fine - coarse) > grid.tolerance * std::max(std::abs(fine), 1e-12)) {
    throw ConvergenceError("homodyne_p_err_numeric: bin quadrature not converged (" + std::to_string(coarse) +
                           " vs " + std::to_string(fine) + ")");
  }
  return fine;
}

}  // namespace gkp
