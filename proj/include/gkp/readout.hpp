#pragma once

// Qubit-mediated readout of an oscillator: the qubit starts in |0>, interacts
// through U_y(-lambda) then U_x(i sqrt(pi)/2), and is measured in Z. With
// lambda = 0 this is the plain conditional-displacement readout. Outcome 0 is
// the logical-0 verdict (the likelier outcome for |0~> at small delta and lambda = 0).

#include <array>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gkp/fock.hpp"
#include "gkp/gkp_states.hpp"

namespace gkp {

inline constexpr int kMaxRounds = 9;

struct CircuitParams {
  double lambda = 0.0;
  int rounds = 1;

  // Throws std::invalid_argument unless rounds is odd, 1 <= rounds <= kMaxRounds, |lambda| < 1.
  void validate() const;
  // |lambda| > 0.5: outside the regime where the closed-form error model applies.
  bool beyond_soft_bound() const { return lambda > 0.5 || lambda < -0.5; }
};

struct ShotResult {
  double p0 = 0.0;
  double p1 = 0.0;
  // Normalized oscillator state after each outcome; empty for a zero-probability outcome.
  std::optional<OscillatorState> post0;
  std::optional<OscillatorState> post1;
};

// Pure inputs are propagated with spectral applies of the quadrature
// exponentials (O(N^2) per shot); mixed inputs use the oscillator blocks of the
// full hybrid unitary, built on first use.
class ReadoutCircuit {
 public:
  ReadoutCircuit(const HilbertSpec& spec, double lambda);

  // U_x(i sqrt(pi)/2) alone, with no U_y factor at all.
  static ReadoutCircuit simple(const HilbertSpec& spec);

  ShotResult run(const OscillatorState& state) const;

  // Unnormalized oscillator components for qubit outcomes 0 and 1.
  std::array<Vec, 2> propagate(const Vec& ket) const;

  // Oscillator-space map from the input (qubit in |0>) to the component with
  // qubit outcome `outcome`, taken from the dense hybrid unitary.
  const Mat& block(int outcome) const;

  double lambda() const { return lambda_; }
  bool has_y_interaction() const { return with_y_; }
  const HilbertSpec& spec() const { return space_->spec(); }

 private:
  ReadoutCircuit(std::shared_ptr<const FockSpace> space, double lambda, bool with_y);

  struct Blocks {
    std::once_flag once;
    Mat b[2];
  };

  std::shared_ptr<const FockSpace> space_;
  double lambda_;
  bool with_y_;
  std::shared_ptr<Blocks> blocks_;
};

ShotResult run_readout_once(const OscillatorState& state, double lambda);

struct MeasurementBranch {
  std::string outcomes;  // e.g. "010", first round first
  double probability = 0.0;
  int verdict = 0;  // majority outcome
  std::optional<OscillatorState> post_state;
  double post_delta_eff = 0.0;
};

struct ReadoutOutcome {
  double p_1_given_0 = 0.0;
  double p_0_given_1 = 0.0;
  double p_err = 0.0;
  // Filled when branch recording is requested; sorted by outcome string.
  std::vector<MeasurementBranch> branches0;
  std::vector<MeasurementBranch> branches1;
};

// Exact enumeration of all 2^rounds outcome strings for both inputs. Between
// rounds the qubit is discarded and re-prepared in |0>; the oscillator keeps the
// post-measurement state.
ReadoutOutcome simulated_p_err(const GkpStatePair& pair, const CircuitParams& params,
                               bool record_branches = false);
ReadoutOutcome simulated_p_err(const GkpStatePair& pair, const ReadoutCircuit& circuit, int rounds,
                               bool record_branches = false);

// Outcome strings, probabilities and post-state delta_eff for both inputs.
void write_branch_tree_json(std::ostream& out, const ReadoutOutcome& outcome);

// Single-round p_err minimized over lambda in [lo, hi] by golden-section search.
struct LambdaOptimum {
  double lambda = 0.0;
  double p_err = 0.0;
};
LambdaOptimum optimize_lambda_simulated(const GkpStatePair& pair, double lo, double hi, double tol = 1e-6);

struct HomodyneGrid {
  double half_width = 0.0;  // 0: kappa sqrt(2 pi) + 6
  int nodes_per_bin = 48;   // Gauss-Legendre nodes per decision bin
  double tolerance = 1e-6;  // relative change allowed when the node count doubles
};

// Position density <x|rho|x> at each point.
std::vector<double> position_density(const OscillatorState& state, const std::vector<double>& xs);

// X measurement with nearest-lattice-point decoding: bins centred on k sqrt(pi),
// k of parity `zero_parity` decode to 0. Returns (p(1|0) + p(0|1)) / 2.
double homodyne_p_err_numeric(const GkpStatePair& pair, const HomodyneGrid& grid = {}, int zero_parity = 0);

}  // namespace gkp
