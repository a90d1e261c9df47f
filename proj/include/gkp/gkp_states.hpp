#pragma once

// Approximate square-lattice GKP basis states: a Gaussian-enveloped comb of
// squeezed vacua, optionally smeared by a Gaussian random-displacement channel.

#include <iosfwd>

#include "gkp/fock.hpp"

namespace gkp {

struct GkpSpec {
  int mu = 0;          // logical bit
  double delta = 0.3;  // peak width
  double kappa = 1.0 / 0.3;  // envelope width
  double sigma = 0.0;  // displacement-channel strength; 0 = pure

  // kappa = 1 / delta.
  static GkpSpec symmetric(int mu, double delta, double sigma = 0.0);

  // Throws std::invalid_argument unless mu in {0,1}, 0 < delta < 1, kappa >= 1, sigma >= 0.
  void validate() const;
};

// Delta_dB = -10 log10(delta^2).
double delta_to_db(double delta);
double db_to_delta(double db);

struct ChannelOptions {
  int initial_nodes = 21;  // per axis
  double purity_tolerance = 1e-6;
  int max_nodes = 641;
};

struct GkpStatePair {
  OscillatorState state0;
  OscillatorState state1;
  GkpSpec spec0;
  GkpSpec spec1;
};

// Envelope weights below this fraction of the largest retained weight are dropped.
inline constexpr double kPeakWeightFloor = 1e-12;

// Largest |2s + mu| retained for the given envelope.
int max_peak_index(double kappa);

// Normalized pure state. `extra_peaks` adds that many peak indices beyond the
// weight floor on each side. Throws TruncationError if the cutoff is too small.
OscillatorState make_pure_gkp(const HilbertSpec& spec, const GkpSpec& g, int extra_peaks = 0);

// rho -> (1 / pi sigma^2) int d^2 alpha exp(-|alpha|^2 / sigma^2) D(alpha) rho D(alpha)^dag,
// evaluated with a tensor Gauss-Hermite rule that is refined (n -> 2n - 1 nodes)
// until the purity settles. sigma = 0 returns the input unchanged.
OscillatorState gaussian_displacement_channel(const OscillatorState& state, double sigma,
                                              const ChannelOptions& options = {});

// Builds both basis states for (delta, kappa, sigma).
GkpStatePair make_gkp_pair(const HilbertSpec& spec, double delta, double kappa, double sigma = 0.0,
                           const ChannelOptions& options = {});

// <D(alpha)> with D(alpha) = exp(sqrt(2) i (-Re[alpha] P + Im[alpha] X)).
cplx displacement_expectation(const OscillatorState& state, cplx alpha);

// sqrt(ln(1 / |<D(i sqrt(2 pi))>|^2) / (2 pi)); +infinity when the expectation vanishes.
double effective_squeezing(const OscillatorState& state);
double effective_squeezing_db(const OscillatorState& state);

double purity(const OscillatorState& state);
double purity(const Mat& rho);

// Pure states only; throws UnsupportedOperation for mixed input.
double helstrom_bound(const OscillatorState& state0, const OscillatorState& state1);

// Fock amplitudes or density entries, row-major, for cross-tool checks.
void write_state_json(std::ostream& out, const OscillatorState& state);
void write_state_csv(std::ostream& out, const OscillatorState& state);

}  // namespace gkp
