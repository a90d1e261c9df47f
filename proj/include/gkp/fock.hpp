#pragma once

// Truncated Fock-space linear algebra for one oscillator, optionally coupled
// to a qubit. Hybrid (qubit x oscillator) vectors use the qubit as the slow
// index: element (q, n) lives at q * (N + 1) + n.

#include <cmath>
#include <complex>
#include <memory>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "gkp/errors.hpp"

namespace gkp {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kLeakageThreshold = 1e-10;

class HilbertSpec {
 public:
  // Fock levels 0..cutoff inclusive. Throws std::invalid_argument if cutoff < 1.
  explicit HilbertSpec(int cutoff);

  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return cutoff_ + 1; }
  Eigen::Index hybrid_dim() const { return 2 * (cutoff_ + 1); }

  bool operator==(const HilbertSpec&) const = default;

 private:
  int cutoff_;
};

struct LinearOp {
  Mat matrix;
  bool hermitian = false;
  bool unitary = false;

  Eigen::Index dim() const { return matrix.rows(); }
};

enum class Pauli { X, Y, Z };

Eigen::Matrix2cd pauli_matrix(Pauli k);

// Pure ket or density operator. Shared storage for OscillatorState/HybridState.
class StateData {
 public:
  bool is_pure() const { return std::holds_alternative<Vec>(repr_); }
  Eigen::Index size() const;

  // Throws UnsupportedOperation on a mixed state.
  const Vec& ket() const;
  // Density operator; computed as |psi><psi| for pure states.
  Mat density() const;

  // Norm for kets, trace for density operators.
  double norm() const;

 protected:
  explicit StateData(Vec ket) : repr_(std::move(ket)) {}
  explicit StateData(Mat rho) : repr_(std::move(rho)) {}

  std::variant<Vec, Mat> repr_;
};

class OscillatorState : public StateData {
 public:
  static OscillatorState pure(Vec ket);
  static OscillatorState mixed(Mat rho);

  HilbertSpec space() const { return HilbertSpec(static_cast<int>(size()) - 1); }

 private:
  using StateData::StateData;
};

// Exactly the pure |psi> case of OscillatorState.
using OscillatorKet = OscillatorState;

class HybridState : public StateData {
 public:
  static HybridState pure(Vec ket);
  static HybridState mixed(Mat rho);
  // |qubit> (x) oscillator.
  static HybridState product(const Eigen::Vector2cd& qubit, const OscillatorState& osc);

  HilbertSpec space() const { return HilbertSpec(static_cast<int>(size() / 2) - 1); }

 private:
  using StateData::StateData;
};

// Eigendecomposition of a Hermitian matrix, reused for exp(i*theta*H) at many theta.
class HermitianSpectrum {
 public:
  explicit HermitianSpectrum(const Mat& hermitian);
  // From a known orthonormal eigenbasis (columns) and eigenvalues.
  HermitianSpectrum(Mat vectors, Eigen::VectorXd values)
      : vectors_(std::move(vectors)), values_(std::move(values)) {}

  Mat exp_i(double theta) const;
  Vec exp_i_apply(double theta, const Vec& v) const;

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  // Columns are eigenvectors.
  const Mat& basis() const { return vectors_; }

 private:
  Mat vectors_;
  Eigen::VectorXd values_;
};

// Quadratures and their spectra for one cutoff. Immutable once built; use
// FockSpace::get to share one instance per cutoff across threads.
class FockSpace {
 public:
  explicit FockSpace(HilbertSpec spec);

  static std::shared_ptr<const FockSpace> get(const HilbertSpec& spec);

  const HilbertSpec& spec() const { return spec_; }
  const LinearOp& x() const { return x_; }
  const LinearOp& p() const { return p_; }
  // XP + PX.
  const LinearOp& dilation() const { return dilation_; }

  const HermitianSpectrum& x_spectrum() const { return x_spec_; }
  const HermitianSpectrum& p_spectrum() const { return p_spec_; }
  const HermitianSpectrum& dilation_spectrum() const { return dilation_spec_; }

  // exp(i (-Re[beta] P + Im[beta] X)) with no leakage check.
  // D(alpha) is phase_space_exp(sqrt(2) * alpha).
  Mat phase_space_exp(cplx beta) const;
  Vec phase_space_exp_apply(cplx beta, const Vec& ket) const;
  Mat squeeze_unchecked(double delta) const;

 private:
  HilbertSpec spec_;
  LinearOp x_, p_, dilation_;
  HermitianSpectrum x_spec_, p_spec_, dilation_spec_;
};

std::pair<LinearOp, LinearOp> make_quadratures(const HilbertSpec& spec);

// D(alpha) = exp(sqrt(2) i (-Re[alpha] P + Im[alpha] X)). Throws TruncationError
// when the displaced vacuum violates the leakage bound.
LinearOp displacement(const HilbertSpec& spec, cplx alpha);

// Squeezer whose action on the vacuum has Var_X = delta^2 / 2. Requires 0 < delta <= 1.
LinearOp squeeze(const HilbertSpec& spec, double delta);

// U_k(alpha) = exp[i (-Re[alpha] P + Im[alpha] X) sigma_k] on the hybrid space.
LinearOp rabi_gate(const HilbertSpec& spec, Pauli k, cplx alpha);

// General matrix exponential (scaling and squaring with Pade approximants).
LinearOp expm(const LinearOp& generator);

OscillatorState apply(const LinearOp& op, const OscillatorState& state);
HybridState apply(const LinearOp& op, const HybridState& state);

cplx expectation(const LinearOp& op, const OscillatorState& state);
cplx expectation(const LinearOp& op, const HybridState& state);

Eigen::Matrix2cd partial_trace_qubit(const HybridState& state);
// Trace over the qubit; returns the reduced oscillator density operator.
Mat reduced_oscillator(const HybridState& state);

OscillatorState normalize(const OscillatorState& state);
HybridState normalize(const HybridState& state);

OscillatorState vacuum(const HilbertSpec& spec);
OscillatorState fock_state(const HilbertSpec& spec, int n);

// Population of the two highest Fock levels.
double leakage(const OscillatorState& state);
inline bool is_converged(const OscillatorState& state) { return leakage(state) < kLeakageThreshold; }

// max |(A^dag A - I)_{ij}| restricted to indices < dim - margin.
double unitarity_defect(const Mat& op, Eigen::Index margin);

// max |(A - A^dag)_{ij}|.
double hermiticity_defect(const Mat& op);

}  // namespace gkp
