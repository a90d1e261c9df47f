#include "gkp/fock.hpp"

#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace gkp {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

double top_population(const Vec& osc_ket) {
  const Eigen::Index n = osc_ket.size();
  return std::norm(osc_ket(n - 1)) + std::norm(osc_ket(n - 2));
}

void check_leakage(double population, const char* what) {
  if (!(population < kLeakageThreshold)) {
    throw TruncationError(std::string(what) + ": top Fock levels hold population " +
                          format_sci(population) + "; increase the cutoff");
  }
}

Mat annihilation(const HilbertSpec& spec) {
  Mat a = Mat::Zero(spec.dim(), spec.dim());
  for (Eigen::Index n = 1; n < spec.dim(); ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

}  // namespace

HilbertSpec::HilbertSpec(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("HilbertSpec: cutoff must be >= 1, got " + std::to_string(cutoff));
  }
}

Eigen::Matrix2cd pauli_matrix(Pauli k) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (k) {
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -i, i, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

// ---- states ----

Eigen::Index StateData::size() const {
  return std::visit([](const auto& r) { return static_cast<Eigen::Index>(r.rows()); }, repr_);
}

const Vec& StateData::ket() const {
  if (!is_pure()) throw UnsupportedOperation("ket() requested from a mixed state");
  return std::get<Vec>(repr_);
}

Mat StateData::density() const {
  if (is_pure()) {
    const Vec& v = std::get<Vec>(repr_);
    return v * v.adjoint();
  }
  return std::get<Mat>(repr_);
}

double StateData::norm() const {
  if (is_pure()) return std::get<Vec>(repr_).norm();
  return std::get<Mat>(repr_).trace().real();
}

OscillatorState OscillatorState::pure(Vec ket) {
  if (ket.size() < 2) throw DimensionError("OscillatorState: need at least 2 Fock levels");
  return OscillatorState(std::move(ket));
}

OscillatorState OscillatorState::mixed(Mat rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) {
    throw DimensionError("OscillatorState: density operator must be square with >= 2 levels");
  }
  return OscillatorState(std::move(rho));
}

HybridState HybridState::pure(Vec ket) {
  if (ket.size() < 4 || ket.size() % 2 != 0) {
    throw DimensionError("HybridState: ket length must be 2(N+1) with N >= 1");
  }
  return HybridState(std::move(ket));
}

HybridState HybridState::mixed(Mat rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 4 || rho.rows() % 2 != 0) {
    throw DimensionError("HybridState: density operator must be 2(N+1) square with N >= 1");
  }
  return HybridState(std::move(rho));
}

HybridState HybridState::product(const Eigen::Vector2cd& qubit, const OscillatorState& osc) {
  const Eigen::Index d = osc.size();
  if (osc.is_pure()) {
    Vec v(2 * d);
    v.head(d) = qubit(0) * osc.ket();
    v.tail(d) = qubit(1) * osc.ket();
    return HybridState(std::move(v));
  }
  const Mat rho = osc.density();
  Mat out(2 * d, 2 * d);
  for (int q = 0; q < 2; ++q) {
    for (int r = 0; r < 2; ++r) {
      out.block(q * d, r * d, d, d) = qubit(q) * std::conj(qubit(r)) * rho;
    }
  }
  return HybridState(std::move(out));
}

// ---- spectra ----

HermitianSpectrum::HermitianSpectrum(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("HermitianSpectrum: eigendecomposition failed");
  }
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
}

Mat HermitianSpectrum::exp_i(double theta) const {
  if (theta == 0.0) return Mat::Identity(vectors_.rows(), vectors_.rows());
  const Vec phases = (cplx(0.0, theta) * values_.cast<cplx>()).array().exp();
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Vec HermitianSpectrum::exp_i_apply(double theta, const Vec& v) const {
  if (theta == 0.0) return v;
  const Vec phases = (cplx(0.0, theta) * values_.cast<cplx>()).array().exp();
  return vectors_ * (phases.array() * (vectors_.adjoint() * v).array()).matrix();
}

// ---- FockSpace ----

namespace {

LinearOp build_x(const HilbertSpec& spec) {
  const Mat a = annihilation(spec);
  return LinearOp{(a + a.adjoint()) / std::sqrt(2.0), true, false};
}

LinearOp build_p(const HilbertSpec& spec) {
  const Mat a = annihilation(spec);
  return LinearOp{(a - a.adjoint()) / cplx(0.0, std::sqrt(2.0)), true, false};
}

}  // namespace

namespace {

// X is a real Jacobi matrix; P = R X R^dag and R4 (XP + PX) R4^dag is real
// symmetric, with R = diag(i^n) and R4 = diag(e^{i pi n / 4}). Solving the real
// problems and rotating back is much cheaper than a complex eigensolve.
HermitianSpectrum x_spectrum_of(const HilbertSpec& spec) {
  const Eigen::Index d = spec.dim();
  Eigen::VectorXd off(d - 1);
  for (Eigen::Index n = 1; n < d; ++n) off(n - 1) = std::sqrt(0.5 * static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(Eigen::VectorXd::Zero(d), off);
  if (solver.info() != Eigen::Success) throw ConvergenceError("FockSpace: X eigendecomposition failed");
  return HermitianSpectrum(solver.eigenvectors().cast<cplx>(), solver.eigenvalues());
}

Vec phase_ramp(Eigen::Index d, double step) {
  Vec r(d);
  for (Eigen::Index n = 0; n < d; ++n) r(n) = std::polar(1.0, step * static_cast<double>(n));
  return r;
}

HermitianSpectrum p_spectrum_of(const HermitianSpectrum& x) {
  const Vec r = phase_ramp(x.basis().rows(), std::numbers::pi / 2.0);
  return HermitianSpectrum(r.asDiagonal() * x.basis(), x.eigenvalues());
}

HermitianSpectrum dilation_spectrum_of(const Mat& dilation) {
  const Vec r4 = phase_ramp(dilation.rows(), std::numbers::pi / 4.0);
  const Mat rotated = r4.asDiagonal() * dilation * r4.conjugate().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rotated.real());
  if (solver.info() != Eigen::Success) throw ConvergenceError("FockSpace: dilation eigendecomposition failed");
  return HermitianSpectrum(r4.conjugate().asDiagonal() * solver.eigenvectors().cast<cplx>(),
                           solver.eigenvalues());
}

}  // namespace

FockSpace::FockSpace(HilbertSpec spec)
    : spec_(spec),
      x_(build_x(spec)),
      p_(build_p(spec)),
      dilation_{x_.matrix * p_.matrix + p_.matrix * x_.matrix, true, false},
      x_spec_(x_spectrum_of(spec)),
      p_spec_(p_spectrum_of(x_spec_)),
      dilation_spec_(dilation_spectrum_of(dilation_.matrix)) {}

std::shared_ptr<const FockSpace> FockSpace::get(const HilbertSpec& spec) {
  using Entry = std::shared_future<std::shared_ptr<const FockSpace>>;
  static std::mutex mutex;
  static std::map<int, Entry> cache;

  std::promise<std::shared_ptr<const FockSpace>> promise;
  Entry entry;
  bool builder = false;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(spec.cutoff());
    if (it == cache.end()) {
      entry = promise.get_future().share();
      cache.emplace(spec.cutoff(), entry);
      builder = true;
    } else {
      entry = it->second;
    }
  }
  if (builder) {
    try {
      promise.set_value(std::make_shared<const FockSpace>(spec));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return entry.get();
}

Mat FockSpace::phase_space_exp(cplx beta) const {
  if (beta.imag() == 0.0) return p_spec_.exp_i(-beta.real());
  if (beta.real() == 0.0) return x_spec_.exp_i(beta.imag());
  const Mat generator = -beta.real() * p_.matrix + beta.imag() * x_.matrix;
  return HermitianSpectrum(generator).exp_i(1.0);
}

Vec FockSpace::phase_space_exp_apply(cplx beta, const Vec& ket) const {
  require_same_dim(ket.size(), spec_.dim(), "phase_space_exp_apply");
  if (beta.imag() == 0.0) return p_spec_.exp_i_apply(-beta.real(), ket);
  if (beta.real() == 0.0) return x_spec_.exp_i_apply(beta.imag(), ket);
  return phase_space_exp(beta) * ket;
}

Mat FockSpace::squeeze_unchecked(double delta) const {
  // Sign chosen so that Var_X of the squeezed vacuum is delta^2 / 2.
  return dilation_spec_.exp_i(-0.5 * std::log(delta));
}

// ---- operators ----

std::pair<LinearOp, LinearOp> make_quadratures(const HilbertSpec& spec) {
  auto space = FockSpace::get(spec);
  return {space->x(), space->p()};
}

LinearOp displacement(const HilbertSpec& spec, cplx alpha) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("displacement: alpha must be finite");
  }
  auto space = FockSpace::get(spec);
  LinearOp op{space->phase_space_exp(std::sqrt(2.0) * alpha), false, true};
  check_leakage(top_population(op.matrix.col(0)), "displacement");
  return op;
}

LinearOp squeeze(const HilbertSpec& spec, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("squeeze: delta must lie in (0, 1]");
  }
  auto space = FockSpace::get(spec);
  LinearOp op{space->squeeze_unchecked(delta), false, true};
  check_leakage(top_population(op.matrix.col(0)), "squeeze");
  return op;
}

LinearOp rabi_gate(const HilbertSpec& spec, Pauli k, cplx alpha) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("rabi_gate: alpha must be finite");
  }
  auto space = FockSpace::get(spec);
  const Eigen::Index d = spec.dim();

  // exp(i A (x) sigma) = sum_{s=+-1} Pi_s (x) exp(i s A), Pi_s = (I + s sigma) / 2,
  // with the qubit as the outer Kronecker factor.
  const Eigen::Matrix2cd sigma = pauli_matrix(k);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd proj_plus = 0.5 * (id + sigma);
  const Eigen::Matrix2cd proj_minus = 0.5 * (id - sigma);
  const Mat e_plus = space->phase_space_exp(alpha);
  const Mat e_minus = space->phase_space_exp(-alpha);

  LinearOp op{Mat::Zero(2 * d, 2 * d), false, true};
  for (int q = 0; q < 2; ++q) {
    for (int r = 0; r < 2; ++r) {
      if (proj_plus(q, r) != 0.0) op.matrix.block(q * d, r * d, d, d) += proj_plus(q, r) * e_plus;
      if (proj_minus(q, r) != 0.0) op.matrix.block(q * d, r * d, d, d) += proj_minus(q, r) * e_minus;
    }
  }
  for (int q = 0; q < 2; ++q) {
    const Vec column = op.matrix.col(q * d);
    check_leakage(top_population(column.head(d)) + top_population(column.tail(d)), "rabi_gate");
  }
  return op;
}

LinearOp expm(const LinearOp& generator) {
  if (generator.matrix.rows() != generator.matrix.cols()) {
    throw DimensionError("expm: generator must be square");
  }
  Mat result = generator.matrix.exp();
  const bool anti_hermitian = (generator.matrix + generator.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12;
  return LinearOp{std::move(result), false, anti_hermitian};
}

OscillatorState apply(const LinearOp& op, const OscillatorState& state) {
  require_same_dim(op.dim(), state.size(), "apply");
  if (state.is_pure()) return OscillatorState::pure(op.matrix * state.ket());
  return OscillatorState::mixed(op.matrix * state.density() * op.matrix.adjoint());
}

HybridState apply(const LinearOp& op, const HybridState& state) {
  require_same_dim(op.dim(), state.size(), "apply");
  if (state.is_pure()) return HybridState::pure(op.matrix * state.ket());
  return HybridState::mixed(op.matrix * state.density() * op.matrix.adjoint());
}

namespace {

cplx expectation_impl(const Mat& op, const StateData& state) {
  require_same_dim(op.rows(), state.size(), "expectation");
  if (state.is_pure()) return state.ket().dot(op * state.ket());
  return (op * state.density()).trace();
}

}  // namespace

cplx expectation(const LinearOp& op, const OscillatorState& state) {
  return expectation_impl(op.matrix, state);
}

cplx expectation(const LinearOp& op, const HybridState& state) {
  return expectation_impl(op.matrix, state);
}

Eigen::Matrix2cd partial_trace_qubit(const HybridState& state) {
  const Eigen::Index d = state.size() / 2;
  Eigen::Matrix2cd out;
  if (state.is_pure()) {
    const Vec& v = state.ket();
    for (int q = 0; q < 2; ++q) {
      for (int r = 0; r < 2; ++r) out(q, r) = v.segment(r * d, d).dot(v.segment(q * d, d));
    }
    return out;
  }
  const Mat rho = state.density();
  for (int q = 0; q < 2; ++q) {
    for (int r = 0; r < 2; ++r) out(q, r) = rho.block(q * d, r * d, d, d).trace();
  }
  return out;
}

Mat reduced_oscillator(const HybridState& state) {
  const Eigen::Index d = state.size() / 2;
  if (state.is_pure()) {
    const Vec& v = state.ket();
    return v.head(d) * v.head(d).adjoint() + v.tail(d) * v.tail(d).adjoint();
  }
  const Mat rho = state.density();
  return rho.topLeftCorner(d, d) + rho.bottomRightCorner(d, d);
}

OscillatorState normalize(const OscillatorState& state) {
  const double n = state.norm();
  if (!(n > 0.0)) throw std::domain_error("normalize: zero state");
  if (state.is_pure()) return OscillatorState::pure(state.ket() / n);
  return OscillatorState::mixed(state.density() / n);
}

HybridState normalize(const HybridState& state) {
  const double n = state.norm();
  if (!(n > 0.0)) throw std::domain_error("normalize: zero state");
  if (state.is_pure()) return HybridState::pure(state.ket() / n);
  return HybridState::mixed(state.density() / n);
}

OscillatorState vacuum(const HilbertSpec& spec) { return fock_state(spec, 0); }

OscillatorState fock_state(const HilbertSpec& spec, int n) {
  if (n < 0 || n > spec.cutoff()) throw std::out_of_range("fock_state: level outside cutoff");
  Vec v = Vec::Zero(spec.dim());
  v(n) = 1.0;
  return OscillatorState::pure(std::move(v));
}

double leakage(const OscillatorState& state) {
  if (state.is_pure()) return top_population(state.ket());
  const Mat rho = state.density();
  const Eigen::Index n = rho.rows();
  return rho(n - 1, n - 1).real() + rho(n - 2, n - 2).real();
}

double unitarity_defect(const Mat& op, Eigen::Index margin) {
  const Eigen::Index n = op.rows() - margin;
  if (n <= 0) return 0.0;
  const Mat g = op.adjoint() * op;
  return (g.topLeftCorner(n, n) - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Mat& op) { return (op - op.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace gkp
