#include "gkp/gkp_states.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gkp/analytics.hpp"
#include "gkp/numerics.hpp"

namespace gkp {

namespace {

constexpr double kPi = std::numbers::pi;

// Conjugation by exp(i theta_j H) averaged over Gauss-Hermite nodes, done in
// the eigenbasis of H where it is an elementwise multiply.
Mat smear_along(const HermitianSpectrum& spectrum, const Mat& rho_in_basis, double scale,
                const numerics::QuadratureRule& rule) {
  const Eigen::VectorXd& h = spectrum.eigenvalues();
  const Eigen::Index n = h.size();
  Mat out = Mat::Zero(n, n);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double theta = scale * rule.nodes[j];
    const double w = rule.weights[j] / std::sqrt(kPi);
    const Vec phase = (cplx(0.0, theta) * h.cast<cplx>()).array().exp();
    out.array() += w * ((phase * phase.adjoint()).array() * rho_in_basis.array());
  }
  return out;
}

}  // namespace

GkpSpec GkpSpec::symmetric(int mu, double delta, double sigma) {
  return GkpSpec{mu, delta, 1.0 / delta, sigma};
}

void GkpSpec::validate() const {
  if (mu != 0 && mu != 1) throw std::invalid_argument("GkpSpec: mu must be 0 or 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("GkpSpec: delta must lie in (0, 1)");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("GkpSpec: kappa must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("GkpSpec: sigma must be >= 0");
}

double delta_to_db(double delta) { return -10.0 * std::log10(delta * delta); }

double db_to_delta(double db) { return std::pow(10.0, -db / 20.0); }

int max_peak_index(double kappa) {
  // exp(-pi m^2 / (2 kappa^2)) >= floor  <=>  |m| <= kappa sqrt(2 ln(1/floor) / pi)
  return static_cast<int>(std::floor(kappa * std::sqrt(2.0 * std::log(1.0 / kPeakWeightFloor) / kPi)));
}

OscillatorState make_pure_gkp(const HilbertSpec& spec, const GkpSpec& g, int extra_peaks) {
  g.validate();
  if (g.sigma != 0.0) {
    throw std::invalid_argument("make_pure_gkp: sigma must be 0; use gaussian_displacement_channel");
  }
  auto space = FockSpace::get(spec);
  const Vec squeezed = space->dilation_spectrum().exp_i_apply(-0.5 * std::log(g.delta), vacuum(spec).ket());

  const int limit = max_peak_index(g.kappa) + 2 * extra_peaks;
  Vec psi = Vec::Zero(spec.dim());
  for (int m = -limit; m <= limit; ++m) {
    if (((m % 2) + 2) % 2 != g.mu) continue;
    // Peak at X = sqrt(pi) m, i.e. D(sqrt(pi/2) m) applied to the squeezed vacuum.
    const double alpha = std::sqrt(kPi / 2.0) * m;
    const double weight = std::exp(-alpha * alpha / (g.kappa * g.kappa));
    psi += weight * space->phase_space_exp_apply(std::sqrt(2.0) * alpha, squeezed);
  }
  const double n = psi.norm();
  if (!(n > 0.0)) throw ConvergenceError("make_pure_gkp: no peaks retained");
  OscillatorState state = OscillatorState::pure(psi / n);
  const double leak = leakage(state);
  if (!(leak < kLeakageThreshold)) {
    throw TruncationError("make_pure_gkp: top Fock levels hold population " + format_sci(leak) +
                          " at cutoff " + std::to_string(spec.cutoff()));
  }
  return state;
}

OscillatorState gaussian_displacement_channel(const OscillatorState& state, double sigma,
                                              const ChannelOptions& options) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian_displacement_channel: sigma must be >= 0");
  }
  if (sigma == 0.0) return state;

  auto space = FockSpace::get(state.space());
  const Mat rho = state.density();

  // With alpha = sigma (t + i u) and weight exp(-t^2 - u^2) / pi, D(alpha) factors
  // into an X-generated kick (u) and a P-generated shift (t) up to a phase that
  // cancels under conjugation, so the 2-D rule is two 1-D smearings.
  const auto& xs = space->x_spectrum();
  const auto& ps = space->p_spectrum();
  auto evaluate = [&](int nodes) {
    const auto rule = numerics::gauss_hermite(nodes);
    Mat r = smear_along(xs, xs.basis().adjoint() * rho * xs.basis(), std::sqrt(2.0) * sigma, rule);
    r = xs.basis() * r * xs.basis().adjoint();
    r = smear_along(ps, ps.basis().adjoint() * r * ps.basis(), -std::sqrt(2.0) * sigma, rule);
    r = ps.basis() * r * ps.basis().adjoint();
    return Mat(0.5 * (r + r.adjoint()));
  };

  int nodes = options.initial_nodes;
  Mat current = evaluate(nodes);
  double current_purity = purity(current);
  while (true) {
    const int finer = 2 * nodes - 1;
    if (finer > options.max_nodes) {
      throw ConvergenceError("gaussian_displacement_channel: purity not stable at " + std::to_string(nodes) +
                             " nodes per axis");
    }
    Mat refined = evaluate(finer);
    const double refined_purity = purity(refined);
    const bool settled = std::abs(refined_purity - current_purity) <= options.purity_tolerance;
    current = std::move(refined);
    current_purity = refined_purity;
    nodes = finer;
    if (settled) break;
  }
  return OscillatorState::mixed(std::move(current));
}

GkpStatePair make_gkp_pair(const HilbertSpec& spec, double delta, double kappa, double sigma,
                           const ChannelOptions& options) {
  const GkpSpec g0{0, delta, kappa, sigma};
  const GkpSpec g1{1, delta, kappa, sigma};
  g0.validate();
  const GkpSpec pure0{0, delta, kappa, 0.0};
  const GkpSpec pure1{1, delta, kappa, 0.0};
  OscillatorState s0 = make_pure_gkp(spec, pure0);
  OscillatorState s1 = make_pure_gkp(spec, pure1);
  if (sigma > 0.0) {
    s0 = gaussian_displacement_channel(s0, sigma, options);
    s1 = gaussian_displacement_channel(s1, sigma, options);
  }
  return GkpStatePair{std::move(s0), std::move(s1), g0, g1};
}

cplx displacement_expectation(const OscillatorState& state, cplx alpha) {
  auto space = FockSpace::get(state.space());
  const cplx beta = std::sqrt(2.0) * alpha;
  if (state.is_pure()) return state.ket().dot(space->phase_space_exp_apply(beta, state.ket()));
  return (space->phase_space_exp(beta) * state.density()).trace();
}

double effective_squeezing(const OscillatorState& state) {
  const double magnitude = std::abs(displacement_expectation(state, cplx(0.0, std::sqrt(2.0 * kPi))));
  if (!(magnitude > std::numeric_limits<double>::min())) return std::numeric_limits<double>::infinity();
  if (magnitude >= 1.0) return 0.0;
  return std::sqrt(-2.0 * std::log(magnitude) / (2.0 * kPi));
}

double effective_squeezing_db(const OscillatorState& state) {
  const double d = effective_squeezing(state);
  if (std::isinf(d)) return -std::numeric_limits<double>::infinity();
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return delta_to_db(d);
}

double purity(const Mat& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.squaredNorm();
}

double purity(const OscillatorState& state) {
  if (state.is_pure()) {
    const double n = state.ket().squaredNorm();
    return n * n;
  }
  return purity(state.density());
}

double helstrom_bound(const OscillatorState& state0, const OscillatorState& state1) {
  if (!state0.is_pure() || !state1.is_pure()) {
    throw UnsupportedOperation("helstrom_bound: mixed-state discrimination is not supported");
  }
  if (state0.size() != state1.size()) throw DimensionError("helstrom_bound: dimension mismatch");
  return analytics::helstrom_formula(state0.ket().dot(state1.ket()));
}

void write_state_json(std::ostream& out, const OscillatorState& state) {
  nlohmann::json j;
  j["cutoff"] = state.space().cutoff();
  j["representation"] = state.is_pure() ? "ket" : "density";
  j["ordering"] = "row-major";
  std::vector<double> re, im;
  if (state.is_pure()) {
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      re.push_back(state.ket()(i).real());
      im.push_back(state.ket()(i).imag());
    }
  } else {
    const Mat rho = state.density();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
      for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        re.push_back(rho(r, c).real());
        im.push_back(rho(r, c).imag());
      }
    }
  }
  j["real"] = re;
  j["imag"] = im;
  out << j.dump() << '\n';
}

void write_state_csv(std::ostream& out, const OscillatorState& state) {
  char buf[96];
  if (state.is_pure()) {
    out << "index,re,im\n";
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(i), state.ket()(i).real(),
                    state.ket()(i).imag());
      out << buf;
    }
    return;
  }
  const Mat rho = state.density();
  out << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(r), static_cast<long>(c),
                    rho(r, c).real(), rho(r, c).imag());
      out << buf;
    }
  }
}

}  // namespace gkp
