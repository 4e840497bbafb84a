#include "qtrap/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "qtrap/error.hpp"

namespace qtrap {

namespace {

using cdouble = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void SimulationConfig::validate() const {
  require(deformation.magnitude >= 0.0, "deformation magnitude must be >= 0");
  require(std::isfinite(omega_bar) && omega_bar > 0.0, "omega_bar must be > 0");
  require(std::isfinite(delta_bar), "delta_bar must be finite");
  require(std::isfinite(eps) && eps >= 0.0, "eps must be >= 0");
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), "alpha must be finite");
  require(truncation >= 1 && truncation <= FockSpace::kMaxTruncation,
          "truncation must lie in [1, " + std::to_string(FockSpace::kMaxTruncation) + "]");
  require(std::isfinite(t_max) && t_max > 0.0, "t_max must be > 0");
  require(n_samples >= 2, "n_samples must be >= 2");
  require(coupling_padding >= 0, "coupling_padding must be >= 0");
}

std::vector<double> SimulationConfig::time_grid() const {
  std::vector<double> times(n_samples);
  const double dt = t_max / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) times[i] = i * dt;
  times.back() = t_max;
  return times;
}

double AtomFieldState::norm() const {
  return std::sqrt(ground.squaredNorm() + excited.squaredNorm());
}

Eigen::VectorXcd AtomFieldState::stacked() const {
  Eigen::VectorXcd v(ground.size() + excited.size());
  v << ground, excited;
  return v;
}

AtomFieldState AtomFieldState::from_stacked(const Eigen::VectorXcd& v, double t) {
  const Eigen::Index half = v.size() / 2;
  return {v.head(half), v.tail(half), t};
}

Propagator::Propagator(Eigen::MatrixXcd hamiltonian) : hamiltonian_(std::move(hamiltonian)) {
  if (hamiltonian_.rows() != hamiltonian_.cols() || hamiltonian_.rows() % 2 != 0) {
    throw NumericalError("Hamiltonian must be square with even dimension");
  }
  const double residual = (hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff();
  if (residual >= 1e-10) {
    throw NumericalError("Hamiltonian is not Hermitian (residual " + std::to_string(residual) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian_);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hamiltonian eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& stacked, double t) const {
  if (t == 0.0) return stacked;
  const Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * stacked;
  const Eigen::VectorXcd phases =
      (cdouble(0.0, -kTwoPi * t) * eigenvalues_.cast<cdouble>()).array().exp().matrix();
  return eigenvectors_ * phases.cwiseProduct(coeffs);
}

double Propagator::energy(const AtomFieldState& s) const {
  const Eigen::VectorXcd v = s.stacked();
  return v.dot(hamiltonian_ * v).real();
}

Propagator build_hamiltonian(const SimulationConfig& cfg, const FockSpace& space,
                             const CouplingMatrix& coupling) {
  const int dim = space.dimension();
  if (coupling.elements.rows() != dim) {
    throw std::invalid_argument("coupling matrix does not match the Fock space dimension");
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
  for (int m = 0; m < dim; ++m) {
    const double trap = cfg.omega_bar * (space.q_number(m + 1) + space.q_number(m));
    h(m, m) = 0.5 * (trap - cfg.delta_bar);
    h(dim + m, dim + m) = 0.5 * (trap + cfg.delta_bar);
  }
  h.bottomLeftCorner(dim, dim) = 0.5 * coupling.elements;
  h.topRightCorner(dim, dim) = 0.5 * coupling.elements.adjoint();
  return Propagator(std::move(h));
}

Propagator build_hamiltonian(const SimulationConfig& cfg) {
  cfg.validate();
  const FockSpace space(cfg.truncation, cfg.deformation);
  const CouplingMatrix f =
      coupling_matrix(space, cfg.eps, cfg.coupling_mode, cfg.prefactor, cfg.coupling_padding);
  return build_hamiltonian(cfg, space, f);
}

AtomFieldState initial_state(const SimulationConfig& cfg) {
  cfg.validate();
  const FockSpace space(cfg.truncation, cfg.deformation);
  const CoherentState trap = coherent_state(cfg.alpha, space);
  return {trap.coeffs, Eigen::VectorXcd::Zero(space.dimension()), 0.0};
}

std::vector<AtomFieldState> propagate(const Propagator& p, const AtomFieldState& s0,
                                      std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("propagate: times must be ascending and >= 0");
    }
  }
  const Eigen::VectorXcd v0 = s0.stacked();
  const Eigen::VectorXcd coeffs = p.eigenvectors().adjoint() * v0;
  const Eigen::VectorXcd lambda = p.eigenvalues().cast<cdouble>();

  std::vector<AtomFieldState> out;
  out.reserve(times.size());
  for (const double t : times) {
    if (t == 0.0) {
      out.push_back({s0.ground, s0.excited, 0.0});
      continue;
    }
    const Eigen::VectorXcd phases = (cdouble(0.0, -kTwoPi * t) * lambda).array().exp().matrix();
    out.push_back(AtomFieldState::from_stacked(p.eigenvectors() * phases.cwiseProduct(coeffs), t));
  }
  return out;
}

RkResult rk_propagate(const Propagator& p, const AtomFieldState& s0, double t_end, double tol) {
  namespace odeint = boost::numeric::odeint;
  if (!(tol >= 1e-12 && tol <= 1e-6)) {
    throw std::invalid_argument("rk_propagate: tol must lie in [1e-12, 1e-6]");
  }
  if (t_end < s0.t) throw std::invalid_argument("rk_propagate: t_end precedes the initial time");

  // Interaction picture with respect to diag(H): phi = exp(i D 2 pi t) s, so
  // dphi/dt = -i 2 pi exp(i D 2 pi t) W exp(-i D 2 pi t) phi with W = H - D.
  const Eigen::VectorXd diag = p.hamiltonian().diagonal().real();
  Eigen::MatrixXcd offdiag = p.hamiltonian();
  offdiag.diagonal().setZero();
  const Eigen::Index dim = diag.size();

  using state_type = std::vector<double>;
  auto rotation = [&](double t, double sign) {
    return (cdouble(0.0, sign * kTwoPi * t) * diag.cast<cdouble>()).array().exp().matrix().eval();
  };
  auto pack = [dim](const Eigen::VectorXcd& v, state_type& x) {
    x.resize(2 * dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      x[2 * j] = v[j].real();
      x[2 * j + 1] = v[j].imag();
    }
  };
  auto unpack = [dim](const state_type& x) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) v[j] = cdouble(x[2 * j], x[2 * j + 1]);
    return v;
  };

  auto system = [&](const state_type& x, state_type& dxdt, double t) {
    const Eigen::VectorXcd to_lab = rotation(t, -1.0);
    const Eigen::VectorXcd z = offdiag * to_lab.cwiseProduct(unpack(x));
    const Eigen::VectorXcd rhs = cdouble(0.0, -kTwoPi) * to_lab.conjugate().cwiseProduct(z);
    pack(rhs, dxdt);
  };

  state_type x;
  pack(rotation(s0.t, 1.0).cwiseProduct(s0.stacked()), x);

  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<state_type>());
  double t = s0.t;
  double dt = std::min(1e-4, std::max(t_end - t, 1e-300));
  const double min_dt = 1e-14 * std::max(1.0, std::abs(t_end));
  RkResult result;
  while (t < t_end) {
    if (t + dt > t_end) dt = t_end - t;
    const auto outcome = stepper.try_step(system, x, t, dt);
    if (outcome == odeint::success) {
      ++result.steps;
    } else {
      ++result.rejected;
      if (dt < min_dt) {
        throw NumericalError("rk_propagate: step size underflow at t = " + std::to_string(t));
      }
    }
  }

  const Eigen::VectorXcd lab = rotation(t_end, -1.0).cwiseProduct(unpack(x));
  result.state = AtomFieldState::from_stacked(lab, t_end);
  result.norm_drift = std::abs(result.state.norm() - s0.norm());
  return result;
}

double effective_rabi(int m, const SimulationConfig& cfg) {
  if (m < 0) throw std::invalid_argument("effective_rabi: level must be >= 0");
  const DeformationParameter& d = cfg.deformation;
  const double arg = 2.0 * d.magnitude * (m + 1);
  const double stretch = d.kind == DeformationKind::Real ? std::cosh(arg) : std::cos(arg);
  const double detuning = 0.5 * cfg.omega_bar * (stretch + 1.0) + cfg.delta_bar;
  return std::sqrt(detuning * detuning + cfg.eps * cfg.eps * q_number(m + 1, d));
}

}  // namespace qtrap
