#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qtrap/coupling.hpp"
#include "qtrap/fock.hpp"
#include "qtrap/qnum.hpp"

namespace qtrap {

/// Physical and numerical parameters, with hbar = 1 and energies in units of
/// the Rabi frequency. Time is scaled, t = Omega t_phys / 2 pi.
struct SimulationConfig {
  DeformationParameter deformation;
  double omega_bar = 50.0;  ///< trap frequency / Rabi frequency
  double delta_bar = -50.0;  ///< detuning / Rabi frequency
  double eps = 0.2;          ///< Lamb-Dicke-type coupling parameter
  std::complex<double> alpha{4.0, 0.0};
  int truncation = 32;
  double t_max = 200.0;
  int n_samples = 4001;
  CouplingMode coupling_mode = CouplingMode::ExactExponential;
  ClosedFormPrefactor prefactor = ClosedFormPrefactor::Printed;
  int coupling_padding = kDefaultCouplingPadding;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// n_samples points evenly spaced on [0, t_max].
  std::vector<double> time_grid() const;
};

/// Amplitudes g_m (atom in ground state) and e_m (excited) for m = 0..M.
struct AtomFieldState {
  Eigen::VectorXcd ground;
  Eigen::VectorXcd excited;
  double t = 0.0;

  double norm() const;
  /// (g_0..g_M, e_0..e_M)
  Eigen::VectorXcd stacked() const;
  static AtomFieldState from_stacked(const Eigen::VectorXcd& v, double t);
};

/// Time-independent Hamiltonian over the product basis, ground block first,
/// with its eigendecomposition. Immutable.
class Propagator {
 public:
  /// Throws NumericalError if H is not Hermitian to 1e-10 or the eigensolver fails.
  explicit Propagator(Eigen::MatrixXcd hamiltonian);

  const Eigen::MatrixXcd& hamiltonian() const noexcept { return hamiltonian_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const noexcept { return eigenvectors_; }
  int levels() const noexcept { return static_cast<int>(hamiltonian_.rows()) / 2; }

  /// exp(-i H 2 pi t) applied to a stacked state vector.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& stacked, double t) const;

  /// <s|H|s>
  double energy(const AtomFieldState& s) const;

 private:
  Eigen::MatrixXcd hamiltonian_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

/// Assembles
///   H_gg = diag((omega([m+1]_q + [m]_q) - Delta)/2)
///   H_ee = diag((omega([m+1]_q + [m]_q) + Delta)/2)
///   H_eg = F/2,  H_ge = F^dagger/2
Propagator build_hamiltonian(const SimulationConfig& cfg);
Propagator build_hamiltonian(const SimulationConfig& cfg, const FockSpace& space,
                             const CouplingMatrix& coupling);

/// Atom in the ground state, trap in the q-coherent state |alpha>_q.
AtomFieldState initial_state(const SimulationConfig& cfg);

/// States at each requested time (ascending, >= 0) by spectral propagation.
std::vector<AtomFieldState> propagate(const Propagator& p, const AtomFieldState& s0,
                                      std::span<const double> times);

struct RkResult {
  AtomFieldState state;
  double norm_drift = 0.0;  ///< |norm(t_end) - norm(0)|
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince integration of i ds/dt = 2 pi H s from s0.t to
/// t_end with absolute and relative local tolerance tol in [1e-12, 1e-6].
/// Throws NumericalError when the step size underflows.
RkResult rk_propagate(const Propagator& p, const AtomFieldState& s0, double t_end, double tol);

/// mu(m) = sqrt{ [omega (cosh(2 tau (m+1)) + 1)/2 + Delta]^2 + eps^2 [m+1]_q },
/// the lowest-order level-dependent Rabi frequency (units of Omega).
double effective_rabi(int m, const SimulationConfig& cfg);

}  // namespace qtrap
