#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qtrap/qnum.hpp"

namespace qtrap {

/// Truncated q-Fock space spanned by |0>..|M>.
///
/// Holds the ladder matrices of the q-deformed oscillator,
///   a |n> = sqrt([n]_q) |n-1>,   a+ |n> = sqrt([n+1]_q) |n+1>,
/// restricted to the first M+1 levels. The number operator is diag(0..M); for
/// tau != 0 it differs from a+ a. Immutable once built.
class FockSpace {
 public:
  static constexpr int kMaxTruncation = 512;

  /// Throws std::invalid_argument for M outside [1, 512], RangeError when a
  /// q-factorial up to M overflows, DegenerateDeformation when a q-number
  /// needed under a square root is not positive.
  FockSpace(int truncation, const DeformationParameter& d);

  int truncation() const noexcept { return truncation_; }
  int dimension() const noexcept { return truncation_ + 1; }
  const DeformationParameter& deformation() const noexcept { return table_.deformation(); }

  /// [n]_q for n = 0..M+1.
  double q_number(int n) const { return q_numbers_.at(n); }
  double q_factorial(int n) const { return table_.factorial(n); }
  double log_q_factorial(int n) const { return table_.log_factorial(n); }

  const Eigen::MatrixXd& annihilation() const noexcept { return annihilation_; }
  const Eigen::MatrixXd& creation() const noexcept { return creation_; }
  Eigen::MatrixXd number() const;

 private:
  int truncation_;
  QFactorialTable table_;
  std::vector<double> q_numbers_;
  Eigen::MatrixXd annihilation_;
  Eigen::MatrixXd creation_;
};

FockSpace build_space(int truncation, const DeformationParameter& d);

/// Dimensionless q-position Q = a+ + a and q-momentum P = i(a+ - a).
struct PhaseSpaceOperators {
  Eigen::MatrixXd position;
  Eigen::MatrixXcd momentum;
};

PhaseSpaceOperators position_momentum(const FockSpace& space);

/// Trap level E_n = (1/2)([n+1]_q + [n]_q) in units of the trap quantum.
double trap_energy(int n, const DeformationParameter& d);

/// E_{n+1} - E_n in closed form: cosh(tau(n+1)) (real), cos(tau(n+1)) (imaginary).
double level_spacing(int n, const DeformationParameter& d);

enum class TruncationCheck { Enforce, Skip };

/// q-analog Glauber coherent state in a truncated space, normalized to one.
struct CoherentState {
  std::complex<double> alpha;
  Eigen::VectorXcd coeffs;
  DeformationParameter deformation;
};

/// coeffs_n proportional to alpha^n / sqrt([n]_q!), renormalized numerically.
/// With TruncationCheck::Enforce, |alpha|^2 > M/2 throws TruncationError whose
/// minimum_size() is the smallest adequate M.
CoherentState coherent_state(std::complex<double> alpha, const FockSpace& space,
                             TruncationCheck check = TruncationCheck::Enforce);

/// sum_n n |c_n|^2
double mean_quanta(const CoherentState& state);

/// Unnormalized coefficients alpha^n / sqrt([n]_q!) for n = 0..M, by recursion.
Eigen::VectorXcd coherent_amplitudes(std::complex<double> alpha, const FockSpace& space);

}  // namespace qtrap
