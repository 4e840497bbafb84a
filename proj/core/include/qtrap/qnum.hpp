#pragma once

#include <vector>

namespace qtrap {

enum class DeformationKind { Real, Imaginary };

/// Deformation q = e^tau (Real) or q = e^{i tau} (Imaginary), tau = magnitude >= 0.
struct DeformationParameter {
  double magnitude = 0.0;
  DeformationKind kind = DeformationKind::Real;

  static DeformationParameter real(double tau);
  static DeformationParameter imaginary(double tau);

  /// Below this magnitude every q-quantity is evaluated by its q -> 1 limit.
  static constexpr double kUndeformedThreshold = 1e-12;

  bool undeformed() const noexcept { return magnitude < kUndeformedThreshold; }

  friend bool operator==(const DeformationParameter&, const DeformationParameter&) = default;
};

/// [x]_q: sinh(tau x)/sinh(tau) for real deformation, sin(tau x)/sin(tau) for
/// imaginary, x when undeformed. Throws DegenerateDeformation when sin(tau) = 0.
double q_number(double x, const DeformationParameter& d);

/// [n]_q! = [1]_q [2]_q ... [n]_q. Throws RangeError naming n on overflow.
double q_factorial(int n, const DeformationParameter& d);

/// Natural log of |[n]_q!|; never overflows for real deformation.
double log_q_factorial(int n, const DeformationParameter& d);

/// Cached q-numbers and q-factorials for levels 0..n_max of one deformation.
class QFactorialTable {
 public:
  static constexpr int kDefaultSize = 64;

  explicit QFactorialTable(const DeformationParameter& d, int n_max = kDefaultSize);

  const DeformationParameter& deformation() const noexcept { return deformation_; }
  int size() const noexcept { return static_cast<int>(numbers_.size()) - 1; }

  double number(int n) const { return numbers_.at(n); }
  double factorial(int n) const { return factorials_.at(n); }
  double log_factorial(int n) const { return log_factorials_.at(n); }

 private:
  DeformationParameter deformation_;
  std::vector<double> numbers_;
  std::vector<double> factorials_;
  std::vector<double> log_factorials_;
};

/// Partial sum of sum_n x^n / [n]_q! for n = 0..n_max. Throws TruncationError
/// when the last term is not below 1e-15 of the partial sum.
double q_exponential(double x, const DeformationParameter& d, int n_max);

/// log of the full q-exponential series for x >= 0, summed in log space until
/// the remaining terms are negligible. Used for coherent-state normalization at
/// amplitudes where the plain series overflows.
double log_q_exponential(double x, const DeformationParameter& d);

}  // namespace qtrap
