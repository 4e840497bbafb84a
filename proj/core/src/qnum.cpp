#include "qtrap/qnum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qtrap/error.hpp"

namespace qtrap {

namespace {

double checked_sin(double tau) {
  const double s = std::sin(tau);
  if (std::abs(s) < 1e-12) {
    throw DegenerateDeformation("imaginary deformation with sin(tau) = 0 (tau = " +
                                std::to_string(tau) + ")");
  }
  return s;
}

}  // namespace

DeformationParameter DeformationParameter::real(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("deformation magnitude must be >= 0");
  return {tau, DeformationKind::Real};
}

DeformationParameter DeformationParameter::imaginary(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("deformation magnitude must be >= 0");
  return {tau, DeformationKind::Imaginary};
}

double q_number(double x, const DeformationParameter& d) {
  if (d.undeformed()) return x;
  const double tau = d.magnitude;
  if (d.kind == DeformationKind::Real) return std::sinh(tau * x) / std::sinh(tau);
  return std::sin(tau * x) / checked_sin(tau);
}

double q_factorial(int n, const DeformationParameter& d) {
  if (n < 0) throw std::invalid_argument("q_factorial: n must be >= 0");
  double f = 1.0;
  for (int k = 2; k <= n; ++k) {
    f *= q_number(k, d);
    if (!std::isfinite(f)) {
      throw RangeError("q-factorial overflows double range at n = " + std::to_string(k), k);
    }
  }
  return f;
}

double log_q_factorial(int n, const DeformationParameter& d) {
  if (n < 0) throw std::invalid_argument("log_q_factorial: n must be >= 0");
  double s = 0.0;
  for (int k = 2; k <= n; ++k) s += std::log(std::abs(q_number(k, d)));
  return s;
}

QFactorialTable::QFactorialTable(const DeformationParameter& d, int n_max) : deformation_(d) {
  if (n_max < 0) throw std::invalid_argument("QFactorialTable: n_max must be >= 0");
  numbers_.resize(n_max + 1);
  factorials_.resize(n_max + 1);
  log_factorials_.resize(n_max + 1);
  numbers_[0] = 0.0;
  factorials_[0] = 1.0;
  log_factorials_[0] = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    numbers_[n] = q_number(n, d);
    factorials_[n] = n == 1 ? 1.0 : factorials_[n - 1] * numbers_[n];
    if (!std::isfinite(factorials_[n])) {
      throw RangeError("q-factorial overflows double range at n = " + std::to_string(n), n);
    }
    log_factorials_[n] = log_factorials_[n - 1] + (n == 1 ? 0.0 : std::log(std::abs(numbers_[n])));
  }
}

double q_exponential(double x, const DeformationParameter& d, int n_max) {
  if (n_max < 1) throw std::invalid_argument("q_exponential: n_max must be positive");
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    term *= x / q_number(n, d);
    sum += term;
  }
  if (!(std::abs(term) < 1e-15 * std::abs(sum))) {
    throw TruncationError("q_exponential: series not converged within " + std::to_string(n_max) +
                              " terms (last term " + std::to_string(term) + ")",
                          n_max);
  }
  return sum;
}

double log_q_exponential(double x, const DeformationParameter& d) {
  if (x < 0.0) throw std::invalid_argument("log_q_exponential: x must be >= 0");
  if (x == 0.0) return 0.0;
  constexpr int kMaxTerms = 100000;
  // Cutoff at which a term no longer changes the sum in double precision.
  constexpr double kNegligible = 40.0;
  const double log_x = std::log(x);
  double log_term = 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= kMaxTerms; ++n) {
    const double qn = q_number(n, d);
    if (!(qn > 0.0)) {
      throw TruncationError("log_q_exponential: non-positive q-number at n = " + std::to_string(n) +
                                " before convergence",
                            n);
    }
    log_term += log_x - std::log(qn);
    const double hi = std::max(log_sum, log_term);
    log_sum = hi + std::log1p(std::exp(-std::abs(log_sum - log_term)));
    if (qn > x && log_term < log_sum - kNegligible) return log_sum;
  }
  throw TruncationError("log_q_exponential: no convergence within " + std::to_string(kMaxTerms) +
                            " terms",
                        kMaxTerms);
}

}  // namespace qtrap
