#include "qtrap/coupling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtrap/error.hpp"

namespace qtrap {

namespace {

using cdouble = std::complex<double>;

// (i)^p for p >= 0
cdouble i_power(int p) {
  switch (p % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::vector<double> log_q_factorials(int n_max, const DeformationParameter& d) {
  std::vector<double> out(n_max + 1, 0.0);
  for (int n = 2; n <= n_max; ++n) {
    const double qn = q_number(n, d);
    if (!(qn > 0.0)) {
      throw DegenerateDeformation("q-number [" + std::to_string(n) + "]_q is not positive");
    }
    out[n] = out[n - 1] + std::log(qn);
  }
  return out;
}

// Upper-triangle element (m <= n) from precomputed log q-factorials.
cdouble closed_element(int m, int n, double eps, const std::vector<double>& log_qfact,
                       double prefactor) {
  if (eps == 0.0) return m == n ? cdouble(1.0) : cdouble(0.0);
  const int gap = n - m;
  const double log_eps = std::log(std::abs(eps));
  // sqrt([m]!/[n]!) * [n]! = sqrt([m]! [n]!)
  const double log_outer = 0.5 * (log_qfact[m] + log_qfact[n]);
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double log_mag = 2.0 * k * log_eps + log_outer - std::lgamma(k + 1.0) -
                           std::lgamma(gap + k + 1.0) - log_qfact[m - k];
    const double term = std::exp(log_mag + gap * log_eps);
    sum += (k % 2 == 0) ? term : -term;
  }
  const double sign = (eps < 0.0 && gap % 2 == 1) ? -1.0 : 1.0;
  return prefactor * sign * sum * i_power(gap);
}

}  // namespace

double prefactor_value(ClosedFormPrefactor prefactor, double eps) {
  const double e2 = eps * eps;
  switch (prefactor) {
    case ClosedFormPrefactor::Printed: return std::exp(-e2);
    case ClosedFormPrefactor::Bch: return std::exp(-0.5 * e2);
    case ClosedFormPrefactor::Commutator: return std::exp(e2);
  }
  throw std::invalid_argument("unknown prefactor");
}

int untrusted_edge(int truncation, double eps) {
  return static_cast<int>(std::ceil(4.0 * std::abs(eps) * std::sqrt(static_cast<double>(truncation))));
}

cdouble f_element_closed(int m, int n, double eps, const DeformationParameter& d,
                         ClosedFormPrefactor prefactor) {
  if (m < 0 || n < 0) {
    throw std::out_of_range("f_element_closed: indices must be >= 0 (got " + std::to_string(m) +
                            ", " + std::to_string(n) + ")");
  }
  if (m > n) std::swap(m, n);
  return closed_element(m, n, eps, log_q_factorials(n, d), prefactor_value(prefactor, eps));
}

CouplingMatrix f_matrix_closed(const FockSpace& space, double eps, ClosedFormPrefactor prefactor) {
  const int dim = space.dimension();
  std::vector<double> log_qfact(dim);
  for (int n = 0; n < dim; ++n) log_qfact[n] = space.log_q_factorial(n);
  const double scale = prefactor_value(prefactor, eps);

  CouplingMatrix f;
  f.eps = eps;
  f.deformation = space.deformation();
  f.mode = CouplingMode::PaperClosedForm;
  f.prefactor = prefactor;
  f.elements.resize(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m <= n; ++m) {
      const cdouble v = closed_element(m, n, eps, log_qfact, scale);
      f.elements(m, n) = v;
      f.elements(n, m) = v;
    }
  }
  return f;
}

CouplingMatrix f_matrix_exact(const FockSpace& space, double eps, int padding) {
  if (padding < 0) throw std::invalid_argument("f_matrix_exact: padding must be >= 0");
  const int dim = space.dimension();
  const int ext = dim + padding;
  const DeformationParameter& d = space.deformation();

  Eigen::MatrixXd position = Eigen::MatrixXd::Zero(ext, ext);
  for (int n = 1; n < ext; ++n) {
    const double qn = q_number(n, d);
    if (!(qn > 0.0)) {
      throw DegenerateDeformation("q-number [" + std::to_string(n) +
                                  "]_q is not positive in the padded coupling space");
    }
    position(n - 1, n) = position(n, n - 1) = std::sqrt(qn);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(position);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("f_matrix_exact: eigendecomposition of the position matrix failed");
  }
  const Eigen::MatrixXcd vecs = solver.eigenvectors().cast<cdouble>();
  const Eigen::VectorXcd phases =
      (cdouble(0.0, eps) * solver.eigenvalues().cast<cdouble>()).array().exp().matrix();

  CouplingMatrix f;
  f.eps = eps;
  f.deformation = d;
  f.mode = CouplingMode::ExactExponential;
  f.padding = padding;
  f.extended = vecs * phases.asDiagonal() * vecs.transpose();
  f.elements = f.extended.topLeftCorner(dim, dim);
  return f;
}

CouplingMatrix coupling_matrix(const FockSpace& space, double eps, CouplingMode mode,
                               ClosedFormPrefactor prefactor, int padding) {
  if (mode == CouplingMode::ExactExponential) return f_matrix_exact(space, eps, padding);
  return f_matrix_closed(space, eps, prefactor);
}

double block_unitarity_residual(const CouplingMatrix& f, int interior_last) {
  const Eigen::MatrixXcd gram = f.elements.adjoint() * f.elements;
  const int k = interior_last + 1;
  return (gram.topLeftCorner(k, k) - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
}

double unitarity_residual(const CouplingMatrix& f, int interior_last) {
  if (f.extended.size() == 0) return block_unitarity_residual(f, interior_last);
  const int k = interior_last + 1;
  const Eigen::MatrixXcd cols = f.extended.leftCols(k);
  return (cols.adjoint() * cols - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
}

}  // namespace qtrap
