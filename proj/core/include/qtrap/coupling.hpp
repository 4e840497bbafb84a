#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qtrap/fock.hpp"
#include "qtrap/qnum.hpp"

namespace qtrap {

/// How the light-field coupling F = exp[i eps (a+ + a)] is evaluated.
enum class CouplingMode {
  /// Exponential of the Hermitian position matrix, computed by eigendecomposition.
  ExactExponential,
  /// Elementwise disentangled closed form with q-factorials (q -> 1 commutator).
  PaperClosedForm,
};

/// Overall scalar multiplying the closed-form elements.
enum class ClosedFormPrefactor {
  Printed,     ///< e^{-eps^2}
  Bch,         ///< e^{-eps^2/2}, the undeformed disentangling identity
  Commutator,  ///< e^{-eps^2 [a+, a]} with [a+, a] -> -1, i.e. e^{+eps^2}
};

double prefactor_value(ClosedFormPrefactor prefactor, double eps);

struct CouplingMatrix {
  double eps = 0.0;
  DeformationParameter deformation;
  CouplingMode mode = CouplingMode::ExactExponential;
  ClosedFormPrefactor prefactor = ClosedFormPrefactor::Printed;
  /// <m|F|n> for m, n = 0..M.
  Eigen::MatrixXcd elements;
  /// ExactExponential only: the full exponential over the padded space the
  /// elements were cut from (dimension M+1+padding). Empty otherwise.
  Eigen::MatrixXcd extended;
  int padding = 0;

  int truncation() const { return static_cast<int>(elements.rows()) - 1; }
};

/// Default number of extra levels the exact exponential is computed over.
inline constexpr int kDefaultCouplingPadding = 32;

/// Width ceil(4 eps sqrt(M)) of the band next to level M whose elements are
/// not trusted against the untruncated operator.
int untrusted_edge(int truncation, double eps);

/// Closed-form <m|F|n>. For m <= n:
///   P(eps) (i eps)^{n-m} sqrt([m]_q!/[n]_q!)
///     * sum_k eps^{2k} (-1)^k [n]_q! / (k! (n-m+k)! [m-k]_q!)
/// with ordinary factorials k! and (n-m+k)!. For m > n the value of <n|F|m> is
/// returned (F is complex symmetric). Throws std::out_of_range for negative indices.
std::complex<double> f_element_closed(int m, int n, double eps, const DeformationParameter& d,
                                      ClosedFormPrefactor prefactor = ClosedFormPrefactor::Printed);

/// F = exp(i eps Q) with Q = a+ + a built over M+1+padding q-Fock levels, cut
/// back to (M+1)x(M+1). Throws NumericalError if the eigensolver fails.
CouplingMatrix f_matrix_exact(const FockSpace& space, double eps,
                              int padding = kDefaultCouplingPadding);

CouplingMatrix f_matrix_closed(const FockSpace& space, double eps,
                               ClosedFormPrefactor prefactor = ClosedFormPrefactor::Printed);

CouplingMatrix coupling_matrix(const FockSpace& space, double eps, CouplingMode mode,
                               ClosedFormPrefactor prefactor = ClosedFormPrefactor::Printed,
                               int padding = kDefaultCouplingPadding);

/// max |(F^dagger F - I)_{jk}| over j, k <= interior_last. Uses the padded
/// exponential when available, otherwise the (M+1)x(M+1) elements.
double unitarity_residual(const CouplingMatrix& f, int interior_last);

/// Same residual computed from the (M+1)x(M+1) elements only.
double block_unitarity_residual(const CouplingMatrix& f, int interior_last);

}  // namespace qtrap
