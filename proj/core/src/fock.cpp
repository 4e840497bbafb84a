#include "qtrap/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qtrap/error.hpp"

namespace qtrap {

namespace {

int checked_truncation(int truncation) {
  if (truncation < 1 || truncation > FockSpace::kMaxTruncation) {
    throw std::invalid_argument("truncation must lie in [1, " +
                                std::to_string(FockSpace::kMaxTruncation) + "], got " +
                                std::to_string(truncation));
  }
  return truncation;
}

}  // namespace

FockSpace::FockSpace(int truncation, const DeformationParameter& d)
    : truncation_(checked_truncation(truncation)),
      table_(d, truncation),
      annihilation_(Eigen::MatrixXd::Zero(truncation + 1, truncation + 1)) {
  q_numbers_.resize(truncation_ + 2);
  for (int n = 0; n <= truncation_ + 1; ++n) q_numbers_[n] = qtrap::q_number(n, d);
  for (int n = 1; n <= truncation_; ++n) {
    const double qn = q_numbers_[n];
    if (!(qn > 0.0)) {
      throw DegenerateDeformation("q-number [" + std::to_string(n) +
                                  "]_q is not positive; ladder matrix undefined");
    }
    annihilation_(n - 1, n) = std::sqrt(qn);
  }
  creation_ = annihilation_.transpose();
}

Eigen::MatrixXd FockSpace::number() const {
  return Eigen::VectorXd::LinSpaced(dimension(), 0.0, truncation_).asDiagonal();
}

FockSpace build_space(int truncation, const DeformationParameter& d) {
  return FockSpace(truncation, d);
}

PhaseSpaceOperators position_momentum(const FockSpace& space) {
  const auto& a = space.annihilation();
  const auto& adag = space.creation();
  PhaseSpaceOperators ops;
  ops.position = adag + a;
  ops.momentum = std::complex<double>(0.0, 1.0) * (adag - a).cast<std::complex<double>>();
  return ops;
}

double trap_energy(int n, const DeformationParameter& d) {
  if (n < 0) throw std::invalid_argument("trap_energy: level must be >= 0");
  return 0.5 * (q_number(n + 1, d) + q_number(n, d));
}

double level_spacing(int n, const DeformationParameter& d) {
  if (n < 0) throw std::invalid_argument("level_spacing: level must be >= 0");
  if (d.undeformed()) return 1.0;
  const double arg = d.magnitude * (n + 1);
  // ([n+2]_q - [n]_q)/2 reduces to these closed forms.
  return d.kind == DeformationKind::Real ? std::cosh(arg) : std::cos(arg);
}

Eigen::VectorXcd coherent_amplitudes(std::complex<double> alpha, const FockSpace& space) {
  Eigen::VectorXcd c(space.dimension());
  c[0] = 1.0;
  for (int n = 1; n <= space.truncation(); ++n) {
    c[n] = c[n - 1] * alpha / std::sqrt(space.q_number(n));
  }
  return c;
}

CoherentState coherent_state(std::complex<double> alpha, const FockSpace& space,
                             TruncationCheck check) {
  const double intensity = std::norm(alpha);
  if (check == TruncationCheck::Enforce && intensity > 0.5 * space.truncation()) {
    const int minimum = static_cast<int>(std::ceil(2.0 * intensity));
    throw TruncationError("coherent state |alpha|^2 = " + std::to_string(intensity) +
                              " needs truncation M >= " + std::to_string(minimum) + " (have " +
                              std::to_string(space.truncation()) + ")",
                          minimum);
  }
  CoherentState state{alpha, coherent_amplitudes(alpha, space), space.deformation()};
  state.coeffs /= state.coeffs.norm();
  return state;
}

double mean_quanta(const CoherentState& state) {
  double mean = 0.0;
  for (Eigen::Index n = 0; n < state.coeffs.size(); ++n) {
    mean += static_cast<double>(n) * std::norm(state.coeffs[n]);
  }
  return mean;
}

}  // namespace qtrap
