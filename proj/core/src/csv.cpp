#include "qtrap/csv.hpp"

#include <fmt/format.h>

namespace qtrap::csv {

namespace {

// Fixed-point with 9 decimals, never "-0.000000000".
std::string fixed9(double v) {
  std::string s = fmt::format("{:.9f}", v);
  if (s == "-0.000000000") s.erase(0, 1);
  return s;
}

std::string sci9(double v) { return fmt::format("{:.9e}", v == 0.0 ? 0.0 : v); }

}  // namespace

void write_inversion(std::ostream& os, const InversionTrace& trace) {
  os << "t,w\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    os << fixed9(trace.times[i]) << ',' << fixed9(trace.w[i]) << '\n';
  }
}

void write_qfield(std::ostream& os, const QField& field) {
  os << "alpha_r,alpha_i,q\n";
  for (Eigen::Index i = 0; i < field.values.rows(); ++i) {
    const std::string ar = fixed9(field.grid.real.at(static_cast<int>(i)));
    for (Eigen::Index j = 0; j < field.values.cols(); ++j) {
      os << ar << ',' << fixed9(field.grid.imag.at(static_cast<int>(j))) << ','
         << sci9(field.values(i, j)) << '\n';
    }
  }
}

void write_spectrum(std::ostream& os, int truncation, const DeformationParameter& d) {
  os << "n,energy,spacing\n";
  for (int n = 0; n <= truncation; ++n) {
    os << n << ',' << fixed9(trap_energy(n, d)) << ',' << fixed9(level_spacing(n, d)) << '\n';
  }
}

void write_rabi_table(std::ostream& os, const SimulationConfig& cfg) {
  os << "m,mu\n";
  for (int m = 0; m <= cfg.truncation; ++m) os << m << ',' << fixed9(effective_rabi(m, cfg)) << '\n';
}

void write_revivals(std::ostream& os, const std::vector<Revival>& revivals) {
  os << "revival_time,envelope_height\n";
  for (const auto& r : revivals) os << fixed9(r.time) << ',' << fixed9(r.envelope_height) << '\n';
}

void write_coupling(std::ostream& os, const CouplingMatrix& f) {
  os << "m,n,abs_f\n";
  for (Eigen::Index m = 0; m < f.elements.rows(); ++m) {
    for (Eigen::Index n = 0; n < f.elements.cols(); ++n) {
      os << m << ',' << n << ',' << sci9(std::abs(f.elements(m, n))) << '\n';
    }
  }
}

}  // namespace qtrap::csv
