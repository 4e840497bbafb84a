#pragma once

#include <ostream>
#include <vector>

#include "qtrap/coupling.hpp"
#include "qtrap/dynamics.hpp"
#include "qtrap/observables.hpp"

namespace qtrap::csv {

// All writers emit a single header line and fixed-format numbers; the output
// depends only on the arguments.

/// t,w with 9 decimals
void write_inversion(std::ostream& os, const InversionTrace& trace);
/// alpha_r,alpha_i,q row-major over the grid (real index outer)
void write_qfield(std::ostream& os, const QField& field);
/// n,energy,spacing for n = 0..M
void write_spectrum(std::ostream& os, int truncation, const DeformationParameter& d);
/// m,mu for m = 0..M
void write_rabi_table(std::ostream& os, const SimulationConfig& cfg);
/// revival_time,envelope_height
void write_revivals(std::ostream& os, const std::vector<Revival>& revivals);
/// m,n,abs_f over the full (M+1)x(M+1) block
void write_coupling(std::ostream& os, const CouplingMatrix& f);

}  // namespace qtrap::csv
