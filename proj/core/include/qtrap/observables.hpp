#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qtrap/dynamics.hpp"
#include "qtrap/fock.hpp"

namespace qtrap {

struct InversionTrace {
  std::vector<double> times;
  std::vector<double> w;
};

/// W = sum |e_m|^2 - sum |g_m|^2
double inversion(const AtomFieldState& s);

InversionTrace inversion_trace(const std::vector<AtomFieldState>& states);

/// Trap density matrix with the atom traced out: rho_mn = g_m g_n* + e_m e_n*.
Eigen::MatrixXcd reduced_density(const AtomFieldState& s);

/// Evenly spaced coordinates min, min + step, ..., max.
struct GridAxis {
  double min = -6.0;
  double max = 6.0;
  double step = 0.1;

  int points() const;
  double at(int i) const { return min + i * step; }
};

/// Rectangular grid in the complex alpha plane.
struct GridSpec {
  GridAxis real;
  GridAxis imag;
};

/// Which coherent state the Q-function projects onto.
enum class ProbeKind { Deformed, Undeformed };

/// Q(alpha) sampled on a grid; values(i, j) belongs to (real.at(i), imag.at(j)).
struct QField {
  GridSpec grid;
  Eigen::MatrixXd values;
  DeformationParameter deformation;
  /// Largest probability weight of a probe state beyond level M over the grid.
  double max_tail_weight = 0.0;
};

/// Q(alpha) = <alpha|rho|alpha>_q / pi with probe coefficients
/// alpha^n / sqrt([n]_q!) scaled by exp_q(|alpha|^2)^{-1/2}.
QField q_function(const Eigen::MatrixXcd& rho, const GridSpec& grid, const FockSpace& space,
                  ProbeKind probe = ProbeKind::Deformed);

/// Riemann sum of Q over the grid cells.
double grid_integral(const QField& field);

struct Revival {
  double time = 0.0;
  double envelope_height = 0.0;
};

struct RevivalOptions {
  double window = 5.0;        ///< envelope window, scaled time units
  double floor_ratio = 1.5;   ///< revival must exceed this multiple of the collapse floor
  double min_height = 0.05;   ///< and this absolute envelope height
};

/// Moving RMS of (w - moving mean) over a centred window of the given width.
/// Requires uniformly sampled times.
std::vector<double> inversion_envelope(const InversionTrace& trace, double window);

/// Envelope maxima (over +/- one window) that exceed floor_ratio times the
/// smallest envelope value since the previous revival or the start of the trace.
/// Throws std::invalid_argument if the trace is shorter than two windows or has
/// fewer than 8 samples per window.
std::vector<Revival> detect_revivals(const InversionTrace& trace, const RevivalOptions& opts = {});

struct Peak {
  double alpha_r = 0.0;
  double alpha_i = 0.0;
  double value = 0.0;
};

/// Strict local maxima over the 8-neighbourhood above rel_threshold * max,
/// strongest first, with weaker maxima within merge_radius grid steps dropped.
std::vector<Peak> find_peaks(const QField& field, double rel_threshold = 0.1, int merge_radius = 3);

int count_peaks(const QField& field, double rel_threshold = 0.1);

/// ||Q(ar, ai) - Q(ar, -ai)||_1 / ||Q||_1, in [0, 2]. The imaginary axis must
/// be symmetric about zero.
double asymmetry(const QField& field);

}  // namespace qtrap
