// Acceptance suite. Prints one PASS/FAIL line per criterion; every tolerance
// is a named constant below. Run with --criterion N for a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "qtrap/coupling.hpp"
#include "qtrap/dynamics.hpp"
#include "qtrap/fock.hpp"
#include "qtrap/observables.hpp"
#include "qtrap/scenario.hpp"

namespace {

using namespace qtrap;
namespace fs = std::filesystem;

// Tolerances and fixed inputs.
constexpr double kRegressionTol = 1e-8;      // 1: amplitude vs undeformed reference
constexpr double kNormDriftTol = 1e-9;       // 2
constexpr double kEnergyDriftTol = 1e-9;     // 2 (absolute, scaled-energy units)
constexpr double kRkTol = 1e-10;             // 3: integrator local tolerance
constexpr double kRkAgreementTol = 1e-6;     // 3
constexpr double kRkTime = 50.0;             // 3
constexpr double kLaguerreTol = 1e-8;        // 4
constexpr double kUnitarityTol = 1e-8;       // 4
constexpr double kFirstOrderFactor = 2.0;    // 5: bound is factor * eps^3
constexpr double kSpectrumTol = 1e-10;       // 6
constexpr double kSpacingTol = 1e-12;        // 6
constexpr double kCalibratedEps = 0.055;     // 7, 8
constexpr double kRevivalLow = 140.0;        // 7
constexpr double kRevivalHigh = 180.0;       // 7
constexpr double kVarianceRatio = 0.10;      // 7
constexpr double kVacuumTol = 1e-6;          // 8
constexpr double kIntegralTol = 0.02;        // 8
constexpr double kPeakPositionTol = 0.15;    // 8
constexpr double kIntermediateTime = 30.0;   // 8

const std::vector<double> kSweepTaus{0.0, 0.002, 0.003, 0.004, 0.006, 0.01, 0.1};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

SimulationConfig defaults_at(double tau) {
  SimulationConfig cfg;
  cfg.deformation = DeformationParameter::real(tau);
  return cfg;
}

SimulationConfig calibrated_at(double tau) {
  SimulationConfig cfg = defaults_at(tau);
  cfg.eps = kCalibratedEps;
  return cfg;
}

bool report(int n, bool ok, const std::string& summary) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << summary << std::endl;
  return ok;
}

void note(const std::string& line) { std::cout << "  " << line << "\n"; }

// 1. Undeformed limit against an independent implementation.
bool criterion1() {
  double worst = 0.0;
  for (double eps : {0.2, kCalibratedEps}) {
    SimulationConfig cfg = defaults_at(0.0);
    cfg.eps = eps;
    const auto states = propagate(build_hamiltonian(cfg), initial_state(cfg), cfg.time_grid());
    const oracle::UndeformedReference ref(cfg.truncation, cfg.omega_bar, cfg.delta_bar, cfg.eps,
                                          cfg.alpha.real());
    const double dt = cfg.t_max / (cfg.n_samples - 1);
    const auto expected = ref.trajectory(dt, cfg.n_samples - 1);
    double dev = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      dev = std::max(dev, (states[k].stacked() - expected[k]).cwiseAbs().maxCoeff());
    }
    note(fmt::format("eps={}: max |d amplitude| over [0, {}] = {:.3e}", eps, cfg.t_max, dev));
    worst = std::max(worst, dev);
  }
  return report(1, worst < kRegressionTol,
                fmt::format("tau=0 pipeline vs undeformed reference, max dev {:.3e} < {:.0e}",
                            worst, kRegressionTol));
}

// 2. Norm and energy conservation.
bool criterion2() {
  double worst_norm = 0.0;
  double worst_energy = 0.0;
  for (double tau : kSweepTaus) {
    const SimulationConfig cfg = defaults_at(tau);
    const Propagator p = build_hamiltonian(cfg);
    const AtomFieldState s0 = initial_state(cfg);
    const double n0 = s0.norm();
    const double e0 = p.energy(s0);
    double dn = 0.0;
    double de = 0.0;
    for (const auto& s : propagate(p, s0, cfg.time_grid())) {
      dn = std::max(dn, std::abs(s.norm() - n0));
      de = std::max(de, std::abs(p.energy(s) - e0));
    }
    note(fmt::format("tau={:<6} norm drift {:.3e}  energy drift {:.3e} (E0 = {:.6f})", tau, dn, de,
                     e0));
    worst_norm = std::max(worst_norm, dn);
    worst_energy = std::max(worst_energy, de);
  }
  return report(2, worst_norm < kNormDriftTol && worst_energy < kEnergyDriftTol,
                fmt::format("norm drift {:.3e} < {:.0e}, energy drift {:.3e} < {:.0e}", worst_norm,
                            kNormDriftTol, worst_energy, kEnergyDriftTol));
}

// 3. Spectral propagation against adaptive Runge-Kutta.
bool criterion3() {
  double worst = 0.0;
  for (double tau : {0.0, 0.003, 0.01}) {
    const SimulationConfig cfg = defaults_at(tau);
    const Propagator p = build_hamiltonian(cfg);
    const AtomFieldState s0 = initial_state(cfg);
    const auto start = std::chrono::steady_clock::now();
    const RkResult rk = rk_propagate(p, s0, kRkTime, kRkTol);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Eigen::VectorXcd spectral = p.evolve(s0.stacked(), kRkTime);
    const double dev = (rk.state.stacked() - spectral).cwiseAbs().maxCoeff();
    note(fmt::format("tau={:<6} max dev {:.3e}  steps {} (rejected {})  norm drift {:.2e}  {:.1f}s",
                     tau, dev, rk.steps, rk.rejected, rk.norm_drift, secs));
    worst = std::max(worst, dev);
  }
  return report(3, worst < kRkAgreementTol,
                fmt::format("RK (tol {:.0e}) vs spectral at t={}: {:.3e} < {:.0e}", kRkTol, kRkTime,
                            worst, kRkAgreementTol));
}

// 4. Coupling operator against the Laguerre formula, and unitarity.
bool criterion4() {
  const int M = SimulationConfig{}.truncation;
  double laguerre = 0.0;
  for (double eps : {0.1, 0.2, 0.5}) {
    const auto f = f_matrix_exact(FockSpace(M, DeformationParameter{}), eps);
    const int last = M - untrusted_edge(M, eps);
    const double dev = max_abs(
        (f.elements - oracle::laguerre_matrix(M, eps)).topLeftCorner(last + 1, last + 1));
    note(fmt::format("eps={}: Laguerre dev on interior 0..{} = {:.3e}", eps, last, dev));
    laguerre = std::max(laguerre, dev);
  }
  double unitarity = 0.0;
  for (double eps : {0.1, 0.2, 0.5}) {
    const int last = M - untrusted_edge(M, eps);
    for (double tau : kSweepTaus) {
      const auto f = f_matrix_exact(FockSpace(M, DeformationParameter::real(tau)), eps);
      const double r = unitarity_residual(f, last);
      note(fmt::format("eps={} tau={:<6} |F+F - I| interior {:.3e}  (cut block only: {:.3e})", eps,
                       tau, r, block_unitarity_residual(f, last)));
      unitarity = std::max(unitarity, r);
    }
  }
  // Which closed-form prefactor reproduces the exact exponential when undeformed.
  const int last = M - untrusted_edge(M, 0.2);
  const FockSpace flat(M, DeformationParameter{});
  const auto exact = f_matrix_exact(flat, 0.2);
  for (auto [pf, name] : {std::pair{ClosedFormPrefactor::Printed, "printed e^-eps^2"},
                          std::pair{ClosedFormPrefactor::Bch, "bch e^-eps^2/2"},
                          std::pair{ClosedFormPrefactor::Commutator, "commutator e^+eps^2"}}) {
    const auto closed = f_matrix_closed(flat, 0.2, pf);
    note(fmt::format("closed form, prefactor {:<20}: max dev from exact at tau=0, eps=0.2: {:.3e}",
                     name, max_abs((closed.elements - exact.elements)
                                       .topLeftCorner(last + 1, last + 1))));
  }
  return report(4, laguerre < kLaguerreTol && unitarity < kUnitarityTol,
                fmt::format("Laguerre dev {:.3e} < {:.0e}, unitarity residual {:.3e} < {:.0e}",
                            laguerre, kLaguerreTol, unitarity, kUnitarityTol));
}

// 5. First-order element law |<m|F|m+1> - i eps sqrt([m+1]_q)| < 2 eps^3.
bool criterion5() {
  const int M = SimulationConfig{}.truncation;
  double worst_ratio = 0.0;
  std::string worst_at;
  for (double eps : {0.01, 0.05, 0.1}) {
    for (double tau : {0.0, 0.003, 0.01}) {
      const auto d = DeformationParameter::real(tau);
      const auto f = f_matrix_exact(FockSpace(M, d), eps);
      double row_worst = 0.0;
      int row_m = 0;
      for (int m = 0; m <= 30; ++m) {
        const std::complex<double> first(0.0, eps * std::sqrt(q_number(m + 1, d)));
        const double ratio = std::abs(f.elements(m, m + 1) - first) / std::pow(eps, 3);
        if (ratio > row_worst) {
          row_worst = ratio;
          row_m = m;
        }
      }
      note(fmt::format("eps={} tau={:<6} max |dev|/eps^3 = {:.2f} at m={}", eps, tau, row_worst,
                       row_m));
      if (row_worst > worst_ratio) {
        worst_ratio = row_worst;
        worst_at = fmt::format("eps={} tau={} m={}", eps, tau, row_m);
      }
    }
  }
  note("The element is i eps sqrt([m+1]) (1 - eps^2 (m+1)/2 + ...) at tau=0, so the");
  note("third-order remainder grows like (m+1)^{3/2} eps^3 and exceeds 2 eps^3 beyond m ~ 1.");
  return report(5, worst_ratio < kFirstOrderFactor,
                fmt::format("max |dev|/eps^3 = {:.2f} ({}) vs bound {}", worst_ratio, worst_at,
                            kFirstOrderFactor));
}

// 6. Spectrum and level spacing.
bool criterion6() {
  const int M = SimulationConfig{}.truncation;
  double spectrum = 0.0;
  double spacing = 0.0;
  for (double tau : kSweepTaus) {
    const auto d = DeformationParameter::real(tau);
    const FockSpace space(M, d);
    const Eigen::MatrixXd h =
        0.5 * (space.annihilation() * space.creation() + space.creation() * space.annihilation());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    for (int n = 0; n < M; ++n) {
      const double e = trap_energy(n, d);
      spectrum = std::max(spectrum, (ev.array() - e).abs().minCoeff());
      spacing = std::max(spacing, std::abs(level_spacing(n, d) - std::cosh(tau * (n + 1))));
      spacing = std::max(spacing, std::abs(trap_energy(n + 1, d) - e - std::cosh(tau * (n + 1))));
    }
  }
  note("spacing E_{n+1} - E_n = cosh(tau (n+1)); its second-order expansion is");
  note("1 + tau^2 (n+1)^2 / 2, while the quoted approximation 1 + tau^2 (n+1)^2 is twice as large:");
  for (double tau : {0.003, 0.01, 0.1}) {
    for (int n : {0, 15, 31}) {
      const double x = tau * (n + 1);
      note(fmt::format("  tau={:<6} n={:<3} exact {:.12f}  expansion {:.12f}  quoted {:.12f}", tau, n,
                       std::cosh(x), 1.0 + 0.5 * x * x, 1.0 + x * x));
    }
  }
  return report(6, spectrum < kSpectrumTol && spacing < kSpacingTol,
                fmt::format("spectrum dev {:.3e} < {:.0e}, spacing dev {:.3e} < {:.0e}", spectrum,
                            kSpectrumTol, spacing, kSpacingTol));
}

InversionTrace calibrated_trace(double tau) {
  const SimulationConfig cfg = calibrated_at(tau);
  return inversion_trace(
      propagate(build_hamiltonian(cfg), initial_state(cfg), cfg.time_grid()));
}

double variance_after(const InversionTrace& trace, double t_from) {
  double sum = 0.0;
  double sum2 = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < trace.w.size(); ++k) {
    if (trace.times[k] < t_from) continue;
    sum += trace.w[k];
    sum2 += trace.w[k] * trace.w[k];
    ++n;
  }
  const double mean = sum / n;
  return sum2 / n - mean * mean;
}

// 7. Revival trend.
bool criterion7() {
  std::vector<double> first;
  for (double tau : {0.0, 0.002, 0.003, 0.004}) {
    const auto revivals = detect_revivals(calibrated_trace(tau));
    const double t = revivals.empty() ? NAN : revivals.front().time;
    note(fmt::format("eps={} tau={:<6} first revival at t = {:.2f} ({} detected)", kCalibratedEps,
                     tau, t, revivals.size()));
    first.push_back(t);
  }
  bool ok = first[0] >= kRevivalLow && first[0] <= kRevivalHigh;
  for (std::size_t i = 1; i < first.size(); ++i) ok = ok && first[i] < first[i - 1];
  const double v0 = variance_after(calibrated_trace(0.0), 5.0);
  const double v1 = variance_after(calibrated_trace(0.1), 5.0);
  note(fmt::format("variance of W on [5, 200]: tau=0 {:.4e}, tau=0.1 {:.4e}, ratio {:.3e}", v0, v1,
                   v1 / v0));
  ok = ok && v1 < kVarianceRatio * v0;
  return report(7, ok,
                fmt::format("tau=0 revival {:.2f} in [{}, {}], strictly decreasing in tau, "
                            "variance ratio {:.3e} < {}",
                            first[0], kRevivalLow, kRevivalHigh, v1 / v0, kVarianceRatio));
}

QField field_at(double tau, double t, const GridSpec& grid) {
  const SimulationConfig cfg = calibrated_at(tau);
  const FockSpace space(cfg.truncation, cfg.deformation);
  const Propagator p = build_hamiltonian(cfg);
  const std::vector<double> times{t};
  const auto states = propagate(p, initial_state(cfg), times);
  return q_function(reduced_density(states.front()), grid, space);
}

// 8. Q-function suite.
bool criterion8() {
  const GridSpec grid{{-8.0, 8.0, 0.1}, {-8.0, 8.0, 0.1}};
  bool ok = true;

  const int M = SimulationConfig{}.truncation;
  Eigen::MatrixXcd vacuum = Eigen::MatrixXcd::Zero(M + 1, M + 1);
  vacuum(0, 0) = 1.0;
  const QField qv = q_function(vacuum, grid, FockSpace(M, DeformationParameter{}));
  double vac_dev = 0.0;
  for (int i = 0; i < grid.real.points(); ++i) {
    for (int j = 0; j < grid.imag.points(); ++j) {
      const double r2 = std::norm(std::complex<double>(grid.real.at(i), grid.imag.at(j)));
      vac_dev = std::max(vac_dev, std::abs(qv.values(i, j) - std::exp(-r2) / M_PI));
    }
  }
  note(fmt::format("vacuum Q max pointwise dev {:.3e}", vac_dev));
  ok = ok && vac_dev < kVacuumTol;

  double worst_integral = 0.0;
  for (double tau : {0.0, 0.003}) {
    for (double t : {0.0, kIntermediateTime}) {
      const double integral = grid_integral(field_at(tau, t, grid));
      note(fmt::format("tau={:<6} t={:<4} grid integral {:.5f}", tau, t, integral));
      worst_integral = std::max(worst_integral, std::abs(integral - 1.0));
    }
  }
  ok = ok && worst_integral <= kIntegralTol;

  const auto initial = find_peaks(field_at(0.0, 0.0, grid));
  const bool one_peak = initial.size() == 1 && std::abs(initial[0].alpha_r - 4.0) < kPeakPositionTol &&
                        std::abs(initial[0].alpha_i) < kPeakPositionTol;
  note(fmt::format("t=0: {} peak(s), strongest at ({:.2f}, {:.2f})", initial.size(),
                   initial.empty() ? NAN : initial[0].alpha_r,
                   initial.empty() ? NAN : initial[0].alpha_i));
  ok = ok && one_peak;

  const QField flat_mid = field_at(0.0, kIntermediateTime, grid);
  const auto split = find_peaks(flat_mid);
  std::string where;
  for (const auto& p : split) where += fmt::format(" ({:.2f}, {:.2f})", p.alpha_r, p.alpha_i);
  note(fmt::format("tau=0 t={}: {} peaks at{}", kIntermediateTime, split.size(), where));
  ok = ok && split.size() == 2;

  const double a0 = asymmetry(flat_mid);
  const double a3 = asymmetry(field_at(0.003, kIntermediateTime, grid));
  note(fmt::format("asymmetry at t={}: tau=0 {:.4f}, tau=0.003 {:.4f}", kIntermediateTime, a0, a3));
  ok = ok && a0 < a3;

  // Reported only; the published counts depend on the unrecoverable eps.
  const struct {
    double tau;
    double t;
    int published;
  } reported[] = {{0.003, 30.0, 5}, {0.003, 15.0, 8}, {0.004, 10.0, 7}};
  for (const auto& r : reported) {
    note(fmt::format("(not gated) tau={} t={}: {} peaks, published {}", r.tau, r.t,
                     count_peaks(field_at(r.tau, r.t, grid)), r.published));
  }
  return report(8, ok,
                fmt::format("vacuum dev {:.1e}, integral dev {:.4f}, 1 peak at t=0, {} peaks at "
                            "t={}, asymmetry {:.3f} < {:.3f}",
                            vac_dev, worst_integral, split.size(), kIntermediateTime, a0, a3));
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[entry.path().filename().string()] = s.str();
  }
  return out;
}

// 9. Determinism of preset outputs.
bool criterion9() {
  const fs::path root = fs::temp_directory_path() / "qtrap_acceptance_determinism";
  bool ok = true;
  std::size_t compared = 0;
  for (const auto& preset : preset_names()) {
    const std::string name = fs::path(preset).stem().string();
    std::map<std::string, std::string> runs[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path dir = root / fmt::format("{}_{}", name, r);
      fs::remove_all(dir);
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run({"run", name, "--out", dir.string(), "--threads", r == 0 ? "1" : "2"},
                                out, err);
      if (code != 0) {
        note(fmt::format("{}: run {} exited {}: {}", name, r, code, err.str()));
        ok = false;
      }
      runs[r] = csv_files(dir);
    }
    bool same = runs[0] == runs[1] && !runs[0].empty();
    note(fmt::format("{}: {} CSV files, {}", name, runs[0].size(),
                     same ? "byte-identical" : "DIFFER"));
    ok = ok && same;
    compared += runs[0].size();
  }
  fs::remove_all(root);
  return report(9, ok, fmt::format("{} preset CSVs byte-identical across repeated runs", compared));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3,
                                                    criterion4, criterion5, criterion6,
                                                    criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (int n = 1; n <= 9; ++n) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > 9) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    try {
      all = criteria[n - 1]() && all;
    } catch (const std::exception& e) {
      all = report(n, false, fmt::format("exception: {}", e.what())) && all;
    }
  }
  return all ? 0 : 1;
}
