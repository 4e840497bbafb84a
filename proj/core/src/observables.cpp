#include "qtrap/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qtrap {

namespace {

using cdouble = std::complex<double>;

}  // namespace

double inversion(const AtomFieldState& s) {
  return s.excited.squaredNorm() - s.ground.squaredNorm();
}

InversionTrace inversion_trace(const std::vector<AtomFieldState>& states) {
  InversionTrace trace;
  trace.times.reserve(states.size());
  trace.w.reserve(states.size());
  for (const auto& s : states) {
    trace.times.push_back(s.t);
    trace.w.push_back(inversion(s));
  }
  return trace;
}

Eigen::MatrixXcd reduced_density(const AtomFieldState& s) {
  return s.ground * s.ground.adjoint() + s.excited * s.excited.adjoint();
}

int GridAxis::points() const {
  if (!(step > 0.0) || !(max >= min)) throw std::invalid_argument("grid axis needs step > 0 and max >= min");
  return static_cast<int>(std::lround((max - min) / step)) + 1;
}

QField q_function(const Eigen::MatrixXcd& rho, const GridSpec& grid, const FockSpace& space,
                  ProbeKind probe) {
  if (rho.rows() != space.dimension() || rho.cols() != space.dimension()) {
    throw std::invalid_argument("q_function: density matrix does not match the Fock space");
  }
  const DeformationParameter probe_d =
      probe == ProbeKind::Deformed ? space.deformation() : DeformationParameter{};
  const FockSpace probe_space =
      probe == ProbeKind::Deformed ? space : FockSpace(space.truncation(), probe_d);

  const int nr = grid.real.points();
  const int ni = grid.imag.points();
  QField field{grid, Eigen::MatrixXd(nr, ni), space.deformation(), 0.0};
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ni; ++j) {
      const cdouble alpha(grid.real.at(i), grid.imag.at(j));
      Eigen::VectorXcd c = coherent_amplitudes(alpha, probe_space);
      c *= std::exp(-0.5 * log_q_exponential(std::norm(alpha), probe_d));
      field.max_tail_weight = std::max(field.max_tail_weight, 1.0 - c.squaredNorm());
      const double q = c.dot(rho * c).real() / std::numbers::pi;
      field.values(i, j) = std::max(q, 0.0);
    }
  }
  return field;
}

double grid_integral(const QField& field) {
  return field.values.sum() * field.grid.real.step * field.grid.imag.step;
}

std::vector<double> inversion_envelope(const InversionTrace& trace, double window) {
  const std::size_t n = trace.w.size();
  if (trace.times.size() != n || n < 2) throw std::invalid_argument("inversion trace is malformed");
  const double dt = (trace.times.back() - trace.times.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(trace.times[i] - trace.times[i - 1] - dt) > 1e-6 * dt) {
      throw std::invalid_argument("inversion trace must be uniformly sampled");
    }
  }
  const auto half = static_cast<std::ptrdiff_t>(std::lround(0.5 * window / dt));

  std::vector<double> sum(n + 1, 0.0), sum_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i + 1] = sum[i] + trace.w[i];
    sum_sq[i + 1] = sum_sq[i] + trace.w[i] * trace.w[i];
  }
  std::vector<double> env(n);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min(last, i + half);
    const double count = static_cast<double>(hi - lo + 1);
    const double mean = (sum[hi + 1] - sum[lo]) / count;
    const double var = (sum_sq[hi + 1] - sum_sq[lo]) / count - mean * mean;
    env[i] = std::sqrt(std::max(var, 0.0));
  }
  return env;
}

std::vector<Revival> detect_revivals(const InversionTrace& trace, const RevivalOptions& opts) {
  if (!(opts.window > 0.0)) throw std::invalid_argument("revival window must be > 0");
  const std::size_t n = trace.w.size();
  if (n < 2) throw std::invalid_argument("inversion trace shorter than two windows");
  const double span = trace.times.back() - trace.times.front();
  if (span < 2.0 * opts.window) throw std::invalid_argument("inversion trace shorter than two windows");
  const double dt = span / static_cast<double>(n - 1);
  if (opts.window / dt < 8.0) {
    throw std::invalid_argument("inversion trace needs at least 8 samples per revival window");
  }

  const std::vector<double> env = inversion_envelope(trace, opts.window);
  const auto reach = static_cast<std::ptrdiff_t>(std::lround(opts.window / dt));
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;

  std::vector<Revival> revivals;
  double floor = std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    floor = std::min(floor, env[i]);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - reach);
    const std::ptrdiff_t hi = std::min(last, i + reach);
    bool is_max = true;
    for (std::ptrdiff_t k = lo; k <= hi && is_max; ++k) {
      if (k < i ? env[k] >= env[i] : env[k] > env[i]) is_max = false;
    }
    if (is_max && env[i] > opts.floor_ratio * floor && env[i] > opts.min_height) {
      revivals.push_back({trace.times[i], env[i]});
      floor = std::numeric_limits<double>::infinity();
    }
  }
  return revivals;
}

std::vector<Peak> find_peaks(const QField& field, double rel_threshold, int merge_radius) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw std::invalid_argument("rel_threshold must lie in (0, 1)");
  }
  const Eigen::MatrixXd& q = field.values;
  const Eigen::Index nr = q.rows();
  const Eigen::Index ni = q.cols();
  if (q.size() == 0) return {};
  const double cut = rel_threshold * q.maxCoeff();

  struct Candidate {
    double value;
    Eigen::Index i, j;
  };
  std::vector<Candidate> candidates;
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      const double v = q(i, j);
      if (!(v > cut)) continue;
      bool strict = true;
      for (Eigen::Index di = -1; di <= 1 && strict; ++di) {
        for (Eigen::Index dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const Eigen::Index a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= nr || b >= ni) continue;
          if (q(a, b) >= v) {
            strict = false;
            break;
          }
        }
      }
      if (strict) candidates.push_back({v, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    const bool near = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return std::max(std::abs(k.i - c.i), std::abs(k.j - c.j)) <= merge_radius;
    });
    if (!near) kept.push_back(c);
  }

  std::vector<Peak> peaks;
  peaks.reserve(kept.size());
  for (const auto& k : kept) {
    peaks.push_back({field.grid.real.at(static_cast<int>(k.i)),
                     field.grid.imag.at(static_cast<int>(k.j)), k.value});
  }
  return peaks;
}

int count_peaks(const QField& field, double rel_threshold) {
  return static_cast<int>(find_peaks(field, rel_threshold).size());
}

double asymmetry(const QField& field) {
  const GridAxis& ax = field.grid.imag;
  const int ni = ax.points();
  if (std::abs(ax.min + ax.at(ni - 1)) > 1e-9 * std::max(1.0, ax.step)) {
    throw std::invalid_argument("asymmetry needs an imaginary axis symmetric about zero");
  }
  const Eigen::MatrixXd& q = field.values;
  const double total = q.cwiseAbs().sum();
  if (total == 0.0) return 0.0;
  const Eigen::MatrixXd mirrored = q.rowwise().reverse();
  return (q - mirrored).cwiseAbs().sum() / total;
}

}  // namespace qtrap
