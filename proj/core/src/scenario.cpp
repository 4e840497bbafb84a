#include "qtrap/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "presets_data.hpp"
#include "qtrap/csv.hpp"
#include "qtrap/error.hpp"

namespace qtrap {

namespace {

using json = nlohmann::json;

// Fail-closed key check for one JSON object.
void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

double number(const json& v, std::string_view key) {
  if (!v.is_number()) throw ConfigError("key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, std::string_view key) {
  if (!v.is_number_integer()) throw ConfigError("key '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

std::string string(const json& v, std::string_view key) {
  if (!v.is_string()) throw ConfigError("key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

DeformationParameter parse_tau(const json& v) {
  check_keys(v, "tau", {"magnitude", "kind"});
  if (!v.contains("magnitude")) throw ConfigError("tau entry is missing 'magnitude'");
  const double magnitude = number(v.at("magnitude"), "magnitude");
  if (!(magnitude >= 0.0)) throw ConfigError("tau magnitude must be >= 0");
  const std::string kind = v.contains("kind") ? string(v.at("kind"), "kind") : "real";
  if (kind == "real") return DeformationParameter::real(magnitude);
  if (kind == "imaginary") return DeformationParameter::imaginary(magnitude);
  throw ConfigError("tau kind must be 'real' or 'imaginary', got '" + kind + "'");
}

std::vector<DeformationParameter> parse_tau_list(const json& v) {
  std::vector<DeformationParameter> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(parse_tau(item));
  } else {
    out.push_back(parse_tau(v));
  }
  if (out.empty()) throw ConfigError("tau list must not be empty");
  return out;
}

std::complex<double> parse_alpha(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], "alpha"), number(v[1], "alpha")};
  if (v.is_object()) {
    check_keys(v, "alpha", {"re", "im"});
    return {v.contains("re") ? number(v.at("re"), "re") : 0.0,
            v.contains("im") ? number(v.at("im"), "im") : 0.0};
  }
  throw ConfigError("alpha must be a number, [re, im] or {\"re\", \"im\"}");
}

JobKind parse_job_kind(const std::string& type) {
  for (JobKind k : {JobKind::Inversion, JobKind::QFunction, JobKind::Spectrum,
                    JobKind::CouplingDump, JobKind::RabiTable, JobKind::RevivalReport}) {
    if (job_name(k) == type) return k;
  }
  throw ConfigError("unknown job type '" + type + "'");
}

Job parse_job(const json& v) {
  check_keys(v, "job", {"type", "times", "taus"});
  if (!v.contains("type")) throw ConfigError("job is missing 'type'");
  Job job;
  job.kind = parse_job_kind(string(v.at("type"), "type"));
  if (v.contains("times")) {
    if (job.kind != JobKind::QFunction) throw ConfigError("key 'times' only applies to qfunction jobs");
    if (!v.at("times").is_array()) throw ConfigError("key 'times' must be an array");
    for (const auto& t : v.at("times")) job.times.push_back(number(t, "times"));
  }
  if (job.kind == JobKind::QFunction && job.times.empty()) {
    throw ConfigError("qfunction job needs a nonempty 'times' list");
  }
  if (v.contains("taus")) job.only_taus = parse_tau_list(v.at("taus"));
  return job;
}

GridSpec parse_grid(const json& v) {
  check_keys(v, "q_grid", {"min", "max", "step"});
  GridAxis axis;
  if (v.contains("min")) axis.min = number(v.at("min"), "min");
  if (v.contains("max")) axis.max = number(v.at("max"), "max");
  if (v.contains("step")) axis.step = number(v.at("step"), "step");
  if (!(axis.step > 0.0) || !(axis.max > axis.min)) {
    throw ConfigError("q_grid needs step > 0 and max > min");
  }
  return {axis, axis};
}

RevivalOptions parse_revival(const json& v) {
  check_keys(v, "revival", {"window", "floor_ratio", "min_height"});
  RevivalOptions r;
  if (v.contains("window")) r.window = number(v.at("window"), "window");
  if (v.contains("floor_ratio")) r.floor_ratio = number(v.at("floor_ratio"), "floor_ratio");
  if (v.contains("min_height")) r.min_height = number(v.at("min_height"), "min_height");
  if (!(r.window > 0.0) || !(r.floor_ratio > 0.0) || !(r.min_height >= 0.0)) {
    throw ConfigError("revival options must be positive");
  }
  return r;
}

std::string format_number(double v) { return fmt::format("{:g}", v); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Everything one sweep entry needs, built lazily.
class SweepContext {
 public:
  SweepContext(const Scenario& scenario, const SimulationConfig& cfg)
      : scenario_(scenario), cfg_(cfg), space_(cfg.truncation, cfg.deformation) {}

  const SimulationConfig& config() const { return cfg_; }
  const FockSpace& space() const { return space_; }

  const CouplingMatrix& coupling() {
    if (!coupling_) {
      coupling_ = coupling_matrix(space_, cfg_.eps, cfg_.coupling_mode, cfg_.prefactor,
                                  cfg_.coupling_padding);
    }
    return *coupling_;
  }

  const Propagator& propagator() {
    if (!propagator_) propagator_.emplace(build_hamiltonian(cfg_, space_, coupling()));
    return *propagator_;
  }

  const AtomFieldState& initial() {
    if (!initial_) initial_ = initial_state(cfg_);
    return *initial_;
  }

  const InversionTrace& trace() {
    if (!trace_) {
      const std::vector<double> times = cfg_.time_grid();
      trace_ = inversion_trace(propagate(propagator(), initial(), times));
    }
    return *trace_;
  }

  AtomFieldState state_at(double t) {
    const double times[] = {t};
    return propagate(propagator(), initial(), times).front();
  }

  const Scenario& scenario() const { return scenario_; }

 private:
  const Scenario& scenario_;
  SimulationConfig cfg_;
  FockSpace space_;
  std::optional<CouplingMatrix> coupling_;
  std::optional<Propagator> propagator_;
  std::optional<AtomFieldState> initial_;
  std::optional<InversionTrace> trace_;
};

template <typename Writer>
std::filesystem::path emit(const std::filesystem::path& dir, const std::string& file, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  const auto path = dir / file;
  write_file(path, os.str());
  return path;
}

JobReport run_job(SweepContext& ctx, const Job& job, const std::filesystem::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  const SimulationConfig& cfg = ctx.config();
  const std::string tag = tau_tag(cfg.deformation);
  JobReport report{cfg.deformation, std::string(job_name(job.kind)), {}, 0.0, {}};

  switch (job.kind) {
    case JobKind::Inversion:
      report.files.push_back(emit(dir, "inversion_" + tag + ".csv",
                                  [&](std::ostream& os) { csv::write_inversion(os, ctx.trace()); }));
      break;
    case JobKind::RevivalReport: {
      const auto revivals = detect_revivals(ctx.trace(), ctx.scenario().revival);
      report.files.push_back(emit(dir, "revivals_" + tag + ".csv",
                                  [&](std::ostream& os) { csv::write_revivals(os, revivals); }));
      break;
    }
    case JobKind::QFunction: {
      double tail = 0.0;
      for (const double t : job.times) {
        const QField field = q_function(reduced_density(ctx.state_at(t)), ctx.scenario().q_grid,
                                        ctx.space(), ctx.scenario().q_probe);
        tail = std::max(tail, field.max_tail_weight);
        report.files.push_back(emit(dir, "qfield_" + tag + "_t" + format_number(t) + ".csv",
                                    [&](std::ostream& os) { csv::write_qfield(os, field); }));
      }
      if (tail > 1e-3) {
        report.warning = fmt::format("probe tail weight beyond level M reaches {:.3g} at grid edge", tail);
      }
      break;
    }
    case JobKind::Spectrum:
      report.files.push_back(emit(dir, "spectrum_" + tag + ".csv", [&](std::ostream& os) {
        csv::write_spectrum(os, cfg.truncation, cfg.deformation);
      }));
      break;
    case JobKind::CouplingDump:
      report.files.push_back(emit(dir, "coupling_" + tag + ".csv",
                                  [&](std::ostream& os) { csv::write_coupling(os, ctx.coupling()); }));
      break;
    case JobKind::RabiTable:
      report.files.push_back(emit(dir, "rabi_" + tag + ".csv",
                                  [&](std::ostream& os) { csv::write_rabi_table(os, cfg); }));
      break;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

std::string_view job_name(JobKind kind) {
  switch (kind) {
    case JobKind::Inversion: return "inversion";
    case JobKind::QFunction: return "qfunction";
    case JobKind::Spectrum: return "spectrum";
    case JobKind::CouplingDump: return "coupling_dump";
    case JobKind::RabiTable: return "rabi_table";
    case JobKind::RevivalReport: return "revival_report";
  }
  return "unknown";
}

bool Job::applies_to(const DeformationParameter& d) const {
  return only_taus.empty() || std::find(only_taus.begin(), only_taus.end(), d) != only_taus.end();
}

SimulationConfig Scenario::config_for(const DeformationParameter& d) const {
  SimulationConfig cfg = config;
  cfg.deformation = d;
  return cfg;
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(doc, "scenario",
             {"name", "tau", "omega_bar", "delta_bar", "eps", "alpha", "truncation", "t_max",
              "n_samples", "coupling_mode", "closed_form_prefactor", "coupling_padding", "q_grid",
              "q_probe", "revival", "output_dir", "jobs"});

  Scenario s;
  SimulationConfig& c = s.config;
  if (doc.contains("name")) s.name = string(doc.at("name"), "name");
  s.taus = doc.contains("tau") ? parse_tau_list(doc.at("tau"))
                               : std::vector<DeformationParameter>{DeformationParameter{}};
  if (doc.contains("omega_bar")) c.omega_bar = number(doc.at("omega_bar"), "omega_bar");
  if (doc.contains("delta_bar")) c.delta_bar = number(doc.at("delta_bar"), "delta_bar");
  if (doc.contains("eps")) c.eps = number(doc.at("eps"), "eps");
  if (doc.contains("alpha")) c.alpha = parse_alpha(doc.at("alpha"));
  if (doc.contains("truncation")) c.truncation = integer(doc.at("truncation"), "truncation");
  if (doc.contains("t_max")) c.t_max = number(doc.at("t_max"), "t_max");
  if (doc.contains("n_samples")) c.n_samples = integer(doc.at("n_samples"), "n_samples");
  if (doc.contains("coupling_mode")) {
    const std::string mode = string(doc.at("coupling_mode"), "coupling_mode");
    if (mode == "exact") c.coupling_mode = CouplingMode::ExactExponential;
    else if (mode == "paper") c.coupling_mode = CouplingMode::PaperClosedForm;
    else throw ConfigError("coupling_mode must be 'exact' or 'paper', got '" + mode + "'");
  }
  if (doc.contains("closed_form_prefactor")) {
    const std::string p = string(doc.at("closed_form_prefactor"), "closed_form_prefactor");
    if (p == "printed") c.prefactor = ClosedFormPrefactor::Printed;
    else if (p == "bch") c.prefactor = ClosedFormPrefactor::Bch;
    else if (p == "commutator") c.prefactor = ClosedFormPrefactor::Commutator;
    else throw ConfigError("closed_form_prefactor must be printed, bch or commutator");
  }
  if (doc.contains("coupling_padding")) {
    c.coupling_padding = integer(doc.at("coupling_padding"), "coupling_padding");
  }
  if (doc.contains("q_grid")) s.q_grid = parse_grid(doc.at("q_grid"));
  if (doc.contains("q_probe")) {
    const std::string probe = string(doc.at("q_probe"), "q_probe");
    if (probe == "deformed") s.q_probe = ProbeKind::Deformed;
    else if (probe == "undeformed") s.q_probe = ProbeKind::Undeformed;
    else throw ConfigError("q_probe must be 'deformed' or 'undeformed'");
  }
  if (doc.contains("revival")) s.revival = parse_revival(doc.at("revival"));
  if (doc.contains("output_dir")) s.output_dir = string(doc.at("output_dir"), "output_dir");

  if (!doc.contains("jobs") || !doc.at("jobs").is_array() || doc.at("jobs").empty()) {
    throw ConfigError("key 'jobs' must be a nonempty array");
  }
  for (const auto& j : doc.at("jobs")) s.jobs.push_back(parse_job(j));

  c.validate();
  if (std::norm(c.alpha) > 0.5 * c.truncation) {
    throw ConfigError(fmt::format("alpha with |alpha|^2 = {:g} needs truncation >= {}",
                                  std::norm(c.alpha),
                                  static_cast<int>(std::ceil(2.0 * std::norm(c.alpha)))));
  }
  for (const auto& job : s.jobs) {
    for (const double t : job.times) {
      if (!(t >= 0.0 && t <= c.t_max)) {
        throw ConfigError(fmt::format("qfunction time {:g} lies outside [0, t_max = {:g}]", t, c.t_max));
      }
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  Scenario s = parse_scenario(text.str());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::bundled_presets()) names.emplace_back(name);
  return names;
}

std::optional<std::string> preset_text(std::string_view name) {
  for (const auto& [file, text] : detail::bundled_presets()) {
    if (file == name || (file.size() == name.size() + 5 && file.starts_with(name) &&
                         file.ends_with(".json"))) {
      return std::string(text);
    }
  }
  return std::nullopt;
}

std::string tau_tag(const DeformationParameter& d) {
  return "tau" + format_number(d.magnitude) + (d.kind == DeformationKind::Imaginary ? "i" : "");
}

std::vector<JobReport> run_scenario(const Scenario& scenario, const RunOptions& options) {
  if (scenario.jobs.empty()) throw ConfigError("scenario has no jobs");
  std::vector<Job> jobs = scenario.jobs;
  if (options.dump_coupling &&
      std::none_of(jobs.begin(), jobs.end(), [](const Job& j) { return j.kind == JobKind::CouplingDump; })) {
    jobs.push_back({JobKind::CouplingDump, {}, {}});
  }

  Scenario effective = scenario;
  effective.jobs = jobs;
  if (options.mode) effective.config.coupling_mode = *options.mode;

  std::filesystem::create_directories(options.output_dir);

  const std::size_t n = effective.taus.size();
  std::vector<std::vector<JobReport>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        SweepContext ctx(effective, effective.config_for(effective.taus[i]));
        for (const auto& job : effective.jobs) {
          if (job.applies_to(effective.taus[i])) {
            results[i].push_back(run_job(ctx, job, options.output_dir));
          }
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(options.threads, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<JobReport> reports;
  for (auto& r : results) reports.insert(reports.end(), r.begin(), r.end());

  json meta;
  meta["scenario"] = effective.name;
  meta["generated_at"] = utc_timestamp();
  meta["threads"] = threads;
  meta["coupling_mode"] =
      effective.config.coupling_mode == CouplingMode::ExactExponential ? "exact" : "paper";
  meta["jobs"] = json::array();
  for (const auto& r : reports) {
    json files = json::array();
    for (const auto& f : r.files) files.push_back(f.filename().string());
    meta["jobs"].push_back({{"tau", r.tau.magnitude},
                            {"kind", r.tau.kind == DeformationKind::Real ? "real" : "imaginary"},
                            {"job", r.job},
                            {"files", files},
                            {"wall_seconds", r.seconds}});
  }
  write_file(options.output_dir / "run_metadata.json", meta.dump(2) + "\n");
  return reports;
}

}  // namespace qtrap
