#include "coxsvrg/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coxsvrg/cox_model.hpp"
#include "coxsvrg/penalty.hpp"

namespace coxsvrg {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// FNV-1a, 64 bit.
struct Hasher {
  std::uint64_t state = 1469598103934665603ULL;

  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= b[i];
      state *= 1099511628211ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }
};

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.generic_string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.generic_string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.generic_string());
  out << j.dump(2) << '\n';
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

double require_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  if (!j.at(key).is_number())
    throw ConfigError(where + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::uint64_t require_u64(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError(where + ": \"" + key + "\" must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t u64_or(const json& j, const char* key, std::uint64_t dflt,
                     const std::string& where) {
  if (!j.contains(key)) return dflt;
  return require_u64(j, key, where);
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  return require_num(j, key, where);
}

std::string require_str(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ConfigError(where + ": missing string \"" + key + "\"");
  return j.at(key).get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

PenaltyPreset preset_from_string(const std::string& s, const std::string& where) {
  if (s == "high_ridge") return PenaltyPreset::HighRidge;
  if (s == "low_ridge") return PenaltyPreset::LowRidge;
  if (s == "high_lasso") return PenaltyPreset::HighLasso;
  if (s == "low_lasso") return PenaltyPreset::LowLasso;
  throw ConfigError(where + ": unknown preset \"" + s + "\"");
}

EstimatorKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "imh_uniform") return EstimatorKind::ImhUniform;
  if (s == "imh_adaptive") return EstimatorKind::ImhAdaptive;
  if (s == "nis") return EstimatorKind::Nis;
  throw ConfigError(where + ": unknown estimator \"" + s + "\"");
}

std::string kind_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::ImhUniform: return "imh_uniform";
    case EstimatorKind::ImhAdaptive: return "imh_adaptive";
    case EstimatorKind::Nis: return "nis";
  }
  return "?";
}

SimulationConfig sim_from_json(const json& j, std::string* name_out) {
  check_keys(j,
             {"n_obs", "dims", "toeplitz_rho", "weibull_shape", "true_theta",
              "target_censoring", "seed", "name"},
             "simulate");
  SimulationConfig cfg;
  cfg.n_obs = require_u64(j, "n_obs", "simulate");
  cfg.dims = require_u64(j, "dims", "simulate");
  cfg.toeplitz_rho = num_or(j, "toeplitz_rho", cfg.toeplitz_rho, "simulate");
  cfg.weibull_shape = num_or(j, "weibull_shape", cfg.weibull_shape, "simulate");
  if (j.contains("true_theta"))
    cfg.true_theta = num_array(j.at("true_theta"), "simulate.true_theta");
  cfg.target_censoring = num_or(j, "target_censoring", cfg.target_censoring, "simulate");
  cfg.seed = u64_or(j, "seed", cfg.seed, "simulate");
  if (name_out && j.contains("name")) *name_out = require_str(j, "name", "simulate");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  return cfg;
}

void parse_penalty_block(const json& j, std::optional<PenaltyPreset>& preset,
                         std::optional<std::pair<double, double>>& penalty) {
  check_keys(j, {"preset", "lambda", "alpha"}, "penalty");
  if (j.contains("preset")) {
    if (j.contains("lambda") || j.contains("alpha"))
      throw ConfigError("penalty: give either a preset or lambda/alpha, not both");
    preset = preset_from_string(require_str(j, "preset", "penalty"), "penalty");
    return;
  }
  penalty = {require_num(j, "lambda", "penalty"), require_num(j, "alpha", "penalty")};
}

void parse_data_source(const json& j, const std::string& where,
                       std::optional<std::filesystem::path>& dataset_path,
                       std::optional<SimulationConfig>& simulation) {
  const bool has_path = j.contains("dataset");
  const bool has_sim = j.contains("simulate");
  if (has_path == has_sim)
    throw ConfigError(where + ": give exactly one of \"dataset\" and \"simulate\"");
  if (has_path)
    dataset_path = std::filesystem::path(require_str(j, "dataset", where));
  else
    simulation = sim_from_json(j.at("simulate"), nullptr);
}

ScheduleSpec schedule_from_json(const json& j, const std::string& where) {
  check_keys(j, {"rule", "alpha", "rho"}, where);
  std::string rule = j.contains("rule") ? require_str(j, "rule", where) : "practical";
  try {
    if (rule == "practical") return ScheduleSpec::practical();
    if (rule == "theory_strong")
      return ScheduleSpec::theory_strong(num_or(j, "alpha", 2.0, where),
                                         require_num(j, "rho", where));
    if (rule == "theory_convex")
      return ScheduleSpec::theory_convex(num_or(j, "alpha", 2.0, where));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown rule \"" + rule + "\"");
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

SolverEntry entry_from_json(const json& j) {
  check_keys(j,
             {"name", "algorithm", "phases", "phase_length", "gamma", "gamma_grid",
              "switch_phase", "minibatch_size", "schedule", "estimator",
              "checkpoint_every", "tol"},
             "solver");
  SolverEntry e;
  e.name = require_str(j, "name", "solver");
  if (!valid_name(e.name))
    throw ConfigError("solver name \"" + e.name +
                      "\" must match [A-Za-z0-9_.-]+ (it names trace files)");
  const std::string where = "solver " + e.name;
  e.algorithm = require_str(j, "algorithm", where);
  if (e.algorithm != "fista" && e.algorithm != "svrg_mb" && e.algorithm != "two_svrg" &&
      e.algorithm != "hsvrg")
    throw ConfigError(where + ": unknown algorithm \"" + e.algorithm + "\"");

  SolverConfig& c = e.config;
  if (e.algorithm == "fista") {
    e.fista_tol = num_or(j, "tol", 1e-8, where);
    c.checkpoint_every = u64_or(j, "checkpoint_every", 0, where);
    return e;
  }
  c.phases = require_u64(j, "phases", where);
  c.phase_length = u64_or(j, "phase_length", 0, where);  // 0: one per failure
  c.minibatch_size = u64_or(j, "minibatch_size", 0, where);
  c.checkpoint_every = u64_or(j, "checkpoint_every", 0, where);
  if (e.algorithm == "hsvrg")
    c.switch_phase = u64_or(j, "switch_phase", std::min<std::uint64_t>(5, c.phases), where);
  if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"), where);
  if (j.contains("estimator"))
    c.estimator = kind_from_string(require_str(j, "estimator", where), where);
  if (j.contains("gamma")) c.step_size = require_num(j, "gamma", where);
  if (j.contains("gamma_grid"))
    e.gamma_grid = num_array(j.at("gamma_grid"), where + ".gamma_grid");
  if (!j.contains("gamma") && e.gamma_grid.empty())
    throw ConfigError(where + ": needs \"gamma\" or a \"gamma_grid\"");
  for (double g : e.gamma_grid)
    if (!(g > 0.0) || !std::isfinite(g))
      throw ConfigError(where + ": gamma_grid entries must be positive and finite");
  return e;
}

// phase_length 0 means one inner step per failure; minibatch_size 0 means a
// tenth of the failures, at least one.
void finalize_entry(SolverEntry& e, const RiskSetIndex& idx) {
  const auto n = static_cast<std::uint64_t>(idx.n_failures());
  if (e.config.phase_length == 0) e.config.phase_length = n;
  if (e.config.minibatch_size == 0)
    e.config.minibatch_size =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(0.1 * static_cast<double>(n))));
}

SolveResult run_entry(const SurvivalDataset& data, const RiskSetIndex& idx,
                      const ElasticNetPenalty& pen, const SolverEntry& e,
                      std::uint64_t seed, std::uint64_t budget,
                      InnerProductLedger& ledger) {
  std::vector<double> theta0(data.n_features(), 0.0);
  if (e.algorithm == "fista") return fista(data, idx, pen, theta0, e.fista_tol, budget, ledger);
  SolverConfig c = e.config;
  c.seed = seed;
  if (e.algorithm == "svrg_mb") return prox_svrg_minibatch(data, idx, pen, c, theta0, ledger, budget);
  if (e.algorithm == "two_svrg") return two_svrg(data, idx, pen, c, theta0, ledger, budget);
  return hsvrg(data, idx, pen, c, theta0, ledger, budget);
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Completed: return "completed";
    case SolveStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_field_double(const std::string& field, const std::filesystem::path& path,
                          std::size_t line_no) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw ConfigError(path.generic_string() + ":" + std::to_string(line_no) +
                      ": bad number \"" + field + "\"");
  return v;
}

std::uint64_t parse_field_u64(const std::string& field, const std::filesystem::path& path,
                              std::size_t line_no) {
  std::uint64_t v = 0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw ConfigError(path.generic_string() + ":" + std::to_string(line_no) +
                      ": bad integer \"" + field + "\"");
  return v;
}

}  // namespace

ElasticNetPenalty resolve_preset(PenaltyPreset preset, const RiskSetIndex& idx) {
  const double n = static_cast<double>(idx.n_failures());
  switch (preset) {
    case PenaltyPreset::HighRidge: return ElasticNetPenalty(1.0 / std::sqrt(n), 0.0);
    case PenaltyPreset::LowRidge: return ElasticNetPenalty(1.0 / n, 0.0);
    case PenaltyPreset::HighLasso: return ElasticNetPenalty(1.0 / std::sqrt(n), 1.0);
    case PenaltyPreset::LowLasso: return ElasticNetPenalty(1.0 / n, 1.0);
  }
  throw ConfigError("unknown penalty preset");
}

std::string dataset_fingerprint(const SurvivalDataset& data, const ElasticNetPenalty& pen) {
  Hasher h;
  h.u64(data.n_patients());
  h.u64(data.n_features());
  h.f64s(data.times());
  for (std::uint8_t e : data.events()) h.bytes(&e, 1);
  h.f64s(data.features());
  h.f64(pen.lambda);
  h.f64(pen.alpha);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.state));
  return buf;
}

ReferenceOptimum compute_reference(const SurvivalDataset& data, const RiskSetIndex& idx,
                                   const ElasticNetPenalty& pen,
                                   const std::optional<std::filesystem::path>& cache_dir,
                                   std::uint64_t budget) {
  ReferenceOptimum ref;
  ref.fingerprint = dataset_fingerprint(data, pen);

  std::filesystem::path cache_file;
  if (cache_dir) {
    cache_file = *cache_dir / ("reference_" + ref.fingerprint + ".json");
    if (std::filesystem::exists(cache_file)) {
      json j = load_json(cache_file);
      if (require_str(j, "fingerprint", "reference cache") == ref.fingerprint) {
        ref.theta_star = num_array(j.at("theta_star"), "reference cache.theta_star");
        if (ref.theta_star.size() != data.n_features())
          throw ConfigError(cache_file.generic_string() + ": theta_star has wrong size");
        ref.f_star = require_num(j, "f_star", "reference cache");
        ref.residual = require_num(j, "residual", "reference cache");
        ref.from_cache = true;
        return ref;
      }
      // Stale entry under a colliding name: fall through and recompute.
    }
  }

  std::vector<double> theta0(data.n_features(), 0.0);
  InnerProductLedger ledger;
  SolveResult res = fista(data, idx, pen, theta0, kReferenceTol, budget, ledger);
  if (res.status != SolveStatus::Converged)
    throw ConvergenceError("reference solve stopped at residual " + fmt17(res.residual) +
                           " after " + std::to_string(ledger.count()) +
                           " inner products without reaching " + fmt17(kReferenceTol));
  ref.theta_star = res.theta;
  ref.residual = res.residual;
  InnerProductLedger side;
  ref.f_star = objective(data, idx, pen, ref.theta_star, side);

  if (cache_dir) {
    std::filesystem::create_directories(*cache_dir);
    json j;
    j["fingerprint"] = ref.fingerprint;
    j["lambda"] = pen.lambda;
    j["alpha"] = pen.alpha;
    j["tolerance"] = kReferenceTol;
    j["f_star"] = ref.f_star;
    j["residual"] = ref.residual;
    j["theta_star"] = ref.theta_star;
    write_json_file(j, cache_file);
  }
  return ref;
}

SurvivalDataset load_or_simulate(const std::optional<std::filesystem::path>& dataset_path,
                                 const std::optional<SimulationConfig>& simulation) {
  if (dataset_path.has_value() == simulation.has_value())
    throw ConfigError("give exactly one of a dataset path and a simulation block");
  if (dataset_path) return read_dataset_csv(*dataset_path);
  return simulate_dataset(*simulation);
}

ElasticNetPenalty resolve_penalty(const std::optional<PenaltyPreset>& preset,
                                  const std::optional<std::pair<double, double>>& penalty,
                                  const RiskSetIndex& idx) {
  if (preset.has_value() == penalty.has_value())
    throw ConfigError("give exactly one of a penalty preset and explicit lambda/alpha");
  try {
    if (preset) return resolve_preset(*preset, idx);
    return ElasticNetPenalty(penalty->first, penalty->second);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("penalty: ") + e.what());
  }
}

RaceConfig parse_race_config(const std::filesystem::path& path) {
  json j = load_json(path);
  check_keys(j,
             {"dataset", "simulate", "penalty", "solvers", "seeds", "budget",
              "pilot_budget", "reference_budget", "output_dir", "record_wall_time"},
             "race config");
  RaceConfig cfg;
  try {
    parse_data_source(j, "race config", cfg.dataset_path, cfg.simulation);
    if (!j.contains("penalty")) throw ConfigError("race config: missing \"penalty\"");
    parse_penalty_block(j.at("penalty"), cfg.preset, cfg.penalty);

    cfg.budget = require_u64(j, "budget", "race config");
    if (cfg.budget == 0) throw ConfigError("race config: budget must be positive");
    cfg.pilot_budget = u64_or(j, "pilot_budget", 0, "race config");
    cfg.reference_budget = u64_or(j, "reference_budget", 0, "race config");
    if (j.contains("output_dir"))
      cfg.output_dir = std::filesystem::path(require_str(j, "output_dir", "race config"));
    if (j.contains("record_wall_time")) {
      if (!j.at("record_wall_time").is_boolean())
        throw ConfigError("race config: record_wall_time must be a boolean");
      cfg.record_wall_time = j.at("record_wall_time").get<bool>();
    }

    if (j.contains("seeds")) {
      if (!j.at("seeds").is_array() || j.at("seeds").empty())
        throw ConfigError("race config: seeds must be a nonempty array");
      for (const auto& s : j.at("seeds")) {
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
          throw ConfigError("race config: seeds must be nonnegative integers");
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    } else {
      cfg.seeds.push_back(0);
    }

    if (!j.contains("solvers") || !j.at("solvers").is_array() || j.at("solvers").empty())
      throw ConfigError("race config: missing nonempty \"solvers\" array");
    std::set<std::string> names;
    for (const auto& s : j.at("solvers")) {
      cfg.solvers.push_back(entry_from_json(s));
      if (!names.insert(cfg.solvers.back().name).second)
        throw ConfigError("race config: duplicate solver name \"" +
                          cfg.solvers.back().name + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.generic_string() + ": " + e.what());
  }
  return cfg;
}

void write_trace_csv(const NamedTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.generic_string());
  out << "solver,seed,inner_products,objective,gap,seconds,phase\n";
  for (const TraceRow& r : trace.rows) {
    out << r.solver << ',' << r.seed << ',' << r.inner_products << ','
        << fmt17(r.objective) << ',' << fmt17(r.gap) << ',' << fmt_seconds(r.seconds)
        << ',' << r.phase << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path.generic_string());
}

NamedTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.generic_string());
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError(path.generic_string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "solver,seed,inner_products,objective,gap,seconds,phase")
    throw ConfigError(path.generic_string() + ": unexpected header \"" + line + "\"");

  NamedTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 7)
      throw ConfigError(path.generic_string() + ":" + std::to_string(line_no) +
                        ": expected 7 fields, got " + std::to_string(fields.size()));
    TraceRow r;
    r.solver = fields[0];
    r.seed = parse_field_u64(fields[1], path, line_no);
    r.inner_products = parse_field_u64(fields[2], path, line_no);
    r.objective = parse_field_double(fields[3], path, line_no);
    r.gap = parse_field_double(fields[4], path, line_no);
    r.seconds = parse_field_double(fields[5], path, line_no);
    r.phase = parse_field_u64(fields[6], path, line_no);
    if (trace.rows.empty()) {
      trace.solver = r.solver;
      trace.seed = r.seed;
    } else if (r.solver != trace.solver || r.seed != trace.seed) {
      throw ConfigError(path.generic_string() + ":" + std::to_string(line_no) +
                        ": file mixes (solver, seed) pairs");
    }
    trace.rows.push_back(std::move(r));
  }
  return trace;
}

double pick_step_size(const SurvivalDataset& data, const RiskSetIndex& idx,
                      const ElasticNetPenalty& pen, const SolverEntry& entry,
                      std::uint64_t pilot_budget, std::uint64_t seed) {
  if (entry.gamma_grid.empty()) return entry.config.step_size;
  double best = entry.gamma_grid.front();
  double best_obj = std::numeric_limits<double>::infinity();
  for (double g : entry.gamma_grid) {
    SolverEntry e = entry;
    e.gamma_grid.clear();
    e.config.step_size = g;
    InnerProductLedger ledger;
    SolveResult res = run_entry(data, idx, pen, e, seed, pilot_budget, ledger);
    InnerProductLedger side;
    const double obj = objective(data, idx, pen, res.theta, side);
    if (std::isfinite(obj) && obj < best_obj) {
      best_obj = obj;
      best = g;
    }
  }
  return best;
}

RaceOutcome run_race(const RaceConfig& cfg) {
  if (cfg.budget == 0) throw ConfigError("race: budget must be positive");
  if (cfg.solvers.empty()) throw ConfigError("race: no solvers");
  if (cfg.seeds.empty()) throw ConfigError("race: no seeds");

  std::filesystem::create_directories(cfg.output_dir);

  SurvivalDataset data = load_or_simulate(cfg.dataset_path, cfg.simulation);
  if (cfg.simulation) {
    write_dataset_csv(data, cfg.output_dir / "dataset.csv");
    const double realized =
        1.0 - static_cast<double>(data.n_events()) / static_cast<double>(data.n_patients());
    write_simulation_metadata(*cfg.simulation, realized, data.n_events(),
                              cfg.output_dir / "dataset.meta.json");
  }
  RiskSetIndex idx = build_risk_index(data);
  ElasticNetPenalty pen = resolve_penalty(cfg.preset, cfg.penalty, idx);

  RaceOutcome out;
  out.reference = compute_reference(
      data, idx, pen, cfg.output_dir,
      cfg.reference_budget == 0 ? kUnlimited : cfg.reference_budget);
  const double f_star = out.reference.f_star;

  const std::uint64_t pilot =
      cfg.pilot_budget ? cfg.pilot_budget : std::max<std::uint64_t>(1, cfg.budget / 20);

  json summary;
  summary["fingerprint"] = out.reference.fingerprint;
  summary["f_star"] = f_star;
  summary["reference_residual"] = out.reference.residual;
  summary["reference_from_cache"] = out.reference.from_cache;
  summary["budget"] = cfg.budget;
  summary["record_wall_time"] = cfg.record_wall_time;
  summary["lambda"] = pen.lambda;
  summary["alpha"] = pen.alpha;
  json runs_json = json::array();

  for (const SolverEntry& entry0 : cfg.solvers) {
    SolverEntry entry = entry0;
    finalize_entry(entry, idx);
    if (!entry.gamma_grid.empty())
      entry.config.step_size =
          pick_step_size(data, idx, pen, entry, pilot, cfg.seeds.front());

    for (std::uint64_t seed : cfg.seeds) {
      RunRecord rec;
      rec.solver = entry.name;
      rec.seed = seed;
      rec.step_size = entry.config.step_size;
      NamedTrace trace;
      trace.solver = entry.name;
      trace.seed = seed;
      try {
        InnerProductLedger ledger;
        SolveResult res = run_entry(data, idx, pen, entry, seed, cfg.budget, ledger);
        rec.status = status_name(res.status);
        rec.inner_products = ledger.count();
        trace.rows.reserve(res.trace.checkpoints.size());
        for (const TraceCheckpoint& cp : res.trace.checkpoints) {
          TraceRow row;
          row.solver = entry.name;
          row.seed = seed;
          row.inner_products = cp.inner_products;
          row.objective = cp.objective;
          row.gap = cp.objective - f_star;
          row.seconds = cfg.record_wall_time ? cp.elapsed_seconds : 0.0;
          row.phase = cp.phase;
          trace.rows.push_back(std::move(row));
        }
      } catch (const std::exception& e) {
        rec.status = "error";
        rec.message = e.what();
      }

      rec.trace_file =
          cfg.output_dir / ("trace_" + entry.name + "_s" + std::to_string(seed) + ".csv");
      write_trace_csv(trace, rec.trace_file);

      json status;
      status["solver"] = rec.solver;
      status["algorithm"] = entry.algorithm;
      status["seed"] = rec.seed;
      status["status"] = rec.status;
      status["message"] = rec.message;
      status["step_size"] = rec.step_size;
      status["inner_products"] = rec.inner_products;
      status["trace"] = rec.trace_file.filename().generic_string();
      write_json_file(status, cfg.output_dir / ("status_" + entry.name + "_s" +
                                                std::to_string(seed) + ".json"));
      runs_json.push_back(status);

      out.runs.push_back(rec);
      out.traces.push_back(std::move(trace));
    }
  }

  summary["runs"] = std::move(runs_json);
  write_json_file(summary, cfg.output_dir / "race_summary.json");
  return out;
}

void emit_plot(const std::vector<NamedTrace>& traces, const std::filesystem::path& path) {
  constexpr double kClamp = 1e-12;
  std::vector<std::string> names;
  std::vector<std::vector<const NamedTrace*>> groups;
  for (const NamedTrace& t : traces) {
    if (t.rows.empty()) continue;
    auto it = std::find(names.begin(), names.end(), t.solver);
    if (it == names.end()) {
      names.push_back(t.solver);
      groups.emplace_back();
      it = names.end() - 1;
    }
    groups[static_cast<std::size_t>(it - names.begin())].push_back(&t);
  }
  if (names.empty()) throw std::runtime_error("no trace rows to plot");

  struct Curve {
    std::size_t color = 0;
    double opacity = 1.0;
    double width = 1.5;
    std::vector<std::pair<double, double>> pts;  // (products, log10 gap)
  };
  std::vector<Curve> curves;

  auto log_gap = [&](double gap) { return std::log10(std::max(gap, kClamp)); };
  auto gap_at = [&](const NamedTrace& t, double x) {
    // Step interpolation: value of the last checkpoint at or before x.
    auto it = std::upper_bound(
        t.rows.begin(), t.rows.end(), x,
        [](double v, const TraceRow& r) { return v < static_cast<double>(r.inner_products); });
    if (it == t.rows.begin()) return t.rows.front().gap;
    return std::prev(it)->gap;
  };

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& group = groups[gi];
    if (group.size() > 1) {
      for (const NamedTrace* t : group) {
        Curve c;
        c.color = gi;
        c.opacity = 0.25;
        c.width = 1.0;
        for (const TraceRow& r : t->rows)
          c.pts.emplace_back(static_cast<double>(r.inner_products), log_gap(r.gap));
        curves.push_back(std::move(c));
      }
      double x_lo = std::numeric_limits<double>::infinity();
      double x_hi = std::numeric_limits<double>::infinity();
      for (const NamedTrace* t : group) {
        x_lo = std::min(x_lo, static_cast<double>(t->rows.front().inner_products));
        x_hi = std::min(x_hi, static_cast<double>(t->rows.back().inner_products));
      }
      if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
      Curve med;
      med.color = gi;
      med.width = 2.0;
      constexpr int kGrid = 256;
      std::vector<double> vals(group.size());
      for (int s = 0; s < kGrid; ++s) {
        const double x = x_lo + (x_hi - x_lo) * s / (kGrid - 1);
        for (std::size_t k = 0; k < group.size(); ++k) vals[k] = gap_at(*group[k], x);
        std::sort(vals.begin(), vals.end());
        const std::size_t n = vals.size();
        const double m = (n % 2 == 1) ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        med.pts.emplace_back(x, log_gap(m));
      }
      curves.push_back(std::move(med));
    } else {
      Curve c;
      c.color = gi;
      c.width = 2.0;
      for (const TraceRow& r : group[0]->rows)
        c.pts.emplace_back(static_cast<double>(r.inner_products), log_gap(r.gap));
      curves.push_back(std::move(c));
    }
  }

  double x_max = 1.0, y_min = 0.0, y_max = -12.0;
  bool first = true;
  for (const Curve& c : curves)
    for (const auto& [x, y] : c.pts) {
      if (first) {
        x_max = x;
        y_min = y_max = y;
        first = false;
      } else {
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  if (x_max <= 0.0) x_max = 1.0;
  y_min = std::floor(y_min);
  y_max = std::ceil(y_max);
  if (y_max <= y_min) y_max = y_min + 1.0;

  const double x0 = 70, x1 = 740, y0 = 40, y1 = 540;
  auto px = [&](double x) { return x0 + x / x_max * (x1 - x0); };
  auto py = [&](double y) { return y1 - (y - y_min) / (y_max - y_min) * (y1 - y0); };
  auto f2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"600\" "
         "viewBox=\"0 0 960 600\">\n";
  svg << "<rect width=\"960\" height=\"600\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << (x0 + x1) / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" "
         "fill=\"#222\">objective gap vs inner products</text>\n";

  const int y_step = std::max(1, static_cast<int>(std::ceil((y_max - y_min) / 10.0)));
  for (int e = static_cast<int>(y_min); e <= static_cast<int>(y_max); e += y_step) {
    const double yy = py(e);
    svg << "<line x1=\"" << x0 << "\" y1=\"" << f2(yy) << "\" x2=\"" << x1 << "\" y2=\""
        << f2(yy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << x0 - 8 << "\" y=\"" << f2(yy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#444\">1e"
        << e << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    const double xv = x_max * t / 5.0;
    const double xx = px(xv);
    svg << "<line x1=\"" << f2(xx) << "\" y1=\"" << y1 << "\" x2=\"" << f2(xx)
        << "\" y2=\"" << y1 + 5 << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    char lbl[32];
    std::snprintf(lbl, sizeof lbl, "%g", xv);
    svg << "<text x=\"" << f2(xx) << "\" y=\"" << y1 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#444\">"
        << lbl << "</text>\n";
  }
  svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0
      << "\" height=\"" << y1 - y0
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y1 + 42
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "fill=\"#222\">inner products</text>\n";
  svg << "<text x=\"18\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "fill=\"#222\" transform=\"rotate(-90 18 "
      << (y0 + y1) / 2 << ")\">objective gap</text>\n";

  for (const Curve& c : curves) {
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[c.color % kPaletteSize]
        << "\" stroke-width=\"" << c.width << "\" stroke-opacity=\"" << c.opacity
        << "\" points=\"";
    for (const auto& [x, y] : c.pts) svg << f2(px(x)) << ',' << f2(py(y)) << ' ';
    svg << "\"/>\n";
  }

  for (std::size_t i = 0; i < names.size(); ++i) {
    const double ly = 60.0 + 22.0 * static_cast<double>(i);
    svg << "<line x1=\"755\" y1=\"" << f2(ly - 4) << "\" x2=\"785\" y2=\"" << f2(ly - 4)
        << "\" stroke=\"" << kPalette[i % kPaletteSize] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"792\" y=\"" << f2(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">"
        << xml_escape(names[i]) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.generic_string());
  out << svg.str();
}

SimulationConfig read_simulation_config(const std::filesystem::path& path,
                                        std::string* name_out) {
  json j = load_json(path);
  return sim_from_json(j, name_out);
}

ReferenceRequest read_reference_config(const std::filesystem::path& path) {
  json j = load_json(path);
  check_keys(j, {"dataset", "simulate", "penalty"}, "reference config");
  ReferenceRequest req;
  try {
    parse_data_source(j, "reference config", req.dataset_path, req.simulation);
    if (!j.contains("penalty"))
      throw ConfigError("reference config: missing \"penalty\"");
    parse_penalty_block(j.at("penalty"), req.preset, req.penalty);
  } catch (const json::exception& e) {
    throw ConfigError(path.generic_string() + ": " + e.what());
  }
  return req;
}

AssessConfig read_assess_config(const std::filesystem::path& path) {
  json j = load_json(path);
  check_keys(j,
             {"dataset", "simulate", "estimators", "replicates", "seed", "failure",
              "theta", "anchor"},
             "assess config");
  AssessConfig cfg;
  try {
    parse_data_source(j, "assess config", cfg.dataset_path, cfg.simulation);
    if (!j.contains("estimators") || !j.at("estimators").is_array() ||
        j.at("estimators").empty())
      throw ConfigError("assess config: missing nonempty \"estimators\" array");
    for (const auto& e : j.at("estimators")) {
      check_keys(e, {"kind", "iterations"}, "assess estimator");
      AssessSpec spec;
      spec.kind = kind_from_string(require_str(e, "kind", "assess estimator"),
                                   "assess estimator");
      spec.iterations = require_u64(e, "iterations", "assess estimator");
      if (spec.iterations == 0)
        throw ConfigError("assess estimator: iterations must be positive");
      cfg.estimators.push_back(spec);
    }
    cfg.replicates = u64_or(j, "replicates", cfg.replicates, "assess config");
    if (cfg.replicates == 0)
      throw ConfigError("assess config: replicates must be positive");
    cfg.seed = u64_or(j, "seed", cfg.seed, "assess config");
    if (j.contains("failure"))
      cfg.failure = static_cast<std::size_t>(require_u64(j, "failure", "assess config"));
    if (j.contains("theta")) cfg.theta = num_array(j.at("theta"), "assess config.theta");
    if (j.contains("anchor"))
      cfg.anchor = num_array(j.at("anchor"), "assess config.anchor");
  } catch (const json::exception& e) {
    throw ConfigError(path.generic_string() + ": " + e.what());
  }
  return cfg;
}

std::vector<AssessRow> run_assess(const AssessConfig& cfg) {
  SurvivalDataset data = load_or_simulate(cfg.dataset_path, cfg.simulation);
  RiskSetIndex idx = build_risk_index(data);
  const std::size_t d = data.n_features();

  // Prefix ends are nondecreasing, so the last failure has the largest risk set.
  const std::size_t f = cfg.failure ? *cfg.failure : idx.n_failures() - 1;
  if (f >= idx.n_failures())
    throw ConfigError("assess: failure ordinal " + std::to_string(f) + " out of range (" +
                      std::to_string(idx.n_failures()) + " failures)");

  std::vector<double> theta = cfg.theta.empty() ? std::vector<double>(d, 0.0) : cfg.theta;
  std::vector<double> anchor = cfg.anchor.empty() ? std::vector<double>(d, 0.0) : cfg.anchor;
  if (theta.size() != d || anchor.size() != d)
    throw ConfigError("assess: theta and anchor must have " + std::to_string(d) +
                      " coordinates");

  InnerProductLedger scratch;
  PhaseCache cache(data, idx, anchor, scratch);
  Rng rng(cfg.seed);

  std::vector<AssessRow> rows;
  rows.reserve(cfg.estimators.size());
  for (const AssessSpec& spec : cfg.estimators) {
    EstimatorConfig ec(spec.kind, spec.iterations);
    AssessRow row;
    row.estimator = kind_name(spec.kind);
    row.report = assess_estimator(data, idx, cache, f, theta, ec, cfg.replicates, rng);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_assess_csv(const std::vector<AssessRow>& rows,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.generic_string());
  out << "estimator,iterations,replicates,mean_bias_norm,mean_squared_error\n";
  for (const AssessRow& r : rows) {
    out << r.estimator << ',' << r.report.iterations << ',' << r.report.replicates << ','
        << fmt17(r.report.mean_bias_norm) << ',' << fmt17(r.report.mean_squared_error)
        << '\n';
  }
}

}  // namespace coxsvrg
