#include "surfmax/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "surfmax/error.hpp"
#include "surfmax/external_oracle.hpp"

namespace surfmax {

namespace {

using json = nlohmann::json;

// Reads fields from one JSON object and rejects whatever was not read.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(ErrorKind::Config, where_ + " must be a JSON object");
  }

  template <typename T>
  void optional(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::Config, where_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  T required(const char* key) {
    if (!j_.contains(key)) throw Error(ErrorKind::Config, where_ + " is missing \"" + key + "\"");
    T out{};
    optional(key, out);
    return out;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw Error(ErrorKind::Config, "unknown field \"" + key + "\" in " + where_);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "parametric") return AttackKind::Parametric;
  if (name == "fgsm") return AttackKind::Fgsm;
  if (name == "pgd") return AttackKind::Pgd;
  if (name == "random_search") return AttackKind::RandomSearch;
  throw Error(ErrorKind::Config, "unknown attack kind '" + name + "'");
}

const char* to_string(BarycentricSampler s) {
  return s == BarycentricSampler::StretchedGrid ? "grid" : "uniform";
}

BarycentricSampler sampler_from_string(const std::string& name) {
  if (name == "grid") return BarycentricSampler::StretchedGrid;
  if (name == "uniform") return BarycentricSampler::UniformRandom;
  throw Error(ErrorKind::Config, "unknown sampler '" + name + "'");
}

const std::set<std::string> kOracleTypes = {"quadexp_family", "quadexp", "rbf_family", "rbf", "external"};

RbfComponent parse_component(const json& j, const std::string& where) {
  ObjectReader rd(j, where);
  RbfComponent c;
  c.weight = rd.required<double>("weight");
  c.center = to_vector(rd.required<std::vector<double>>("center"));
  c.width = rd.required<double>("width");
  std::vector<double> axes;
  rd.optional("axis_widths", axes);
  if (!axes.empty()) c.axis_widths = to_vector(axes);
  rd.finish();
  return c;
}

OracleSpec parse_oracle(const json& j) {
  ObjectReader rd(j, "oracle");
  OracleSpec o;
  o.type = rd.required<std::string>("type");
  if (!kOracleTypes.count(o.type)) throw Error(ErrorKind::Config, "unknown oracle type '" + o.type + "'");
  if (o.type == "quadexp_family" || o.type == "quadexp") {
    rd.optional("eig_min", o.quadexp.eig_min);
    rd.optional("eig_max", o.quadexp.eig_max);
    rd.optional("log_scale", o.quadexp.log_scale);
    rd.optional("peak_offset", o.quadexp.peak_offset);
    rd.optional("interior_margin", o.quadexp.interior_margin);
    rd.optional("max_attempts", o.quadexp.max_attempts);
  } else if (o.type == "rbf_family" || o.type == "rbf") {
    rd.optional("min_components", o.rbf.min_components);
    rd.optional("max_components", o.rbf.max_components);
    rd.optional("min_width", o.rbf.min_width);
    rd.optional("max_width", o.rbf.max_width);
    rd.optional("min_weight", o.rbf.min_weight);
    rd.optional("max_weight", o.rbf.max_weight);
    rd.optional("center_scale", o.rbf.center_scale);
    rd.optional("anisotropic", o.rbf.anisotropic);
    if (o.type == "rbf") {
      rd.optional("seed", o.seed);
      if (const json* comps = rd.child("components")) {
        if (!comps->is_array()) throw Error(ErrorKind::Config, "oracle.components must be an array");
        for (std::size_t i = 0; i < comps->size(); ++i) {
          o.components.push_back(parse_component((*comps)[i], "oracle.components[" + std::to_string(i) + "]"));
        }
      }
    }
  } else {
    o.target = rd.required<std::string>("target");
    rd.optional("timeout_s", o.timeout_s);
  }
  rd.finish();
  return o;
}

AttackSpec parse_attack(const json& j, std::size_t index) {
  const std::string where = "attacks[" + std::to_string(index) + "]";
  ObjectReader rd(j, where);
  AttackSpec a;
  a.name = rd.required<std::string>("name");
  a.kind = attack_kind_from_string(rd.required<std::string>("kind"));
  AttackConfig& c = a.config;
  switch (a.kind) {
    case AttackKind::Parametric: {
      rd.optional("r", c.r);
      rd.optional("s", c.s);
      std::string policy = to_string(c.candidate_policy);
      rd.optional("candidate_policy", policy);
      c.candidate_policy = candidate_policy_from_string(policy);
      rd.optional("extrapolation_slack", c.extrapolation_slack);
      std::string sampler = to_string(c.sampler);
      rd.optional("sampler", sampler);
      c.sampler = sampler_from_string(sampler);
      double side = 0.0;
      rd.optional("side_length", side);
      if (j.contains("side_length")) c.side_length = side;
      break;
    }
    case AttackKind::Fgsm:
      rd.optional("epsilon", c.epsilon);
      break;
    case AttackKind::Pgd:
      rd.optional("epsilon", c.epsilon);
      rd.optional("pgd_steps", c.pgd_steps);
      rd.optional("pgd_step_size", c.pgd_step_size);
      rd.optional("return_last", c.pgd_return_last);
      break;
    case AttackKind::RandomSearch:
      rd.optional("samples", a.random_samples);
      break;
  }
  rd.optional("fd_step", c.fd_step);
  rd.finish();
  return a;
}

json component_to_json(const RbfComponent& c) {
  json j{{"weight", c.weight}, {"center", to_std(c.center)}, {"width", c.width}};
  if (c.axis_widths) j["axis_widths"] = to_std(*c.axis_widths);
  return j;
}

json oracle_to_json(const OracleSpec& o) {
  json j{{"type", o.type}};
  if (o.type == "quadexp_family" || o.type == "quadexp") {
    j["eig_min"] = o.quadexp.eig_min;
    j["eig_max"] = o.quadexp.eig_max;
    j["log_scale"] = o.quadexp.log_scale;
    j["peak_offset"] = o.quadexp.peak_offset;
    j["interior_margin"] = o.quadexp.interior_margin;
    j["max_attempts"] = o.quadexp.max_attempts;
  } else if (o.type == "rbf_family" || o.type == "rbf") {
    j["min_components"] = o.rbf.min_components;
    j["max_components"] = o.rbf.max_components;
    j["min_width"] = o.rbf.min_width;
    j["max_width"] = o.rbf.max_width;
    j["min_weight"] = o.rbf.min_weight;
    j["max_weight"] = o.rbf.max_weight;
    j["center_scale"] = o.rbf.center_scale;
    j["anisotropic"] = o.rbf.anisotropic;
    if (o.type == "rbf") {
      j["seed"] = o.seed;
      if (!o.components.empty()) {
        json comps = json::array();
        for (const auto& c : o.components) comps.push_back(component_to_json(c));
        j["components"] = std::move(comps);
      }
    }
  } else {
    j["target"] = o.target;
    j["timeout_s"] = o.timeout_s;
  }
  return j;
}

json attack_to_json(const AttackSpec& a) {
  const AttackConfig& c = a.config;
  json j{{"name", a.name}, {"kind", to_string(a.kind)}, {"fd_step", c.fd_step}};
  switch (a.kind) {
    case AttackKind::Parametric:
      j["r"] = c.r;
      j["s"] = c.s;
      j["candidate_policy"] = to_string(c.candidate_policy);
      j["extrapolation_slack"] = c.extrapolation_slack;
      j["sampler"] = to_string(c.sampler);
      if (c.side_length) j["side_length"] = *c.side_length;
      break;
    case AttackKind::Fgsm:
      j["epsilon"] = c.epsilon;
      break;
    case AttackKind::Pgd:
      j["epsilon"] = c.epsilon;
      j["pgd_steps"] = c.pgd_steps;
      j["pgd_step_size"] = c.pgd_step_size;
      j["return_last"] = c.pgd_return_last;
      break;
    case AttackKind::RandomSearch:
      j["samples"] = a.random_samples;
      break;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Trial execution
// ---------------------------------------------------------------------------

struct AttackTrial {
  bool ok = false;
  double loss = 0.0;
  double eval_calls = 0.0;
  double grad_calls = 0.0;
  double wall_time_s = 0.0;
  bool fallback = false;
  std::string error;
};

std::unique_ptr<LossOracle> make_shared_oracle(const BenchConfig& cfg) {
  const OracleSpec& o = cfg.oracle;
  if (o.type == "rbf") {
    if (!o.components.empty()) return std::make_unique<RbfOracle>(RbfMixture(cfg.n_dim, o.components));
    Rng rng(o.seed);
    return std::make_unique<RbfOracle>(random_rbf_mixture(rng, cfg.n_dim, o.rbf));
  }
  if (o.type == "external") {
    ExternalOracleOptions opts;
    opts.call_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.timeout_s * 1000.0));
    return external_oracle_connect(o.target, cfg.n_dim, opts);
  }
  return nullptr;
}

std::unique_ptr<LossOracle> make_trial_oracle(const BenchConfig& cfg, Rng& rng, const LatentVector& z1,
                                              const LatentVector& z2) {
  const OracleSpec& o = cfg.oracle;
  if (o.type == "quadexp_family") return std::make_unique<QuadExpOracle>(placed_quadexp(rng, z1, z2, o.quadexp));
  if (o.type == "quadexp") return std::make_unique<QuadExpOracle>(random_quadexp(rng, cfg.n_dim, o.quadexp));
  if (o.type == "rbf_family") return std::make_unique<RbfOracle>(random_rbf_mixture(rng, cfg.n_dim, o.rbf));
  return nullptr;
}

std::vector<AttackTrial> run_trial(const BenchConfig& cfg, std::size_t t, LossOracle* shared) {
  Rng rng(cfg.master_seed + t);
  const LatentVector z1 = sample_latent(rng, cfg.n_dim);
  const LatentVector z2 = sample_latent(rng, cfg.n_dim);

  std::unique_ptr<LossOracle> owned;
  if (!shared) {
    try {
      owned = make_trial_oracle(cfg, rng, z1, z2);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, "oracle '" + cfg.oracle.type + "' for trial " + std::to_string(t) +
                                         ": " + e.what());
    }
  }
  LossOracle& oracle = shared ? *shared : *owned;

  std::vector<AttackTrial> results(cfg.attacks.size());
  for (std::size_t j = 0; j < cfg.attacks.size(); ++j) {
    const AttackSpec& spec = cfg.attacks[j];
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.master_seed), static_cast<std::uint32_t>(cfg.master_seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(j)};
    Rng attack_rng(seq);
    AttackConfig acfg = spec.config;
    acfg.n_dim = cfg.n_dim;
    acfg.seed = attack_rng();

    AttackTrial& r = results[j];
    try {
      AttackOutcome out;
      switch (spec.kind) {
        case AttackKind::Parametric: out = parametric_attack(oracle, z1, z2, acfg); break;
        case AttackKind::Fgsm: out = fgsm(oracle, z1, acfg.epsilon, acfg.fd_step); break;
        case AttackKind::Pgd: out = pgd(oracle, z1, acfg); break;
        case AttackKind::RandomSearch: out = random_search(oracle, z1, spec.random_samples, attack_rng); break;
      }
      r.ok = true;
      r.loss = out.achieved_loss;
      r.eval_calls = static_cast<double>(out.eval_calls);
      r.grad_calls = static_cast<double>(out.grad_calls);
      r.wall_time_s = out.wall_time_s;
      r.fallback = out.diagnostics && out.diagnostics->fallback_used;
    } catch (const std::exception& e) {
      r.error = "trial " + std::to_string(t) + ": " + e.what();
    }
  }
  return results;
}

AttackRow aggregate(const AttackSpec& spec, const std::vector<std::vector<AttackTrial>>& trials, std::size_t j) {
  AttackRow row;
  row.name = spec.name;
  row.kind = to_string(spec.kind);
  row.trials = trials.size();
  std::vector<double> ok_losses;
  double evals = 0.0, grads = 0.0, wall = 0.0, fallbacks = 0.0;
  for (const auto& per_trial : trials) {
    const AttackTrial& r = per_trial[j];
    if (!r.ok) {
      ++row.failed_trials;
      row.trial_losses.push_back(std::numeric_limits<double>::quiet_NaN());
      row.errors.push_back(r.error);
      continue;
    }
    row.trial_losses.push_back(r.loss);
    ok_losses.push_back(r.loss);
    evals += r.eval_calls;
    grads += r.grad_calls;
    wall += r.wall_time_s;
    fallbacks += r.fallback ? 1.0 : 0.0;
  }
  if (ok_losses.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.mean_loss = row.median_loss = row.max_loss = nan;
    return row;
  }
  const double n = static_cast<double>(ok_losses.size());
  double sum = 0.0;
  for (double l : ok_losses) sum += l;
  row.mean_loss = sum / n;
  row.max_loss = *std::max_element(ok_losses.begin(), ok_losses.end());
  std::vector<double> sorted = ok_losses;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  row.median_loss = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  row.mean_eval_calls = evals / n;
  row.mean_grad_calls = grads / n;
  row.mean_wall_time_s = wall / n;
  row.fallback_rate = fallbacks / n;
  return row;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Parametric: return "parametric";
    case AttackKind::Fgsm: return "fgsm";
    case AttackKind::Pgd: return "pgd";
    case AttackKind::RandomSearch: return "random_search";
  }
  return "unknown";
}

void BenchConfig::validate() const {
  if (version != kBenchConfigVersion) {
    throw Error(ErrorKind::Config, "unsupported config version " + std::to_string(version));
  }
  if (n_dim < 2) throw Error(ErrorKind::Config, "n_dim must be >= 2");
  if (n_trials < 1) throw Error(ErrorKind::Config, "n_trials must be >= 1");
  if (!kOracleTypes.count(oracle.type)) throw Error(ErrorKind::Config, "unknown oracle type '" + oracle.type + "'");
  if (oracle.type == "external" && oracle.target.empty()) throw Error(ErrorKind::Config, "external oracle needs a target");
  if (!(oracle.timeout_s > 0.0)) throw Error(ErrorKind::Config, "oracle timeout must be positive");
  std::set<std::string> names;
  for (const auto& a : attacks) {
    if (a.name.empty()) throw Error(ErrorKind::Config, "attack names must be nonempty");
    if (!names.insert(a.name).second) throw Error(ErrorKind::Config, "duplicate attack name '" + a.name + "'");
    AttackConfig c = a.config;
    c.n_dim = n_dim;
    try {
      c.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, "attack '" + a.name + "': " + e.what());
    }
    if (a.kind == AttackKind::RandomSearch && a.random_samples < 0) {
      throw Error(ErrorKind::Config, "attack '" + a.name + "': samples must be >= 0");
    }
  }
}

BenchConfig default_bench_config() {
  BenchConfig cfg;
  cfg.attacks = {
      {"parametric", AttackKind::Parametric, {}, 50},
      {"pgd", AttackKind::Pgd, {}, 50},
      {"fgsm", AttackKind::Fgsm, {}, 50},
      {"random_search", AttackKind::RandomSearch, {}, 50},
  };
  return cfg;
}

BenchConfig parse_bench_config(const json& j) {
  ObjectReader rd(j, "config");
  BenchConfig cfg;
  cfg.version = rd.required<int>("version");
  if (cfg.version != kBenchConfigVersion) {
    throw Error(ErrorKind::Config, "unsupported config version " + std::to_string(cfg.version));
  }
  rd.optional("n_dim", cfg.n_dim);
  rd.optional("n_trials", cfg.n_trials);
  rd.optional("master_seed", cfg.master_seed);
  rd.optional("emit_trials", cfg.emit_trials);
  if (const json* o = rd.child("oracle")) cfg.oracle = parse_oracle(*o);
  const json* attacks = rd.child("attacks");
  if (!attacks || !attacks->is_array()) throw Error(ErrorKind::Config, "config needs an \"attacks\" array");
  for (std::size_t i = 0; i < attacks->size(); ++i) cfg.attacks.push_back(parse_attack((*attacks)[i], i));
  rd.finish();
  cfg.validate();
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "config file " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_bench_config(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

json bench_config_to_json(const BenchConfig& cfg) {
  json attacks = json::array();
  for (const auto& a : cfg.attacks) attacks.push_back(attack_to_json(a));
  return json{{"version", cfg.version},     {"n_dim", cfg.n_dim},
              {"n_trials", cfg.n_trials},   {"master_seed", cfg.master_seed},
              {"emit_trials", cfg.emit_trials}, {"oracle", oracle_to_json(cfg.oracle)},
              {"attacks", std::move(attacks)}};
}

BenchReport run_bench(const BenchConfig& cfg, ExecutionPolicy policy) {
  cfg.validate();
  BenchReport report;
  report.n_dim = cfg.n_dim;
  report.master_seed = cfg.master_seed;
  report.n_trials = cfg.n_trials;
  report.oracle_type = cfg.oracle.type;
  report.config_digest = fnv1a_hex(bench_config_to_json(cfg).dump());
  report.timestamp = utc_timestamp();
  report.include_trials = cfg.emit_trials;

  std::unique_ptr<LossOracle> shared;
  try {
    shared = make_shared_oracle(cfg);
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::Config ? ErrorKind::Config : e.kind(),
                "constructing oracle '" + cfg.oracle.type + "': " + e.what());
  }

  std::vector<std::vector<AttackTrial>> trials(cfg.n_trials);
  std::vector<std::exception_ptr> failures(cfg.n_trials);
  const auto count = static_cast<std::int64_t>(cfg.n_trials);
  const bool parallel = policy == ExecutionPolicy::Parallel && (!shared || shared->thread_safe());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < count; ++t) {
      try {
        trials[t] = run_trial(cfg, static_cast<std::size_t>(t), shared.get());
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t t = 0; t < count; ++t) {
      try {
        trials[t] = run_trial(cfg, static_cast<std::size_t>(t), shared.get());
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  for (std::size_t j = 0; j < cfg.attacks.size(); ++j) report.rows.push_back(aggregate(cfg.attacks[j], trials, j));
  return report;
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::Config, "unknown report format '" + name + "'");
}

json report_to_json(const BenchReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"name", r.name},
             {"kind", r.kind},
             {"trials", r.trials},
             {"failed_trials", r.failed_trials},
             {"mean_loss", r.mean_loss},
             {"median_loss", r.median_loss},
             {"max_loss", r.max_loss},
             {"mean_eval_calls", r.mean_eval_calls},
             {"mean_grad_calls", r.mean_grad_calls},
             {"mean_wall_time_s", r.mean_wall_time_s},
             {"fallback_rate", r.fallback_rate},
             {"errors", r.errors}};
    if (report.include_trials) row["trial_losses"] = r.trial_losses;
    rows.push_back(std::move(row));
  }
  return json{{"version", report.version},
              {"environment",
               {{"n_dim", report.n_dim},
                {"master_seed", report.master_seed},
                {"n_trials", report.n_trials},
                {"oracle", report.oracle_type},
                {"config_digest", report.config_digest},
                {"timestamp", report.timestamp}}},
              {"attacks", std::move(rows)}};
}

BenchReport report_from_json(const json& j) {
  try {
    BenchReport report;
    report.version = j.at("version").get<int>();
    const json& env = j.at("environment");
    report.n_dim = env.at("n_dim").get<Eigen::Index>();
    report.master_seed = env.at("master_seed").get<std::uint64_t>();
    report.n_trials = env.at("n_trials").get<std::size_t>();
    report.oracle_type = env.at("oracle").get<std::string>();
    report.config_digest = env.at("config_digest").get<std::string>();
    report.timestamp = env.at("timestamp").get<std::string>();
    for (const json& r : j.at("attacks")) {
      AttackRow row;
      row.name = r.at("name").get<std::string>();
      row.kind = r.at("kind").get<std::string>();
      row.trials = r.at("trials").get<std::size_t>();
      row.failed_trials = r.at("failed_trials").get<std::size_t>();
      row.mean_loss = number_or_nan(r, "mean_loss");
      row.median_loss = number_or_nan(r, "median_loss");
      row.max_loss = number_or_nan(r, "max_loss");
      row.mean_eval_calls = r.at("mean_eval_calls").get<double>();
      row.mean_grad_calls = r.at("mean_grad_calls").get<double>();
      row.mean_wall_time_s = r.at("mean_wall_time_s").get<double>();
      row.fallback_rate = r.at("fallback_rate").get<double>();
      row.errors = r.at("errors").get<std::vector<std::string>>();
      if (r.contains("trial_losses")) {
        report.include_trials = true;
        for (const json& v : r.at("trial_losses")) {
          row.trial_losses.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
        }
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed bench report: ") + e.what());
  }
}

std::string report_to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "name,mean_loss,median_loss,max_loss,eval_calls,grad_calls,wall_time_s,fallback_rate\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.name) << ',' << format_number(r.mean_loss) << ',' << format_number(r.median_loss) << ','
        << format_number(r.max_loss) << ',' << format_number(r.mean_eval_calls) << ','
        << format_number(r.mean_grad_calls) << ',' << format_number(r.mean_wall_time_s) << ','
        << format_number(r.fallback_rate) << '\n';
  }
  return out.str();
}

void emit_report(const BenchReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write report to " + path.string());
  if (format == ReportFormat::Json) {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    out << report_to_csv(report);
  }
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing report to " + path.string());
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace surfmax
