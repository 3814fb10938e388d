#include "fsmcmc/runner/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fsmcmc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(path + "/" + key, "unknown key");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "/" + key, "wrong type");
  }
}

template <typename T>
T get_required(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path, "missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "/" + key, "wrong type");
  }
}

std::vector<std::array<double, 2>> get_points(const json& j,
                                              const std::string& path) {
  std::vector<std::array<double, 2>> pts;
  if (!j.is_array()) fail(path, "expected an array of [x1, x2] pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) fail(path, "entries must be [x1, x2]");
    pts.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return pts;
}

PriorSpec parse_prior(const json& j, const std::string& path) {
  check_keys(j, path,
             {"basis", "alpha", "scale", "ell", "viscosity", "mode_count"});
  PriorSpec p;
  p.basis = get_or<std::string>(j, "basis", path, p.basis);
  p.alpha = get_or(j, "alpha", path, p.alpha);
  p.scale = get_or(j, "scale", path, p.scale);
  p.ell = get_or(j, "ell", path, p.ell);
  p.viscosity = get_or(j, "viscosity", path, p.viscosity);
  p.mode_count = get_or(j, "mode_count", path, p.mode_count);
  try {
    p.build();  // eager trace-class / parameter gate
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return p;
}

SamplerSpec parse_sampler(const json& j, const std::string& path) {
  check_keys(j, path,
             {"kind", "delta", "beta", "theta", "precond", "blocks",
              "trunc_rate", "sieve_rate", "random_beta", "random_delta",
              "precision", "precision_mode"});
  SamplerSpec s;
  s.kind = get_or<std::string>(j, "kind", path, s.kind);
  static const std::set<std::string> kinds = {
      "pcn", "indep", "rw", "theta-cn", "cnl", "pcnl",
      "mwg", "rtm-pcn", "sieve-pcn"};
  if (!kinds.count(s.kind)) fail(path + "/kind", "unknown sampler '" + s.kind + "'");
  if (j.contains("delta")) s.delta = get_required<double>(j, "delta", path);
  if (j.contains("beta")) s.beta = get_required<double>(j, "beta", path);
  if (s.delta && s.beta) {
    const double implied = beta_from_delta(*s.delta);
    if (std::abs(implied - *s.beta) > 1e-9)
      fail(path, "delta and beta are mutually inconsistent");
  }
  s.theta = get_or(j, "theta", path, s.theta);
  s.precond = get_or<std::string>(j, "precond", path, s.precond);
  if (s.precond != "covariance" && s.precond != "identity")
    fail(path + "/precond", "must be covariance or identity");
  s.blocks = get_or(j, "blocks", path, s.blocks);
  s.trunc_rate = get_or(j, "trunc_rate", path, s.trunc_rate);
  s.sieve_rate = get_or(j, "sieve_rate", path, s.sieve_rate);
  if (j.contains("random_beta")) {
    const auto v = get_required<std::vector<double>>(j, "random_beta", path);
    if (v.size() != 2) fail(path + "/random_beta", "expected [lo, hi]");
    s.random_beta = std::array<double, 2>{v[0], v[1]};
  }
  if (j.contains("random_delta")) {
    const auto v = get_required<std::vector<double>>(j, "random_delta", path);
    if (v.size() != 2) fail(path + "/random_delta", "expected [lo, hi]");
    s.random_delta = std::array<double, 2>{v[0], v[1]};
  }
  if (j.contains("precision")) {
    const auto& pj = j.at("precision");
    check_keys(pj, path + "/precision", {"alpha_sigma", "beta_sigma"});
    PrecisionHyperprior hp;
    hp.alpha_sigma = get_required<double>(pj, "alpha_sigma", path + "/precision");
    hp.beta_sigma = get_required<double>(pj, "beta_sigma", path + "/precision");
    hp.validate();
    s.precision = hp;
  }
  s.precision_mode = get_or<std::string>(j, "precision_mode", path,
                                         s.precision_mode);
  if (s.precision_mode != "gibbs" && s.precision_mode != "marginal")
    fail(path + "/precision_mode", "must be gibbs or marginal");
  try {
    if (s.kind != "mwg") s.proposal().validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return s;
}

ObservableSpec parse_observable(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "x", "xy", "index"});
  ObservableSpec o;
  o.kind = get_required<std::string>(j, "kind", path);
  static const std::set<std::string> kinds = {
      "point", "mode", "kappa_point", "potential",
      "trunc_level", "active_count", "precision"};
  if (!kinds.count(o.kind)) fail(path + "/kind", "unknown observable");
  o.x = get_or(j, "x", path, o.x);
  if (j.contains("xy")) {
    const auto v = get_required<std::vector<double>>(j, "xy", path);
    if (v.size() != 2) fail(path + "/xy", "expected [x1, x2]");
    o.xy = {v[0], v[1]};
  }
  o.index = get_or(j, "index", path, o.index);
  if (o.index < 1) fail(path + "/index", "mode index is 1-based");
  return o;
}

TwinSpec parse_twin(const json& j, const std::string& path) {
  check_keys(j, path,
             {"model", "true_density", "observation_count", "quad_points",
              "weights", "truth", "grid_size", "source_constant",
              "boundary_value", "measurement_points", "viscosity",
              "mode_cutoff", "obs_kind", "obs_times", "station_side",
              "euler_dt", "noise_sigma", "output_name"});
  TwinSpec t;
  t.model = get_required<std::string>(j, "model", path);
  static const std::set<std::string> models = {"density", "linear_gaussian",
                                               "darcy", "stokes"};
  if (!models.count(t.model)) fail(path + "/model", "unknown model");
  t.true_density = get_or<std::string>(j, "true_density", path, t.true_density);
  t.observation_count = get_or(j, "observation_count", path, t.observation_count);
  t.quad_points = get_or(j, "quad_points", path, t.quad_points);
  t.weights = get_or(j, "weights", path, t.weights);
  t.truth = get_or<std::string>(j, "truth", path, t.truth);
  t.grid_size = get_or(j, "grid_size", path, t.grid_size);
  t.source_constant = get_or(j, "source_constant", path, t.source_constant);
  t.boundary_value = get_or(j, "boundary_value", path, t.boundary_value);
  if (j.contains("measurement_points"))
    t.measurement_points =
        get_points(j.at("measurement_points"), path + "/measurement_points");
  t.viscosity = get_or(j, "viscosity", path, t.viscosity);
  t.mode_cutoff = get_or(j, "mode_cutoff", path, t.mode_cutoff);
  t.obs_kind = get_or<std::string>(j, "obs_kind", path, t.obs_kind);
  t.obs_times = get_or(j, "obs_times", path, t.obs_times);
  t.station_side = get_or(j, "station_side", path, t.station_side);
  t.euler_dt = get_or(j, "euler_dt", path, t.euler_dt);
  t.noise_sigma = get_or(j, "noise_sigma", path, t.noise_sigma);
  t.output_name = get_or<std::string>(j, "output_name", path, t.output_name);
  return t;
}

SweepSpec parse_sweep(const json& j, const std::string& path) {
  check_keys(j, path,
             {"mesh_sizes", "scale_grid", "steps_per_cell", "burn_in",
              "proposal_kind", "theta", "precond"});
  SweepSpec s;
  s.mesh_sizes = get_required<std::vector<std::size_t>>(j, "mesh_sizes", path);
  s.scale_grid = get_required<std::vector<double>>(j, "scale_grid", path);
  s.steps_per_cell = get_or(j, "steps_per_cell", path, s.steps_per_cell);
  s.burn_in = get_or(j, "burn_in", path, s.burn_in);
  s.proposal_kind = get_or<std::string>(j, "proposal_kind", path, s.proposal_kind);
  s.theta = get_or(j, "theta", path, s.theta);
  s.precond = get_or<std::string>(j, "precond", path, s.precond);
  if (s.mesh_sizes.empty() || s.scale_grid.empty())
    fail(path, "mesh_sizes and scale_grid must be nonempty");
  static const std::set<std::string> kinds = {"pcn", "rw", "theta-cn"};
  if (!kinds.count(s.proposal_kind))
    fail(path + "/proposal_kind", "must be pcn, rw or theta-cn");
  return s;
}

TuneSpec parse_tune(const json& j, const std::string& path) {
  check_keys(j, path,
             {"target_acceptance", "burst_length", "max_bursts", "c0"});
  TuneSpec t;
  t.target_acceptance = get_or(j, "target_acceptance", path, t.target_acceptance);
  t.burst_length = get_or(j, "burst_length", path, t.burst_length);
  t.max_bursts = get_or(j, "max_bursts", path, t.max_bursts);
  t.c0 = get_or(j, "c0", path, t.c0);
  if (!(t.target_acceptance > 0.0 && t.target_acceptance < 1.0))
    fail(path + "/target_acceptance", "must lie in (0,1)");
  return t;
}

}  // namespace

SpectralPrior PriorSpec::build() const {
  if (basis == "fourier1d")
    return SpectralPrior::fourier1d(alpha, scale, ell, mode_count);
  if (basis == "fourier2d")
    return SpectralPrior::fourier2d(alpha, scale, mode_count);
  if (basis == "stokes")
    return SpectralPrior::stokes_div_free(alpha, scale, viscosity, mode_count);
  throw std::invalid_argument("PriorSpec: unknown basis '" + basis + "'");
}

double SamplerSpec::scalar_step() const {
  if (delta) return *delta;
  if (beta) return delta_from_beta(*beta);
  throw std::invalid_argument("SamplerSpec: needs delta or beta");
}

ProposalConfig SamplerSpec::proposal() const {
  ProposalConfig c;
  if (kind == "pcn" || kind == "rtm-pcn" || kind == "sieve-pcn") {
    c.kind = ProposalKind::kPcn;
    c.delta = scalar_step();
  } else if (kind == "indep") {
    c = ProposalConfig::independence();
  } else if (kind == "rw") {
    c = ProposalConfig::rw(scalar_step(), precond == "identity"
                                              ? Precond::kIdentity
                                              : Precond::kCovariance);
  } else if (kind == "theta-cn") {
    c = ProposalConfig::theta_cn(scalar_step(), theta,
                                 precond == "identity" ? Precond::kIdentity
                                                       : Precond::kCovariance);
  } else if (kind == "cnl") {
    c = ProposalConfig::langevin(scalar_step(), false);
  } else if (kind == "pcnl") {
    c = ProposalConfig::langevin(scalar_step(), true);
  } else {
    throw std::invalid_argument("SamplerSpec: '" + kind +
                                "' has no single-kernel proposal");
  }
  if (random_beta) {
    RandomScaleLaw law;
    law.parameter = RandomScaleLaw::Parameter::kBeta;
    law.lo = (*random_beta)[0];
    law.hi = (*random_beta)[1];
    c.random_scale = law;
  } else if (random_delta) {
    RandomScaleLaw law;
    law.parameter = RandomScaleLaw::Parameter::kDelta;
    law.lo = (*random_delta)[0];
    law.hi = (*random_delta)[1];
    c.random_scale = law;
  }
  return c;
}

std::string SamplerSpec::label() const { return kind; }

std::string ObservableSpec::name() const {
  char buf[64];
  if (kind == "point") {
    std::snprintf(buf, sizeof(buf), "u(%g)", x);
    return buf;
  }
  if (kind == "kappa_point") {
    std::snprintf(buf, sizeof(buf), "kappa(%g,%g)", xy[0], xy[1]);
    return buf;
  }
  if (kind == "mode") {
    std::snprintf(buf, sizeof(buf), "xi_%zu", index);
    return buf;
  }
  return kind;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  check_keys(doc, "/",
             {"kind", "prior", "target", "sampler", "samplers", "length",
              "burn_in", "thin", "replicates", "observables", "seed",
              "output_dir", "twin", "sweep", "tune", "compare_tune",
              "validate_suite", "max_lag"});
  ExperimentConfig c;
  const std::string kind = get_required<std::string>(doc, "kind", "/");
  if (kind == "sample")
    c.kind = ExperimentKind::kSample;
  else if (kind == "sweep")
    c.kind = ExperimentKind::kSweep;
  else if (kind == "tune")
    c.kind = ExperimentKind::kTune;
  else if (kind == "compare")
    c.kind = ExperimentKind::kCompare;
  else if (kind == "twin-generate")
    c.kind = ExperimentKind::kTwinGenerate;
  else if (kind == "validate")
    c.kind = ExperimentKind::kValidate;
  else
    fail("/kind", "unknown experiment kind '" + kind + "'");

  if (doc.contains("prior")) c.prior = parse_prior(doc.at("prior"), "/prior");
  if (doc.contains("target")) {
    const auto& tj = doc.at("target");
    check_keys(tj, "/target", {"model", "dataset"});
    c.target.model = get_or<std::string>(tj, "model", "/target", c.target.model);
    static const std::set<std::string> models = {
        "prior", "density", "linear_gaussian", "darcy", "stokes"};
    if (!models.count(c.target.model)) fail("/target/model", "unknown model");
    c.target.dataset_path = get_or<std::string>(tj, "dataset", "/target", "");
    if (c.target.model != "prior" && c.target.dataset_path.empty())
      fail("/target", "model '" + c.target.model + "' needs a dataset path");
    if (!c.target.dataset_path.empty()) {
      std::ifstream probe(c.target.dataset_path);
      if (!probe)
        fail("/target/dataset",
             "referenced file does not exist: " + c.target.dataset_path);
    }
  }
  if (doc.contains("sampler"))
    c.sampler = parse_sampler(doc.at("sampler"), "/sampler");
  if (doc.contains("samplers")) {
    if (!doc.at("samplers").is_array()) fail("/samplers", "expected an array");
    std::size_t i = 0;
    for (const auto& sj : doc.at("samplers"))
      c.compare_samplers.push_back(
          parse_sampler(sj, "/samplers/" + std::to_string(i++)));
  }
  c.length = get_or(doc, "length", "/", c.length);
  if (doc.contains("burn_in"))
    c.burn_in = get_required<std::size_t>(doc, "burn_in", "/");
  c.thin = get_or(doc, "thin", "/", c.thin);
  if (c.thin < 1) fail("/thin", "must be >= 1");
  c.replicates = get_or(doc, "replicates", "/", c.replicates);
  if (c.replicates < 1) fail("/replicates", "must be >= 1");
  if (doc.contains("observables")) {
    if (!doc.at("observables").is_array())
      fail("/observables", "expected an array");
    std::size_t i = 0;
    for (const auto& oj : doc.at("observables"))
      c.observables.push_back(
          parse_observable(oj, "/observables/" + std::to_string(i++)));
  }
  c.seed = get_or(doc, "seed", "/", c.seed);
  c.output_dir = get_or<std::string>(doc, "output_dir", "/", c.output_dir);
  if (doc.contains("twin")) c.twin = parse_twin(doc.at("twin"), "/twin");
  if (doc.contains("sweep")) c.sweep = parse_sweep(doc.at("sweep"), "/sweep");
  if (doc.contains("tune")) c.tune = parse_tune(doc.at("tune"), "/tune");
  c.compare_tune = get_or(doc, "compare_tune", "/", c.compare_tune);
  c.validate_suite =
      get_or<std::string>(doc, "validate_suite", "/", c.validate_suite);
  c.max_lag = get_or(doc, "max_lag", "/", c.max_lag);

  if (c.kind == ExperimentKind::kSweep && !c.sweep)
    fail("/", "sweep experiments need a 'sweep' block");
  if (c.kind == ExperimentKind::kTwinGenerate && !c.twin)
    fail("/", "twin-generate experiments need a 'twin' block");
  if (c.kind == ExperimentKind::kValidate && c.validate_suite.empty())
    fail("/", "validate experiments need 'validate_suite'");
  if (c.kind == ExperimentKind::kCompare && c.compare_samplers.empty())
    fail("/", "compare experiments need a 'samplers' array");
  if (c.effective_burn_in() >= c.length &&
      (c.kind == ExperimentKind::kSample || c.kind == ExperimentKind::kCompare))
    fail("/burn_in", "burn-in must be smaller than length");
  if (c.observables.empty()) {
    ObservableSpec o;
    o.kind = "point";
    o.x = 0.0;
    c.observables.push_back(o);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config error at /: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config error at /: bad JSON: ") +
                                e.what());
  }
  return parse_config(doc);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  doc["kind"] = experiment_kind_name(c.kind);
  doc["prior"] = {{"basis", c.prior.basis},   {"alpha", c.prior.alpha},
                  {"scale", c.prior.scale},   {"ell", c.prior.ell},
                  {"viscosity", c.prior.viscosity},
                  {"mode_count", c.prior.mode_count}};
  doc["target"] = {{"model", c.target.model},
                   {"dataset", c.target.dataset_path}};
  auto sampler_json = [](const SamplerSpec& s) {
    nlohmann::json sj = {{"kind", s.kind},
                         {"theta", s.theta},
                         {"precond", s.precond},
                         {"blocks", s.blocks},
                         {"trunc_rate", s.trunc_rate},
                         {"sieve_rate", s.sieve_rate},
                         {"precision_mode", s.precision_mode}};
    if (s.delta) sj["delta"] = *s.delta;
    if (s.beta) sj["beta"] = *s.beta;
    if (s.random_beta) sj["random_beta"] = {(*s.random_beta)[0], (*s.random_beta)[1]};
    if (s.random_delta)
      sj["random_delta"] = {(*s.random_delta)[0], (*s.random_delta)[1]};
    if (s.precision)
      sj["precision"] = {{"alpha_sigma", s.precision->alpha_sigma},
                         {"beta_sigma", s.precision->beta_sigma}};
    return sj;
  };
  doc["sampler"] = sampler_json(c.sampler);
  if (!c.compare_samplers.empty()) {
    doc["samplers"] = nlohmann::json::array();
    for (const auto& s : c.compare_samplers)
      doc["samplers"].push_back(sampler_json(s));
  }
  doc["length"] = c.length;
  doc["burn_in"] = c.effective_burn_in();
  doc["thin"] = c.thin;
  doc["replicates"] = c.replicates;
  doc["observables"] = nlohmann::json::array();
  for (const auto& o : c.observables)
    doc["observables"].push_back({{"kind", o.kind},
                                  {"x", o.x},
                                  {"xy", {o.xy[0], o.xy[1]}},
                                  {"index", o.index}});
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  if (c.twin) {
    const auto& t = *c.twin;
    doc["twin"] = {{"model", t.model},
                   {"true_density", t.true_density},
                   {"observation_count", t.observation_count},
                   {"quad_points", t.quad_points},
                   {"weights", t.weights},
                   {"truth", t.truth},
                   {"grid_size", t.grid_size},
                   {"source_constant", t.source_constant},
                   {"boundary_value", t.boundary_value},
                   {"viscosity", t.viscosity},
                   {"mode_cutoff", t.mode_cutoff},
                   {"obs_kind", t.obs_kind},
                   {"obs_times", t.obs_times},
                   {"station_side", t.station_side},
                   {"euler_dt", t.euler_dt},
                   {"noise_sigma", t.noise_sigma},
                   {"output_name", t.output_name}};
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : t.measurement_points) pts.push_back({p[0], p[1]});
    doc["twin"]["measurement_points"] = pts;
  }
  if (c.sweep) {
    doc["sweep"] = {{"mesh_sizes", c.sweep->mesh_sizes},
                    {"scale_grid", c.sweep->scale_grid},
                    {"steps_per_cell", c.sweep->steps_per_cell},
                    {"burn_in", c.sweep->burn_in},
                    {"proposal_kind", c.sweep->proposal_kind},
                    {"theta", c.sweep->theta},
                    {"precond", c.sweep->precond}};
  }
  doc["tune"] = {{"target_acceptance", c.tune.target_acceptance},
                 {"burst_length", c.tune.burst_length},
                 {"max_bursts", c.tune.max_bursts},
                 {"c0", c.tune.c0}};
  doc["compare_tune"] = c.compare_tune;
  doc["validate_suite"] = c.validate_suite;
  doc["max_lag"] = c.max_lag;
  return doc;
}

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSample: return "sample";
    case ExperimentKind::kSweep: return "sweep";
    case ExperimentKind::kTune: return "tune";
    case ExperimentKind::kCompare: return "compare";
    case ExperimentKind::kTwinGenerate: return "twin-generate";
    case ExperimentKind::kValidate: return "validate";
  }
  return "unknown";
}

}  // namespace fsmcmc
