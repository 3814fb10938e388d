#include "fsmcmc/models/dataset.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fsmcmc {

namespace {

nlohmann::json points_to_json(const std::vector<std::array<double, 2>>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pts) out.push_back({p[0], p[1]});
  return out;
}

std::vector<std::array<double, 2>> points_from_json(const nlohmann::json& j) {
  std::vector<std::array<double, 2>> pts;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("dataset: point entries must be [x1, x2]");
    pts.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return pts;
}

std::vector<double> add_noise(std::vector<double> values, double sigma,
                              RngStream& rng) {
  if (sigma < 0.0)
    throw std::invalid_argument("add_noise: sigma must be >= 0");
  for (auto& v : values) v += sigma * rng.normal();
  return values;
}

}  // namespace

nlohmann::json dataset_to_json(const Dataset& d) {
  nlohmann::json doc;
  doc["model"] = d.model;
  if (d.model == "density") {
    const auto& data = d.density.value();
    doc["ell"] = data.ell;
    doc["quad_points"] = data.quad_points;
    doc["observations"] = data.observations;
  } else if (d.model == "linear_gaussian") {
    const auto& t = d.linear.value();
    doc["weights"] = t.weights;
    doc["data"] = t.data;
    doc["noise_sigma"] = t.noise_sigma;
  } else if (d.model == "darcy") {
    const auto& p = d.darcy.value();
    doc["problem"] = {{"grid_size", p.grid_size},
                      {"source_constant", p.source_constant},
                      {"boundary_value", p.boundary_value},
                      {"measurement_points", points_to_json(p.measurement_points)},
                      {"noise_sigma", p.noise_sigma}};
    doc["data"] = p.data;
  } else if (d.model == "stokes") {
    const auto& p = d.stokes.value();
    doc["problem"] = {
        {"viscosity", p.viscosity},
        {"mode_cutoff", p.mode_cutoff},
        {"obs_kind",
         p.obs_kind == StokesProblem::ObsKind::kEulerian ? "eulerian"
                                                         : "lagrangian"},
        {"obs_times", p.obs_times},
        {"stations", points_to_json(p.stations)},
        {"euler_dt", p.euler_dt},
        {"noise_sigma", p.noise_sigma}};
    doc["data"] = p.data;
  } else {
    throw std::invalid_argument("dataset_to_json: unknown model " + d.model);
  }
  if (d.truth_z) doc["truth"]["z"] = *d.truth_z;
  if (d.truth_name) doc["truth"]["name"] = *d.truth_name;
  if (d.twin_seed) doc["truth"]["seed"] = *d.twin_seed;
  return doc;
}

Dataset dataset_from_json(const nlohmann::json& doc) {
  Dataset d;
  d.model = doc.at("model").get<std::string>();
  if (d.model == "density") {
    DensityData data;
    data.ell = doc.at("ell").get<double>();
    data.quad_points = doc.value("quad_points", std::size_t{1025});
    data.observations = doc.at("observations").get<std::vector<double>>();
    data.validate();
    d.density = std::move(data);
  } else if (d.model == "linear_gaussian") {
    LinearGaussianTarget t;
    t.weights = doc.at("weights").get<std::vector<double>>();
    t.data = doc.at("data").get<std::vector<double>>();
    t.noise_sigma = doc.at("noise_sigma").get<double>();
    d.linear = std::move(t);
  } else if (d.model == "darcy") {
    const auto& pj = doc.at("problem");
    DarcyProblem p;
    p.grid_size = pj.at("grid_size").get<std::size_t>();
    p.source_constant = pj.value("source_constant", 1.0);
    p.boundary_value = pj.value("boundary_value", 0.0);
    p.measurement_points = points_from_json(pj.at("measurement_points"));
    p.noise_sigma = pj.value("noise_sigma", 0.01);
    p.data = doc.value("data", std::vector<double>{});
    p.validate();
    d.darcy = std::move(p);
  } else if (d.model == "stokes") {
    const auto& pj = doc.at("problem");
    StokesProblem p;
    p.viscosity = pj.value("viscosity", 0.1);
    p.mode_cutoff = pj.value("mode_cutoff", std::size_t{100});
    const std::string kind = pj.at("obs_kind").get<std::string>();
    if (kind == "eulerian")
      p.obs_kind = StokesProblem::ObsKind::kEulerian;
    else if (kind == "lagrangian")
      p.obs_kind = StokesProblem::ObsKind::kLagrangian;
    else
      throw std::invalid_argument("dataset: obs_kind must be eulerian|lagrangian");
    p.obs_times = pj.at("obs_times").get<std::vector<double>>();
    p.stations = points_from_json(pj.at("stations"));
    p.euler_dt = pj.value("euler_dt", 0.01);
    p.noise_sigma = pj.value("noise_sigma", 0.01);
    p.data = doc.value("data", std::vector<double>{});
    p.validate();
    d.stokes = std::move(p);
  } else {
    throw std::invalid_argument("dataset_from_json: unknown model " + d.model);
  }
  if (doc.contains("truth")) {
    const auto& t = doc.at("truth");
    if (t.contains("z")) d.truth_z = t.at("z").get<std::vector<double>>();
    if (t.contains("name")) d.truth_name = t.at("name").get<std::string>();
    if (t.contains("seed")) d.twin_seed = t.at("seed").get<std::uint64_t>();
  }
  return d;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return dataset_from_json(doc);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  out << dataset_to_json(dataset).dump(2) << "\n";
}

Dataset make_density_twin(const std::string& true_density, double ell,
                          std::size_t observation_count,
                          std::size_t quad_points, std::uint64_t seed) {
  RngStream rng(seed);
  std::function<double(double)> density;
  if (true_density == "rho1")
    density = [](double x) { return rho1_unnormalized(x); };
  else if (true_density == "rho2")
    density = [ell](double x) { return rho2_unnormalized(x, ell); };
  else
    throw std::invalid_argument("make_density_twin: unknown density " +
                                true_density);
  Dataset d;
  d.model = "density";
  DensityData data;
  data.ell = ell;
  data.quad_points = quad_points;
  data.observations =
      sample_from_density(density, ell, observation_count, rng);
  d.density = std::move(data);
  d.truth_name = true_density;
  d.twin_seed = seed;
  return d;
}

Dataset make_linear_gaussian_twin(const SpectralPrior& prior,
                                  std::vector<double> weights,
                                  double noise_sigma, std::uint64_t seed) {
  RngStream rng(seed);
  CoefficientState truth = prior.sample(rng);
  LinearGaussianTarget t;
  t.weights = std::move(weights);
  t.noise_sigma = noise_sigma;
  t.data.resize(t.weights.size());
  for (std::size_t i = 0; i < t.data.size(); ++i)
    t.data[i] = t.weights[i] * prior.mode_std(i) * truth.z[i];
  t.data = add_noise(std::move(t.data), noise_sigma, rng);

  Dataset d;
  d.model = "linear_gaussian";
  d.linear = std::move(t);
  d.truth_z = truth.z;
  d.twin_seed = seed;
  return d;
}

double darcy_case2_log_perm(double x1, double x2) {
  return 0.1 + std::sin(2.0 * M_PI * x1) + 0.5 * std::cos(4.0 * M_PI * x2) +
         0.5 * std::sin(6.0 * M_PI * x1) * std::cos(6.0 * M_PI * x2);
}

Dataset make_darcy_twin(const SpectralPrior& prior, DarcyProblem problem,
                        const std::string& truth_kind, std::uint64_t seed) {
  RngStream rng(seed);
  Dataset d;
  d.model = "darcy";
  d.twin_seed = seed;

  std::function<double(double, double)> log_perm;
  if (truth_kind == "prior") {
    CoefficientState truth = prior.sample(rng);
    log_perm = [&prior, truth](double x1, double x2) {
      return prior.synthesize_at(truth, x1, x2);
    };
    d.truth_z = truth.z;
  } else if (truth_kind == "case1") {
    log_perm = [](double, double) { return std::log(0.1); };
    d.truth_name = "case1";
  } else if (truth_kind == "case2") {
    log_perm = darcy_case2_log_perm;
    d.truth_name = "case2";
  } else {
    throw std::invalid_argument("make_darcy_twin: unknown truth " + truth_kind);
  }

  const DarcySolution sol = darcy_solve(
      problem.grid_size, log_perm,
      [&](double, double) { return problem.source_constant; },
      problem.boundary_value);
  std::vector<double> forward(problem.measurement_points.size());
  for (std::size_t k = 0; k < forward.size(); ++k)
    forward[k] = sol.at(problem.measurement_points[k][0],
                        problem.measurement_points[k][1]);
  problem.data = add_noise(std::move(forward), problem.noise_sigma, rng);
  d.darcy = std::move(problem);
  return d;
}

Dataset make_stokes_twin(const SpectralPrior& prior, StokesProblem problem,
                         std::uint64_t seed) {
  RngStream rng(seed);
  CoefficientState truth = prior.sample(rng);
  problem.data.clear();
  problem.validate();
  std::vector<double> forward = stokes_forward(truth, problem, prior);
  problem.data = add_noise(std::move(forward), problem.noise_sigma, rng);

  Dataset d;
  d.model = "stokes";
  d.stokes = std::move(problem);
  d.truth_z = truth.z;
  d.twin_seed = seed;
  return d;
}

}  // namespace fsmcmc
