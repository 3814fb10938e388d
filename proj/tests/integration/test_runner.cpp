#include <doctest.h>

#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "fsmcmc/runner/run.hpp"
#include "fsmcmc/runner/validate.hpp"

using namespace fsmcmc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "fsmcmc_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig twin_linear_config(const fs::path& out, std::uint64_t seed,
                                    double noise_sigma) {
  nlohmann::json doc = {
      {"kind", "twin-generate"},
      {"prior",
       {{"basis", "fourier1d"}, {"alpha", 2.0}, {"mode_count", 8},
        {"ell", 10.0}}},
      {"twin",
       {{"model", "linear_gaussian"}, {"noise_sigma", noise_sigma}}},
      {"seed", seed},
      {"output_dir", out.string()}};
  return parse_config(doc);
}

ExperimentConfig sample_config(const std::string& dataset,
                               const fs::path& out, std::uint64_t seed,
                               std::size_t replicates) {
  nlohmann::json doc = {
      {"kind", "sample"},
      {"prior",
       {{"basis", "fourier1d"}, {"alpha", 2.0}, {"mode_count", 8},
        {"ell", 10.0}}},
      {"target", {{"model", "linear_gaussian"}, {"dataset", dataset}}},
      {"sampler", {{"kind", "pcn"}, {"beta", 0.4}}},
      {"length", 20000},
      {"burn_in", 2000},
      {"replicates", replicates},
      {"observables",
       nlohmann::json::array({{{"kind", "mode"}, {"index", 1}}})},
      {"seed", seed},
      {"output_dir", out.string()}};
  return parse_config(doc);
}

}  // namespace

TEST_CASE("runs are bitwise reproducible for a fixed config and seed") {
  const fs::path twin_dir = scratch_dir("twin_repro");
  REQUIRE(run_experiment(twin_linear_config(twin_dir, 7, 0.3)).exit_code == 0);
  const std::string dataset = (twin_dir / "dataset.json").string();

  // Identical config (including the output directory) run twice.
  const fs::path a = scratch_dir("repro_a");
  REQUIRE(run_experiment(sample_config(dataset, a, 99, 1)).exit_code == 0);
  std::map<std::string, std::string> first;
  for (const char* name : {"manifest.json", "summary.json", "summary.csv",
                           "trace_xi_1.csv"})
    first[name] = slurp(a / name);
  fs::remove_all(a);
  REQUIRE(run_experiment(sample_config(dataset, a, 99, 1)).exit_code == 0);
  for (const auto& [name, content] : first) CHECK(slurp(a / name) == content);

  // A different seed changes the traces.
  const fs::path c = scratch_dir("repro_c");
  REQUIRE(run_experiment(sample_config(dataset, c, 100, 1)).exit_code == 0);
  CHECK(slurp(a / "trace_xi_1.csv") != slurp(c / "trace_xi_1.csv"));
}

TEST_CASE("manifest echoes the config with defaults and the rng contract") {
  const fs::path twin_dir = scratch_dir("twin_manifest");
  REQUIRE(run_experiment(twin_linear_config(twin_dir, 3, 0.5)).exit_code == 0);
  const std::string dataset = (twin_dir / "dataset.json").string();

  const fs::path out = scratch_dir("manifest");
  ExperimentConfig config = sample_config(dataset, out, 5, 1);
  REQUIRE(run_experiment(config).exit_code == 0);

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.contains("version"));
  CHECK(manifest.at("rng").get<std::string>().find("mt19937_64") !=
        std::string::npos);
  const auto& echo = manifest.at("config");
  CHECK(echo.at("burn_in") == 2000);
  CHECK(echo.at("thin") == 1);
  CHECK(echo.at("prior").at("scale") == 1.0);
  CHECK(manifest.contains("phi_at_truth"));
  // Outputs contain no wall-clock data; timing lives in its own file.
  CHECK(fs::exists(out / "timing.txt"));
}

TEST_CASE("zero-noise twin reports zero potential at the truth") {
  const fs::path twin_dir = scratch_dir("twin_zero_noise");
  REQUIRE(run_experiment(twin_linear_config(twin_dir, 11, 0.0)).exit_code == 0);
  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(twin_dir / "manifest.json"));
  CHECK(manifest.at("phi_at_truth").get<double>() == 0.0);
}

TEST_CASE("replicates from one master seed agree within their MCSE") {
  const fs::path twin_dir = scratch_dir("twin_multi");
  REQUIRE(run_experiment(twin_linear_config(twin_dir, 21, 0.4)).exit_code == 0);
  const std::string dataset = (twin_dir / "dataset.json").string();

  const fs::path out = scratch_dir("multi");
  ExperimentConfig config = sample_config(dataset, out, 77, 4);
  config.length = 40000;
  REQUIRE(run_experiment(config).exit_code == 0);

  const nlohmann::json summary =
      nlohmann::json::parse(slurp(out / "summary.json"));
  REQUIRE(summary.size() == 4);
  std::vector<double> means;
  std::vector<double> mcses;
  for (const auto& row : summary) {
    means.push_back(row.at("mean").get<double>());
    mcses.push_back(row.at("mcse").get<double>());
  }
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      const double gap = std::abs(means[i] - means[j]);
      const double tol =
          3.0 * std::sqrt(mcses[i] * mcses[i] + mcses[j] * mcses[j]);
      CHECK(gap <= tol);
    }
}

TEST_CASE("chains on distinct streams are uncorrelated") {
  const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, 4);
  const Target target = prior_target();
  SamplerSpec sampler;
  sampler.kind = "pcn";
  sampler.beta = 0.8;
  ObservableSpec obs;
  obs.kind = "mode";
  obs.index = 1;

  RngStream rng_a = RngStream::derive(123, 1);
  RngStream rng_b = RngStream::derive(123, 2);
  const auto chain_a =
      run_chain(prior, target, sampler, {obs}, 20000, 0, rng_a);
  const auto chain_b =
      run_chain(prior, target, sampler, {obs}, 20000, 0, rng_b);

  double cross = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t s = 0; s < 20000; ++s) {
    cross += chain_a.traces[0].values[s] * chain_b.traces[0].values[s];
    var_a += chain_a.traces[0].values[s] * chain_a.traces[0].values[s];
    var_b += chain_b.traces[0].values[s] * chain_b.traces[0].values[s];
  }
  const double corr = cross / std::sqrt(var_a * var_b);
  // Correlated steps inflate the naive SE; the pCN chain at beta=0.8 has
  // IACT about (2-b^2)/b^2 ~ 2, so allow that factor.
  CHECK(std::abs(corr) < 3.0 * std::sqrt(2.0 / 20000.0));
}

TEST_CASE("compare experiment emits one row per sampler") {
  const fs::path twin_dir = scratch_dir("twin_compare");
  nlohmann::json twin_doc = {
      {"kind", "twin-generate"},
      {"prior",
       {{"basis", "fourier1d"}, {"alpha", 2.0}, {"mode_count", 16},
        {"ell", 10.0}}},
      {"twin",
       {{"model", "density"}, {"true_density", "rho1"},
        {"observation_count", 40}}},
      {"seed", 9},
      {"output_dir", twin_dir.string()}};
  REQUIRE(run_experiment(parse_config(twin_doc)).exit_code == 0);

  const fs::path out = scratch_dir("compare");
  nlohmann::json doc = {
      {"kind", "compare"},
      {"prior",
       {{"basis", "fourier1d"}, {"alpha", 2.0}, {"mode_count", 16},
        {"ell", 10.0}}},
      {"target",
       {{"model", "density"},
        {"dataset", (twin_dir / "dataset.json").string()}}},
      {"samplers", nlohmann::json::array(
                       {{{"kind", "mwg"}},
                        {{"kind", "pcn"}, {"beta", 0.5}},
                        {{"kind", "rtm-pcn"}, {"beta", 0.5},
                         {"trunc_rate", 0.01}}})},
      {"length", 4000},
      {"burn_in", 400},
      {"tune", {{"max_bursts", 20}}},
      {"observables",
       nlohmann::json::array({{{"kind", "point"}, {"x", 0.0}}})},
      {"seed", 31},
      {"output_dir", out.string()}};
  REQUIRE(run_experiment(parse_config(doc)).exit_code == 0);

  const std::string csv = slurp(out / "compare.csv");
  CHECK(csv.rfind("algorithm,delta,mean_acceptance,iact,steps\n", 0) == 0);
  CHECK(csv.find("mwg,") != std::string::npos);
  CHECK(csv.find("pcn,") != std::string::npos);
  CHECK(csv.find("rtm-pcn,") != std::string::npos);
}

TEST_CASE("sweep outputs are deterministic") {
  const fs::path a = scratch_dir("sweep_a");
  const fs::path b = scratch_dir("sweep_b");
  nlohmann::json doc = {
      {"kind", "sweep"},
      {"prior",
       {{"basis", "fourier1d"}, {"alpha", 2.0}, {"mode_count", 8},
        {"ell", 10.0}}},
      {"target", {{"model", "prior"}}},
      {"sweep",
       {{"mesh_sizes", {4, 8}}, {"scale_grid", {0.2, 0.6}},
        {"steps_per_cell", 2000}, {"burn_in", 100},
        {"proposal_kind", "rw"}}},
      {"seed", 17},
      {"output_dir", a.string()}};
  REQUIRE(run_experiment(parse_config(doc)).exit_code == 0);
  doc["output_dir"] = b.string();
  REQUIRE(run_experiment(parse_config(doc)).exit_code == 0);
  CHECK(slurp(a / "acceptance.csv") == slurp(b / "acceptance.csv"));
}

TEST_CASE("validate dispatch lists available suites on bad input") {
  try {
    run_suite("not-a-suite", 1);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("prior-preservation") != std::string::npos);
    CHECK(msg.find("sieve-detailed-balance") != std::string::npos);
  }
}

TEST_CASE("gradient-check suite passes") {
  const SuiteResult result = run_suite("gradient-check", 5);
  CHECK(result.pass);
}
