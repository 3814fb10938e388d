#include "fsmcmc/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace fsmcmc {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

AcfResult autocorrelation(const Trace& trace, std::size_t max_lag) {
  const auto values = trace.usable();
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("autocorrelation: trace too short");
  if (max_lag >= n)
    throw std::invalid_argument("autocorrelation: max_lag >= usable length");
  for (const double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("autocorrelation: non-finite trace entry");

  AcfResult result;
  result.acf.assign(max_lag + 1, 0.0);
  result.acf[0] = 1.0;
  bool constant = true;
  for (const double v : values) constant = constant && v == values[0];
  if (constant) {
    result.degenerate = true;
    return result;
  }

  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(n);

  double c0 = 0.0;
  for (const double v : values) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      ck += (values[t] - mean) * (values[t + k] - mean);
    ck /= static_cast<double>(n);  // biased normalization
    result.acf[k] = ck / c0;
  }
  return result;
}

double iact(const Trace& trace, std::size_t max_lag) {
  const AcfResult r = autocorrelation(trace, max_lag);
  if (r.degenerate) return 1.0;
  double acc = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) acc += 2.0 * r.acf[k];
  return acc;
}

SummaryRow summarize(const Trace& trace, std::size_t max_lag) {
  const auto values = trace.usable();
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("summarize: trace too short");

  SummaryRow row;
  row.observable = trace.observable;
  row.n = n;
  row.burn_in = trace.burn_in;
  for (const double v : values) row.mean += v;
  row.mean /= static_cast<double>(n);
  bool constant = true;
  for (const double v : values) constant = constant && v == values[0];
  if (constant) {
    row.mean = values[0];
    row.variance = 0.0;
    row.iact = 1.0;
    row.mcse = 0.0;
    return row;
  }
  for (const double v : values)
    row.variance += (v - row.mean) * (v - row.mean);
  row.variance /= static_cast<double>(n - 1);

  const std::size_t lag = std::min(max_lag, n - 1);
  row.iact = iact(trace, lag);
  row.mcse = std::sqrt(row.variance * std::max(row.iact, 0.0) /
                       static_cast<double>(n));
  return row;
}

std::string summary_json(const std::vector<SummaryRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"observable", r.observable},
                   {"mean", r.mean},
                   {"variance", r.variance},
                   {"mcse", r.mcse},
                   {"iact", r.iact},
                   {"n", r.n},
                   {"burn_in", r.burn_in}});
  }
  return out.dump(2) + "\n";
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "observable,mean,variance,mcse,iact,n,burn_in\n";
  for (const auto& r : rows) {
    out << r.observable << ',' << format_double(r.mean) << ','
        << format_double(r.variance) << ',' << format_double(r.mcse) << ','
        << format_double(r.iact) << ',' << r.n << ',' << r.burn_in << '\n';
  }
  return out.str();
}

AcceptanceCurve acceptance_sweep(const SweepCell& cell,
                                 std::span<const std::size_t> mesh_sizes,
                                 std::span<const double> scale_grid,
                                 std::size_t steps, std::size_t burn_in,
                                 std::uint64_t master_seed, bool parallel) {
  if (mesh_sizes.empty() || scale_grid.empty())
    throw std::invalid_argument("acceptance_sweep: empty grid");
  if (steps == 0) throw std::invalid_argument("acceptance_sweep: steps == 0");

  AcceptanceCurve curve;
  curve.mesh_sizes.assign(mesh_sizes.begin(), mesh_sizes.end());
  curve.scale_grid.assign(scale_grid.begin(), scale_grid.end());
  curve.steps_per_cell = steps;
  curve.seed = master_seed;
  curve.mean_acceptance.assign(mesh_sizes.size(),
                               std::vector<double>(scale_grid.size(), 0.0));

  const std::size_t cells = mesh_sizes.size() * scale_grid.size();
  auto run_cell = [&](std::size_t flat) {
    const std::size_t m = flat / scale_grid.size();
    const std::size_t s = flat % scale_grid.size();
    RngStream rng = RngStream::derive(master_seed, flat + 1);
    curve.mean_acceptance[m][s] =
        cell(mesh_sizes[m], scale_grid[s], steps, burn_in, rng);
  };

  const unsigned workers =
      parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  if (workers <= 1 || cells <= 1) {
    for (std::size_t i = 0; i < cells; ++i) run_cell(i);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells) return;
          run_cell(i);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }
  return curve;
}

std::string acceptance_csv(const AcceptanceCurve& curve) {
  std::ostringstream out;
  out << "mesh,beta,mean_acceptance,steps,seed\n";
  for (std::size_t m = 0; m < curve.mesh_sizes.size(); ++m) {
    for (std::size_t s = 0; s < curve.scale_grid.size(); ++s) {
      out << curve.mesh_sizes[m] << ',' << format_double(curve.scale_grid[s])
          << ',' << format_double(curve.mean_acceptance[m][s]) << ','
          << curve.steps_per_cell << ',' << curve.seed << '\n';
    }
  }
  return out.str();
}

TuneResult tune_step(const BurstRunner& burst, double initial_scale,
                     const TunerOptions& options, RngStream& rng) {
  if (!(options.target_acceptance > 0.0 && options.target_acceptance < 1.0))
    throw std::invalid_argument("tune_step: target acceptance not in (0,1)");
  if (initial_scale <= 0.0)
    throw std::invalid_argument("tune_step: initial scale must be > 0");

  double scale =
      std::clamp(initial_scale, options.scale_min, options.scale_max);
  double mean_acc = 0.0;
  TuneResult result;
  for (std::size_t k = 1; k <= options.max_bursts; ++k) {
    mean_acc = burst(scale, options.burst_length, rng);
    const double ck = options.c0 / std::sqrt(static_cast<double>(k));
    scale *= std::exp(ck * (mean_acc - options.target_acceptance));
    scale = std::clamp(scale, options.scale_min, options.scale_max);
    result.bursts = k;
  }
  result.scale = scale;
  result.final_acceptance = mean_acc;
  const bool pinned =
      scale <= options.scale_min * (1.0 + 1e-12) ||
      scale >= options.scale_max * (1.0 - 1e-12);
  result.saturated =
      pinned || std::abs(mean_acc - options.target_acceptance) >
                    options.settle_tolerance;
  return result;
}

}  // namespace fsmcmc
