#include "run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "rigp/error.hpp"
#include "rigp/hyper.hpp"
#include "rigp/metrics.hpp"
#include "rigp/samplers.hpp"
#include "rigp/simulate.hpp"

#ifndef RIGP_VERSION
#define RIGP_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace rigp::cli {

namespace {

// Independent random streams derived from the run seed.
enum Stream : std::uint64_t { kSimulate = 1, kChain = 2, kHyper = 3, kIngest = 4 };

struct KernelChoice {
  KernelSpec spec;
  nlohmann::json info;
};

void check_config(const RunConfig& c) {
  static const std::vector<std::string> modes{"simulate", "fit", "evaluate", "predict"};
  if (std::find(modes.begin(), modes.end(), c.mode) == modes.end()) {
    throw ContractViolation("unknown mode '" + c.mode + "'");
  }
  if (c.grid < 1) throw ContractViolation("grid size must be at least 1");
  if (c.thin < 1) throw ContractViolation("thin must be at least 1");
  if (c.replicates < 1 || c.jobs < 1) throw ContractViolation("replicates and jobs must be >= 1");
  if (c.mode == "fit" || c.mode == "predict") {
    if (c.events.empty() && c.bins.empty()) {
      throw ContractViolation(c.mode + " mode needs --events and/or --bins");
    }
  }
  if (c.mode == "predict" && c.points.empty()) {
    throw ContractViolation("predict mode needs --points");
  }
  if (c.mode == "simulate" && c.intensity.empty()) {
    throw ContractViolation("simulate mode needs --intensity");
  }
  if (c.mode == "evaluate" && c.intensity.empty()) {
    throw ContractViolation("evaluate mode needs --truth (ground-truth intensity)");
  }
  for (const auto* path : {&c.events, &c.bins, &c.points}) {
    if (!path->empty() && !fs::exists(*path)) throw ContractViolation("file not found: " + *path);
  }
}

std::pair<double, double> parse_bin_tail(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ContractViolation("--bin-tail expects start:width");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ContractViolation("--bin-tail expects numbers, got '" + text + "'");
  }
}

// Converts trailing events into fixed-width count bins.
void apply_bin_tail(Dataset& data, const RunConfig& c, const DomainSpec& spec) {
  if (c.bin_tail.empty()) return;
  if (!data.bins.empty()) throw ContractViolation("--bin-tail cannot be combined with --bins");
  const auto [start, width] = parse_bin_tail(c.bin_tail);
  const auto boxes = tail_bins(spec.domain, start - spec.origin, width);
  BinnedEvents b = bin_events(data.events, boxes, spec.domain);
  data.events = std::move(b.kept);
  data.bins = std::move(b.bins);
}

KernelChoice choose_kernel(const RunConfig& c, const Dataset& data,
                           const std::optional<IntensitySpec>& truth) {
  KernelChoice k;
  k.info["name"] = c.kernel;
  if (c.kernel == "bm") {
    k.spec = BrownianMotion{1.0};
    k.info["epsilon"] = c.epsilon;
    k.info["gamma_prior"] = {c.alpha, c.beta};
    return k;
  }
  if (c.kernel == "bs") {
    k.spec = BrownianSheet{1.0};
    k.info["epsilon"] = c.epsilon;
    k.info["gamma_prior"] = {c.alpha, c.beta};
    return k;
  }
  if (c.kernel == "product_se") {
    if (c.theta.size() != 4) {
      throw ContractViolation("product_se needs --theta a_x,r_x,a_y,r_y");
    }
    ProductSE p;
    p.amplitude = {c.theta[0], c.theta[2]};
    p.inv_length_sq = {c.theta[1], c.theta[3]};
    k.spec = p;
    k.info["theta"] = c.theta;
    return k;
  }
  if (c.kernel != "se") throw ContractViolation("unknown kernel '" + c.kernel + "'");
  if (c.theta.size() == 2) {
    k.spec = SquaredExponential{c.theta[0], c.theta[1]};
    k.info["theta"] = c.theta;
    k.info["source"] = "user";
    return k;
  }
  if (!c.theta.empty()) throw ContractViolation("se needs --theta amplitude,inv_length_sq");

  MapConfig mc;
  mc.c = c.map_c;
  mc.m_max = c.m_max;
  mc.optimizer.seed = derive_seed(c.seed, kHyper);
  if (c.hyper == "oracle") {
    if (!truth) throw ContractViolation("oracle hyperparameters need --truth");
    const OracleFit fit = fit_oracle_mle(*truth, data, KernelFamily::SquaredExponential, mc);
    k.spec = fit.kernel;
    k.info["theta"] = fit.params;
    k.info["source"] = "oracle_mle";
    k.info["log_density"] = fit.log_density;
    return k;
  }
  if (c.hyper != "map") throw ContractViolation("--hyper must be map or oracle");
  const MapFit fit = fit_map(data, KernelFamily::SquaredExponential, mc);
  k.spec = fit.kernel;
  k.info["theta"] = fit.params;
  k.info["source"] = "weighted_map";
  k.info["m"] = fit.m;
  k.info["lam_star"] = fit.lam_star;
  k.info["objective"] = fit.objective;
  return k;
}

std::optional<IntensitySpec> truth_of(const RunConfig& c) {
  if (c.intensity.empty()) return std::nullopt;
  return IntensitySpec::parse(c.intensity);
}

nlohmann::json header(const RunConfig& c, const std::string& mode) {
  nlohmann::json j;
  j["tool"] = "rigp";
  j["version"] = RIGP_VERSION;
  j["compiler"] = __VERSION__;
  j["mode"] = mode;
  j["seed"] = c.seed;
  j["config"] = to_json(c);
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Dataset simulate_dataset(const RunConfig& c, const DomainSpec& spec, const IntensitySpec& truth) {
  Rng rng = make_rng(c.seed, kSimulate);
  Dataset data(spec.domain);
  data.events = simulate_thinning(truth, spec.domain, rng);
  apply_bin_tail(data, c, spec);
  return data;
}

nlohmann::json do_simulate(const RunConfig& c, const DomainSpec& spec, const fs::path& out) {
  const IntensitySpec truth = IntensitySpec::parse(c.intensity);
  const Dataset data = simulate_dataset(c, spec, truth);
  write_events((out / "events_sim.csv").string(), data.events, spec);
  if (!data.bins.empty()) write_bins((out / "bins_sim.csv").string(), data.bins, spec);
  nlohmann::json j = header(c, "simulate");
  j["intensity"] = truth.describe();
  j["expected_count"] = intensity_integral(truth, spec.domain.bounds(), spec.domain.dim());
  j["n_events"] = data.events.size();
  j["n_bins"] = data.bins.size();
  write_json(out / "report.json", j);
  return j;
}

nlohmann::json do_fit(const RunConfig& c, const DomainSpec& spec, Dataset data,
                      const std::optional<IntensitySpec>& truth, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = spec.domain.dim();
  const KernelChoice kernel = choose_kernel(c, data, truth);

  ChainConfig cc;
  cc.n_burnin = c.burnin;
  cc.n_samples = c.iters;
  cc.thin = c.thin;
  cc.sampler = parse_sampler(c.sampler);
  cc.seed = derive_seed(c.seed, kChain);
  cc.epsilon = c.epsilon;
  cc.theta_prior = GammaPrior{c.alpha, c.beta};
  log(LogLevel::Info, "running " + std::to_string(cc.n_burnin + cc.n_samples * cc.thin) +
                          " iterations (" + c.sampler + ", " + kernel_name(kernel.spec) + ")");
  const PosteriorSamples samples = run_chain(data, kernel.spec, cc);

  std::optional<std::vector<double>> truth_values;
  if (truth) truth_values = eval_intensity(*truth, spec.domain, StateLayout::points(data));
  const EvalReport report = samples.n_draws() >= 2 ? summarize(samples, truth_values) : EvalReport{};

  // quantiles.csv: prediction points, then the total integral, then the
  // individual integral slots when there is more than one.
  const StateLayout& layout = samples.layout;
  std::vector<std::string> labels;
  std::vector<PointQuantiles> rows;
  if (samples.n_draws() >= 2) {
    for (std::size_t i = 0; i < layout.n_grid; ++i) {
      labels.push_back(format_point(spec.to_external(data.grid[i]), dim));
      rows.push_back(report.quantiles[i]);
    }
    const auto begin = static_cast<Eigen::Index>(layout.integral_begin());
    const auto count = static_cast<Eigen::Index>(layout.n_integrals());
    Eigen::MatrixXd total = samples.lam_draws.middleCols(begin, count).rowwise().sum();
    labels.emplace_back("integral");
    rows.push_back(column_quantiles(total).front());
    if (count > 1) {
      for (Eigen::Index j = 0; j < count; ++j) {
        const bool rest = layout.residual_slot && j == 0;
        labels.push_back(rest ? "integral:B0"
                              : "integral:bin" + std::to_string(j + (layout.residual_slot ? 0 : 1)));
        rows.push_back(report.quantiles[static_cast<std::size_t>(begin + j)]);
      }
    }
  }
  {
    std::ofstream q(out / "quantiles.csv");
    if (!q) throw ContractViolation("cannot write " + (out / "quantiles.csv").string());
    write_quantile_csv(q, labels, rows);
  }
  if (!samples.theta_draws.empty()) {
    std::ofstream t(out / "theta_trace.csv");
    t << "draw,theta\n" << std::setprecision(12);
    for (std::size_t i = 0; i < samples.theta_draws.size(); ++i) {
      t << i << ',' << samples.theta_draws[i] << '\n';
    }
  }

  nlohmann::json j = header(c, c.mode);
  j["data"] = {{"n_events", data.events.size()},
               {"n_bins", data.bins.size()},
               {"n_grid", data.grid.size()},
               {"domain", spec.domain.describe()},
               {"origin", spec.origin}};
  j["kernel"] = kernel.info;
  if (truth) j["truth"] = truth->describe();
  if (samples.n_draws() >= 2) {
    nlohmann::json summary = to_json(report);
    summary.erase("quantiles");
    j["summary"] = summary;
  }
  const auto& d = samples.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"retained", samples.n_draws()},
                      {"ess_shrinks", d.ess_shrinks},
                      {"nuts_divergences", d.nuts.divergences},
                      {"nuts_mean_depth", d.nuts.transitions
                                              ? static_cast<double>(d.nuts.depth_sum) /
                                                    static_cast<double>(d.nuts.transitions)
                                              : 0.0},
                      {"nuts_step_size", d.nuts_step_size}};
  j["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out / "report.json", j);
  return j;
}

nlohmann::json run_single(const RunConfig& c, const fs::path& out) {
  fs::create_directories(out);
  const DomainSpec spec = parse_domain(c.domain, c.offset);
  if (c.mode == "simulate") return do_simulate(c, spec, out);

  const auto truth = truth_of(c);
  Rng ingest_rng = make_rng(c.seed, kIngest);
  const std::size_t grid = c.mode == "predict" ? 0 : c.grid;
  Dataset data(spec.domain);
  if (c.mode == "evaluate" && c.events.empty() && c.bins.empty()) {
    data = simulate_dataset(c, spec, *truth);
    write_events((out / "events_sim.csv").string(), data.events, spec);
    if (!data.bins.empty()) write_bins((out / "bins_sim.csv").string(), data.bins, spec);
    data.grid = midpoint_grid(spec.domain, grid);
  } else {
    data = ingest(c.events, c.bins, spec, grid, ingest_rng);
    apply_bin_tail(data, c, spec);
  }
  if (c.mode == "predict") data.grid = read_points(c.points, spec);
  data.validate();
  return do_fit(c, spec, std::move(data), truth, out);
}

nlohmann::json run_replicates(const RunConfig& c) {
  if (c.mode != "simulate" && c.mode != "evaluate") {
    throw ContractViolation("--replicates applies to simulate and evaluate modes");
  }
  if (!c.events.empty() || !c.bins.empty()) {
    throw ContractViolation("--replicates simulates its own data; drop --events/--bins");
  }
  const fs::path root = c.out;
  fs::create_directories(root);
  std::vector<nlohmann::json> results(c.replicates);
  std::vector<std::string> errors(c.replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next++; r < c.replicates; r = next++) {
      RunConfig rc = c;
      rc.replicates = 1;
      rc.jobs = 1;
      rc.seed = derive_seed(c.seed, 1000 + r);
      std::ostringstream name;
      name << "rep_" << std::setw(4) << std::setfill('0') << r;
      rc.out = (root / name.str()).string();
      try {
        results[r] = run_single(rc, rc.out);
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(c.jobs, c.replicates);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t r = 0; r < c.replicates; ++r) {
    if (!errors[r].empty()) {
      throw EstimationFailure("replicate " + std::to_string(r) + " failed: " + errors[r]);
    }
  }

  nlohmann::json j = header(c, c.mode);
  j["replicates"] = c.replicates;
  if (c.mode == "evaluate") {
    std::vector<double> sse, cov, width;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& r : results) {
      const auto& s = r.at("summary");
      per.push_back({{"seed", r.at("seed")},
                     {"sse_grid", s.at("sse_grid")},
                     {"coverage_grid", s.at("coverage_grid")},
                     {"ci_width", s.at("ci_width")}});
      if (s.at("sse_grid").is_number()) sse.push_back(s.at("sse_grid").get<double>());
      if (s.at("coverage_grid").is_number()) cov.push_back(s.at("coverage_grid").get<double>());
      width.push_back(s.at("ci_width").get<double>());
    }
    auto q = [](std::vector<double> v) {
      if (v.empty()) return nlohmann::json(nullptr);
      std::sort(v.begin(), v.end());
      return nlohmann::json{{"q025", quantile_sorted(v, 0.025)},
                            {"median", quantile_sorted(v, 0.5)},
                            {"q975", quantile_sorted(v, 0.975)}};
    };
    j["per_replicate"] = per;
    j["sse_grid"] = q(sse);
    j["coverage_grid"] = q(cov);
    j["ci_width"] = q(width);
  } else {
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& r : results) counts.push_back(r.at("n_events"));
    j["n_events"] = counts;
  }
  write_json(root / "summary.json", j);
  return j;
}

}  // namespace

nlohmann::json run(const RunConfig& config) {
  check_config(config);
  if (config.replicates > 1) return run_replicates(config);
  return run_single(config, config.out);
}

}  // namespace rigp::cli
