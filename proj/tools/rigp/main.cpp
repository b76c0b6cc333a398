#include <CLI11.hpp>
#include <cstring>
#include <iostream>

#include "config.hpp"
#include "io.hpp"
#include "rigp/error.hpp"
#include "run.hpp"

#ifndef RIGP_VERSION
#define RIGP_VERSION "unknown"
#endif

namespace {

// The config file supplies defaults; explicit flags override it, so it has to
// be loaded before the flags are bound.
std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  using rigp::cli::RunConfig;
  RunConfig cfg;
  std::string config_path;
  try {
    config_path = find_config(argc, argv);
    if (!config_path.empty()) cfg = rigp::cli::load_config(config_path);
  } catch (const rigp::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Bayesian intensity estimation for Poisson processes (random integral method)",
               "rigp"};
  app.set_version_flag("--version", RIGP_VERSION);
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--mode", cfg.mode, "simulate | fit | evaluate | predict")
      ->check(CLI::IsMember({"simulate", "fit", "evaluate", "predict"}));
  app.add_option("--kernel", cfg.kernel, "bm | bs | se | product_se")
      ->check(CLI::IsMember({"bm", "bs", "se", "product_se"}));
  app.add_option("--theta", cfg.theta, "Fixed kernel hyperparameters, comma separated")
      ->delimiter(',');
  app.add_option("--hyper", cfg.hyper, "SE hyperparameters when --theta is absent: map | oracle")
      ->check(CLI::IsMember({"map", "oracle"}));
  app.add_option("--epsilon", cfg.epsilon, "Regularizer added to the Brownian precision");
  app.add_option("--iters", cfg.iters, "Retained MCMC iterations (before thinning)");
  app.add_option("--burnin", cfg.burnin, "Burn-in iterations");
  app.add_option("--thin", cfg.thin, "Keep every k-th draw");
  app.add_option("--sampler", cfg.sampler, "ess | nuts")->check(CLI::IsMember({"ess", "nuts"}));
  app.add_option("--seed", cfg.seed, "Base random seed");
  app.add_option("--grid", cfg.grid, "Prediction points per axis");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--events", cfg.events, "Event CSV (header t or x,y)");
  app.add_option("--bins", cfg.bins, "Bin CSV (header start,end,count or x0,x1,y0,y1,count)");
  app.add_option("--points", cfg.points, "Prediction points CSV (predict mode)");
  app.add_option("--domain", cfg.domain, "T, a:b or a:b,c:d");
  app.add_option("--offset", cfg.offset, "Kernel coordinate offset per axis")->delimiter(',');
  app.add_option("--intensity,--truth", cfg.intensity,
                 "Intensity: lambda1, lambda2[:s], constant:r, table:k/v, piecewise:e/l");
  app.add_option("--bin-tail", cfg.bin_tail, "start:width, bin events from start onwards");
  app.add_option("--replicates", cfg.replicates, "Independent simulate+fit replicates");
  app.add_option("--jobs", cfg.jobs, "Worker threads for replicates");
  app.add_option("--map-c", cfg.map_c, "Prior weight in the MAP objective");
  app.add_option("--m-max", cfg.m_max, "Largest piecewise-constant resolution in MAP");
  app.add_option("--alpha", cfg.alpha, "Gamma prior shape for the Brownian precision");
  app.add_option("--beta", cfg.beta, "Gamma prior rate for the Brownian precision");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    rigp::cli::run(cfg);
  } catch (const rigp::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
