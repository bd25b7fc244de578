#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ndtv/phantoms.hpp"
#include "ndtv/solver.hpp"

namespace ndtv {

// Grid of recovery experiments over (N, s, m, eps, variant).
struct ExperimentConfig {
  std::size_t d = 2;
  std::vector<std::size_t> sides{32};
  std::vector<std::size_t> sparsities{8};
  std::vector<std::size_t> measurements{358};
  std::vector<double> epsilons{0.0};
  std::vector<SolveVariant> variants{SolveVariant::iso};
  int trials = 10;
  std::uint64_t seed = 1;
  PhantomKind phantom = PhantomKind::gradient_sparse_random;
  std::size_t phantom_blocks = 4;
  std::string ensemble = "gaussian";  // gaussian | bernoulli
  double success_rel_err = 1e-3;
  int max_iters = 6000;
  double tol = 1e-6;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CellResult {
  std::size_t side = 0, s = 0, m = 0;
  double eps = 0.0;
  SolveVariant variant = SolveVariant::iso;
  int trials = 0;
  int successes = 0;
  int non_converged = 0;
  double success_rate = 0.0;
  double mean_rel_err = 0.0;
  double median_constant_iii = 0.0;
};

struct TrialOutcome {
  double rel_err = 0.0;
  bool converged = false;
  double constant_iii = 0.0;
};

// One recovery trial, fully determined by (config seed, cell index, trial).
TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, std::size_t side, std::size_t s,
                                std::size_t m, double eps, SolveVariant variant,
                                std::size_t cell_index, std::size_t trial);

// Runs every cell of the grid; trials run concurrently, results are
// schedule-independent.
std::vector<CellResult> run_experiment_grid(const ExperimentConfig& cfg);

std::string cells_to_csv(const std::vector<CellResult>& cells);
std::string cells_to_table(const std::vector<CellResult>& cells);  // gnuplot-friendly

}  // namespace ndtv
