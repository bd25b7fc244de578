// Command-line harness: phantom generation, measurement, recovery,
// verification, RIP certification and experiment grids.
//
// Exit codes: 0 success, 2 configuration error, 3 convergence failure,
// 4 hypothesis failure during verification.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/experiment.hpp"
#include "ndtv/gradient.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/io.hpp"
#include "ndtv/operators.hpp"
#include "ndtv/phantoms.hpp"
#include "ndtv/rip.hpp"
#include "ndtv/rng.hpp"
#include "ndtv/solver.hpp"
#include "ndtv/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ndtv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitHypothesis = 4;

constexpr std::uint64_t kNoiseStream = 0x6e015e;

struct GenArgs {
  std::string kind = "gradient-sparse-random";
  std::size_t dim = 2, side = 32, sparsity = 8, blocks = 4;
  double amp_lo = 0.5, amp_hi = 1.5;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  PhantomSpec spec;
  spec.kind = phantom_kind_from_name(a.kind);
  spec.d = a.dim;
  spec.side = a.side;
  spec.s = a.sparsity;
  spec.blocks = a.blocks;
  spec.amp_lo = a.amp_lo;
  spec.amp_hi = a.amp_hi;
  spec.seed = a.seed;
  write_signal_ndcs(a.out, make_phantom(spec));
  std::printf("wrote %s\n", a.out.c_str());
  return kExitOk;
}

struct MeasureArgs {
  std::string signal;
  std::string ensemble = "gaussian";
  std::size_t measurements = 0;  // plain ensemble row count
  std::size_t p = 0, q = 0;      // composite counts
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

OpPtr build_measure_op(const MeasureArgs& a, std::size_t d, std::size_t side) {
  const Shape in = Shape::cube(d, side);
  if (a.p > 0 || a.q > 0) {
    if (a.p == 0 || a.q == 0)
      throw ConfigError("measure: --p and --q must be given together");
    OpPtr head = a.ensemble == "bernoulli" ? bernoulli_ensemble(a.p, in, derive_seed(a.seed, 0))
                                           : gaussian_ensemble(a.p, in, derive_seed(a.seed, 0));
    std::vector<OpPtr> bs;
    for (std::size_t axis = 0; axis < d; ++axis) {
      const Shape ds = derivative_shape(d, side, axis);
      bs.push_back(a.ensemble == "bernoulli"
                       ? bernoulli_ensemble(a.q, ds, derive_seed(a.seed, axis + 1))
                       : gaussian_ensemble(a.q, ds, derive_seed(a.seed, axis + 1)));
    }
    return build_composite_M(std::move(head), std::move(bs));
  }
  if (a.measurements == 0)
    throw ConfigError("measure: give --measurements or the composite pair --p/--q");
  return a.ensemble == "bernoulli" ? bernoulli_ensemble(a.measurements, in, a.seed)
                                   : gaussian_ensemble(a.measurements, in, a.seed);
}

int cmd_measure(const MeasureArgs& a) {
  const NdSignal x = read_signal_ndcs(a.signal);
  const OpPtr op = build_measure_op(a, x.dim(), x.side());
  std::vector<cxd> y = op->apply(x.span());
  if (a.epsilon < 0.0) throw ConfigError("measure: --epsilon must be >= 0");
  if (a.epsilon > 0.0) {
    CounterRng rng(derive_seed(a.seed, kNoiseStream), /*stream=*/10);
    std::vector<cxd> xi(y.size());
    for (auto& v : xi) v = rng.next_complex_gaussian();
    const double norm = l2_norm(xi);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += xi[k] * (a.epsilon / norm);
  }
  fs::create_directories(a.out);
  write_text_file(fs::path(a.out) / "operator.json", op->descriptor().dump(2) + "\n");
  write_vector_ndcs(fs::path(a.out) / "y.ndcs", y);
  const json problem = {{"epsilon", a.epsilon},
                        {"d", x.dim()},
                        {"side", x.side()},
                        {"m", y.size()},
                        {"ensemble", a.ensemble},
                        {"seed", a.seed}};
  write_text_file(fs::path(a.out) / "problem.json", problem.dump(2) + "\n");
  std::printf("wrote bundle to %s (m = %zu)\n", a.out.c_str(), y.size());
  return kExitOk;
}

struct SolveArgs {
  std::string bundle;
  std::string variant = "iso";
  double tol = 1e-6;
  int max_iters = 5000;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  const fs::path dir(a.bundle);
  const json problem = json::parse(read_text_file(dir / "problem.json"));
  const json op_desc = json::parse(read_text_file(dir / "operator.json"));
  const OpPtr op = op_from_descriptor(op_desc);
  const std::vector<cxd> y = read_vector_ndcs(dir / "y.ndcs");
  const double eps = problem.at("epsilon").get<double>();

  SolveOptions opts;
  opts.variant = variant_from_name(a.variant);
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  const SolveResult result = opts.variant == SolveVariant::l1_haar
                                 ? solve_l1_haar(*op, y, eps, opts)
                                 : solve_tv(*op, y, eps, opts);

  fs::create_directories(a.out);
  write_signal_ndcs(fs::path(a.out) / "xhat.ndcs", result.xhat);
  json result_json = result.to_json();
  result_json["variant"] = a.variant;
  write_text_file(fs::path(a.out) / "result.json", result_json.dump(2) + "\n");
  std::printf("solve: %s after %d iterations (feasibility gap %.3e, objective %.6g)\n",
              result.converged ? "converged" : "NOT converged", result.iterations,
              result.feasibility_gap, result.objective);
  return result.converged ? kExitOk : kExitNoConvergence;
}

struct VerifyArgs {
  std::string signal, estimate;
  std::size_t sparsity = 8;
  double epsilon = 0.0;
  std::string variant = "iso";
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const NdSignal x = read_signal_ndcs(a.signal);
  const NdSignal xhat = read_signal_ndcs(a.estimate);
  const SolveVariant variant = variant_from_name(a.variant);

  std::vector<BoundReport> reports;
  const auto main_bounds = check_main_bounds(x, xhat, a.sparsity, a.epsilon, variant);
  reports.insert(reports.end(), main_bounds.begin(), main_bounds.end());
  reports.push_back(check_bv_embedding(x));
  reports.push_back(check_cddd_decay(
      x, variant == SolveVariant::aniso ? TvVariant::aniso : TvVariant::iso));

  fs::create_directories(a.out);
  json out = json::array();
  bool hypothesis_failure = false;
  bool bound_failure = false;
  for (const auto& rep : reports) {
    out.push_back(rep.to_json());
    if (rep.status == BoundReport::Status::hypothesis_failed ||
        rep.status == BoundReport::Status::degenerate)
      hypothesis_failure = true;
    if (rep.status == BoundReport::Status::fail) bound_failure = true;
    std::printf("%-18s lhs=%.6g rhs=%.6g constant=%.6g [%s]\n", rep.name.c_str(), rep.lhs,
                rep.rhs, rep.empirical_constant, BoundReport::status_name(rep.status));
  }
  write_text_file(fs::path(a.out) / "report.json", out.dump(2) + "\n");
  write_text_file(fs::path(a.out) / "report.csv", reports_to_csv(reports));
  if (bound_failure) return 1;
  return hypothesis_failure ? kExitHypothesis : kExitOk;
}

struct RipArgs {
  std::string op_file;
  std::size_t order = 1;
  std::string method = "exhaustive";
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  std::uint64_t budget = 2'000'000;
  std::string out;
};

int cmd_rip(const RipArgs& a) {
  const OpPtr op = op_from_descriptor(json::parse(read_text_file(a.op_file)));
  RipCertificate cert;
  if (a.method == "exhaustive")
    cert = rip_constant_exhaustive(*op, a.order, a.budget);
  else if (a.method == "montecarlo")
    cert = rip_constant_montecarlo(*op, a.order, a.trials, a.seed);
  else if (a.method == "gram")
    cert = rip_certificate_gram_bound(*op, a.order);
  else
    throw ConfigError("rip: method must be exhaustive, montecarlo or gram");
  const std::string text = cert.to_json().dump(2) + "\n";
  if (a.out.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text_file(a.out, text);
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& a) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(read_text_file(a.config)));
  const auto cells = run_experiment_grid(cfg);
  fs::create_directories(a.out);
  write_text_file(fs::path(a.out) / "cells.csv", cells_to_csv(cells));
  write_text_file(fs::path(a.out) / "cells.dat", cells_to_table(cells));
  write_text_file(fs::path(a.out) / "config.json", cfg.to_json().dump(2) + "\n");
  std::printf("wrote %zu cells to %s\n", cells.size(), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multidimensional total-variation compressed sensing toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a phantom signal");
  gen_cmd->add_option("--kind", gen.kind,
                      "gradient-sparse-random | piecewise-constant-cubes | step-edge");
  gen_cmd->add_option("--dim", gen.dim, "spatial dimension d");
  gen_cmd->add_option("--side", gen.side, "side length N");
  gen_cmd->add_option("--sparsity", gen.sparsity, "gradient block count s");
  gen_cmd->add_option("--blocks", gen.blocks, "cube count for piecewise-constant-cubes");
  gen_cmd->add_option("--amp-lo", gen.amp_lo, "amplitude range lower end");
  gen_cmd->add_option("--amp-hi", gen.amp_hi, "amplitude range upper end");
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--out", gen.out, "output NDCS file")->required();

  MeasureArgs measure;
  auto* measure_cmd = app.add_subcommand("measure", "measure a signal with a random ensemble");
  measure_cmd->add_option("--signal", measure.signal, "input NDCS signal")->required();
  measure_cmd->add_option("--ensemble", measure.ensemble, "gaussian | bernoulli");
  measure_cmd->add_option("--measurements", measure.measurements, "row count m");
  measure_cmd->add_option("--p", measure.p, "composite: rows of A");
  measure_cmd->add_option("--q", measure.q, "composite: rows of each B_l");
  measure_cmd->add_option("--epsilon", measure.epsilon, "noise norm, applied exactly");
  measure_cmd->add_option("--seed", measure.seed, "random seed");
  measure_cmd->add_option("--out", measure.out, "output bundle directory")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "recover a signal from a measurement bundle");
  solve_cmd->add_option("--bundle", solve.bundle, "bundle directory from measure")->required();
  solve_cmd->add_option("--variant", solve.variant, "iso | aniso | l1haar");
  solve_cmd->add_option("--tol", solve.tol, "stopping tolerance");
  solve_cmd->add_option("--max-iters", solve.max_iters, "iteration cap");
  solve_cmd->add_option("--out", solve.out, "output directory")->required();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "evaluate recovery bounds");
  verify_cmd->add_option("--signal", verify.signal, "true signal NDCS")->required();
  verify_cmd->add_option("--estimate", verify.estimate, "estimate NDCS")->required();
  verify_cmd->add_option("--sparsity", verify.sparsity, "target block sparsity s");
  verify_cmd->add_option("--epsilon", verify.epsilon, "noise level used");
  verify_cmd->add_option("--variant", verify.variant, "iso | aniso");
  verify_cmd->add_option("--out", verify.out, "output directory")->required();

  RipArgs rip;
  auto* rip_cmd = app.add_subcommand("rip", "estimate a restricted-isometry level");
  rip_cmd->add_option("--op", rip.op_file, "operator descriptor JSON")->required();
  rip_cmd->add_option("--order", rip.order, "sparsity order s");
  rip_cmd->add_option("--method", rip.method, "exhaustive | montecarlo | gram");
  rip_cmd->add_option("--trials", rip.trials, "montecarlo support samples");
  rip_cmd->add_option("--seed", rip.seed, "montecarlo seed");
  rip_cmd->add_option("--budget", rip.budget, "exhaustive support budget");
  rip_cmd->add_option("--out", rip.out, "certificate output file (default stdout)");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "run a recovery experiment grid");
  experiment_cmd->add_option("--config", experiment.config, "grid config JSON")->required();
  experiment_cmd->add_option("--out", experiment.out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (measure_cmd->parsed()) return cmd_measure(measure);
    if (solve_cmd->parsed()) return cmd_solve(solve);
    if (verify_cmd->parsed()) return cmd_verify(verify);
    if (rip_cmd->parsed()) return cmd_rip(rip);
    if (experiment_cmd->parsed()) return cmd_experiment(experiment);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
