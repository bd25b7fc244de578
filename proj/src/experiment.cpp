#include "ndtv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/parallel.hpp"
#include "ndtv/rng.hpp"
#include "ndtv/verify.hpp"

namespace ndtv {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (d < 2) throw ConfigError("experiment: d must be >= 2");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (sides.empty() || sparsities.empty() || measurements.empty() || epsilons.empty() ||
      variants.empty())
    throw ConfigError("experiment: every grid axis needs at least one value");
  for (auto n : sides)
    if (n == 0) throw ConfigError("experiment: side lengths must be positive");
  for (auto s : sparsities)
    if (s == 0) throw ConfigError("experiment: sparsities must be positive");
  for (auto m : measurements)
    if (m == 0) throw ConfigError("experiment: measurement counts must be positive");
  for (auto e : epsilons)
    if (e < 0.0) throw ConfigError("experiment: noise levels must be >= 0");
  const bool haar_involved =
      std::find(variants.begin(), variants.end(), SolveVariant::l1_haar) != variants.end();
  if (haar_involved)
    for (auto n : sides)
      if (n == 0 || (n & (n - 1)) != 0)
        throw ConfigError("experiment: l1haar requires power-of-two side lengths");
  if (ensemble != "gaussian" && ensemble != "bernoulli")
    throw ConfigError("experiment: ensemble must be gaussian or bernoulli");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.d = j.value("d", cfg.d);
  if (j.contains("sides")) cfg.sides = j.at("sides").get<std::vector<std::size_t>>();
  if (j.contains("sparsities"))
    cfg.sparsities = j.at("sparsities").get<std::vector<std::size_t>>();
  if (j.contains("measurements"))
    cfg.measurements = j.at("measurements").get<std::vector<std::size_t>>();
  if (j.contains("epsilons")) cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("variants")) {
    cfg.variants.clear();
    for (const auto& v : j.at("variants")) cfg.variants.push_back(variant_from_name(v));
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("phantom")) cfg.phantom = phantom_kind_from_name(j.at("phantom"));
  cfg.phantom_blocks = j.value("phantom_blocks", cfg.phantom_blocks);
  cfg.ensemble = j.value("ensemble", cfg.ensemble);
  cfg.success_rel_err = j.value("success_rel_err", cfg.success_rel_err);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json variants_json = json::array();
  for (auto v : variants) variants_json.push_back(variant_name(v));
  return {{"d", d},
          {"sides", sides},
          {"sparsities", sparsities},
          {"measurements", measurements},
          {"epsilons", epsilons},
          {"variants", variants_json},
          {"trials", trials},
          {"seed", seed},
          {"phantom", phantom_kind_name(phantom)},
          {"phantom_blocks", phantom_blocks},
          {"ensemble", ensemble},
          {"success_rel_err", success_rel_err},
          {"max_iters", max_iters},
          {"tol", tol}};
}

TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, std::size_t side, std::size_t s,
                                std::size_t m, double eps, SolveVariant variant,
                                std::size_t cell_index, std::size_t trial) {
  PhantomSpec spec;
  spec.kind = cfg.phantom;
  spec.d = cfg.d;
  spec.side = side;
  spec.s = s;
  spec.blocks = cfg.phantom_blocks;
  spec.seed = derive_seed(cfg.seed, cell_index, trial, 0);
  const NdSignal x = make_phantom(spec);

  const Shape in = Shape::cube(cfg.d, side);
  const std::uint64_t op_seed = derive_seed(cfg.seed, cell_index, trial, 1);
  const OpPtr op = cfg.ensemble == "bernoulli" ? bernoulli_ensemble(m, in, op_seed)
                                               : gaussian_ensemble(m, in, op_seed);

  std::vector<cxd> y = op->apply(x.span());
  if (eps > 0.0) {
    CounterRng noise_rng(derive_seed(cfg.seed, cell_index, trial, 2), /*stream=*/10);
    std::vector<cxd> xi(y.size());
    for (auto& v : xi) v = noise_rng.next_complex_gaussian();
    const double norm = l2_norm(xi);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += xi[k] * (eps / norm);
  }

  SolveOptions opts;
  opts.variant = variant;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tol;
  const SolveResult result = variant == SolveVariant::l1_haar ? solve_l1_haar(*op, y, eps, opts)
                                                              : solve_tv(*op, y, eps, opts);

  TrialOutcome outcome;
  outcome.converged = result.converged;
  double err2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err2 += std::norm(x[i] - result.xhat[i]);
  const double xnorm = l2_norm(x.span());
  outcome.rel_err = xnorm > 0.0 ? std::sqrt(err2) / xnorm : std::sqrt(err2);
  if (variant != SolveVariant::l1_haar) {
    const auto bounds = check_main_bounds(x, result.xhat, s, eps, variant);
    outcome.constant_iii = bounds[2].empirical_constant;
  }
  return outcome;
}

std::vector<CellResult> run_experiment_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    std::size_t side, s, m;
    double eps;
    SolveVariant variant;
  };
  std::vector<Cell> cells;
  for (auto side : cfg.sides)
    for (auto s : cfg.sparsities)
      for (auto m : cfg.measurements)
        for (auto eps : cfg.epsilons)
          for (auto variant : cfg.variants) cells.push_back({side, s, m, eps, variant});

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialOutcome> outcomes(cells.size() * trials);
  parallel_for(outcomes.size(), [&](std::size_t task) {
    const std::size_t cell_index = task / trials;
    const std::size_t trial = task % trials;
    const Cell& c = cells[cell_index];
    outcomes[task] =
        run_recovery_trial(cfg, c.side, c.s, c.m, c.eps, c.variant, cell_index, trial);
  });

  std::vector<CellResult> results(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CellResult& r = results[ci];
    r.side = cells[ci].side;
    r.s = cells[ci].s;
    r.m = cells[ci].m;
    r.eps = cells[ci].eps;
    r.variant = cells[ci].variant;
    r.trials = cfg.trials;
    std::vector<double> constants;
    double err_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[ci * trials + t];
      err_sum += o.rel_err;
      if (o.rel_err <= cfg.success_rel_err) ++r.successes;
      if (!o.converged) ++r.non_converged;
      constants.push_back(o.constant_iii);
    }
    r.success_rate = static_cast<double>(r.successes) / static_cast<double>(cfg.trials);
    r.mean_rel_err = err_sum / static_cast<double>(cfg.trials);
    std::sort(constants.begin(), constants.end());
    r.median_constant_iii = constants[constants.size() / 2];
  }
  return results;
}

namespace {

void cell_columns(std::ostream& os, const CellResult& c, char sep) {
  os << c.side << sep << c.s << sep << c.m << sep << c.eps << sep << variant_name(c.variant)
     << sep << c.trials << sep << c.successes << sep << c.success_rate << sep << c.non_converged
     << sep << c.mean_rel_err << sep << c.median_constant_iii;
}

}  // namespace

std::string cells_to_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os.precision(17);
  os << "side,s,m,eps,variant,trials,successes,success_rate,non_converged,mean_rel_err,"
        "median_constant_iii\n";
  for (const auto& c : cells) {
    cell_columns(os, c, ',');
    os << "\n";
  }
  return os.str();
}

std::string cells_to_table(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os.precision(17);
  os << "# side s m eps variant trials successes success_rate non_converged mean_rel_err "
        "median_constant_iii\n";
  for (const auto& c : cells) {
    cell_columns(os, c, ' ');
    os << "\n";
  }
  return os.str();
}

}  // namespace ndtv
