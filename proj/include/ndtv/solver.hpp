#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ndtv/gradient.hpp"
#include "ndtv/operators.hpp"
#include "ndtv/signal.hpp"

namespace ndtv {

enum class SolveVariant { iso, aniso, l1_haar };

const char* variant_name(SolveVariant v);
SolveVariant variant_from_name(const std::string& name);

struct SolveOptions {
  SolveVariant variant = SolveVariant::iso;
  int max_iters = 5000;
  double tol = 1e-6;                // relative primal change at the stop check
  double feas_tol_factor = 1e-5;    // slack allowance: factor * max(eps, ||y||)
  // Primal/dual steps; when unset both default to 0.95 / L with L the
  // certified bound on the stacked operator norm. The product tau*sigma must
  // not exceed 1 / L^2.
  std::optional<double> tau;
  std::optional<double> sigma;
};

struct SolveResult {
  NdSignal xhat;
  int iterations = 0;
  bool converged = false;
  double feasibility_gap = 0.0;  // max(0, ||M(xhat) - y||_2 - eps)
  double rel_change = 0.0;       // last relative primal change
  double objective = 0.0;        // TV(xhat) or ||H xhat||_1
  double step_tau = 0.0;
  double step_sigma = 0.0;
  double op_norm_bound = 0.0;

  nlohmann::json to_json() const;
};

// min TV(z) subject to ||M(z) - y||_2 <= eps, solved by a first-order
// primal-dual saddle-point scheme with group (iso) or entrywise (aniso)
// shrinkage on the gradient dual and a Euclidean-ball projection on the data
// dual. Deterministic: zero initialization, fixed schedule.
SolveResult solve_tv(const LinearMeasurementOp& m, std::span<const cxd> y, double eps,
                     const SolveOptions& opts);

// min ||H z||_1 subject to ||A(z) - y||_2 <= eps (Haar-analysis baseline).
SolveResult solve_l1_haar(const LinearMeasurementOp& a, std::span<const cxd> y, double eps,
                          const SolveOptions& opts);

// Euclidean projection onto the ball of given center and radius.
std::vector<cxd> project_l2_ball(std::span<const cxd> v, std::span<const cxd> center,
                                 double radius);

// Upper estimate of the spectral norm (within about 1%) by power iteration
// with a deterministic start and fixed iteration cap.
double operator_norm_bound(const LinearMeasurementOp& op, int iters = 300);

}  // namespace ndtv
