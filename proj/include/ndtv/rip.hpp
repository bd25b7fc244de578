#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ndtv/operators.hpp"

namespace ndtv {

// Restricted-isometry level estimate for an operator at a given order.
//
// exhaustive and gram-bound certify an upper bound on delta; monte-carlo only
// reports the worst deviation over sampled supports and is therefore a lower
// bound (useful to refute a hypothesis, or to record the probabilistic
// regime, never to certify it).
struct RipCertificate {
  enum class Method { exhaustive, monte_carlo, gram_bound };

  std::size_t order = 0;
  double level = 0.0;
  Method method = Method::exhaustive;
  std::uint64_t supports_examined = 0;

  bool certifies_upper_bound() const { return method != Method::monte_carlo; }
  nlohmann::json to_json() const;
  static RipCertificate from_json(const nlohmann::json& j);
  static std::string method_name(Method m);
};

// delta = max over all s-column supports T of max_i |lambda_i(G_T) - 1|,
// G_T the Gram matrix of the selected unraveled columns. Refuses (BudgetError)
// when C(ncols, s) exceeds the budget, stating the required budget.
RipCertificate rip_constant_exhaustive(const LinearMeasurementOp& op, std::size_t s,
                                       std::uint64_t budget = 2'000'000);

// Worst deviation over `trials` uniformly sampled supports; depends only on
// (seed, trial index).
RipCertificate rip_constant_montecarlo(const LinearMeasurementOp& op, std::size_t s,
                                       std::uint64_t trials, std::uint64_t seed);

// Upper bound valid at every order via the full Gram matrix:
// delta_s <= ||A^H A - I||_2 by eigenvalue interlacing. Cheap certification
// for exact or near isometries.
RipCertificate rip_certificate_gram_bound(const LinearMeasurementOp& op, std::size_t order);

// C(n, k) clamped to `cap` to avoid overflow while budget-checking.
std::uint64_t binomial_capped(std::size_t n, std::size_t k, std::uint64_t cap);

}  // namespace ndtv
