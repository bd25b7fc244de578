#include "ndtv/rip.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/rng.hpp"

namespace ndtv {

using nlohmann::json;

json RipCertificate::to_json() const {
  return {{"order", order},
          {"level", level},
          {"method", method_name(method)},
          {"supports_examined", supports_examined}};
}

RipCertificate RipCertificate::from_json(const json& j) {
  RipCertificate c;
  c.order = j.at("order").get<std::size_t>();
  c.level = j.at("level").get<double>();
  const auto m = j.at("method").get<std::string>();
  if (m == "exhaustive")
    c.method = Method::exhaustive;
  else if (m == "monte-carlo")
    c.method = Method::monte_carlo;
  else if (m == "gram-bound")
    c.method = Method::gram_bound;
  else
    throw FormatError("RipCertificate: unknown method '" + m + "'");
  c.supports_examined = j.at("supports_examined").get<std::uint64_t>();
  return c;
}

std::string RipCertificate::method_name(Method m) {
  switch (m) {
    case Method::exhaustive: return "exhaustive";
    case Method::monte_carlo: return "monte-carlo";
    case Method::gram_bound: return "gram-bound";
  }
  return "unknown";
}

std::uint64_t binomial_capped(std::size_t n, std::size_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r *= (n - k + i) / i, watching the cap before overflow can happen.
    const std::uint64_t num = n - k + i;
    if (r > cap) return cap + 1;
    __uint128_t wide = static_cast<__uint128_t>(r) * num / i;
    if (wide > cap) return cap + 1;
    r = static_cast<std::uint64_t>(wide);
  }
  return r;
}

namespace {

double support_deviation(const Eigen::MatrixXcd& cols, const std::vector<std::size_t>& support) {
  const std::size_t s = support.size();
  Eigen::MatrixXcd sub(cols.rows(), s);
  for (std::size_t i = 0; i < s; ++i) sub.col(i) = cols.col(support[i]);
  Eigen::MatrixXcd gram = sub.adjoint() * sub;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    dev = std::max(dev, std::abs(es.eigenvalues()[i] - 1.0));
  return dev;
}

}  // namespace

RipCertificate rip_constant_exhaustive(const LinearMeasurementOp& op, std::size_t s,
                                       std::uint64_t budget) {
  const std::size_t n = op.input_size();
  if (s == 0 || s > n) throw DomainError("rip_constant_exhaustive: order must be in [1, ncols]");
  const std::uint64_t count = binomial_capped(n, s, budget);
  if (count > budget)
    throw BudgetError("rip_constant_exhaustive: C(" + std::to_string(n) + ", " +
                      std::to_string(s) + ") supports exceed the budget of " +
                      std::to_string(budget) + "; a budget of at least " +
                      std::to_string(binomial_capped(n, s, UINT64_MAX / 2)) + " is required");
  const Eigen::MatrixXcd dense = op.dense_view();

  std::vector<std::size_t> support(s);
  std::iota(support.begin(), support.end(), 0);
  double level = 0.0;
  std::uint64_t examined = 0;
  while (true) {
    level = std::max(level, support_deviation(dense, support));
    ++examined;
    // Next lexicographic s-combination of [0, n).
    std::size_t i = s;
    while (i-- > 0) {
      if (support[i] + (s - i) < n) {
        ++support[i];
        for (std::size_t j = i + 1; j < s; ++j) support[j] = support[j - 1] + 1;
        break;
      }
      if (i == 0) {
        RipCertificate cert;
        cert.order = s;
        cert.level = level;
        cert.method = RipCertificate::Method::exhaustive;
        cert.supports_examined = examined;
        return cert;
      }
    }
  }
}

RipCertificate rip_constant_montecarlo(const LinearMeasurementOp& op, std::size_t s,
                                       std::uint64_t trials, std::uint64_t seed) {
  const std::size_t n = op.input_size();
  if (s == 0 || s > n) throw DomainError("rip_constant_montecarlo: order must be in [1, ncols]");
  if (trials == 0) throw DomainError("rip_constant_montecarlo: trials must be >= 1");
  const Eigen::MatrixXcd dense = op.dense_view();

  double level = 0.0;
  std::vector<std::size_t> pool(n);
  std::vector<std::size_t> support(s);
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, t), /*stream=*/4);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
      std::swap(pool[i], pool[j]);
      support[i] = pool[i];
    }
    level = std::max(level, support_deviation(dense, support));
  }
  RipCertificate cert;
  cert.order = s;
  cert.level = level;
  cert.method = RipCertificate::Method::monte_carlo;
  cert.supports_examined = trials;
  return cert;
}

RipCertificate rip_certificate_gram_bound(const LinearMeasurementOp& op, std::size_t order) {
  const Eigen::MatrixXcd dense = op.dense_view();
  Eigen::MatrixXcd gram = dense.adjoint() * dense;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    dev = std::max(dev, std::abs(es.eigenvalues()[i] - 1.0));
  RipCertificate cert;
  cert.order = order;
  cert.level = dev;
  cert.method = RipCertificate::Method::gram_bound;
  cert.supports_examined = 1;
  return cert;
}

}  // namespace ndtv
