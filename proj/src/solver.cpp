#include "ndtv/solver.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/rng.hpp"

namespace ndtv {

using nlohmann::json;

const char* variant_name(SolveVariant v) {
  switch (v) {
    case SolveVariant::iso: return "iso";
    case SolveVariant::aniso: return "aniso";
    case SolveVariant::l1_haar: return "l1haar";
  }
  return "unknown";
}

SolveVariant variant_from_name(const std::string& name) {
  if (name == "iso") return SolveVariant::iso;
  if (name == "aniso") return SolveVariant::aniso;
  if (name == "l1haar" || name == "l1-haar") return SolveVariant::l1_haar;
  throw ConfigError("unknown variant '" + name + "' (expected iso, aniso or l1haar)");
}

json SolveResult::to_json() const {
  return {{"iterations", iterations},
          {"converged", converged},
          {"feasibility_gap", feasibility_gap},
          {"rel_change", rel_change},
          {"objective", objective},
          {"tau", step_tau},
          {"sigma", step_sigma},
          {"op_norm_bound", op_norm_bound}};
}

std::vector<cxd> project_l2_ball(std::span<const cxd> v, std::span<const cxd> center,
                                 double radius) {
  if (v.size() != center.size()) throw DimensionError("project_l2_ball: length mismatch");
  if (radius < 0.0) throw DomainError("project_l2_ball: radius must be >= 0");
  std::vector<cxd> out(v.begin(), v.end());
  double dist2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dist2 += std::norm(v[i] - center[i]);
  const double dist = std::sqrt(dist2);
  if (dist <= radius) return out;
  const double scale = dist > 0.0 ? radius / dist : 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = center[i] + scale * (v[i] - center[i]);
  return out;
}

double operator_norm_bound(const LinearMeasurementOp& op, int iters) {
  const std::size_t n = op.input_size();
  CounterRng rng(0x6e647476u, /*stream=*/7);
  std::vector<cxd> v(n);
  for (auto& z : v) z = cxd{rng.next_gaussian(), rng.next_gaussian()};
  double vnorm = l2_norm(v);
  for (auto& z : v) z /= vnorm;

  std::vector<cxd> w(op.output_length());
  std::vector<cxd> u(n);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    op.apply_into(v, w);
    op.adjoint_into(w, u);
    const double unorm = l2_norm(u);
    if (unorm == 0.0) return 0.0;
    const double prev = lambda;
    lambda = unorm;  // ||K*K v||, v unit
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / unorm;
    if (it > 4 && std::abs(lambda - prev) <= 1e-12 * lambda) break;
  }
  return 1.002 * std::sqrt(lambda);
}

namespace {

struct CubeMeta {
  std::size_t d = 0, side = 0, n = 0;
};

CubeMeta cube_meta(const LinearMeasurementOp& op, const char* who) {
  const Shape& s = op.input_shape();
  if (!s.is_cube())
    throw DimensionError(std::string(who) + ": operator input must be a [N]^d cube, got " +
                         s.to_string());
  return {s.rank(), s.extent(0), s.size()};
}

// Dual prox for the TV term: projection onto the unit ball of the dual norm.
void project_dual_iso(std::vector<cxd>& p, std::size_t channels) {
  const std::size_t pixels = p.size() / channels;
  for (std::size_t pix = 0; pix < pixels; ++pix) {
    double norm2 = 0.0;
    for (std::size_t l = 0; l < channels; ++l) norm2 += std::norm(p[pix * channels + l]);
    const double norm = std::sqrt(norm2);
    if (norm > 1.0)
      for (std::size_t l = 0; l < channels; ++l) p[pix * channels + l] /= norm;
  }
}

void project_dual_aniso(std::vector<cxd>& p) {
  for (auto& z : p) {
    const double a = std::abs(z);
    if (a > 1.0) z /= a;
  }
}

SolveResult run_primal_dual(const LinearMeasurementOp& reg, const LinearMeasurementOp& m,
                            std::span<const cxd> y, double eps, const SolveOptions& opts,
                            const CubeMeta& meta) {
  if (eps < 0.0) throw DomainError("solve: eps must be >= 0");
  if (y.size() != m.output_length())
    throw DimensionError("solve: measurement length " + std::to_string(y.size()) +
                         " does not match the operator output " +
                         std::to_string(m.output_length()));
  if (opts.max_iters < 1) throw DomainError("solve: max_iters must be >= 1");
  if (opts.tol <= 0.0) throw DomainError("solve: tol must be > 0");

  // Certified bound on ||[reg; M]|| for the step sizes.
  struct Stacked final : LinearMeasurementOp {
    const LinearMeasurementOp *a, *b;
    Stacked(const LinearMeasurementOp* a_, const LinearMeasurementOp* b_)
        : LinearMeasurementOp(a_->input_shape(), a_->output_length() + b_->output_length()),
          a(a_),
          b(b_) {}
    void apply_into(std::span<const cxd> x, std::span<cxd> yv) const override {
      a->apply_into(x, yv.subspan(0, a->output_length()));
      b->apply_into(x, yv.subspan(a->output_length()));
    }
    void adjoint_into(std::span<const cxd> yv, std::span<cxd> x) const override {
      std::vector<cxd> t(x.size());
      a->adjoint_into(yv.subspan(0, a->output_length()), x);
      b->adjoint_into(yv.subspan(a->output_length()), t);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += t[i];
    }
    json descriptor() const override { return json(); }
  } stacked(&reg, &m);

  const double op_norm = operator_norm_bound(stacked);
  double tau, sigma;
  if (opts.tau || opts.sigma) {
    if (!(opts.tau && opts.sigma))
      throw DomainError("solve: tau and sigma must be given together");
    tau = *opts.tau;
    sigma = *opts.sigma;
    if (tau <= 0.0 || sigma <= 0.0) throw DomainError("solve: steps must be positive");
    if (tau * sigma > 1.0 / (op_norm * op_norm) * (1.0 + 1e-12))
      throw DomainError("solve: step product exceeds 1/L^2 for the certified L = " +
                        std::to_string(op_norm));
  } else {
    tau = sigma = 0.95 / op_norm;
  }

  const std::size_t n = meta.n;
  const std::size_t reg_len = reg.output_length();
  const std::size_t mlen = m.output_length();
  const double ynorm = l2_norm(std::vector<cxd>(y.begin(), y.end()));
  const double feas_slack = opts.feas_tol_factor * std::max(eps, ynorm);

  std::vector<cxd> z(n, cxd{0, 0}), z_prev(n);
  std::vector<cxd> gz(reg_len, cxd{0, 0}), gz_prev(reg_len, cxd{0, 0});
  std::vector<cxd> mz(mlen, cxd{0, 0}), mz_prev(mlen, cxd{0, 0});
  std::vector<cxd> p(reg_len, cxd{0, 0}), q(mlen, cxd{0, 0});
  std::vector<cxd> pt(reg_len), qt(mlen), ball(mlen), back_reg(n), back_m(n);

  SolveResult result;
  result.step_tau = tau;
  result.step_sigma = sigma;
  result.op_norm_bound = op_norm;

  double feas = 0.0, rel = 0.0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    // Dual ascent on the extrapolated primal (theta = 1).
    for (std::size_t i = 0; i < reg_len; ++i)
      pt[i] = p[i] + sigma * (2.0 * gz[i] - gz_prev[i]);
    if (opts.variant == SolveVariant::iso)
      project_dual_iso(pt, meta.d);
    else
      project_dual_aniso(pt);
    p.swap(pt);

    for (std::size_t k = 0; k < mlen; ++k) qt[k] = q[k] + sigma * (2.0 * mz[k] - mz_prev[k]);
    for (std::size_t k = 0; k < mlen; ++k) ball[k] = qt[k] / sigma;
    auto proj = project_l2_ball(ball, y, eps);
    for (std::size_t k = 0; k < mlen; ++k) q[k] = qt[k] - sigma * proj[k];

    // Primal descent.
    reg.adjoint_into(p, back_reg);
    m.adjoint_into(q, back_m);
    z_prev.swap(z);
    for (std::size_t i = 0; i < n; ++i) z[i] = z_prev[i] - tau * (back_reg[i] + back_m[i]);

    gz_prev.swap(gz);
    reg.apply_into(z, gz);
    mz_prev.swap(mz);
    m.apply_into(z, mz);

    double dz2 = 0.0, z2 = 0.0, f2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dz2 += std::norm(z[i] - z_prev[i]);
      z2 += std::norm(z[i]);
    }
    for (std::size_t k = 0; k < mlen; ++k) f2 += std::norm(mz[k] - y[k]);
    feas = std::max(0.0, std::sqrt(f2) - eps);
    rel = z2 > 0.0 ? std::sqrt(dz2 / z2) : std::sqrt(dz2);
    if (rel <= opts.tol && feas <= feas_slack) {
      ++it;
      result.converged = true;
      break;
    }
  }

  result.iterations = it;
  result.feasibility_gap = feas;
  result.rel_change = rel;
  result.xhat = NdSignal(meta.d, meta.side, std::move(z));
  return result;
}

}  // namespace

SolveResult solve_tv(const LinearMeasurementOp& m, std::span<const cxd> y, double eps,
                     const SolveOptions& opts) {
  const CubeMeta meta = cube_meta(m, "solve_tv");
  if (meta.d < 2) throw DomainError("solve_tv: requires d >= 2");
  if (opts.variant == SolveVariant::l1_haar)
    throw DomainError("solve_tv: use solve_l1_haar for the l1haar variant");
  const OpPtr grad = gradient_op(meta.d, meta.side);
  SolveResult result = run_primal_dual(*grad, m, y, eps, opts, meta);
  result.objective = tv_seminorm(result.xhat, opts.variant == SolveVariant::iso
                                                  ? TvVariant::iso
                                                  : TvVariant::aniso);
  return result;
}

SolveResult solve_l1_haar(const LinearMeasurementOp& a, std::span<const cxd> y, double eps,
                          const SolveOptions& opts) {
  const CubeMeta meta = cube_meta(a, "solve_l1_haar");
  const OpPtr haar = haar_op(meta.d, meta.side);
  SolveOptions local = opts;
  local.variant = SolveVariant::aniso;  // entrywise shrinkage on coefficients
  SolveResult result = run_primal_dual(*haar, a, y, eps, local, meta);
  result.objective = lp_norm(haar_forward(result.xhat).flat, 1.0);
  return result;
}

}  // namespace ndtv
