#include "ndtv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/rng.hpp"

namespace ndtv {

using nlohmann::json;

namespace {

constexpr double kRelSlack = 1e-12;

double safe_ratio(double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs : 0.0; }

}  // namespace

const char* BoundReport::status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::info: return "info";
    case Status::hypothesis_failed: return "hypothesis-failed";
    case Status::degenerate: return "degenerate";
  }
  return "unknown";
}

json BoundReport::to_json() const {
  return {{"name", name},
          {"lhs", lhs},
          {"rhs", rhs},
          {"rhs_no_constant", rhs_no_constant},
          {"empirical_constant", empirical_constant},
          {"status", status_name(status)},
          {"note", note}};
}

std::string BoundReport::csv_header() { return "name,lhs,rhs,constant,status"; }

std::string BoundReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << name << "," << lhs << "," << rhs << "," << empirical_constant << ","
     << status_name(status);
  return os.str();
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream os;
  os << BoundReport::csv_header() << "\n";
  for (const auto& r : reports) os << r.csv_row() << "\n";
  return os.str();
}

ConeTubeResult check_cone_tube(const MixedField& h, const LinearMeasurementOp& b,
                               const BlockSupport& r, double sigma, double eps,
                               const RipCertificate& cert) {
  const std::size_t d = h.dim();
  const std::size_t s = r.count();
  if (s == 0) throw DomainError("check_cone_tube: empty support");
  if (b.input_size() != h.size())
    throw DimensionError("check_cone_tube: operator input does not match the field size");

  ConeTubeResult out;
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double sqrt_s = std::sqrt(static_cast<double>(s));

  // Hypotheses: tube, cone, certificate.
  const double tube_lhs = l2_norm(b.apply(h.span()));
  const double tube_rhs = std::sqrt(2.0 * static_cast<double>(d)) * eps;
  const bool tube_ok = tube_lhs <= tube_rhs * (1.0 + kRelSlack) + 1e-300;

  const MixedField h_r = restrict_to_support(h, r);
  const MixedField h_rc = zero_on_support(h, r);
  const double on = mixed_l12_norm(h_r);
  const double off = mixed_l12_norm(h_rc);
  const bool cone_ok = off <= (on + sigma) * (1.0 + kRelSlack) + 1e-300;

  const bool cert_claims = cert.order >= 5 * d * s && cert.level < 1.0 / 3.0;
  std::string note;
  if (!tube_ok) note += "tube constraint violated; ";
  if (!cone_ok) note += "cone constraint violated; ";
  if (!cert_claims) note += "RIP certificate below order 5ds at level < 1/3; ";
  if (cert_claims && !cert.certifies_upper_bound())
    note += "probabilistic regime (monte-carlo certificate is a lower bound); ";
  out.hypotheses_ok = tube_ok && cone_ok && cert_claims;
  out.hypothesis_note = note;
  if (!out.hypotheses_ok) {
    for (auto* rep : {&out.h_l2, &out.h_l12, &out.explicit_chain}) {
      rep->status = BoundReport::Status::hypothesis_failed;
      rep->note = note;
    }
    out.h_l2.name = "cone-tube-l2";
    out.h_l12.name = "cone-tube-l12";
    out.explicit_chain.name = "cone-tube-explicit";
    return out;
  }

  out.h_l2.name = "cone-tube-l2";
  out.h_l2.lhs = l2_norm(h.span());
  out.h_l2.rhs_no_constant = sigma / sqrt_s + sqrt_d * eps;
  out.h_l2.rhs = out.h_l2.rhs_no_constant;
  out.h_l2.empirical_constant = safe_ratio(out.h_l2.lhs, out.h_l2.rhs_no_constant);
  out.h_l2.status = BoundReport::Status::info;

  out.h_l12.name = "cone-tube-l12";
  out.h_l12.lhs = mixed_l12_norm(h);
  out.h_l12.rhs_no_constant = sigma + std::sqrt(static_cast<double>(s * d)) * eps;
  out.h_l12.rhs = out.h_l12.rhs_no_constant;
  out.h_l12.empirical_constant = safe_ratio(out.h_l12.lhs, out.h_l12.rhs_no_constant);
  out.h_l12.status = BoundReport::Status::info;

  // R1 = the 4s largest blocks off R.
  const std::size_t off_support = h.pixel_count() - s;
  const auto [r1, unused] = best_s_blocks(h_rc, std::min(4 * s, off_support));
  double joint2 = 0.0;
  for (std::size_t pix : r.pixels)
    for (std::size_t l = 0; l < h.channels(); ++l) joint2 += std::norm(h.at(pix, l));
  for (std::size_t pix : r1.pixels)
    for (std::size_t l = 0; l < h.channels(); ++l) joint2 += std::norm(h.at(pix, l));

  out.explicit_chain.name = "cone-tube-explicit";
  out.explicit_chain.lhs = std::sqrt(joint2);
  out.explicit_chain.rhs = 10.0 * sqrt_d * eps + 3.0 / sqrt_s * sigma;
  out.explicit_chain.rhs_no_constant = sqrt_d * eps + sigma / sqrt_s;
  out.explicit_chain.empirical_constant =
      safe_ratio(out.explicit_chain.lhs, out.explicit_chain.rhs_no_constant);
  out.explicit_chain.status =
      out.explicit_chain.lhs <= out.explicit_chain.rhs * (1.0 + kRelSlack) + 1e-300
          ? BoundReport::Status::pass
          : BoundReport::Status::fail;
  if (!note.empty())
    for (auto* rep : {&out.h_l2, &out.h_l12, &out.explicit_chain}) rep->note = note;
  return out;
}

std::array<BoundReport, 3> check_main_bounds(const NdSignal& x, const NdSignal& xhat,
                                             std::size_t s, double eps, SolveVariant variant) {
  if (x.dim() != xhat.dim() || x.side() != xhat.side())
    throw DimensionError("check_main_bounds: signal and estimate shapes differ");
  const std::size_t d = x.dim();
  const double dd = static_cast<double>(d);
  const double sqrt_s = std::sqrt(static_cast<double>(s));
  const double lognd = dd * std::log(static_cast<double>(x.side()));

  NdSignal diff(d, x.side());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - xhat[i];

  const GradientField gx = gradient(x);
  const auto [support, gx_s] = best_s_blocks(gx, std::min(s, gx.pixel_count()));
  const GradientField tail_field = zero_on_support(gx, support);
  const double tail = mixed_l12_norm(tail_field);
  const GradientField gdiff = gradient(diff);

  const std::string tag = std::string("[") + variant_name(variant) + "]";
  std::array<BoundReport, 3> reports;

  reports[0].name = "main-bound-i" + tag;
  reports[0].lhs = l2_norm(gdiff.span());
  reports[0].rhs_no_constant = tail / sqrt_s + std::sqrt(dd) * eps;

  reports[1].name = "main-bound-ii" + tag;
  reports[1].lhs = mixed_l12_norm(gdiff);
  reports[1].rhs_no_constant = tail + std::sqrt(static_cast<double>(s) * dd) * eps;

  reports[2].name = "main-bound-iii" + tag;
  reports[2].lhs = l2_norm(diff.span());
  reports[2].rhs_no_constant = lognd * (tail / sqrt_s + std::sqrt(dd) * eps);

  for (auto& rep : reports) {
    rep.rhs = rep.rhs_no_constant;
    if (rep.rhs_no_constant > 0.0) {
      rep.empirical_constant = rep.lhs / rep.rhs_no_constant;
      rep.status = BoundReport::Status::info;
    } else if (rep.lhs == 0.0) {
      rep.empirical_constant = 0.0;
      rep.status = BoundReport::Status::info;
      rep.note = "exact recovery of an s-block-sparse gradient at eps = 0";
    } else {
      rep.status = BoundReport::Status::degenerate;
      rep.note = "zero right-hand side with nonzero error";
    }
  }
  return reports;
}

std::vector<BoundReport> check_sobolev(const LinearMeasurementOp& a, const NdSignal& v,
                                       std::size_t s, double eps, const RipCertificate& cert) {
  if (a.input_size() != v.size())
    throw DimensionError("check_sobolev: operator input does not match the signal size");
  if (s == 0) throw DomainError("check_sobolev: s must be >= 1");
  const std::size_t d = v.dim();
  const double dd = static_cast<double>(d);
  const double lognd = dd * std::log(static_cast<double>(v.side()));

  const double tube_lhs = l2_norm(a.apply(v.span()));
  const bool tube_ok = tube_lhs <= eps * (1.0 + kRelSlack) + 1e-300;
  const bool cert_claims = cert.order >= 2 * s && cert.level < 1.0;

  std::vector<BoundReport> reports(2);
  reports[0].name = "sobolev-tv1";
  reports[1].name = "sobolev-tv2";
  if (!tube_ok || !cert_claims) {
    std::string note = !tube_ok ? "tube constraint ||A(v)|| <= eps violated; "
                                : "RIP certificate below order 2s at level < 1; ";
    for (auto& rep : reports) {
      rep.status = BoundReport::Status::hypothesis_failed;
      rep.note = note;
    }
    return reports;
  }
  std::string note;
  if (!cert.certifies_upper_bound())
    note = "probabilistic regime (monte-carlo certificate is a lower bound)";

  const double vnorm = l2_norm(v.span());
  const double tv1 = tv_seminorm(v, TvVariant::aniso);
  const double tv2 = tv_seminorm(v, TvVariant::iso);

  reports[0].lhs = vnorm;
  reports[0].rhs_no_constant = tv1 / std::sqrt(static_cast<double>(s)) * lognd;
  reports[1].lhs = vnorm;
  reports[1].rhs_no_constant = tv2 / std::sqrt(static_cast<double>(s) / dd) * lognd;
  for (auto& rep : reports) {
    rep.rhs = rep.rhs_no_constant + eps;
    rep.empirical_constant = safe_ratio(std::max(0.0, rep.lhs - eps), rep.rhs_no_constant);
    rep.status = rep.rhs_no_constant > 0.0 || rep.lhs <= eps
                     ? BoundReport::Status::info
                     : BoundReport::Status::degenerate;
    rep.note = note;
  }
  return reports;
}

BoundReport check_bv_embedding(const NdSignal& x) {
  if (x.dim() < 2) throw DomainError("check_bv_embedding: requires d >= 2");
  const std::size_t d = x.dim(), n = x.side();
  const double nd = static_cast<double>(n);

  // |f|_BV as the closed-form sum N^{d/2} * N^{1-d} * sum of interior
  // differences, evaluated directly (not through the gradient module).
  double interior = 0.0;
  const Shape cube = x.shape();
  std::vector<std::size_t> idx(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    std::size_t stride = 1;
    for (std::size_t a = d; a-- > axis + 1;) stride *= n;
    for (std::size_t f = 0; f < x.size(); ++f) {
      cube.unflat(f, idx);
      if (idx[axis] + 1 < n) interior += std::abs(x[f + stride] - x[f]);
    }
  }
  const double lhs =
      std::pow(nd, static_cast<double>(d) / 2.0) * std::pow(nd, 1.0 - static_cast<double>(d)) *
      interior;

  BoundReport rep;
  rep.name = "bv-embedding";
  rep.lhs = lhs;
  rep.rhs_no_constant = std::pow(nd, -static_cast<double>(d) / 2.0 + 1.0) *
                        tv_seminorm(x, TvVariant::aniso);
  rep.rhs = rep.rhs_no_constant;
  rep.empirical_constant = safe_ratio(rep.lhs, rep.rhs_no_constant);
  rep.status = rep.lhs <= rep.rhs * (1.0 + kRelSlack) + 1e-300 ? BoundReport::Status::pass
                                                               : BoundReport::Status::fail;
  return rep;
}

BoundReport check_cddd_decay(const NdSignal& x, TvVariant variant) {
  BoundReport rep;
  rep.name = variant == TvVariant::aniso ? "cddd-decay-tv1" : "cddd-decay-tv2";
  const DecayProfile profile = block_decay_profile(x, variant);
  if (profile.degenerate) {
    rep.status = BoundReport::Status::degenerate;
    rep.note = "constant signal: every ratio is 0/0";
    return rep;
  }
  // Report the block attaining the worst ratio.
  const auto worst = std::max_element(
      profile.rows.begin(), profile.rows.end(),
      [](const DecayRow& a, const DecayRow& b) { return a.ratio < b.ratio; });
  rep.lhs = worst->norm;
  rep.rhs_no_constant = worst->bound;
  rep.rhs = worst->bound;
  rep.empirical_constant = profile.empirical_constant;
  rep.status = BoundReport::Status::info;
  rep.note = "worst ratio at k = " + std::to_string(worst->k);
  return rep;
}

ConeTubeInstance make_cone_tube_instance(std::size_t d, std::size_t side, std::size_t s,
                                         const LinearMeasurementOp& b, std::uint64_t seed) {
  CounterRng rng(seed, /*stream=*/5);
  ConeTubeInstance inst;
  inst.h = MixedField(d, side, d);
  for (auto& v : inst.h.values()) v = cxd{rng.next_gaussian(), rng.next_gaussian()};

  const std::size_t pixels = inst.h.pixel_count();
  if (s > pixels) throw DomainError("make_cone_tube_instance: s exceeds the pixel count");
  std::vector<std::size_t> pool(pixels);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pixels - i));
    std::swap(pool[i], pool[j]);
  }
  inst.r.pixels.assign(pool.begin(), pool.begin() + s);
  std::sort(inst.r.pixels.begin(), inst.r.pixels.end());

  // Cone constraint with equality, tube constraint with equality.
  const double on = mixed_l12_norm(restrict_to_support(inst.h, inst.r));
  const double off = mixed_l12_norm(zero_on_support(inst.h, inst.r));
  inst.sigma = std::max(0.0, off - on);
  inst.eps = l2_norm(b.apply(inst.h.span())) / std::sqrt(2.0 * static_cast<double>(d));
  return inst;
}

NullspaceProjector::NullspaceProjector(const LinearMeasurementOp& a) {
  const Shape& s = a.input_shape();
  if (!s.is_cube()) throw DimensionError("NullspaceProjector: operator input must be a cube");
  d_ = s.rank();
  side_ = s.extent(0);
  a_ = a.dense_view();
  Eigen::MatrixXcd gram = a_ * a_.adjoint();
  llt_.compute(gram);
  if (llt_.info() != Eigen::Success)
    throw DomainError("NullspaceProjector: A A^H is singular (rows dependent)");
}

NdSignal NullspaceProjector::project(const NdSignal& w) const {
  if (w.dim() != d_ || w.side() != side_)
    throw DimensionError("NullspaceProjector: signal shape mismatch");
  Eigen::Map<const Eigen::VectorXcd> wv(w.values().data(), w.size());
  Eigen::VectorXcd residual = wv - a_.adjoint() * llt_.solve(a_ * wv);
  std::vector<cxd> out(residual.data(), residual.data() + residual.size());
  return NdSignal(d_, side_, std::move(out));
}

}  // namespace ndtv
