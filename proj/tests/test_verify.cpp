#include <doctest.h>

#include <cmath>

#include "ndtv/errors.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/phantoms.hpp"
#include "ndtv/verify.hpp"
#include "haar_oracle.hpp"
#include "test_util.hpp"

using namespace ndtv;
using namespace ndtv::testutil;

namespace {

Shape mixed_shape(std::size_t d, std::size_t n) {
  std::vector<std::size_t> e(d, n);
  e.push_back(d);
  return Shape(std::move(e));
}

}  // namespace

TEST_CASE("cone-tube: zero residual satisfies everything with zero lhs") {
  const std::size_t d = 2, n = 4;
  const auto b = random_orthogonal_op(mixed_shape(d, n), 11);
  const auto cert = rip_certificate_gram_bound(*b, 5 * d * 2);
  MixedField h(d, n, d);
  BlockSupport r;
  r.pixels = {0, 5};
  const auto result = check_cone_tube(h, *b, r, 0.0, 0.0, cert);
  REQUIRE(result.hypotheses_ok);
  CHECK(result.explicit_chain.status == BoundReport::Status::pass);
  CHECK(result.explicit_chain.lhs == 0.0);
  CHECK(result.h_l2.lhs == 0.0);
  CHECK(result.h_l12.lhs == 0.0);
}

TEST_CASE("cone-tube: supported field under an exact isometry passes with slack") {
  const std::size_t d = 2, n = 4, s = 2;
  const auto b = random_orthogonal_op(mixed_shape(d, n), 12);
  const auto cert = rip_certificate_gram_bound(*b, 5 * d * s);
  REQUIRE(cert.level < 1.0 / 3.0);

  MixedField h(d, n, d);
  BlockSupport r;
  r.pixels = {3, 9};
  CounterRng rng(13, 150);
  for (std::size_t pix : r.pixels)
    for (std::size_t l = 0; l < d; ++l) h.at(pix, l) = cxd{rng.next_gaussian(), 0.0};

  // Tube with equality, cone with sigma = 0 (h vanishes off R).
  const double eps = l2_norm(b->apply(h.span())) / std::sqrt(2.0 * d);
  const auto result = check_cone_tube(h, *b, r, 0.0, eps, cert);
  REQUIRE(result.hypotheses_ok);
  CHECK(result.explicit_chain.status == BoundReport::Status::pass);
  CHECK(result.explicit_chain.lhs < result.explicit_chain.rhs);
}

TEST_CASE("cone-tube: constraint-satisfying generator passes 200 random instances") {
  const std::size_t d = 2, n = 8, s = 2;
  const auto b = random_orthogonal_op(mixed_shape(d, n), 14);
  const auto cert = rip_certificate_gram_bound(*b, 5 * d * s);
  for (int rep = 0; rep < 200; ++rep) {
    const auto inst = make_cone_tube_instance(d, n, s, *b, 1000 + rep);
    const auto result = check_cone_tube(inst.h, *b, inst.r, inst.sigma, inst.eps, cert);
    REQUIRE(result.hypotheses_ok);
    CHECK(result.explicit_chain.status == BoundReport::Status::pass);
  }
}

TEST_CASE("cone-tube: violated hypotheses short-circuit, nothing is evaluated") {
  const std::size_t d = 2, n = 4;
  const auto b = random_orthogonal_op(mixed_shape(d, n), 15);
  const auto cert = rip_certificate_gram_bound(*b, 5 * d * 2);
  auto h = random_field(d, n, d, 16);
  BlockSupport r;
  r.pixels = {0, 1};
  // sigma = 0 cannot dominate a generic off-support mass.
  const auto result = check_cone_tube(h, *b, r, 0.0, 1e6, cert);
  CHECK(!result.hypotheses_ok);
  CHECK(result.explicit_chain.status == BoundReport::Status::hypothesis_failed);
  CHECK(result.h_l2.status == BoundReport::Status::hypothesis_failed);
}

TEST_CASE("main bounds: exact recovery gives zero left-hand sides") {
  PhantomSpec spec;
  spec.kind = PhantomKind::gradient_sparse_random;
  spec.d = 2;
  spec.side = 16;
  spec.s = 5;
  spec.seed = 17;
  const auto x = make_phantom(spec);
  const auto reports = check_main_bounds(x, x, 5, 0.0, SolveVariant::iso);
  for (const auto& rep : reports) {
    CHECK(rep.lhs == 0.0);
    CHECK(rep.status == BoundReport::Status::info);
  }
}

TEST_CASE("main bounds report finite constants for imperfect estimates") {
  PhantomSpec spec;
  spec.kind = PhantomKind::piecewise_constant_cubes;
  spec.d = 2;
  spec.side = 16;
  spec.blocks = 4;
  spec.seed = 18;
  const auto x = make_phantom(spec);
  auto xhat = x;
  CounterRng rng(19, 151);
  for (auto& v : xhat.values()) v += cxd{0.01 * rng.next_gaussian(), 0.0};
  const auto reports = check_main_bounds(x, xhat, 4, 0.01, SolveVariant::iso);
  for (const auto& rep : reports) {
    CHECK(rep.status == BoundReport::Status::info);
    CHECK(rep.empirical_constant > 0.0);
    CHECK(std::isfinite(rep.empirical_constant));
  }
}

TEST_CASE("sobolev: zero vector, null-space generator, hypothesis gating") {
  const std::size_t n = 16;
  const auto a = gaussian_ensemble(100, Shape::cube(2, n), 20);
  const std::size_t s = 4;
  const auto cert = rip_constant_montecarlo(*a, 2 * s, 10, 21);
  REQUIRE(cert.level < 1.0);

  const NdSignal zero(2, n);
  const auto zero_reports = check_sobolev(*a, zero, s, 0.0, cert);
  CHECK(zero_reports[0].lhs == 0.0);

  NullspaceProjector projector(*a);
  for (int rep = 0; rep < 5; ++rep) {
    const auto w = random_signal(2, n, 2200 + rep);
    const auto v = projector.project(w);
    const double eps = l2_norm(a->apply(v.span()));
    const auto reports = check_sobolev(*a, v, s, eps * 1.0001, cert);
    for (const auto& r : reports) {
      REQUIRE(r.status == BoundReport::Status::info);
      CHECK(std::isfinite(r.empirical_constant));
      CHECK(r.empirical_constant > 0.0);
    }
  }

  // A generic signal is nowhere near the null space: hypothesis fails.
  const auto far = random_signal(2, n, 23);
  const auto gated = check_sobolev(*a, far, s, 1e-9, cert);
  CHECK(gated[0].status == BoundReport::Status::hypothesis_failed);
}

TEST_CASE("bv embedding: constants, the hand example, 200 random signals") {
  NdSignal constant(2, 4, std::vector<cxd>(16, cxd{7.0, 0.0}));
  const auto flat = check_bv_embedding(constant);
  CHECK(flat.lhs == 0.0);
  CHECK(flat.status == BoundReport::Status::pass);

  // x = [[0,1],[0,1]]: interior differences give |f|_BV = 2 = rhs exactly.
  NdSignal x(2, 2, {cxd{0, 0}, cxd{1, 0}, cxd{0, 0}, cxd{1, 0}});
  const auto rep = check_bv_embedding(x);
  CHECK(rep.lhs == doctest::Approx(2.0));
  CHECK(rep.rhs == doctest::Approx(2.0));
  CHECK(rep.status == BoundReport::Status::pass);

  std::size_t case_id = 0;
  for (std::size_t d : {2, 3})
    for (int i = 0; i < 100; ++i) {
      const auto sig = random_signal(d, d == 2 ? 8 : 4, 3300 + case_id++);
      const auto r = check_bv_embedding(sig);
      CHECK(r.status == BoundReport::Status::pass);
      CHECK(r.lhs <= r.rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("cddd decay: degenerate constants and dense-oracle agreement") {
  NdSignal constant(2, 8, std::vector<cxd>(64, cxd{1.0, 0.0}));
  const auto degenerate = check_cddd_decay(constant, TvVariant::aniso);
  CHECK(degenerate.status == BoundReport::Status::degenerate);

  PhantomSpec spec;
  spec.kind = PhantomKind::step_edge;
  spec.d = 2;
  spec.side = 16;
  const auto edge = make_phantom(spec);
  const auto rep = check_cddd_decay(edge, TvVariant::aniso);
  REQUIRE(rep.status == BoundReport::Status::info);

  // Worst sorted-block ratio recomputed through the dense transform.
  const auto basis = dense_haar_basis(2, 16);
  NdSignal centered = edge;
  cxd mean{0, 0};
  for (const auto& v : edge.values()) mean += v;
  mean /= static_cast<double>(edge.size());
  for (auto& v : centered.values()) v -= mean;
  Eigen::VectorXcd vec(centered.size());
  for (std::size_t i = 0; i < centered.size(); ++i) vec[i] = centered[i];
  const Eigen::VectorXcd coeffs = basis * vec;
  const auto blocks = partition_blocks(haar_forward(centered));
  std::vector<double> norms;
  for (const auto& b : blocks) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < b.size; ++i) s2 += std::norm(coeffs[b.offset + i]);
    norms.push_back(std::sqrt(s2));
  }
  std::sort(norms.begin(), norms.end(), std::greater<double>());
  const double tv = tv_seminorm(edge, TvVariant::aniso);
  double want = 0.0;
  for (std::size_t k = 0; k < norms.size(); ++k)
    want = std::max(want, norms[k] * static_cast<double>(k + 1) / tv);
  CHECK(rep.empirical_constant == doctest::Approx(want).epsilon(1e-9));
}
