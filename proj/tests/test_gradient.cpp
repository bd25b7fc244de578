#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ndtv/errors.hpp"
#include "ndtv/gradient.hpp"
#include "test_util.hpp"

using namespace ndtv;
using namespace ndtv::testutil;

namespace {

// Row-major 2d helper: x[i][j] with i = axis 0, j = axis 1 (0-based).
NdSignal signal2d(std::size_t n, const std::vector<double>& rows) {
  std::vector<cxd> v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) v[i] = cxd{rows[i], 0.0};
  return NdSignal(2, n, std::move(v));
}

cxd field_inner(const MixedField& a, const MixedField& b) {
  cxd acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * std::conj(b.values()[i]);
  return acc;
}

}  // namespace

TEST_CASE("directional derivative of a constant is zero") {
  NdSignal x(2, 3, std::vector<cxd>(9, cxd{5.0, 0.0}));
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const auto der = directional_derivative(x, axis);
    for (const auto& v : der.values()) CHECK(v == cxd{0.0, 0.0});
  }
}

TEST_CASE("directional derivative: rows (1,2,4) differ to (1,2) along axis 2") {
  const auto x = signal2d(3, {1, 2, 4, 1, 2, 4, 1, 2, 4});
  const auto der = directional_derivative(x, 1);
  REQUIRE(der.shape() == Shape({3, 2}));
  for (std::size_t row = 0; row < 3; ++row) {
    CHECK(der[row * 2 + 0] == cxd{1.0, 0.0});
    CHECK(der[row * 2 + 1] == cxd{2.0, 0.0});
  }
}

TEST_CASE("directional derivative matches a scalar-loop oracle exactly") {
  const auto x = random_signal(3, 4, 77);
  const Shape cube = x.shape();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const auto der = directional_derivative(x, axis);
    const Shape ds = der.shape();
    std::vector<std::size_t> idx(3);
    for (std::size_t f = 0; f < ds.size(); ++f) {
      ds.unflat(f, idx);
      auto up = idx;
      ++up[axis];
      const cxd want = x[cube.flat(up)] - x[cube.flat(idx)];
      CHECK(der[f] == want);
    }
  }
  CHECK_THROWS_AS(directional_derivative(x, 3), DomainError);
}

TEST_CASE("gradient of [[0,1],[0,1]] has exactly two unit entries in channel 2") {
  const auto x = signal2d(2, {0, 1, 0, 1});
  const auto g = gradient(x);
  std::size_t nonzero = 0;
  for (std::size_t p = 0; p < g.pixel_count(); ++p)
    for (std::size_t l = 0; l < 2; ++l)
      if (g.at(p, l) != cxd{0.0, 0.0}) {
        ++nonzero;
        CHECK(l == 1);
        CHECK(g.at(p, l) == cxd{1.0, 0.0});
      }
  CHECK(nonzero == 2);
}

TEST_CASE("gradient vanishes on the trailing face of each axis") {
  const auto x = random_signal(3, 4, 5);
  const auto g = gradient(x);
  const Shape cube = x.shape();
  std::vector<std::size_t> idx(3);
  for (std::size_t p = 0; p < g.pixel_count(); ++p) {
    cube.unflat(p, idx);
    for (std::size_t l = 0; l < 3; ++l)
      if (idx[l] + 1 == x.side()) CHECK(g.at(p, l) == cxd{0.0, 0.0});
  }
}

TEST_CASE("gradient rejects d = 1") {
  CHECK_THROWS_AS(gradient(NdSignal(1, 8)), DomainError);
  CHECK_THROWS_AS(tv_seminorm(NdSignal(1, 8), TvVariant::iso), DomainError);
}

TEST_CASE("divergence adjoint identity on 200 random pairs") {
  std::size_t case_id = 0;
  for (std::size_t d : {2, 3})
    for (std::size_t n : {4, 8})
      for (int rep = 0; rep < 50; ++rep) {
        const auto x = random_signal(d, n, 1000 + case_id);
        const auto g = random_field(d, n, d, 2000 + case_id);
        ++case_id;
        const cxd lhs = field_inner(gradient(x), g);
        const cxd rhs = inner_product(x, divergence_adjoint(g));
        const double scale = l2_norm(x.span()) * l2_norm(g.span());
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
      }
}

TEST_CASE("divergence of a single interior unit entry is the transposed stencil") {
  MixedField g(2, 4, 2);
  const std::size_t pixel = 1 * 4 + 1;  // interior pixel (1,1)
  g.at(pixel, 0) = cxd{1.0, 0.0};       // channel 1 = axis 0
  const auto z = divergence_adjoint(g);
  for (std::size_t f = 0; f < z.size(); ++f) {
    if (f == pixel)
      CHECK(z[f] == cxd{-1.0, 0.0});
    else if (f == pixel + 4)  // one step along axis 0
      CHECK(z[f] == cxd{1.0, 0.0});
    else
      CHECK(z[f] == cxd{0.0, 0.0});
  }
  CHECK(l2_norm(divergence_adjoint(MixedField(2, 4, 2)).span()) == 0.0);
}

TEST_CASE("TV seminorms: constants, the (1,2,4) rows, and a (3,4) block") {
  NdSignal c(2, 3, std::vector<cxd>(9, cxd{2.0, 0.0}));
  CHECK(tv_seminorm(c, TvVariant::aniso) == 0.0);
  CHECK(tv_seminorm(c, TvVariant::iso) == 0.0);

  const auto x = signal2d(3, {1, 2, 4, 1, 2, 4, 1, 2, 4});
  CHECK(tv_seminorm(x, TvVariant::aniso) == doctest::Approx(9.0));
  CHECK(tv_seminorm(x, TvVariant::iso) == doctest::Approx(9.0));

  // x = [[0,4],[3,7]]: the (0,0) pixel block is (3,4); remaining blocks are
  // one-sided with values 3 and 4.
  const auto y = signal2d(2, {0, 4, 3, 7});
  const auto g = gradient(y);
  CHECK(g.at(0, 0) == cxd{3.0, 0.0});
  CHECK(g.at(0, 1) == cxd{4.0, 0.0});
  CHECK(tv_seminorm(y, TvVariant::aniso) == doctest::Approx(7.0 + 3.0 + 4.0));
  CHECK(tv_seminorm(y, TvVariant::iso) == doctest::Approx(5.0 + 3.0 + 4.0));
}

TEST_CASE("TV equivalence: TV2 <= TV1 <= sqrt(d) TV2 on 500 random signals") {
  std::size_t case_id = 0;
  for (std::size_t d : {2, 3})
    for (int rep = 0; rep < 250; ++rep) {
      const auto x = random_signal(d, 8, 3000 + case_id++);
      const double tv1 = tv_seminorm(x, TvVariant::aniso);
      const double tv2 = tv_seminorm(x, TvVariant::iso);
      CHECK(tv2 <= tv1 * (1.0 + 1e-12));
      CHECK(tv1 <= std::sqrt(static_cast<double>(d)) * tv2 * (1.0 + 1e-12));
    }
}

TEST_CASE("gradient operator norm: ||grad x|| <= 2 sqrt(d) ||x||") {
  for (std::size_t d : {2, 3}) {
    const auto x = random_signal(d, 8, 555 + d);
    CHECK(l2_norm(gradient(x).span()) <=
          2.0 * std::sqrt(static_cast<double>(d)) * l2_norm(x.span()) * (1.0 + 1e-12));
  }
}

TEST_CASE("mean-zero ramp witness: ||x|| / ||grad x|| grows with N") {
  double prev = 0.0;
  for (std::size_t n : {4, 8, 16, 32}) {
    NdSignal x(2, n);
    const Shape cube = x.shape();
    std::vector<std::size_t> idx(2);
    for (std::size_t f = 0; f < x.size(); ++f) {
      cube.unflat(f, idx);
      x[f] = cxd{static_cast<double>(idx[0]) - (static_cast<double>(n) - 1.0) / 2.0, 0.0};
    }
    const double ratio = l2_norm(x.span()) / l2_norm(gradient(x).span());
    CHECK(ratio > prev);
    prev = ratio;
  }
}

TEST_CASE("best_s_blocks: exact supports, s = 0, and a full-sort oracle") {
  auto g = random_field(2, 4, 2, 66);
  // Keep exactly 3 nonzero blocks.
  const std::vector<std::size_t> keep{1, 5, 11};
  for (std::size_t p = 0; p < g.pixel_count(); ++p)
    if (std::find(keep.begin(), keep.end(), p) == keep.end())
      for (std::size_t l = 0; l < 2; ++l) g.at(p, l) = cxd{0.0, 0.0};

  const auto [support, truncated] = best_s_blocks(g, 3);
  CHECK(support.pixels == keep);
  CHECK(mixed_l12_norm(zero_on_support(g, support)) == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(truncated.values()[i] == g.values()[i]);

  const auto [empty, zeroed] = best_s_blocks(g, 0);
  CHECK(empty.pixels.empty());
  CHECK(l2_norm(zeroed.span()) == 0.0);

  const auto h = random_field(2, 4, 2, 67);
  const auto [top, unused] = best_s_blocks(h, 3);
  std::vector<std::size_t> order(h.pixel_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return h.block_norm(a) > h.block_norm(b);
  });
  std::vector<std::size_t> expect(order.begin(), order.begin() + 3);
  std::sort(expect.begin(), expect.end());
  CHECK(top.pixels == expect);
}

TEST_CASE("best_s_blocks is optimal over every support (exhaustive N=3, d=2)") {
  const auto g = random_field(2, 3, 2, 99);
  const std::size_t pixels = g.pixel_count();
  for (std::size_t s = 1; s <= 3; ++s) {
    const auto [support, truncated] = best_s_blocks(g, s);
    const double best = mixed_l12_norm(zero_on_support(g, support));
    // Every s-subset of the 9 pixels.
    std::vector<bool> mask(pixels, false);
    std::fill(mask.end() - s, mask.end(), true);
    do {
      BlockSupport omega;
      for (std::size_t p = 0; p < pixels; ++p)
        if (mask[p]) omega.pixels.push_back(p);
      CHECK(best <= mixed_l12_norm(zero_on_support(g, omega)) * (1.0 + 1e-12));
    } while (std::next_permutation(mask.begin(), mask.end()));
  }
}

TEST_CASE("group soft threshold: identity at tau 0, closed form, kill small blocks") {
  const auto g = random_field(2, 4, 2, 111);
  const auto same = group_soft_threshold(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same.values()[i] == g.values()[i]);

  MixedField b(2, 2, 2);
  b.at(0, 0) = cxd{3.0, 0.0};
  b.at(0, 1) = cxd{4.0, 0.0};
  const auto shrunk = group_soft_threshold(b, 1.0);
  CHECK(shrunk.at(0, 0).real() == doctest::Approx(2.4));
  CHECK(shrunk.at(0, 1).real() == doctest::Approx(3.2));

  const auto dead = group_soft_threshold(b, 5.0);
  CHECK(l2_norm(dead.span()) == 0.0);
}

TEST_CASE("group soft threshold is nonexpansive") {
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_field(2, 4, 2, 200 + rep);
    const auto b = random_field(2, 4, 2, 300 + rep);
    const auto pa = group_soft_threshold(a, 0.7);
    const auto pb = group_soft_threshold(b, 0.7);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += std::norm(pa.values()[i] - pb.values()[i]);
      den += std::norm(a.values()[i] - b.values()[i]);
    }
    CHECK(num <= den * (1.0 + 1e-12));
  }
}

TEST_CASE("reflection extension reaches the next power of two and bounds TV") {
  const auto x = random_real_signal(2, 5, 404);
  const auto ext = reflect_extend_pow2(x);
  CHECK(ext.side() == 8);
  CHECK(tv_seminorm(ext, TvVariant::aniso) <=
        4.0 * tv_seminorm(x, TvVariant::aniso) * (1.0 + 1e-12));

  const auto y = random_signal(2, 8, 405);
  const auto same = reflect_extend_pow2(y);
  CHECK(same.side() == 8);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(same[i] == y[i]);
}
