#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/gradient.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/operators.hpp"
#include "haar_oracle.hpp"
#include "test_util.hpp"

using namespace ndtv;
using namespace ndtv::testutil;

namespace {

OpPtr random_dense(std::size_t rows, Shape in, std::uint64_t seed) {
  CounterRng rng(seed, /*stream=*/110);
  Eigen::MatrixXcd m(rows, in.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = cxd{rng.next_gaussian(), rng.next_gaussian()};
  return dense_op(std::move(m), std::move(in));
}

double adjoint_residual(const LinearMeasurementOp& op, std::uint64_t seed) {
  const auto x = random_vector(op.input_size(), seed);
  const auto y = random_vector(op.output_length(), seed + 1);
  const auto ax = op.apply(x);
  const auto aty = op.adjoint(y);
  const cxd lhs = inner_product(std::span<const cxd>(ax), std::span<const cxd>(y));
  const cxd rhs = inner_product(std::span<const cxd>(x), std::span<const cxd>(aty));
  const double scale = l2_norm(x) * l2_norm(y);
  return std::abs(lhs - rhs) / (scale > 0 ? scale : 1.0);
}

}  // namespace

TEST_CASE("single-component operator: the constant array measures the mean mass") {
  Eigen::MatrixXcd row(1, 4);
  row.setConstant(cxd{0.5, 0.0});  // h0 for d=2, N=2
  const auto op = dense_op(row, Shape::cube(2, 2));
  const auto y = op->apply(std::vector<cxd>(4, cxd{1.0, 0.0}));
  REQUIRE(y.size() == 1);
  CHECK(y[0] == cxd{2.0, 0.0});
}

TEST_CASE("adjoint identity holds for every operator construction") {
  const auto a = random_dense(5, Shape::cube(2, 3), 1);
  const auto b = random_dense(5, Shape::cube(2, 3), 2);
  CHECK(adjoint_residual(*a, 10) <= 1e-12);
  CHECK(adjoint_residual(*row_direct_sum(a, b), 11) <= 1e-12);
  CHECK(adjoint_residual(*column_direct_sum(a, b), 12) <= 1e-12);
  CHECK(adjoint_residual(*gaussian_ensemble(6, Shape::cube(2, 3), 3), 13) <= 1e-12);
  CHECK(adjoint_residual(*bernoulli_ensemble(6, Shape::cube(2, 3), 4), 14) <= 1e-12);
  CHECK(adjoint_residual(*gradient_op(2, 4), 15) <= 1e-12);
  CHECK(adjoint_residual(*haar_op(2, 4), 16) <= 1e-12);
  const auto deriv = random_dense(4, derivative_shape(2, 4, 0), 5);
  CHECK(adjoint_residual(*pad_lift_head(deriv, 0), 17) <= 1e-12);
  CHECK(adjoint_residual(*pad_lift_tail(deriv, 0), 18) <= 1e-12);
  CHECK(adjoint_residual(*compose_with_inverse_haar(random_dense(5, Shape::cube(2, 4), 6)), 19) <=
        1e-12);
}

TEST_CASE("dense view multiply equals the component-loop apply") {
  const auto b0 = random_dense(3, derivative_shape(2, 4, 0), 21);
  const auto b1 = random_dense(3, derivative_shape(2, 4, 1), 22);
  const auto a = random_dense(4, Shape::cube(2, 4), 23);
  const auto m = build_composite_M(a, {b0, b1});
  const auto x = random_vector(m->input_size(), 24);
  const auto via_apply = m->apply(x);
  const Eigen::MatrixXcd dense = m->dense_view();
  Eigen::Map<const Eigen::VectorXcd> xv(x.data(), x.size());
  const Eigen::VectorXcd via_dense = dense * xv;
  for (std::size_t k = 0; k < via_apply.size(); ++k)
    CHECK(std::abs(via_apply[k] - via_dense[k]) <=
          1e-13 * std::max(1.0, std::abs(via_dense[k])));
}

TEST_CASE("row direct sum concatenates outputs and is associative in effect") {
  const auto a = random_dense(2, Shape::cube(2, 2), 31);
  const auto b = random_dense(3, Shape::cube(2, 2), 32);
  const auto c = random_dense(1, Shape::cube(2, 2), 33);
  const auto x = random_vector(4, 34);

  const auto ab = row_direct_sum(a, b);
  const auto y = ab->apply(x);
  const auto ya = a->apply(x);
  const auto yb = b->apply(x);
  REQUIRE(y.size() == 5);
  for (std::size_t i = 0; i < 2; ++i) CHECK(y[i] == ya[i]);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y[2 + i] == yb[i]);

  const auto left = row_direct_sum(row_direct_sum(a, b), c)->apply(x);
  const auto right = row_direct_sum(a, row_direct_sum(b, c))->apply(x);
  REQUIRE(left.size() == right.size());
  for (std::size_t i = 0; i < left.size(); ++i) CHECK(left[i] == right[i]);
}

TEST_CASE("column direct sum equals the channel-loop sum") {
  const auto a = random_dense(4, Shape::cube(2, 3), 41);
  const auto b = random_dense(4, Shape::cube(2, 3), 42);
  const auto sum = column_direct_sum(a, b);
  REQUIRE(sum->input_size() == 18);

  const auto z = random_vector(18, 43);
  std::vector<cxd> ch0(9), ch1(9);
  for (std::size_t p = 0; p < 9; ++p) {
    ch0[p] = z[p * 2 + 0];
    ch1[p] = z[p * 2 + 1];
  }
  const auto got = sum->apply(z);
  const auto want_a = a->apply(ch0);
  const auto want_b = b->apply(ch1);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(got[k] - (want_a[k] + want_b[k])) <= 1e-13 * std::abs(got[k]));
}

TEST_CASE("zero pads place the block of zeros on the named face") {
  NdArray a(Shape({1, 2}), {cxd{5, 0}, cxd{6, 0}});
  const auto head = zero_pad_head(a, 0);
  const auto tail = zero_pad_tail(a, 0);
  CHECK(head.values() == std::vector<cxd>{cxd{0, 0}, cxd{0, 0}, cxd{5, 0}, cxd{6, 0}});
  CHECK(tail.values() == std::vector<cxd>{cxd{5, 0}, cxd{6, 0}, cxd{0, 0}, cxd{0, 0}});

  NdArray zero(Shape({1, 2}));
  CHECK(l2_norm(zero_pad_head(zero, 0).span()) == 0.0);
  CHECK(l2_norm(zero_pad_tail(zero, 0).span()) == 0.0);

  CHECK_THROWS_AS(zero_pad_head(a, 1), DimensionError);
}

TEST_CASE("zero pads preserve norms; lifted components keep component norms") {
  CounterRng rng(77, 120);
  NdArray a(derivative_shape(2, 4, 1));
  for (auto& v : a.values()) v = cxd{rng.next_gaussian(), rng.next_gaussian()};
  const double norm = l2_norm(a.span());
  CHECK(l2_norm(zero_pad_head(a, 1).span()) == doctest::Approx(norm));
  CHECK(l2_norm(zero_pad_tail(a, 1).span()) == doctest::Approx(norm));

  const auto b = random_dense(3, derivative_shape(2, 4, 1), 78);
  const auto lifted = pad_lift_head(b, 1);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(l2_norm(lifted->component(k).span()) ==
          doctest::Approx(l2_norm(b->component(k).span())).epsilon(1e-12));
}

TEST_CASE("pad-derivative identity: zero array, constant signal, random cases") {
  NdSignal x(2, 4);
  const Shape cube = x.shape();
  std::vector<std::size_t> idx(2);
  for (std::size_t f = 0; f < x.size(); ++f) {
    cube.unflat(f, idx);
    x[f] = cxd{static_cast<double>(idx[1]), 0.0};  // constant along axis 0
  }
  NdArray zero(derivative_shape(2, 4, 0));
  CHECK(check_pad_derivative_identity(zero, x, 0) == 0.0);

  std::size_t case_id = 0;
  for (std::size_t d : {2, 3})
    for (std::size_t n : {4, 8})
      for (std::size_t axis = 0; axis < d; ++axis)
        for (int rep = 0; rep < 10; ++rep) {
          const auto sig = random_signal(d, n, 9000 + case_id);
          CounterRng arng(9500 + case_id, 121);
          ++case_id;
          NdArray arr(derivative_shape(d, n, axis));
          for (auto& v : arr.values()) v = cxd{arng.next_gaussian(), arng.next_gaussian()};
          const double residual = check_pad_derivative_identity(arr, sig, axis);
          CHECK(residual <= 1e-12 * l2_norm(arr.span()) * l2_norm(sig.span()));
        }
}

TEST_CASE("operator form of the pad identity: [B]^0(x) - [B]_0(x) = B(d x)") {
  const auto b = random_dense(4, derivative_shape(2, 4, 1), 88);
  const auto head = pad_lift_head(b, 1);
  const auto tail = pad_lift_tail(b, 1);
  const auto x = random_signal(2, 4, 89);
  const auto lhs_head = head->apply(x.span());
  const auto lhs_tail = tail->apply(x.span());
  const auto rhs = b->apply(directional_derivative(x, 1).span());
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(lhs_head[k] - lhs_tail[k] - rhs[k]) <= 1e-12 * (1.0 + std::abs(rhs[k])));
}

TEST_CASE("gaussian ensemble: determinism, column norms, isotropy") {
  const Shape in = Shape::cube(2, 4);
  const auto g1 = gaussian_ensemble(400, in, 12345);
  const auto g2 = gaussian_ensemble(400, in, 12345);
  const Eigen::MatrixXcd d1 = g1->dense_view();
  const Eigen::MatrixXcd d2 = g2->dense_view();
  CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);

  double mean_col_norm = 0.0;
  for (Eigen::Index c = 0; c < d1.cols(); ++c) mean_col_norm += d1.col(c).norm();
  mean_col_norm /= static_cast<double>(d1.cols());
  CHECK(mean_col_norm == doctest::Approx(1.0).epsilon(0.1));

  const auto a = gaussian_ensemble(200, in, 777);
  double ratio_sum = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    auto x = random_vector(16, 40000 + rep);
    const double xnorm = l2_norm(x);
    for (auto& v : x) v /= xnorm;
    const auto y = a->apply(x);
    ratio_sum += l2_norm(y) * l2_norm(y);
  }
  CHECK(ratio_sum / 1000.0 >= 0.8);
  CHECK(ratio_sum / 1000.0 <= 1.2);
}

TEST_CASE("composite M: output length 2dq+p and the block layout contract") {
  const auto a = random_dense(3, Shape::cube(2, 4), 91);
  const auto b1 = random_dense(2, derivative_shape(2, 4, 0), 92);
  const auto b2 = random_dense(2, derivative_shape(2, 4, 1), 93);
  const auto m = build_composite_M(a, {b1, b2});
  CHECK(m->output_length() == 11);  // 2*2*2 + 3

  const auto x = random_signal(2, 4, 94);
  const auto y = m->apply(x.span());
  const auto ya = a->apply(x.span());
  for (std::size_t k = 0; k < 3; ++k) CHECK(y[k] == ya[k]);
  const auto yh = pad_lift_head(b1, 0)->apply(x.span());
  for (std::size_t k = 0; k < 2; ++k) CHECK(y[3 + k] == yh[k]);
  const auto yt = pad_lift_tail(b1, 0)->apply(x.span());
  for (std::size_t k = 0; k < 2; ++k) CHECK(y[5 + k] == yt[k]);

  CHECK_THROWS_AS(build_composite_M(a, {b1}), DimensionError);
  CHECK_THROWS_AS(build_composite_M(a, {b2, b1}), DimensionError);
}

TEST_CASE("tube algebra: ||sum B_l(d_l v)||^2 <= 2d ||M(v)||^2") {
  const auto a = random_dense(3, Shape::cube(2, 8), 95);
  const auto b1 = random_dense(5, derivative_shape(2, 8, 0), 96);
  const auto b2 = random_dense(5, derivative_shape(2, 8, 1), 97);
  const auto m = build_composite_M(a, {b1, b2});
  for (int rep = 0; rep < 50; ++rep) {
    const auto v = random_signal(2, 8, 98000 + rep);
    auto acc = b1->apply(directional_derivative(v, 0).span());
    const auto acc2 = b2->apply(directional_derivative(v, 1).span());
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += acc2[k];
    const double lhs = l2_norm(acc) * l2_norm(acc);
    const auto mv = m->apply(v.span());
    const double rhs = 4.0 * l2_norm(mv) * l2_norm(mv);  // 2d with d = 2
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("compose with inverse Haar: identity gives the synthesis matrix") {
  const std::size_t n = 4;
  const auto composed = compose_with_inverse_haar(identity_op(Shape::cube(2, n)));
  const Eigen::MatrixXcd dense = composed->dense_view();
  const Eigen::MatrixXd basis = dense_haar_basis(2, n);  // rows = wavelets
  CHECK((dense.real() - basis.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(dense.imag().cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("composition preserves measurements across the transform") {
  const auto a = random_dense(6, Shape::cube(2, 8), 101);
  const auto composed = compose_with_inverse_haar(a);
  const auto x = random_signal(2, 8, 102);
  const auto c = haar_forward(x);
  const auto via_composed = composed->apply(c.flat);
  const auto direct = a->apply(x.span());
  CHECK(rel_err(via_composed, direct) <= 1e-12);
}

TEST_CASE("descriptors reconstruct operators bit-identically") {
  const auto b1 = random_dense(2, derivative_shape(2, 4, 0), 111);
  const auto b2 = random_dense(2, derivative_shape(2, 4, 1), 112);
  const auto m = build_composite_M(gaussian_ensemble(3, Shape::cube(2, 4), 999), {b1, b2});
  const auto rebuilt = op_from_descriptor(m->descriptor());
  CHECK((m->dense_view() - rebuilt->dense_view()).cwiseAbs().maxCoeff() == 0.0);

  const auto composed = compose_with_inverse_haar(bernoulli_ensemble(4, Shape::cube(2, 4), 1000));
  const auto rebuilt2 = op_from_descriptor(composed->descriptor());
  CHECK((composed->dense_view() - rebuilt2->dense_view()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shape mismatches raise dimension errors") {
  const auto a = random_dense(2, Shape::cube(2, 2), 121);
  CHECK_THROWS_AS(a->apply(std::vector<cxd>(5)), DimensionError);
  const auto b = random_dense(2, Shape::cube(2, 3), 122);
  CHECK_THROWS_AS(row_direct_sum(a, b), DimensionError);
  const auto c = random_dense(3, Shape::cube(2, 2), 123);
  CHECK_THROWS_AS(column_direct_sum(a, c), DimensionError);
}
