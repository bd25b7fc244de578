#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ndtv/shape.hpp"
#include "ndtv/signal.hpp"

namespace ndtv {

// A linear operator C^shape -> C^r given by a sequence of component arrays
// a_k over the input shape: apply(x)_k = sum_alpha a_{k,alpha} x_alpha, i.e.
// the unraveled components act as matrix rows. adjoint is the
// conjugate-transpose action, so <apply(x), y> = <x, adjoint(y)> exactly.
class LinearMeasurementOp {
 public:
  virtual ~LinearMeasurementOp() = default;

  const Shape& input_shape() const { return in_; }
  std::size_t input_size() const { return in_.size(); }
  std::size_t output_length() const { return out_; }

  virtual void apply_into(std::span<const cxd> x, std::span<cxd> y) const = 0;
  virtual void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const = 0;
  virtual nlohmann::json descriptor() const = 0;

  std::vector<cxd> apply(std::span<const cxd> x) const;
  std::vector<cxd> adjoint(std::span<const cxd> y) const;

  // Component array a_k (the kth "row" reshaped to the input shape).
  NdArray component(std::size_t k) const;

  // r x n matrix whose kth row is the unraveled a_k. Materialized on demand;
  // dense subclasses return their storage directly.
  virtual Eigen::MatrixXcd dense_view() const;

 protected:
  LinearMeasurementOp(Shape in, std::size_t out);
  void check_apply_sizes(std::span<const cxd> x, std::span<cxd> y) const;
  void check_adjoint_sizes(std::span<const cxd> y, std::span<cxd> x) const;

  Shape in_;
  std::size_t out_;
};

using OpPtr = std::shared_ptr<const LinearMeasurementOp>;

// Explicit complex matrix rows.
OpPtr dense_op(Eigen::MatrixXcd rows, Shape in);
OpPtr dense_op(Eigen::MatrixXcd rows);  // input shape [cols]
OpPtr identity_op(Shape in);

// i.i.d. ensembles with entries scaled by 1/sqrt(r) so that
// E||apply(x)||_2^2 = ||x||_2^2. Fully determined by the seed.
OpPtr gaussian_ensemble(std::size_t r, Shape in, std::uint64_t seed);
OpPtr bernoulli_ensemble(std::size_t r, Shape in, std::uint64_t seed);

// Rows of a random orthogonal matrix (exact isometry, delta = 0 at every
// order); used where a certified near-isometry is required at desk scale.
OpPtr random_orthogonal_op(Shape in, std::uint64_t seed);

// Output concatenation; all inputs share one shape. Variadic helper below.
OpPtr row_direct_sum(std::vector<OpPtr> children);
OpPtr row_direct_sum(OpPtr a, OpPtr b);

// Channel-stacked input: children share output length r and input extents;
// the summed operator acts on fields with a trailing channel axis and returns
// sum_l child_l(channel l).
OpPtr column_direct_sum(std::vector<OpPtr> children);
OpPtr column_direct_sum(OpPtr a, OpPtr b);

// Zero-pad lifts of derivative-shaped arrays to C^(N^d). head places zeros on
// the leading face of the axis (values shifted up); tail places zeros on the
// trailing face (values in place).
NdSignal zero_pad_head(const NdArray& a, std::size_t axis);
NdSignal zero_pad_tail(const NdArray& a, std::size_t axis);

// Lifted operators [B]^{0_l} and [B]_{0_l}: every component zero-padded.
OpPtr pad_lift_head(OpPtr child, std::size_t axis);
OpPtr pad_lift_tail(OpPtr child, std::size_t axis);

// |<a, d_l x> - <a^{0_l}, x> + <a_{0_l}, x>| under the bilinear pairing the
// operators use; an exact identity, so the residual is pure roundoff.
double check_pad_derivative_identity(const NdArray& a, const NdSignal& x, std::size_t axis);

// M = A (+)_r [B_1]^{0_1} (+)_r [B_1]_{0_1} (+)_r ... (+)_r [B_d]_{0_d}.
// A measures C^(N^d) -> C^p, each B_l measures its derivative shape -> C^q;
// output length is exactly 2dq + p with A's block first.
OpPtr build_composite_M(OpPtr a, std::vector<OpPtr> b_per_axis);

// c |-> A(haar_inverse(c)) on the canonical flat coefficient layout.
OpPtr compose_with_inverse_haar(OpPtr a);

// Matrix-free gradient as a measurement operator (rows = difference
// stencils); output uses the mixed-field layout (channel fastest).
OpPtr gradient_op(std::size_t d, std::size_t side);

// Forward Haar transform as an operator (an isometry).
OpPtr haar_op(std::size_t d, std::size_t side);

// Rebuild an operator from its JSON descriptor, bit-identically.
OpPtr op_from_descriptor(const nlohmann::json& j);

}  // namespace ndtv
