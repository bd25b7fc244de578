#include "ndtv/operators.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ndtv/errors.hpp"
#include "ndtv/gradient.hpp"
#include "ndtv/haar.hpp"
#include "ndtv/rng.hpp"

namespace ndtv {

using nlohmann::json;

namespace {

json shape_to_json(const Shape& s) { return json(s.extents()); }

Shape shape_from_json(const json& j) {
  return Shape(j.get<std::vector<std::size_t>>());
}

void require_cube(const Shape& s, const char* who) {
  if (!s.is_cube()) throw DimensionError(std::string(who) + ": input shape must be [N]^d");
}

// (outer, axis extent, inner) decomposition of a shape around one axis.
struct AxisSplit {
  std::size_t outer = 1, mid = 1, inner = 1;
};

AxisSplit split(const Shape& s, std::size_t axis) {
  AxisSplit a;
  for (std::size_t i = 0; i < axis; ++i) a.outer *= s.extent(i);
  a.mid = s.extent(axis);
  for (std::size_t i = axis + 1; i < s.rank(); ++i) a.inner *= s.extent(i);
  return a;
}

}  // namespace

LinearMeasurementOp::LinearMeasurementOp(Shape in, std::size_t out)
    : in_(std::move(in)), out_(out) {
  if (out_ == 0) throw DimensionError("LinearMeasurementOp: output length must be positive");
}

void LinearMeasurementOp::check_apply_sizes(std::span<const cxd> x, std::span<cxd> y) const {
  if (x.size() != input_size())
    throw DimensionError("apply: input length " + std::to_string(x.size()) +
                         " does not match operator shape " + in_.to_string());
  if (y.size() != out_) throw DimensionError("apply: output buffer length mismatch");
}

void LinearMeasurementOp::check_adjoint_sizes(std::span<const cxd> y, std::span<cxd> x) const {
  if (y.size() != out_)
    throw DimensionError("adjoint: input length " + std::to_string(y.size()) +
                         " does not match output length " + std::to_string(out_));
  if (x.size() != input_size()) throw DimensionError("adjoint: output buffer length mismatch");
}

std::vector<cxd> LinearMeasurementOp::apply(std::span<const cxd> x) const {
  std::vector<cxd> y(out_);
  apply_into(x, y);
  return y;
}

std::vector<cxd> LinearMeasurementOp::adjoint(std::span<const cxd> y) const {
  std::vector<cxd> x(input_size());
  adjoint_into(y, x);
  return x;
}

NdArray LinearMeasurementOp::component(std::size_t k) const {
  if (k >= out_) throw DimensionError("component: index out of range");
  std::vector<cxd> e(out_, cxd{0.0, 0.0});
  e[k] = cxd{1.0, 0.0};
  auto col = adjoint(e);
  for (auto& v : col) v = std::conj(v);
  return NdArray(in_, std::move(col));
}

Eigen::MatrixXcd LinearMeasurementOp::dense_view() const {
  Eigen::MatrixXcd m(out_, input_size());
  std::vector<cxd> e(out_, cxd{0.0, 0.0});
  std::vector<cxd> col(input_size());
  for (std::size_t k = 0; k < out_; ++k) {
    e[k] = cxd{1.0, 0.0};
    adjoint_into(e, col);
    e[k] = cxd{0.0, 0.0};
    for (std::size_t i = 0; i < col.size(); ++i) m(k, i) = std::conj(col[i]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Dense complex rows.

namespace {

class DenseOp final : public LinearMeasurementOp {
 public:
  DenseOp(Eigen::MatrixXcd rows, Shape in)
      : LinearMeasurementOp(std::move(in), static_cast<std::size_t>(rows.rows())),
        rows_(std::move(rows)) {
    if (static_cast<std::size_t>(rows_.cols()) != input_size())
      throw DimensionError("dense_op: column count does not match input shape");
  }

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    Eigen::Map<const Eigen::VectorXcd> xv(x.data(), x.size());
    Eigen::Map<Eigen::VectorXcd> yv(y.data(), y.size());
    yv.noalias() = rows_ * xv;
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    Eigen::Map<const Eigen::VectorXcd> yv(y.data(), y.size());
    Eigen::Map<Eigen::VectorXcd> xv(x.data(), x.size());
    xv.noalias() = rows_.adjoint() * yv;
  }

  Eigen::MatrixXcd dense_view() const override { return rows_; }

  json descriptor() const override {
    json rows = json::array();
    for (Eigen::Index k = 0; k < rows_.rows(); ++k) {
      json row = json::array();
      for (Eigen::Index i = 0; i < rows_.cols(); ++i)
        row.push_back({rows_(k, i).real(), rows_(k, i).imag()});
      rows.push_back(std::move(row));
    }
    return {{"kind", "dense"}, {"shape", shape_to_json(in_)}, {"rows", std::move(rows)}};
  }

 private:
  Eigen::MatrixXcd rows_;
};

// Real matrix with complex apply (two real matvecs through a packed n x 2
// right-hand side).
class RealMatrixOp : public LinearMeasurementOp {
 public:
  RealMatrixOp(Eigen::MatrixXd rows, Shape in)
      : LinearMeasurementOp(std::move(in), static_cast<std::size_t>(rows.rows())),
        rows_(std::move(rows)) {
    if (static_cast<std::size_t>(rows_.cols()) != input_size())
      throw DimensionError("real matrix op: column count does not match input shape");
  }

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    Eigen::Map<const Eigen::MatrixXd> xs(reinterpret_cast<const double*>(x.data()), 2, x.size());
    Eigen::MatrixXd packed = xs.transpose();             // n x 2 (re, im)
    Eigen::MatrixXd out = rows_ * packed;                // r x 2
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = cxd{out(k, 0), out(k, 1)};
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    Eigen::Map<const Eigen::MatrixXd> ys(reinterpret_cast<const double*>(y.data()), 2, y.size());
    Eigen::MatrixXd packed = ys.transpose();             // r x 2
    Eigen::MatrixXd out = rows_.transpose() * packed;    // n x 2
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = cxd{out(i, 0), out(i, 1)};
  }

  Eigen::MatrixXcd dense_view() const override { return rows_.cast<cxd>(); }

 protected:
  Eigen::MatrixXd rows_;
};

class GaussianOp final : public RealMatrixOp {
 public:
  GaussianOp(std::size_t r, Shape in, std::uint64_t seed)
      : RealMatrixOp(make(r, in.size(), seed), in), seed_(seed) {}

  json descriptor() const override {
    return {{"kind", "gaussian"},
            {"r", out_},
            {"shape", shape_to_json(in_)},
            {"seed", seed_}};
  }

 private:
  static Eigen::MatrixXd make(std::size_t r, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, /*stream=*/1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    Eigen::MatrixXd m(r, n);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < n; ++i) m(k, i) = scale * rng.next_gaussian();
    return m;
  }

  std::uint64_t seed_;
};

class BernoulliOp final : public RealMatrixOp {
 public:
  BernoulliOp(std::size_t r, Shape in, std::uint64_t seed)
      : RealMatrixOp(make(r, in.size(), seed), in), seed_(seed) {}

  json descriptor() const override {
    return {{"kind", "bernoulli"},
            {"r", out_},
            {"shape", shape_to_json(in_)},
            {"seed", seed_}};
  }

 private:
  static Eigen::MatrixXd make(std::size_t r, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, /*stream=*/2);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    Eigen::MatrixXd m(r, n);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < n; ++i) m(k, i) = rng.sign() * scale;
    return m;
  }

  std::uint64_t seed_;
};

class OrthogonalOp final : public RealMatrixOp {
 public:
  OrthogonalOp(Shape in, std::uint64_t seed)
      : RealMatrixOp(make(in.size(), seed), in), seed_(seed) {}

  json descriptor() const override {
    return {{"kind", "orthogonal"}, {"shape", shape_to_json(in_)}, {"seed", seed_}};
  }

 private:
  static Eigen::MatrixXd make(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, /*stream=*/3);
    Eigen::MatrixXd g(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) g(k, i) = rng.next_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the sign convention so the factorization is unique.
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t i = 0; i < n; ++i)
      if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
  }

  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Direct sums.

class RowSumOp final : public LinearMeasurementOp {
 public:
  explicit RowSumOp(std::vector<OpPtr> children)
      : LinearMeasurementOp(validate(children), total(children)), children_(std::move(children)) {}

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    std::size_t off = 0;
    for (const auto& c : children_) {
      c->apply_into(x, y.subspan(off, c->output_length()));
      off += c->output_length();
    }
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    std::fill(x.begin(), x.end(), cxd{0.0, 0.0});
    std::vector<cxd> part(input_size());
    std::size_t off = 0;
    for (const auto& c : children_) {
      c->adjoint_into(y.subspan(off, c->output_length()), part);
      for (std::size_t i = 0; i < part.size(); ++i) x[i] += part[i];
      off += c->output_length();
    }
  }

  json descriptor() const override {
    json kids = json::array();
    for (const auto& c : children_) kids.push_back(c->descriptor());
    return {{"kind", "row-sum"}, {"children", std::move(kids)}};
  }

  const std::vector<OpPtr>& children() const { return children_; }

 private:
  static Shape validate(const std::vector<OpPtr>& children) {
    if (children.empty()) throw DimensionError("row_direct_sum: no children");
    for (const auto& c : children)
      if (c->input_shape() != children.front()->input_shape())
        throw DimensionError("row_direct_sum: children must share one input shape");
    return children.front()->input_shape();
  }
  static std::size_t total(const std::vector<OpPtr>& children) {
    std::size_t t = 0;
    for (const auto& c : children) t += c->output_length();
    return t;
  }

  std::vector<OpPtr> children_;
};

class ColumnSumOp final : public LinearMeasurementOp {
 public:
  explicit ColumnSumOp(std::vector<OpPtr> children)
      : LinearMeasurementOp(stacked_shape(children), children.front()->output_length()),
        children_(std::move(children)) {}

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    std::fill(y.begin(), y.end(), cxd{0.0, 0.0});
    const std::size_t channels = children_.size();
    std::vector<cxd> chan(children_.front()->input_size());
    std::vector<cxd> part(out_);
    for (std::size_t l = 0; l < channels; ++l) {
      for (std::size_t p = 0; p < chan.size(); ++p) chan[p] = x[p * channels + l];
      children_[l]->apply_into(chan, part);
      for (std::size_t k = 0; k < out_; ++k) y[k] += part[k];
    }
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    const std::size_t channels = children_.size();
    std::vector<cxd> chan(children_.front()->input_size());
    for (std::size_t l = 0; l < channels; ++l) {
      children_[l]->adjoint_into(y, chan);
      for (std::size_t p = 0; p < chan.size(); ++p) x[p * channels + l] = chan[p];
    }
  }

  json descriptor() const override {
    json kids = json::array();
    for (const auto& c : children_) kids.push_back(c->descriptor());
    return {{"kind", "column-sum"}, {"children", std::move(kids)}};
  }

 private:
  static Shape stacked_shape(const std::vector<OpPtr>& children) {
    if (children.empty()) throw DimensionError("column_direct_sum: no children");
    const auto& first = children.front();
    bool same_extents = true;
    for (const auto& c : children) {
      if (c->output_length() != first->output_length())
        throw DimensionError("column_direct_sum: children must share one output length");
      if (c->input_size() != first->input_size())
        throw DimensionError("column_direct_sum: children must share one input size");
      if (c->input_shape() != first->input_shape()) same_extents = false;
    }
    // Derivative-shaped children differ in extent order but share a flattened
    // length; the stacked shape is then kept flat.
    auto e = same_extents ? first->input_shape().extents()
                          : std::vector<std::size_t>{first->input_size()};
    e.push_back(children.size());
    return Shape(std::move(e));
  }

  std::vector<OpPtr> children_;
};

// ---------------------------------------------------------------------------
// Zero-pad lifts.

class PadLiftOp final : public LinearMeasurementOp {
 public:
  PadLiftOp(OpPtr child, std::size_t axis, bool head)
      : LinearMeasurementOp(lifted_shape(*child, axis), child->output_length()),
        child_(std::move(child)),
        axis_(axis),
        head_(head) {}

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    std::vector<cxd> restricted(child_->input_size());
    restrict_slice(x, restricted);
    child_->apply_into(restricted, y);
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    std::vector<cxd> restricted(child_->input_size());
    child_->adjoint_into(y, restricted);
    std::fill(x.begin(), x.end(), cxd{0.0, 0.0});
    embed_slice(restricted, x);
  }

  json descriptor() const override {
    return {{"kind", head_ ? "pad-head" : "pad-tail"},
            {"axis", axis_},
            {"child", child_->descriptor()}};
  }

 private:
  static Shape lifted_shape(const LinearMeasurementOp& child, std::size_t axis) {
    const Shape& s = child.input_shape();
    if (axis >= s.rank()) throw DimensionError("pad lift: axis out of range");
    auto e = s.extents();
    const std::size_t n = e[axis] + 1;
    e[axis] = n;
    for (std::size_t a = 0; a < e.size(); ++a)
      if (e[a] != n) throw DimensionError("pad lift: child must have a derivative shape");
    return Shape(std::move(e));
  }

  // Slice of the cube where the lifted axis index runs over [off, off+N-2].
  void restrict_slice(std::span<const cxd> cube, std::span<cxd> deriv) const {
    const AxisSplit sp = split(in_, axis_);
    const std::size_t off = head_ ? 1 : 0;
    std::size_t w = 0;
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t m = 0; m + 1 < sp.mid; ++m) {
        const std::size_t base = (o * sp.mid + m + off) * sp.inner;
        for (std::size_t i = 0; i < sp.inner; ++i) deriv[w++] = cube[base + i];
      }
  }

  void embed_slice(std::span<const cxd> deriv, std::span<cxd> cube) const {
    const AxisSplit sp = split(in_, axis_);
    const std::size_t off = head_ ? 1 : 0;
    std::size_t w = 0;
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t m = 0; m + 1 < sp.mid; ++m) {
        const std::size_t base = (o * sp.mid + m + off) * sp.inner;
        for (std::size_t i = 0; i < sp.inner; ++i) cube[base + i] = deriv[w++];
      }
  }

  OpPtr child_;
  std::size_t axis_;
  bool head_;
};

// ---------------------------------------------------------------------------
// Matrix-free transforms.

class GradientLinOp final : public LinearMeasurementOp {
 public:
  GradientLinOp(std::size_t d, std::size_t side)
      : LinearMeasurementOp(Shape::cube(d, side), d * Shape::cube(d, side).size()),
        d_(d),
        side_(side) {
    if (d < 2) throw DomainError("gradient_op: requires d >= 2");
  }

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    NdSignal sig(d_, side_, std::vector<cxd>(x.begin(), x.end()));
    const GradientField g = gradient(sig);
    std::copy(g.values().begin(), g.values().end(), y.begin());
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    GradientField g(d_, side_, d_, std::vector<cxd>(y.begin(), y.end()));
    const NdSignal out = divergence_adjoint(g);
    std::copy(out.values().begin(), out.values().end(), x.begin());
  }

  json descriptor() const override {
    return {{"kind", "gradient"}, {"d", d_}, {"side", side_}};
  }

 private:
  std::size_t d_, side_;
};

class HaarLinOp final : public LinearMeasurementOp {
 public:
  HaarLinOp(std::size_t d, std::size_t side)
      : LinearMeasurementOp(Shape::cube(d, side), Shape::cube(d, side).size()),
        d_(d),
        side_(side) {
    if (!is_power_of_two(side) || side < 2)
      throw FormatError("haar_op: side length must be a power of two >= 2");
  }

  void apply_into(std::span<const cxd> x, std::span<cxd> y) const override {
    check_apply_sizes(x, y);
    NdSignal sig(d_, side_, std::vector<cxd>(x.begin(), x.end()));
    const HaarCoefficients c = haar_forward(sig);
    std::copy(c.flat.begin(), c.flat.end(), y.begin());
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> x) const override {
    check_adjoint_sizes(y, x);
    const HaarCoefficients c =
        haar_from_flat(d_, side_, std::vector<cxd>(y.begin(), y.end()));
    const NdSignal out = haar_inverse(c);
    std::copy(out.values().begin(), out.values().end(), x.begin());
  }

  json descriptor() const override {
    return {{"kind", "haar"}, {"d", d_}, {"side", side_}};
  }

 private:
  std::size_t d_, side_;
};

class ComposeInvHaarOp final : public LinearMeasurementOp {
 public:
  explicit ComposeInvHaarOp(OpPtr child)
      : LinearMeasurementOp(child->input_shape(), child->output_length()),
        child_(std::move(child)) {
    require_cube(in_, "compose_with_inverse_haar");
    d_ = in_.rank();
    side_ = in_.extent(0);
    if (!is_power_of_two(side_) || side_ < 2)
      throw FormatError("compose_with_inverse_haar: side must be a power of two >= 2");
  }

  void apply_into(std::span<const cxd> c, std::span<cxd> y) const override {
    check_apply_sizes(c, y);
    const HaarCoefficients coeffs =
        haar_from_flat(d_, side_, std::vector<cxd>(c.begin(), c.end()));
    const NdSignal sig = haar_inverse(coeffs);
    child_->apply_into(sig.span(), y);
  }

  void adjoint_into(std::span<const cxd> y, std::span<cxd> c) const override {
    check_adjoint_sizes(y, c);
    auto back = child_->adjoint(y);
    NdSignal sig(d_, side_, std::move(back));
    const HaarCoefficients coeffs = haar_forward(sig);
    std::copy(coeffs.flat.begin(), coeffs.flat.end(), c.begin());
  }

  json descriptor() const override {
    return {{"kind", "compose-inv-haar"}, {"child", child_->descriptor()}};
  }

 private:
  OpPtr child_;
  std::size_t d_ = 0, side_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Factories.

OpPtr dense_op(Eigen::MatrixXcd rows, Shape in) {
  return std::make_shared<DenseOp>(std::move(rows), std::move(in));
}

OpPtr dense_op(Eigen::MatrixXcd rows) {
  const std::size_t cols = static_cast<std::size_t>(rows.cols());
  return dense_op(std::move(rows), Shape({cols}));
}

OpPtr identity_op(Shape in) {
  const std::size_t n = in.size();
  return dense_op(Eigen::MatrixXcd::Identity(n, n), std::move(in));
}

OpPtr gaussian_ensemble(std::size_t r, Shape in, std::uint64_t seed) {
  if (r == 0) throw DomainError("gaussian_ensemble: r must be >= 1");
  return std::make_shared<GaussianOp>(r, std::move(in), seed);
}

OpPtr bernoulli_ensemble(std::size_t r, Shape in, std::uint64_t seed) {
  if (r == 0) throw DomainError("bernoulli_ensemble: r must be >= 1");
  return std::make_shared<BernoulliOp>(r, std::move(in), seed);
}

OpPtr random_orthogonal_op(Shape in, std::uint64_t seed) {
  return std::make_shared<OrthogonalOp>(std::move(in), seed);
}

OpPtr row_direct_sum(std::vector<OpPtr> children) {
  return std::make_shared<RowSumOp>(std::move(children));
}

OpPtr row_direct_sum(OpPtr a, OpPtr b) {
  return row_direct_sum(std::vector<OpPtr>{std::move(a), std::move(b)});
}

OpPtr column_direct_sum(std::vector<OpPtr> children) {
  return std::make_shared<ColumnSumOp>(std::move(children));
}

OpPtr column_direct_sum(OpPtr a, OpPtr b) {
  return column_direct_sum(std::vector<OpPtr>{std::move(a), std::move(b)});
}

namespace {

NdSignal zero_pad_impl(const NdArray& a, std::size_t axis, bool head) {
  const Shape& s = a.shape();
  if (axis >= s.rank()) throw DimensionError("zero_pad: axis out of range");
  const std::size_t n = s.extent(axis) + 1;
  for (std::size_t i = 0; i < s.rank(); ++i) {
    const std::size_t want = i == axis ? n - 1 : n;
    if (s.extent(i) != want)
      throw DimensionError("zero_pad: expected a derivative shape along axis " +
                           std::to_string(axis) + ", got " + s.to_string());
  }
  NdSignal out(s.rank(), n);
  const AxisSplit sp = split(out.shape(), axis);
  const std::size_t off = head ? 1 : 0;
  std::size_t r = 0;
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t m = 0; m + 1 < sp.mid; ++m) {
      const std::size_t base = (o * sp.mid + m + off) * sp.inner;
      for (std::size_t i = 0; i < sp.inner; ++i) out[base + i] = a[r++];
    }
  return out;
}

}  // namespace

NdSignal zero_pad_head(const NdArray& a, std::size_t axis) { return zero_pad_impl(a, axis, true); }
NdSignal zero_pad_tail(const NdArray& a, std::size_t axis) { return zero_pad_impl(a, axis, false); }

OpPtr pad_lift_head(OpPtr child, std::size_t axis) {
  return std::make_shared<PadLiftOp>(std::move(child), axis, true);
}

OpPtr pad_lift_tail(OpPtr child, std::size_t axis) {
  return std::make_shared<PadLiftOp>(std::move(child), axis, false);
}

double check_pad_derivative_identity(const NdArray& a, const NdSignal& x, std::size_t axis) {
  const NdArray deriv = directional_derivative(x, axis);
  if (a.shape() != deriv.shape())
    throw DimensionError("check_pad_derivative_identity: array shape " + a.shape().to_string() +
                         " does not match the derivative shape " + deriv.shape().to_string());
  const NdSignal head = zero_pad_head(a, axis);
  const NdSignal tail = zero_pad_tail(a, axis);
  auto pair_with = [](std::span<const cxd> u, std::span<const cxd> v) {
    cxd acc{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
  };
  const cxd lhs = pair_with(a.span(), deriv.span());
  const cxd rhs = pair_with(head.span(), x.span()) - pair_with(tail.span(), x.span());
  return std::abs(lhs - rhs);
}

OpPtr build_composite_M(OpPtr a, std::vector<OpPtr> b_per_axis) {
  if (!a) throw DimensionError("build_composite_M: missing A");
  require_cube(a->input_shape(), "build_composite_M");
  const std::size_t d = a->input_shape().rank();
  const std::size_t n = a->input_shape().extent(0);
  if (b_per_axis.size() != d)
    throw DimensionError("build_composite_M: expected one B per axis (" + std::to_string(d) +
                         "), got " + std::to_string(b_per_axis.size()));
  const std::size_t q = b_per_axis.front()->output_length();
  std::vector<OpPtr> blocks;
  blocks.reserve(1 + 2 * d);
  blocks.push_back(std::move(a));
  for (std::size_t axis = 0; axis < d; ++axis) {
    const auto& b = b_per_axis[axis];
    if (b->input_shape() != derivative_shape(d, n, axis))
      throw DimensionError("build_composite_M: B_" + std::to_string(axis + 1) +
                           " must act on the derivative shape " +
                           derivative_shape(d, n, axis).to_string());
    if (b->output_length() != q)
      throw DimensionError("build_composite_M: all B_l must share one output length q");
    blocks.push_back(pad_lift_head(b, axis));
    blocks.push_back(pad_lift_tail(b, axis));
  }
  return row_direct_sum(std::move(blocks));
}

OpPtr compose_with_inverse_haar(OpPtr a) {
  return std::make_shared<ComposeInvHaarOp>(std::move(a));
}

OpPtr gradient_op(std::size_t d, std::size_t side) {
  return std::make_shared<GradientLinOp>(d, side);
}

OpPtr haar_op(std::size_t d, std::size_t side) {
  return std::make_shared<HaarLinOp>(d, side);
}

OpPtr op_from_descriptor(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") {
    const Shape in = shape_from_json(j.at("shape"));
    const auto& rows = j.at("rows");
    Eigen::MatrixXcd m(rows.size(), in.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& row = rows[k];
      if (row.size() != in.size()) throw FormatError("dense descriptor: ragged rows");
      for (std::size_t i = 0; i < row.size(); ++i)
        m(k, i) = cxd{row[i][0].get<double>(), row[i][1].get<double>()};
    }
    return dense_op(std::move(m), in);
  }
  if (kind == "gaussian")
    return gaussian_ensemble(j.at("r").get<std::size_t>(), shape_from_json(j.at("shape")),
                             j.at("seed").get<std::uint64_t>());
  if (kind == "bernoulli")
    return bernoulli_ensemble(j.at("r").get<std::size_t>(), shape_from_json(j.at("shape")),
                              j.at("seed").get<std::uint64_t>());
  if (kind == "orthogonal")
    return random_orthogonal_op(shape_from_json(j.at("shape")), j.at("seed").get<std::uint64_t>());
  if (kind == "row-sum" || kind == "column-sum") {
    std::vector<OpPtr> kids;
    for (const auto& kid : j.at("children")) kids.push_back(op_from_descriptor(kid));
    return kind == "row-sum" ? row_direct_sum(std::move(kids))
                             : column_direct_sum(std::move(kids));
  }
  if (kind == "pad-head" || kind == "pad-tail") {
    auto child = op_from_descriptor(j.at("child"));
    const std::size_t axis = j.at("axis").get<std::size_t>();
    return kind == "pad-head" ? pad_lift_head(std::move(child), axis)
                              : pad_lift_tail(std::move(child), axis);
  }
  if (kind == "gradient")
    return gradient_op(j.at("d").get<std::size_t>(), j.at("side").get<std::size_t>());
  if (kind == "haar")
    return haar_op(j.at("d").get<std::size_t>(), j.at("side").get<std::size_t>());
  if (kind == "compose-inv-haar")
    return compose_with_inverse_haar(op_from_descriptor(j.at("child")));
  throw FormatError("op_from_descriptor: unknown kind '" + kind + "'");
}

}  // namespace ndtv
