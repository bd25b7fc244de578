#include "ndtv/signal.hpp"

#include <cmath>

namespace ndtv {

NdArray::NdArray(Shape shape, std::vector<cxd> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.size())
    throw DimensionError("NdArray: value count " + std::to_string(values_.size()) +
                         " does not match shape " + shape_.to_string());
}

NdSignal::NdSignal(std::size_t d, std::size_t n) : d_(d), n_(n) {
  if (d == 0) throw DimensionError("NdSignal: d must be >= 1");
  if (n == 0) throw DimensionError("NdSignal: N must be >= 1");
  values_.assign(shape().size(), cxd{0.0, 0.0});
}

NdSignal::NdSignal(std::size_t d, std::size_t n, std::vector<cxd> values)
    : d_(d), n_(n), values_(std::move(values)) {
  if (d == 0) throw DimensionError("NdSignal: d must be >= 1");
  if (n == 0) throw DimensionError("NdSignal: N must be >= 1");
  if (values_.size() != shape().size())
    throw DimensionError("NdSignal: value count " + std::to_string(values_.size()) +
                         " does not equal N^d");
}

MixedField::MixedField(std::size_t d, std::size_t n, std::size_t channels)
    : d_(d), n_(n), channels_(channels) {
  if (d == 0 || n == 0 || channels == 0)
    throw DimensionError("MixedField: d, N and channel count must be positive");
  values_.assign(pixel_count() * channels_, cxd{0.0, 0.0});
}

MixedField::MixedField(std::size_t d, std::size_t n, std::size_t channels,
                       std::vector<cxd> values)
    : d_(d), n_(n), channels_(channels), values_(std::move(values)) {
  if (d == 0 || n == 0 || channels == 0)
    throw DimensionError("MixedField: d, N and channel count must be positive");
  if (values_.size() != pixel_count() * channels_)
    throw DimensionError("MixedField: value count does not equal channels * N^d");
}

std::size_t MixedField::pixel_count() const {
  std::size_t n = 1;
  for (std::size_t a = 0; a < d_; ++a) n *= n_;
  return n;
}

double MixedField::block_norm(std::size_t pixel) const {
  double s = 0.0;
  for (std::size_t l = 0; l < channels_; ++l) s += std::norm(at(pixel, l));
  return std::sqrt(s);
}

Shape MixedField::storage_shape() const {
  std::vector<std::size_t> e(d_, n_);
  e.push_back(channels_);
  return Shape(std::move(e));
}

cxd inner_product(std::span<const cxd> x, std::span<const cxd> y) {
  if (x.size() != y.size()) throw DimensionError("inner_product: length mismatch");
  cxd acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::conj(y[i]);
  return acc;
}

cxd inner_product(const NdSignal& x, const NdSignal& y) {
  if (x.dim() != y.dim() || x.side() != y.side())
    throw DimensionError("inner_product: signals have different (d, N)");
  return inner_product(x.span(), y.span());
}

double l2_norm(std::span<const cxd> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

double lp_norm(std::span<const cxd> x, double p) {
  if (p < 1.0) throw DomainError("lp_norm: p must be >= 1");
  if (p == 2.0) return l2_norm(x);
  if (p == 1.0) {
    double s = 0.0;
    for (const auto& v : x) s += std::abs(v);
    return s;
  }
  double s = 0.0;
  for (const auto& v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const NdSignal& x, double p) { return lp_norm(x.span(), p); }

double mixed_l12_norm(const MixedField& g) {
  double s = 0.0;
  for (std::size_t pix = 0; pix < g.pixel_count(); ++pix) s += g.block_norm(pix);
  return s;
}

}  // namespace ndtv
