#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ndtv/shape.hpp"

namespace ndtv {

// General dense complex array over a rectangular shape. Derivative arrays
// (extent N-1 along one axis) and operator component arrays live here.
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(Shape shape)
      : shape_(std::move(shape)), values_(shape_.size(), cxd{0.0, 0.0}) {}
  NdArray(Shape shape, std::vector<cxd> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  cxd& operator[](std::size_t f) { return values_[f]; }
  const cxd& operator[](std::size_t f) const { return values_[f]; }
  cxd& at(std::span<const std::size_t> idx) { return values_[shape_.flat(idx)]; }
  const cxd& at(std::span<const std::size_t> idx) const { return values_[shape_.flat(idx)]; }

  std::vector<cxd>& values() { return values_; }
  const std::vector<cxd>& values() const { return values_; }
  std::span<const cxd> span() const { return values_; }
  std::span<cxd> span() { return values_; }

 private:
  Shape shape_;
  std::vector<cxd> values_;
};

// d-dimensional signal of side length N: values over [N]^d in lexicographic
// order, last coordinate fastest.
class NdSignal {
 public:
  NdSignal() = default;
  NdSignal(std::size_t d, std::size_t n);
  NdSignal(std::size_t d, std::size_t n, std::vector<cxd> values);

  std::size_t dim() const { return d_; }
  std::size_t side() const { return n_; }
  std::size_t size() const { return values_.size(); }
  Shape shape() const { return Shape::cube(d_, n_); }

  cxd& operator[](std::size_t f) { return values_[f]; }
  const cxd& operator[](std::size_t f) const { return values_[f]; }
  cxd& at(std::span<const std::size_t> idx) { return values_[shape().flat(idx)]; }
  const cxd& at(std::span<const std::size_t> idx) const { return values_[shape().flat(idx)]; }

  std::vector<cxd>& values() { return values_; }
  const std::vector<cxd>& values() const { return values_; }
  std::span<const cxd> span() const { return values_; }
  std::span<cxd> span() { return values_; }

  NdArray as_array() const { return NdArray(shape(), values_); }

 private:
  std::size_t d_ = 0, n_ = 0;
  std::vector<cxd> values_;
};

// Per-pixel vectors over [N]^d x [channels], channel index fastest: the value
// at (pixel p, channel l) sits at p*channels + l, so a pixel block is
// contiguous.
class MixedField {
 public:
  MixedField() = default;
  MixedField(std::size_t d, std::size_t n, std::size_t channels);
  MixedField(std::size_t d, std::size_t n, std::size_t channels, std::vector<cxd> values);

  std::size_t dim() const { return d_; }
  std::size_t side() const { return n_; }
  std::size_t channels() const { return channels_; }
  std::size_t pixel_count() const;
  std::size_t size() const { return values_.size(); }

  cxd& at(std::size_t pixel, std::size_t channel) { return values_[pixel * channels_ + channel]; }
  const cxd& at(std::size_t pixel, std::size_t channel) const {
    return values_[pixel * channels_ + channel];
  }
  std::span<const cxd> block(std::size_t pixel) const {
    return std::span<const cxd>(values_).subspan(pixel * channels_, channels_);
  }
  std::span<cxd> block(std::size_t pixel) {
    return std::span<cxd>(values_).subspan(pixel * channels_, channels_);
  }
  double block_norm(std::size_t pixel) const;

  std::vector<cxd>& values() { return values_; }
  const std::vector<cxd>& values() const { return values_; }
  std::span<const cxd> span() const { return values_; }

  // Storage shape [N]^d x [channels] (channel axis last, hence fastest).
  Shape storage_shape() const;

 private:
  std::size_t d_ = 0, n_ = 0, channels_ = 0;
  std::vector<cxd> values_;
};

// Hermitian inner product, conjugate-linear in the second argument.
cxd inner_product(const NdSignal& x, const NdSignal& y);
cxd inner_product(std::span<const cxd> x, std::span<const cxd> y);

// Entrywise lp norm, p >= 1.
double lp_norm(const NdSignal& x, double p);
double lp_norm(std::span<const cxd> x, double p);

double l2_norm(std::span<const cxd> x);

// Sum over pixels of the Euclidean norm of the channel block.
double mixed_l12_norm(const MixedField& g);

}  // namespace ndtv
