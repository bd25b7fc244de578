#pragma once

#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ndtv/errors.hpp"

namespace ndtv {

using cxd = std::complex<double>;

// Rectangular index space with lexicographic storage order, last axis fastest.
// Indices are 0-based internally.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
    for (auto e : extents_)
      if (e == 0) throw DimensionError("Shape: zero extent");
  }
  static Shape cube(std::size_t d, std::size_t n) {
    return Shape(std::vector<std::size_t>(d, n));
  }

  std::size_t rank() const { return extents_.size(); }
  std::size_t extent(std::size_t axis) const { return extents_[axis]; }
  const std::vector<std::size_t>& extents() const { return extents_; }

  std::size_t size() const {
    std::size_t n = 1;
    for (auto e : extents_) n *= e;
    return n;
  }

  std::size_t flat(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a) f = f * extents_[a] + idx[a];
    return f;
  }

  void unflat(std::size_t f, std::span<std::size_t> idx) const {
    for (std::size_t a = extents_.size(); a-- > 0;) {
      idx[a] = f % extents_[a];
      f /= extents_[a];
    }
  }

  std::vector<std::size_t> unflat(std::size_t f) const {
    std::vector<std::size_t> idx(extents_.size());
    unflat(f, idx);
    return idx;
  }

  bool operator==(const Shape& o) const { return extents_ == o.extents_; }
  bool operator!=(const Shape& o) const { return !(*this == o); }

  bool is_cube() const {
    for (auto e : extents_)
      if (e != extents_[0]) return false;
    return !extents_.empty();
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t a = 0; a < extents_.size(); ++a) {
      if (a) s += "x";
      s += std::to_string(extents_[a]);
    }
    return s + "]";
  }

 private:
  std::vector<std::size_t> extents_;
};

}  // namespace ndtv
