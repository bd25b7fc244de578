#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ndtv/signal.hpp"

namespace ndtv {

// Forward-difference gradient with zero rows on the trailing face of each
// axis; channel l of the field vanishes wherever the axis-l index is maximal.
using GradientField = MixedField;

enum class TvVariant { aniso, iso };

// Set of pixels whose blocks form the support S = pixels x [channels].
struct BlockSupport {
  std::vector<std::size_t> pixels;  // flat pixel indices, sorted ascending
  std::size_t count() const { return pixels.size(); }
  bool contains(std::size_t pixel) const;
};

Shape derivative_shape(std::size_t d, std::size_t n, std::size_t axis);

// Forward difference along `axis` (0-based); output extent along that axis is
// N-1. Requires N >= 2 and axis < d.
NdArray directional_derivative(const NdSignal& x, std::size_t axis);

// d-dimensional gradient, d >= 2.
GradientField gradient(const NdSignal& x);

// Exact adjoint of `gradient` under the Hermitian inner product; face entries
// of the input field are invisible to it, mirroring the zero rows.
NdSignal divergence_adjoint(const GradientField& g);

// aniso: entrywise l1 of the gradient; iso: mixed l1-l2 norm. d >= 2.
double tv_seminorm(const NdSignal& x, TvVariant variant);

// The s pixels of largest block norm (ties broken by pixel order) and the
// field truncated to them.
std::pair<BlockSupport, GradientField> best_s_blocks(const GradientField& g, std::size_t s);

GradientField restrict_to_support(const GradientField& g, const BlockSupport& support);
GradientField zero_on_support(const GradientField& g, const BlockSupport& support);

// Proximal map of tau * ||.||_{1,2}: blockwise shrinkage by max(0, 1 - tau/|b|).
GradientField group_soft_threshold(const GradientField& g, double tau);

// Entrywise complex soft threshold (prox of tau * ||.||_1).
GradientField scalar_soft_threshold(const GradientField& g, double tau);

// Reflection extension of the side length to the next power of two. Identity
// when N is already a power of two; never grows TV by more than 2^d.
NdSignal reflect_extend_pow2(const NdSignal& x);

bool is_power_of_two(std::size_t n);

}  // namespace ndtv
