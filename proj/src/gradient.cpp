#include "ndtv/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ndtv/errors.hpp"

namespace ndtv {
namespace {

std::size_t axis_stride(std::size_t d, std::size_t n, std::size_t axis) {
  std::size_t s = 1;
  for (std::size_t a = d; a-- > axis + 1;) s *= n;
  return s;
}

}  // namespace

bool BlockSupport::contains(std::size_t pixel) const {
  return std::binary_search(pixels.begin(), pixels.end(), pixel);
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

Shape derivative_shape(std::size_t d, std::size_t n, std::size_t axis) {
  if (axis >= d) throw DomainError("derivative_shape: axis out of range");
  if (n < 2) throw DomainError("derivative_shape: N must be >= 2");
  std::vector<std::size_t> e(d, n);
  e[axis] = n - 1;
  return Shape(std::move(e));
}

NdArray directional_derivative(const NdSignal& x, std::size_t axis) {
  const std::size_t d = x.dim(), n = x.side();
  if (axis >= d) throw DomainError("directional_derivative: axis out of range");
  if (n < 2) throw DomainError("directional_derivative: N must be >= 2");
  NdArray out(derivative_shape(d, n, axis));
  const std::size_t stride = axis_stride(d, n, axis);
  std::size_t outer = 1, inner = stride;
  for (std::size_t a = 0; a < axis; ++a) outer *= n;
  std::size_t w = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * stride;
    for (std::size_t m = 0; m + 1 < n; ++m)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t f = base + m * stride + i;
        out[w++] = x[f + stride] - x[f];
      }
  }
  return out;
}

GradientField gradient(const NdSignal& x) {
  const std::size_t d = x.dim(), n = x.side();
  if (d < 2)
    throw DomainError("gradient: requires d >= 2 (the TV theory does not cover d = 1)");
  GradientField g(d, n, d);
  auto& v = g.values();
  std::vector<std::size_t> idx(d);
  const Shape cube = x.shape();
  for (std::size_t f = 0; f < x.size(); ++f) {
    cube.unflat(f, idx);
    for (std::size_t a = 0; a < d; ++a) {
      if (idx[a] + 1 < n) {
        const std::size_t stride = axis_stride(d, n, a);
        v[f * d + a] = x[f + stride] - x[f];
      }
    }
  }
  return g;
}

NdSignal divergence_adjoint(const GradientField& g) {
  const std::size_t d = g.dim(), n = g.side();
  if (g.channels() != d)
    throw DimensionError("divergence_adjoint: channel count must equal d");
  NdSignal out(d, n);
  std::vector<std::size_t> idx(d);
  const Shape cube = Shape::cube(d, n);
  for (std::size_t f = 0; f < out.size(); ++f) {
    cube.unflat(f, idx);
    cxd acc{0.0, 0.0};
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t stride = axis_stride(d, n, a);
      if (idx[a] > 0) acc += g.at(f - stride, a);
      if (idx[a] + 1 < n) acc -= g.at(f, a);
    }
    out[f] = acc;
  }
  return out;
}

double tv_seminorm(const NdSignal& x, TvVariant variant) {
  if (x.dim() < 2)
    throw DomainError("tv_seminorm: requires d >= 2 (the TV theory does not cover d = 1)");
  const GradientField g = gradient(x);
  if (variant == TvVariant::aniso) return lp_norm(g.span(), 1.0);
  return mixed_l12_norm(g);
}

std::pair<BlockSupport, GradientField> best_s_blocks(const GradientField& g, std::size_t s) {
  const std::size_t pixels = g.pixel_count();
  if (s > pixels) throw DomainError("best_s_blocks: s exceeds the pixel count");
  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(pixels);
  for (std::size_t p = 0; p < pixels; ++p) norms[p] = g.block_norm(p);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (norms[a] != norms[b]) return norms[a] > norms[b];
    return a < b;
  });
  BlockSupport support;
  support.pixels.assign(order.begin(), order.begin() + s);
  std::sort(support.pixels.begin(), support.pixels.end());
  return {support, restrict_to_support(g, support)};
}

GradientField restrict_to_support(const GradientField& g, const BlockSupport& support) {
  GradientField out(g.dim(), g.side(), g.channels());
  for (std::size_t p : support.pixels)
    for (std::size_t l = 0; l < g.channels(); ++l) out.at(p, l) = g.at(p, l);
  return out;
}

GradientField zero_on_support(const GradientField& g, const BlockSupport& support) {
  GradientField out = g;
  for (std::size_t p : support.pixels)
    for (std::size_t l = 0; l < g.channels(); ++l) out.at(p, l) = cxd{0.0, 0.0};
  return out;
}

GradientField group_soft_threshold(const GradientField& g, double tau) {
  if (tau < 0.0) throw DomainError("group_soft_threshold: tau must be >= 0");
  GradientField out = g;
  for (std::size_t p = 0; p < g.pixel_count(); ++p) {
    const double norm = g.block_norm(p);
    const double factor = norm > tau ? 1.0 - tau / norm : 0.0;
    for (std::size_t l = 0; l < g.channels(); ++l) out.at(p, l) *= factor;
  }
  return out;
}

GradientField scalar_soft_threshold(const GradientField& g, double tau) {
  if (tau < 0.0) throw DomainError("scalar_soft_threshold: tau must be >= 0");
  GradientField out = g;
  for (auto& v : out.values()) {
    const double a = std::abs(v);
    v *= (a > tau ? 1.0 - tau / a : 0.0);
  }
  return out;
}

NdSignal reflect_extend_pow2(const NdSignal& x) {
  const std::size_t n = x.side();
  if (is_power_of_two(n)) return x;
  std::size_t m = 1;
  while (m < n) m <<= 1;
  const std::size_t d = x.dim();
  NdSignal out(d, m);
  const Shape in_shape = x.shape();
  const Shape out_shape = out.shape();
  std::vector<std::size_t> idx(d), src(d);
  for (std::size_t f = 0; f < out.size(); ++f) {
    out_shape.unflat(f, idx);
    for (std::size_t a = 0; a < d; ++a) src[a] = idx[a] < n ? idx[a] : 2 * n - 1 - idx[a];
    out[f] = x[in_shape.flat(src)];
  }
  return out;
}

}  // namespace ndtv
