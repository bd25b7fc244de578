#include "ndtv/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ndtv/errors.hpp"

namespace ndtv {
namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= base;
  return r;
}

std::size_t log2_exact(std::size_t n) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

int parity(std::size_t bits) { return __builtin_popcountll(bits) & 1; }

}  // namespace

std::size_t HaarCoefficients::block_offset(std::size_t level, std::size_t cube_flat) const {
  return (std::size_t{1} << (level * d)) + cube_flat * block_size();
}

HaarCoefficients haar_forward(const NdSignal& x) {
  const std::size_t d = x.dim(), n = x.side();
  if (!is_power_of_two(n) || n < 2)
    throw FormatError("haar_forward: side length " + std::to_string(n) +
                      " is not a power of two >= 2; extend the signal first "
                      "(reflect_extend_pow2)");
  const std::size_t levels = log2_exact(n);
  HaarCoefficients out;
  out.d = d;
  out.side = n;
  out.levels = levels;
  out.flat.assign(x.size(), cxd{0.0, 0.0});

  const std::size_t fan = std::size_t{1} << d;  // 2^d children per cube
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan));

  std::vector<cxd> approx(x.values());
  std::vector<cxd> next;
  std::vector<cxd> child(fan);
  std::vector<std::size_t> cube_idx(d);

  for (std::size_t level = levels; level-- > 0;) {
    const std::size_t side_out = std::size_t{1} << level;
    const std::size_t side_in = side_out << 1;
    const Shape shape_out = Shape::cube(d, side_out);
    const Shape shape_in = Shape::cube(d, side_in);
    const Shape offsets = Shape::cube(d, 2);
    next.assign(shape_out.size(), cxd{0.0, 0.0});
    std::vector<std::size_t> in_idx(d), off_idx(d);
    for (std::size_t k = 0; k < shape_out.size(); ++k) {
      shape_out.unflat(k, cube_idx);
      for (std::size_t b = 0; b < fan; ++b) {
        offsets.unflat(b, off_idx);
        for (std::size_t a = 0; a < d; ++a) in_idx[a] = 2 * cube_idx[a] + off_idx[a];
        child[b] = approx[shape_in.flat(in_idx)];
      }
      const std::size_t base = out.block_offset(level, k);
      for (std::size_t e = 0; e < fan; ++e) {
        cxd acc{0.0, 0.0};
        for (std::size_t b = 0; b < fan; ++b)
          acc += parity(e & b) ? -child[b] : child[b];
        acc *= scale;
        if (e == 0)
          next[k] = acc;
        else
          out.flat[base + (e - 1)] = acc;
      }
    }
    approx.swap(next);
  }
  out.flat[0] = approx[0];
  return out;
}

NdSignal haar_inverse(const HaarCoefficients& c) {
  const std::size_t d = c.d, n = c.side;
  if (c.flat.size() != ipow(n, d))
    throw DimensionError("haar_inverse: coefficient count does not equal N^d");
  const std::size_t fan = std::size_t{1} << d;
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan));

  std::vector<cxd> approx{c.flat[0]};
  std::vector<cxd> next;
  std::vector<cxd> coeffs(fan);
  std::vector<std::size_t> cube_idx(d), out_idx(d), off_idx(d);

  for (std::size_t level = 0; level < c.levels; ++level) {
    const std::size_t side_in = std::size_t{1} << level;
    const std::size_t side_out = side_in << 1;
    const Shape shape_in = Shape::cube(d, side_in);
    const Shape shape_out = Shape::cube(d, side_out);
    const Shape offsets = Shape::cube(d, 2);
    next.assign(shape_out.size(), cxd{0.0, 0.0});
    for (std::size_t k = 0; k < shape_in.size(); ++k) {
      shape_in.unflat(k, cube_idx);
      const std::size_t base = c.block_offset(level, k);
      coeffs[0] = approx[k];
      for (std::size_t e = 1; e < fan; ++e) coeffs[e] = c.flat[base + (e - 1)];
      for (std::size_t b = 0; b < fan; ++b) {
        cxd acc{0.0, 0.0};
        for (std::size_t e = 0; e < fan; ++e)
          acc += parity(e & b) ? -coeffs[e] : coeffs[e];
        acc *= scale;
        offsets.unflat(b, off_idx);
        for (std::size_t a = 0; a < d; ++a) out_idx[a] = 2 * cube_idx[a] + off_idx[a];
        next[shape_out.flat(out_idx)] = acc;
      }
    }
    approx.swap(next);
  }
  return NdSignal(d, n, std::move(approx));
}

HaarCoefficients haar_from_flat(std::size_t d, std::size_t side, std::vector<cxd> flat) {
  if (!is_power_of_two(side) || side < 2)
    throw FormatError("haar_from_flat: side length must be a power of two >= 2");
  if (flat.size() != ipow(side, d))
    throw DimensionError("haar_from_flat: coefficient count does not equal N^d");
  HaarCoefficients c;
  c.d = d;
  c.side = side;
  c.levels = log2_exact(side);
  c.flat = std::move(flat);
  return c;
}

std::vector<HaarBlockRef> partition_blocks(const HaarCoefficients& c) {
  std::vector<HaarBlockRef> blocks;
  blocks.reserve(c.block_count());
  for (std::size_t level = 0; level < c.levels; ++level) {
    const std::size_t cubes = std::size_t{1} << (level * c.d);
    for (std::size_t k = 0; k < cubes; ++k)
      blocks.push_back({level, k, c.block_offset(level, k), c.block_size()});
  }
  return blocks;
}

DecayProfile block_decay_profile(const NdSignal& x, TvVariant variant) {
  if (x.dim() < 2) throw DomainError("block_decay_profile: requires d >= 2");
  DecayProfile profile;
  profile.variant = variant;
  profile.tv_value = tv_seminorm(x, variant);
  if (profile.tv_value == 0.0) {
    profile.degenerate = true;
    return profile;
  }

  NdSignal centered = x;
  cxd mean{0.0, 0.0};
  for (const auto& v : x.values()) mean += v;
  mean /= static_cast<double>(x.size());
  for (auto& v : centered.values()) v -= mean;

  const HaarCoefficients c = haar_forward(centered);
  const auto blocks = partition_blocks(c);
  std::vector<double> norms(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < blocks[i].size; ++j) s += std::norm(c.flat[blocks[i].offset + j]);
    norms[i] = std::sqrt(s);
  }
  std::sort(norms.begin(), norms.end(), std::greater<double>());

  const double dval = static_cast<double>(x.dim());
  const double numer = variant == TvVariant::aniso ? profile.tv_value
                                                   : std::sqrt(dval) * profile.tv_value;
  const double denom_scale = std::pow(2.0, dval / 2.0 - 1.0);
  profile.rows.reserve(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    DecayRow row;
    row.k = i + 1;
    row.norm = norms[i];
    row.bound = numer / (static_cast<double>(row.k) * denom_scale);
    row.ratio = row.norm / row.bound;
    profile.empirical_constant = std::max(profile.empirical_constant, row.ratio);
    profile.rows.push_back(row);
  }
  return profile;
}

std::string decay_profile_csv(const DecayProfile& profile) {
  std::ostringstream os;
  os << "k,norm,bound,ratio\n";
  os.precision(17);
  for (const auto& row : profile.rows)
    os << row.k << "," << row.norm << "," << row.bound << "," << row.ratio << "\n";
  return os.str();
}

}  // namespace ndtv
