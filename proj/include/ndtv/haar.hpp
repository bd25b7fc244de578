#pragma once

#include <cstddef>
#include <vector>

#include "ndtv/gradient.hpp"
#include "ndtv/signal.hpp"

namespace ndtv {

// Orthonormal d-dimensional Haar coefficients of a signal with side N = 2^n.
//
// Flat layout: index 0 holds the constant coefficient c0. Detail coefficients
// follow by scale j = 0..n-1; the block of dyadic cube k at scale j occupies
// the 2^d - 1 slots starting at 2^(j*d) + cube_flat * (2^d - 1), orientations
// ordered by their axis bitmask e = 1..2^d-1 (last axis = lowest bit).
struct HaarCoefficients {
  std::size_t d = 0;
  std::size_t side = 0;    // N
  std::size_t levels = 0;  // n, N = 2^n
  std::vector<cxd> flat;

  cxd c0() const { return flat[0]; }
  std::size_t block_size() const { return (std::size_t{1} << d) - 1; }
  std::size_t block_count() const { return (flat.size() - 1) / block_size(); }
  std::size_t block_offset(std::size_t level, std::size_t cube_flat) const;
};

// One dyadic-cube coefficient block.
struct HaarBlockRef {
  std::size_t level = 0;      // scale j
  std::size_t cube = 0;       // flat cube index within [2^j]^d
  std::size_t offset = 0;     // position of the block in the flat layout
  std::size_t size = 0;       // 2^d - 1
};

// Forward transform by recursive dyadic averaging/differencing. Requires
// N = 2^n with n >= 1; other side lengths raise a FormatError that points at
// reflect_extend_pow2 as the remedy.
HaarCoefficients haar_forward(const NdSignal& x);

// Inverse (= adjoint; the transform is orthonormal).
NdSignal haar_inverse(const HaarCoefficients& c);

// Convenience: coefficients as/from the canonical flat vector.
HaarCoefficients haar_from_flat(std::size_t d, std::size_t side, std::vector<cxd> flat);

// Every detail coefficient in exactly one block; c0 excluded.
std::vector<HaarBlockRef> partition_blocks(const HaarCoefficients& c);

struct DecayRow {
  std::size_t k = 0;   // 1-based rank by descending block norm
  double norm = 0.0;   // ||c_(k)||_2
  double bound = 0.0;  // TV-based decay bound without the universal constant
  double ratio = 0.0;  // norm / bound
};

struct DecayProfile {
  bool degenerate = false;     // constant signal: no usable profile
  bool mean_subtracted = true; // profile is computed on x minus its mean
  TvVariant variant = TvVariant::aniso;
  double tv_value = 0.0;
  double empirical_constant = 0.0;  // max_k ratio_k
  std::vector<DecayRow> rows;
};

// Sorted block-norm decay against the TV-over-k bound. The signal is centered
// internally; the caller's signal is untouched. Requires d >= 2.
DecayProfile block_decay_profile(const NdSignal& x, TvVariant variant);

std::string decay_profile_csv(const DecayProfile& profile);

}  // namespace ndtv
