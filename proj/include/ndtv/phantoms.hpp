#pragma once

#include <cstdint>
#include <string>

#include "ndtv/signal.hpp"

namespace ndtv {

enum class PhantomKind { gradient_sparse_random, piecewise_constant_cubes, step_edge };

PhantomKind phantom_kind_from_name(const std::string& name);
const char* phantom_kind_name(PhantomKind k);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::gradient_sparse_random;
  std::size_t d = 2;
  std::size_t side = 32;
  std::size_t s = 0;       // gradient-sparse: exact nonzero block count
  std::size_t blocks = 4;  // piecewise-constant-cubes: cube count
  double amp_lo = 0.5;
  double amp_hi = 1.5;
  std::uint64_t seed = 0;
};

// Deterministic phantom for the given spec. The gradient-sparse kind places
// isolated spikes whose combined gradient has exactly s nonzero pixel blocks.
NdSignal make_phantom(const PhantomSpec& spec);

}  // namespace ndtv
