#include "ndtv/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ndtv/errors.hpp"
#include "ndtv/rng.hpp"

namespace ndtv {

PhantomKind phantom_kind_from_name(const std::string& name) {
  if (name == "gradient-sparse-random") return PhantomKind::gradient_sparse_random;
  if (name == "piecewise-constant-cubes") return PhantomKind::piecewise_constant_cubes;
  if (name == "step-edge") return PhantomKind::step_edge;
  throw ConfigError("unknown phantom kind '" + name + "'");
}

const char* phantom_kind_name(PhantomKind k) {
  switch (k) {
    case PhantomKind::gradient_sparse_random: return "gradient-sparse-random";
    case PhantomKind::piecewise_constant_cubes: return "piecewise-constant-cubes";
    case PhantomKind::step_edge: return "step-edge";
  }
  return "unknown";
}

namespace {

// A unit spike at pixel beta has gradient blocks at beta and at each existing
// lower neighbor beta - e_a. Pinning u coordinates to the lower face removes
// u of the neighbor blocks, so a spike contributes exactly d + 1 - u blocks.
// Spikes at pairwise l-infinity distance >= 3 never share or cancel blocks.
NdSignal gradient_sparse_phantom(const PhantomSpec& spec) {
  const std::size_t d = spec.d, n = spec.side, s = spec.s;
  if (d < 2) throw ConfigError("gradient-sparse phantom: requires d >= 2");
  if (n < 4) throw ConfigError("gradient-sparse phantom: requires N >= 4");
  if (s == 0) throw ConfigError("gradient-sparse phantom: s must be >= 1");

  const std::size_t full = s / (d + 1);
  const std::size_t rem = s % (d + 1);
  const std::size_t spike_count = full + (rem > 0 ? 1 : 0);

  CounterRng rng(spec.seed, /*stream=*/8);
  std::vector<std::vector<std::size_t>> placed;
  auto far_enough = [&](const std::vector<std::size_t>& pos) {
    for (const auto& other : placed) {
      std::size_t dist = 0;
      for (std::size_t a = 0; a < d; ++a) {
        const std::size_t diff = pos[a] > other[a] ? pos[a] - other[a] : other[a] - pos[a];
        dist = std::max(dist, diff);
      }
      if (dist < 3) return false;
    }
    return true;
  };

  NdSignal x(d, n);
  const Shape cube = x.shape();
  for (std::size_t k = 0; k < spike_count; ++k) {
    const std::size_t pinned = (k == spike_count - 1 && rem > 0) ? d + 1 - rem : 0;
    std::vector<std::size_t> pos(d);
    bool ok = false;
    for (int attempt = 0; attempt < 20000 && !ok; ++attempt) {
      for (std::size_t a = 0; a < d; ++a)
        pos[a] = a < pinned ? 0 : 1 + static_cast<std::size_t>(rng.next_below(n - 2));
      ok = far_enough(pos);
    }
    if (!ok)
      throw ConfigError("gradient-sparse phantom: cannot place " + std::to_string(spike_count) +
                        " separated spikes on side " + std::to_string(n));
    placed.push_back(pos);
    const double amp = rng.sign() * rng.next_uniform(spec.amp_lo, spec.amp_hi);
    x[cube.flat(pos)] += amp;
  }
  return x;
}

NdSignal cubes_phantom(const PhantomSpec& spec) {
  const std::size_t d = spec.d, n = spec.side;
  CounterRng rng(spec.seed, /*stream=*/9);
  NdSignal x(d, n);
  const Shape cube = x.shape();
  std::vector<std::size_t> lo(d), hi(d), idx(d);
  for (std::size_t b = 0; b < std::max<std::size_t>(spec.blocks, 1); ++b) {
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = static_cast<std::size_t>(rng.next_below(n));
      const std::size_t len = 1 + static_cast<std::size_t>(rng.next_below(std::max<std::size_t>(n / 2, 1)));
      hi[a] = std::min(n, lo[a] + len);
    }
    const double amp = rng.sign() * rng.next_uniform(spec.amp_lo, spec.amp_hi);
    for (std::size_t f = 0; f < x.size(); ++f) {
      cube.unflat(f, idx);
      bool inside = true;
      for (std::size_t a = 0; a < d && inside; ++a) inside = idx[a] >= lo[a] && idx[a] < hi[a];
      if (inside) x[f] += amp;
    }
  }
  return x;
}

NdSignal step_edge_phantom(const PhantomSpec& spec) {
  const std::size_t d = spec.d, n = spec.side;
  NdSignal x(d, n);
  const Shape cube = x.shape();
  std::vector<std::size_t> idx(d);
  for (std::size_t f = 0; f < x.size(); ++f) {
    cube.unflat(f, idx);
    if (idx[0] >= n / 2) x[f] = cxd{1.0, 0.0};
  }
  return x;
}

}  // namespace

NdSignal make_phantom(const PhantomSpec& spec) {
  if (spec.d == 0 || spec.side == 0) throw ConfigError("phantom: d and N must be positive");
  switch (spec.kind) {
    case PhantomKind::gradient_sparse_random: return gradient_sparse_phantom(spec);
    case PhantomKind::piecewise_constant_cubes: return cubes_phantom(spec);
    case PhantomKind::step_edge: return step_edge_phantom(spec);
  }
  throw ConfigError("phantom: unknown kind");
}

}  // namespace ndtv
