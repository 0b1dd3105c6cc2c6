#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rpca {

using Rng = std::mt19937_64;

/// Independent stream `stream` of the generator family rooted at `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x52504341u};
  return Rng(seq);
}

/// Laplace(location, scale) by inversion. scale == 0 returns location.
inline double sample_laplace(Rng& rng, double location, double scale) {
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  double u = uniform(rng);
  double magnitude = -std::log1p(-2.0 * std::abs(u));
  return location + (u < 0 ? -scale : scale) * magnitude;
}

}  // namespace rpca
