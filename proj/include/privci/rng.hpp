#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "privci/errors.hpp"
#include "privci/stats.hpp"

namespace privci {

using Rng = std::mt19937_64;

// Finalizer from the splitmix64 generator; bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

[[nodiscard]] constexpr std::uint64_t hash_combine(std::uint64_t h,
                                                   std::uint64_t v) noexcept {
  return mix64(h + 0x9E3779B97F4A7C15ULL + v);
}

// Stable seed derivation: distinct (stream, substream) pairs yield
// independent-looking seeds from one master seed, with no sequential
// state shared between them.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::uint64_t stream,
                                                  std::uint64_t substream) noexcept {
  return hash_combine(hash_combine(mix64(master ^ 0xD1B54A32D192ED03ULL), stream),
                      substream);
}

[[nodiscard]] inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform on the open interval (0, 1): 53-bit mantissa centered on bin
// midpoints, so neither endpoint is reachable and log/quantile transforms
// are safe.
[[nodiscard]] inline double uniform_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

[[nodiscard]] inline double sample_standard_gaussian(Rng& rng) {
  return normal_quantile(uniform_unit(rng));
}

[[nodiscard]] inline double sample_gaussian(Rng& rng, double mean, double sd) {
  if (!(sd >= 0.0)) throw InvalidParameter("gaussian sd must be >= 0");
  return mean + sd * sample_standard_gaussian(rng);
}

// Laplace(0, scale) by inverse CDF. scale == 0 returns exactly 0 (used by
// the infinite-epsilon path), and still advances the generator once so
// downstream draws do not depend on the noise level.
[[nodiscard]] inline double sample_laplace(Rng& rng, double scale) {
  if (!(scale >= 0.0)) throw InvalidParameter("laplace scale must be >= 0");
  const double u = uniform_unit(rng) - 0.5;
  if (scale == 0.0) return 0.0;
  const double mag = -std::log(1.0 - 2.0 * std::abs(u));
  return u < 0.0 ? -scale * mag : scale * mag;
}

// Exponential with the given mean, by inverse CDF. mean == 0 returns
// exactly 0 and still advances the generator once.
[[nodiscard]] inline double sample_exponential(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw InvalidParameter("exponential mean must be >= 0");
  const double u = uniform_unit(rng);
  if (mean == 0.0) return 0.0;
  return -mean * std::log1p(-u);
}

}  // namespace privci
