#include "dynsparse/core.hpp"

#include <cmath>
#include <numbers>

namespace dynsparse {

Field field_from_string(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw ConfigError("unknown scalar field '" + s + "' (expected real or complex)");
}

SizeError::SizeError(const std::string& what, Index expected, Index received)
    : std::invalid_argument(what + ": expected length " + std::to_string(expected) +
                            ", received " + std::to_string(received)),
      expected_(expected),
      received_(received) {}

bool all_finite(const Vec& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec gaussian_vector(Index n, std::uint64_t seed, Field field) {
  CounterRng rng(seed);
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    const double re = rng.gaussian(2 * k);
    const double im = field == Field::Complex ? rng.gaussian(2 * k + 1) : 0.0;
    v[i] = Scalar(re, im);
  }
  return v;
}

Mat gaussian_matrix(Index rows, Index cols, std::uint64_t seed, Field field) {
  Vec flat = gaussian_vector(rows * cols, seed, field);
  return Eigen::Map<Mat>(flat.data(), rows, cols);
}

}  // namespace dynsparse
