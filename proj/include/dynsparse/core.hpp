#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dynsparse {

using Scalar = std::complex<double>;
using Index = Eigen::Index;

/// Dense column vector used for every operand. Real problems keep a zero
/// imaginary part; real operators act on real and imaginary parts separately.
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RealMat = Eigen::MatrixXd;

enum class Field { Real, Complex };

inline const char* to_string(Field f) { return f == Field::Real ? "real" : "complex"; }
Field field_from_string(const std::string& s);

/// Raised when an operand length does not match what an operator expects.
class SizeError : public std::invalid_argument {
public:
  SizeError(const std::string& what, Index expected, Index received);
  Index expected() const { return expected_; }
  Index received() const { return received_; }

private:
  Index expected_;
  Index received_;
};

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Iterative method produced a non-finite iterate or energy.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void check_size(const char* what, Index expected, Index received) {
  if (expected != received) throw SizeError(what, expected, received);
}

bool all_finite(const Vec& v);

/// Counter-based SplitMix64 stream. Draw k of stream `seed` is a pure function
/// of (seed, k), so results do not depend on call order or platform RNG.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller on draws (2k, 2k+1).
  double gaussian(std::uint64_t counter) const;

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

/// Standard Gaussian vector; complex field draws independent N(0,1) real and
/// imaginary parts.
Vec gaussian_vector(Index n, std::uint64_t seed, Field field);
Mat gaussian_matrix(Index rows, Index cols, std::uint64_t seed, Field field);

}  // namespace dynsparse
