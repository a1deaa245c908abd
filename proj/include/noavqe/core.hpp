#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace noavqe {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, circuit or experiment configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Operand sizes or qubit indices that do not fit together.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A numerical invariant that should hold by construction was violated.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// Shot allocation cannot cover the observable.
class AllocationError : public Error {
  public:
    using Error::Error;
};

/// The objective returned NaN or infinity.
class NonFiniteError : public Error {
  public:
    using Error::Error;
};

// SplitMix64 finalizer. Used to derive independent child seeds from a
// parent seed and a stream index; all randomness flows through
// std::mt19937_64 seeded with values from here.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

} // namespace noavqe
