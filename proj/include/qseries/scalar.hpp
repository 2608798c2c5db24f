#ifndef QSERIES_SCALAR_HPP
#define QSERIES_SCALAR_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qseries {

using Complex = std::complex<double>;

/// Absolute tolerance below which a linear factor counts as vanishing.
/// Shared by the pochhammer products, the series engine and the catalog.
inline constexpr double kVanishTol = 1e-12;

/// Relative distance used when matching a parameter against q^{-m} or an
/// integer for termination detection.
inline constexpr double kTermDetectTol = 1e-10;

/// Proximity (relative) at which a closed-form product or Gamma factor is
/// considered too close to a singular point for well-conditioned sampling.
inline constexpr double kPoleMargin = 1e-6;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A Gamma pole or a vanishing denominator factor inside a series term.
class PoleError : public Error {
public:
  using Error::Error;
};

/// Negative-index shifted factorial with a vanishing reciprocal factor.
class DivisionByVanishingFactor : public Error {
public:
  using Error::Error;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

/// Empirical term ratios exceed modulus one persistently.
class DivergentSeries : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class SamplingExhausted : public Error {
public:
  using Error::Error;
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void ensure_finite(const Complex& z, const char* what) {
  if (!is_finite(z)) throw OverflowError(std::string(what) + ": non-finite value");
}

/// Integer power by binary exponentiation; negative exponents invert.
Complex ipow(Complex base, long long e);

/// Compensated (Neumaier) accumulator over complex terms.
struct AccumulatorState {
  Complex sum{0.0, 0.0};
  Complex compensation{0.0, 0.0};
  long long terms_added = 0;

  Complex value() const { return sum + compensation; }
};

/// Adds one finite term; throws OverflowError if the running sum leaves the
/// representable range.
AccumulatorState accumulate(AccumulatorState state, const Complex& term);

/// Complex Gamma via a Lanczos rational approximation, reflected into
/// Re(z) < 1/2.  Relative error is ~1e-13 for |z| <= 50 away from the
/// nonpositive integers.  Throws PoleError within kVanishTol of a pole.
Complex gamma(const Complex& z);

}  // namespace qseries

#endif
