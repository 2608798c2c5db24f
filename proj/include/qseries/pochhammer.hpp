#ifndef QSERIES_POCHHAMMER_HPP
#define QSERIES_POCHHAMMER_HPP

#include <optional>
#include <span>

#include "qseries/scalar.hpp"

namespace qseries {

/// The base of a q-series; the modulus must lie strictly between 0 and 1.
struct QBase {
  Complex q;

  explicit QBase(Complex base) : q(base) {
    const double m = std::abs(q);
    if (!(m > 0.0) || !(m < 1.0) || !is_finite(q))
      throw DomainError("QBase: |q| must lie in (0,1)");
  }
};

struct PochResult {
  Complex value{1.0, 0.0};
  bool is_zero = false;
  int zero_order = 0;  // number of vanishing factors
};

/// (a;q)_k for integer k of either sign.  Nonnegative k multiplies the
/// factors (1 - a q^j) directly and reports vanishing ones through
/// zero_order; negative k uses the reciprocal product
/// 1 / prod_{j=1..-k} (1 - a q^{-j}) and throws DivisionByVanishingFactor
/// when a factor vanishes, so pole reporting stays local.
PochResult qpoch(const Complex& a, const QBase& base, long k);

/// (a;q)_infinity.  Truncates once |a q^j| drops below 1e-17 and applies a
/// first-order tail correction.
Complex qpoch_inf(const Complex& a, const QBase& base);

/// (a_1,...,a_m;q)_k with k an integer or (k = nullopt) infinity.
PochResult qpoch_multi(std::span<const Complex> params, const QBase& base,
                       std::optional<long> k);

/// Ordinary shifted factorial (a)_k by direct product, both signs of k.
/// Never routes through Gamma, so pole cancellations stay exact.
PochResult poch(const Complex& a, long k);

/// (x;q)_k / (y;q)_k with the two products interleaved factor by factor.
/// For k < 0 each quotient is computed as (q^j - y)/(q^j - x), which stays
/// bounded when q^{-j} would overflow.  Throws DivisionByVanishingFactor
/// when a denominator factor vanishes.
Complex qpoch_ratio(const Complex& x, const Complex& y, const QBase& base, long k);

/// (x)_k / (y)_k, factor-paired; both signs of k.
Complex poch_ratio(const Complex& x, const Complex& y, long k);

}  // namespace qseries

#endif
