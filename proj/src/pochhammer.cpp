#include "qseries/pochhammer.hpp"

namespace qseries {

PochResult qpoch(const Complex& a, const QBase& base, long k) {
  PochResult r;
  if (k == 0) return r;
  if (k > 0) {
    Complex aqj = a;  // a q^j
    for (long j = 0; j < k; ++j) {
      const Complex f = Complex(1.0, 0.0) - aqj;
      if (std::abs(f) <= kVanishTol) {
        r.is_zero = true;
        ++r.zero_order;
      }
      r.value *= f;
      aqj *= base.q;
    }
    ensure_finite(r.value, "qpoch");
    return r;
  }
  // k < 0: reciprocal product over (1 - a q^{-j}), j = 1..-k.  Work with
  // p_j = q^j so the quotient (p_j - a)/p_j never forms q^{-j} itself.
  Complex prod(1.0, 0.0);
  Complex pj(1.0, 0.0);  // q^j
  for (long j = 1; j <= -k; ++j) {
    pj *= base.q;
    const Complex num = pj - a;  // (1 - a q^{-j}) * q^j
    if (std::abs(num) <= kVanishTol * std::abs(pj))
      throw DivisionByVanishingFactor("qpoch: factor 1 - a q^{-" + std::to_string(j) +
                                      "} vanishes");
    prod *= num / pj;
  }
  r.value = Complex(1.0, 0.0) / prod;
  ensure_finite(r.value, "qpoch");
  return r;
}

Complex qpoch_inf(const Complex& a, const QBase& base) {
  const double cutoff = 1e-17;
  Complex value(1.0, 0.0);
  Complex aqj = a;
  long j = 0;
  while (std::abs(aqj) >= cutoff) {
    value *= Complex(1.0, 0.0) - aqj;
    aqj *= base.q;
    if (++j > 2000000)
      throw DomainError("qpoch_inf: |q| too close to 1 for the product to settle");
  }
  // First-order tail: prod_{i>=j}(1 - a q^i) = exp(-a q^j/(1-q) + O(cutoff^2)).
  value *= Complex(1.0, 0.0) - aqj / (Complex(1.0, 0.0) - base.q);
  ensure_finite(value, "qpoch_inf");
  return value;
}

PochResult qpoch_multi(std::span<const Complex> params, const QBase& base,
                       std::optional<long> k) {
  PochResult r;
  for (const Complex& a : params) {
    if (k.has_value()) {
      const PochResult f = qpoch(a, base, *k);
      r.value *= f.value;
      r.is_zero = r.is_zero || f.is_zero;
      r.zero_order += f.zero_order;
    } else {
      // Infinite product: count vanishing factors the same way the finite
      // case does before multiplying the tail in.
      Complex aqj = a;
      long j = 0;
      while (std::abs(aqj) >= 0.5 && j < 4000) {
        if (std::abs(Complex(1.0, 0.0) - aqj) <= kVanishTol) {
          r.is_zero = true;
          ++r.zero_order;
        }
        aqj *= base.q;
        ++j;
      }
      r.value *= qpoch_inf(a, base);
    }
  }
  ensure_finite(r.value, "qpoch_multi");
  return r;
}

PochResult poch(const Complex& a, long k) {
  PochResult r;
  if (k == 0) return r;
  if (k > 0) {
    for (long j = 0; j < k; ++j) {
      const Complex f = a + Complex(double(j), 0.0);
      if (std::abs(f) <= kVanishTol) {
        r.is_zero = true;
        ++r.zero_order;
      }
      r.value *= f;
    }
    ensure_finite(r.value, "poch");
    return r;
  }
  Complex prod(1.0, 0.0);
  for (long j = 1; j <= -k; ++j) {
    const Complex f = a - Complex(double(j), 0.0);
    if (std::abs(f) <= kVanishTol)
      throw DivisionByVanishingFactor("poch: factor a - " + std::to_string(j) +
                                      " vanishes");
    prod *= f;
  }
  r.value = Complex(1.0, 0.0) / prod;
  ensure_finite(r.value, "poch");
  return r;
}

Complex qpoch_ratio(const Complex& x, const Complex& y, const QBase& base, long k) {
  Complex r(1.0, 0.0);
  if (k >= 0) {
    Complex qj(1.0, 0.0);
    for (long j = 0; j < k; ++j) {
      const Complex den = Complex(1.0, 0.0) - y * qj;
      if (std::abs(den) <= kVanishTol)
        throw DivisionByVanishingFactor("qpoch_ratio: denominator factor vanishes");
      r *= (Complex(1.0, 0.0) - x * qj) / den;
      qj *= base.q;
    }
    return r;
  }
  // (x;q)_k/(y;q)_k = prod_{j=1..-k} (1 - y q^{-j})/(1 - x q^{-j})
  //                 = prod (q^j - y)/(q^j - x); q^j underflows harmlessly.
  Complex qj(1.0, 0.0);
  for (long j = 1; j <= -k; ++j) {
    qj *= base.q;
    const Complex den = qj - x;
    if (std::abs(den) <= kVanishTol * std::abs(qj))
      throw DivisionByVanishingFactor("qpoch_ratio: denominator factor vanishes");
    r *= (qj - y) / den;
  }
  ensure_finite(r, "qpoch_ratio");
  return r;
}

Complex poch_ratio(const Complex& x, const Complex& y, long k) {
  Complex r(1.0, 0.0);
  if (k >= 0) {
    for (long j = 0; j < k; ++j) {
      const Complex den = y + Complex(double(j), 0.0);
      if (std::abs(den) <= kVanishTol)
        throw DivisionByVanishingFactor("poch_ratio: denominator factor vanishes");
      r *= (x + Complex(double(j), 0.0)) / den;
    }
    return r;
  }
  for (long j = 1; j <= -k; ++j) {
    const Complex den = x - Complex(double(j), 0.0);
    if (std::abs(den) <= kVanishTol)
      throw DivisionByVanishingFactor("poch_ratio: denominator factor vanishes");
    r *= (y - Complex(double(j), 0.0)) / den;
  }
  ensure_finite(r, "poch_ratio");
  return r;
}

}  // namespace qseries
