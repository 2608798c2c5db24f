// Test-side oracles, independent of the implementation paths they check.
#ifndef QSERIES_TESTS_ORACLES_HPP
#define QSERIES_TESTS_ORACLES_HPP

#include <complex>

#include "qseries/pochhammer.hpp"
#include "qseries/series.hpp"

namespace oracles {

// Gamma through the Stirling series at z+20 followed by downward recurrence,
// all in 80-bit extended precision.  Good to ~1e-18 relative for |z| <= 30.
inline qseries::Complex gamma_stirling(const qseries::Complex& zin) {
  using C = std::complex<long double>;
  static const long double stirling_coeff[8] = {
      1.0L / 12,       -1.0L / 360,        1.0L / 1260, -1.0L / 1680,
      1.0L / 1188,     -691.0L / 360360,   1.0L / 156,  -3617.0L / 122400};
  const C z(zin.real(), zin.imag());
  const C w = z + C(20.0L, 0.0L);
  const long double half_log_two_pi = 0.918938533204672741780329736405617639862L;
  C lg = (w - C(0.5L, 0.0L)) * std::log(w) - w + C(half_log_two_pi, 0.0L);
  C winv2 = C(1.0L, 0.0L) / (w * w);
  C wpow = C(1.0L, 0.0L) / w;  // w^{-(2n-1)}
  for (int n = 0; n < 8; ++n) {
    lg += stirling_coeff[n] * wpow;
    wpow *= winv2;
  }
  C g = std::exp(lg);
  for (int j = 0; j < 20; ++j) g /= z + C((long double)j, 0.0L);
  return {double(g.real()), double(g.imag())};
}

// Direct construction of series terms from Pochhammer products; the slow
// reference path the ratio recurrence is checked against.  Handles explicit
// parameter lists only (folded very-well-poised specs are exercised through
// their explicit +-sqrt(a) equivalents).
inline qseries::Complex direct_term(const qseries::SeriesSpec& spec, long k) {
  using namespace qseries;
  const long r = long(spec.numerator_params.size());
  const long s = long(spec.denominator_params.size());
  Complex num(1.0, 0.0), den(1.0, 0.0);
  if (spec.kind == SeriesKind::PHI || spec.kind == SeriesKind::PSI) {
    const QBase& base = *spec.base;
    for (const Complex& a : spec.numerator_params) num *= qpoch(a, base, k).value;
    for (const Complex& b : spec.denominator_params) den *= qpoch(b, base, k).value;
    long expo = s - r;
    if (spec.kind == SeriesKind::PHI) {
      den *= qpoch(base.q, base, k).value;
      expo += 1;
    }
    Complex t = num / den * ipow(spec.argument, k);
    if (expo != 0) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const Complex f = Complex(sign, 0.0) * ipow(base.q, k * (k - 1) / 2);
      t *= ipow(f, expo);
    }
    return t;
  }
  for (const Complex& a : spec.numerator_params) num *= poch(a, k).value;
  for (const Complex& b : spec.denominator_params) den *= poch(b, k).value;
  if (spec.kind == SeriesKind::F) den *= poch(Complex(1.0, 0.0), k).value;
  return num / den * ipow(spec.argument, k);
}

}  // namespace oracles

#endif
