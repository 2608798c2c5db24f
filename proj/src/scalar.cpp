#include "qseries/scalar.hpp"

#include <numbers>

namespace qseries {

Complex ipow(Complex base, long long e) {
  if (e < 0) return Complex(1.0, 0.0) / ipow(base, -e);
  Complex r(1.0, 0.0);
  Complex b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

namespace {

inline void neumaier_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

}  // namespace

AccumulatorState accumulate(AccumulatorState state, const Complex& term) {
  ensure_finite(term, "accumulate term");
  double sr = state.sum.real(), si = state.sum.imag();
  double cr = state.compensation.real(), ci = state.compensation.imag();
  neumaier_add(sr, cr, term.real());
  neumaier_add(si, ci, term.imag());
  state.sum = Complex(sr, si);
  state.compensation = Complex(cr, ci);
  ++state.terms_added;
  if (!is_finite(state.sum)) throw OverflowError("accumulate: sum overflow");
  return state;
}

namespace {

// Lanczos coefficients for g = 607/128 (Godfrey's 15-term set).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,    57.156235665862923517,
    -59.597960355475491248,    14.136097974741747174,
    -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4, -0.98374475304879564677e-4,
    0.15808870322491248884e-3, -0.21026444172410488319e-3,
    0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4, -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

// Valid for Re(z) >= 1/2.
Complex gamma_lanczos(const Complex& z) {
  Complex x(kLanczos[0], 0.0);
  for (int i = 1; i < 15; ++i) x += kLanczos[i] / (z + Complex(i - 1.0, 0.0));
  const Complex t = z + Complex(kLanczosG - 0.5, 0.0);
  const double sqrt_two_pi = 2.5066282746310005024157652848110;
  return sqrt_two_pi * std::exp((z - Complex(0.5, 0.0)) * std::log(t) - t) * x;
}

}  // namespace

Complex gamma(const Complex& z) {
  if (z.real() < 0.5 + kVanishTol && std::abs(z.imag()) <= kVanishTol) {
    const double n = std::round(z.real());
    if (n <= 0.5 && std::abs(z.real() - n) <= kVanishTol)
      throw PoleError("gamma: argument within tolerance of a nonpositive integer");
  }
  Complex result;
  if (z.real() >= 0.5) {
    result = gamma_lanczos(z);
  } else {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    const Complex s = std::sin(std::numbers::pi * z);
    if (std::abs(s) < kVanishTol)
      throw PoleError("gamma: reflection at a pole of 1/sin(pi z)");
    result = std::numbers::pi / (s * gamma_lanczos(Complex(1.0, 0.0) - z));
  }
  ensure_finite(result, "gamma");
  return result;
}

}  // namespace qseries
