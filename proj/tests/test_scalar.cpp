#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qseries/scalar.hpp"

using namespace qseries;

namespace {

double rel_err(const Complex& got, const Complex& want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace

TEST_CASE("gamma at classical values") {
  CHECK(rel_err(gamma({1.0, 0.0}), {1.0, 0.0}) < 1e-14);
  CHECK(rel_err(gamma({0.5, 0.0}), {1.7724538509055160273, 0.0}) < 1e-13);
}

TEST_CASE("gamma matches the extended-precision Stirling oracle") {
  // frozen from the oracle below (and cross-checked against mpmath):
  // gamma(4.2+1.3i) = -0.98500637817694352 + 6.1295550520471691 i
  const Complex z(4.2, 1.3);
  const Complex frozen(-0.98500637817694352, 6.1295550520471691);
  CHECK(rel_err(oracles::gamma_stirling(z), frozen) < 1e-15);
  CHECK(rel_err(gamma(z), frozen) < 1e-12);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> re(-5.0, 10.0), im(-10.0, 10.0);
  for (int i = 0; i < 300; ++i) {
    const Complex w(re(rng), im(rng));
    const double n = std::round(w.real());
    if (n <= 0.5 && std::abs(w - Complex(n, 0.0)) < 0.1) continue;
    CHECK(rel_err(gamma(w), oracles::gamma_stirling(w)) < 1e-12);
  }
}

TEST_CASE("gamma factorials are exact to 1e-12") {
  double factorial = 1.0;
  for (int n = 0; n <= 15; ++n) {
    if (n > 0) factorial *= n;
    CHECK(rel_err(gamma({double(n + 1), 0.0}), {factorial, 0.0}) < 1e-12);
  }
}

TEST_CASE("gamma recurrence z*gamma(z) = gamma(z+1)") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> re(-5.0, 10.0), im(-10.0, 10.0);
  int tested = 0;
  while (tested < 1000) {
    const Complex z(re(rng), im(rng));
    bool near_pole = false;
    for (double n = 0.0; n >= -6.0; n -= 1.0)
      near_pole = near_pole || std::abs(z - Complex(n, 0.0)) < 0.1 ||
                  std::abs(z + Complex(1.0, 0.0) - Complex(n, 0.0)) < 0.1;
    if (near_pole) continue;
    ++tested;
    CHECK(rel_err(z * gamma(z), gamma(z + Complex(1.0, 0.0))) < 1e-11);
  }
}

TEST_CASE("gamma poles raise") {
  CHECK_THROWS_AS(gamma({0.0, 0.0}), PoleError);
  CHECK_THROWS_AS(gamma({-3.0, 0.0}), PoleError);
  CHECK_THROWS_AS(gamma({-7.0 + 1e-14, 0.0}), PoleError);
  CHECK_NOTHROW(gamma({-3.5, 0.0}));
}

TEST_CASE("accumulate recovers a cancelled small term") {
  AccumulatorState acc;
  acc = accumulate(acc, {1.0, 0.0});
  acc = accumulate(acc, {1e-17, 0.0});
  acc = accumulate(acc, {-1.0, 0.0});
  CHECK(acc.value().real() == doctest::Approx(1e-17).epsilon(1e-15));
  CHECK(acc.terms_added == 3);
}

TEST_CASE("empty accumulator is zero") {
  AccumulatorState acc;
  CHECK(acc.value() == Complex(0.0, 0.0));
}

TEST_CASE("accumulate a million copies of 0.1") {
  // fl(0.1) = 3602879701896397 * 2^-55; the exact sum is 10^6 of those.
  AccumulatorState acc;
  for (int i = 0; i < 1000000; ++i) acc = accumulate(acc, {0.1, 0.0});
  const long double exact = 1000000.0L * 3602879701896397.0L / 36028797018963968.0L;
  CHECK(std::abs(acc.value().real() - double(exact)) / double(exact) < 1e-14);
}

TEST_CASE("accumulate matches an exact dyadic oracle on alternating series") {
  // Terms are dyadic rationals m * 2^-40 so the oracle sum in 128-bit
  // integers is exact.
  std::mt19937_64 rng(11);
  AccumulatorState acc;
  __int128 exact = 0;
  for (int i = 0; i < 10000; ++i) {
    const long long m = (long long)(rng() % (1ULL << 30));
    const long long signed_m = (i % 2 == 0) ? m : -m;
    exact += signed_m;
    acc = accumulate(acc, {double(signed_m) * 0x1.0p-40, 0.0});
  }
  const double want = double((long long)exact) * 0x1.0p-40;
  CHECK(std::abs(acc.value().real() - want) <= 1e-13 * std::max(1.0, std::abs(want)));
}

TEST_CASE("accumulate overflow raises") {
  AccumulatorState acc;
  acc = accumulate(acc, {1e308, 0.0});
  CHECK_THROWS_AS(acc = accumulate(acc, {1e308, 0.0}), OverflowError);
  CHECK_THROWS_AS(accumulate({}, {std::numeric_limits<double>::infinity(), 0.0}),
                  OverflowError);
}

TEST_CASE("ipow handles negative exponents") {
  CHECK(rel_err(ipow({2.0, 0.0}, 10), {1024.0, 0.0}) < 1e-15);
  CHECK(rel_err(ipow({2.0, 0.0}, -3), {0.125, 0.0}) < 1e-15);
  CHECK(ipow({5.0, 0.0}, 0) == Complex(1.0, 0.0));
}
