#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qseries/series.hpp"

using namespace qseries;

namespace {

double rel_err(const Complex& got, const Complex& want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

const Complex kOne(1.0, 0.0);

}  // namespace

TEST_CASE("term_ratio of 1phi0 includes the implicit (q;q)_k factor") {
  // t_{k+1}/t_k = (1-a q^k) z / (1-q^{k+1}); at a=z=q=0.5 and k=0 this is
  // 0.25/0.5 = 0.5 (the (q;q)_k factor is part of the term per the series
  // definition).
  const SeriesSpec spec = make_phi({{0.5, 0.0}}, {}, QBase({0.5, 0.0}), {0.5, 0.0});
  CHECK(rel_err(term_ratio(spec, 0), {0.5, 0.0}) < 1e-15);
}

TEST_CASE("term_ratio of 2F1 at unit argument") {
  const SeriesSpec spec = make_f({kOne, kOne}, {kOne}, kOne);
  CHECK(rel_err(term_ratio(spec, 0), kOne) < 1e-15);  // (a+k)(b+k)/((c+k)(1+k))
}

TEST_CASE("term_ratio agrees with direct term quotients") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto param = [&] {
    const double mag = 0.1 * std::exp(unit(rng) * std::log(100.0));
    return Complex(unit(rng) < 0.5 ? -mag : mag, 0.0);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Complex q(0.1 + 0.8 * unit(rng), 0.0);
    const int r = 1 + int(3 * unit(rng)), s = 1 + int(3 * unit(rng));
    SeriesSpec spec;
    spec.base = QBase(q);
    for (int i = 0; i < r; ++i) spec.numerator_params.push_back(param());
    for (int i = 0; i < s; ++i) spec.denominator_params.push_back(param());
    spec.argument = param();
    const bool bilateral = unit(rng) < 0.5;
    spec.kind = bilateral ? SeriesKind::PSI : SeriesKind::PHI;
    const long k = bilateral ? long(-6 + 13 * unit(rng)) : long(6 * unit(rng));
    Complex t0, t1;
    try {
      t0 = oracles::direct_term(spec, k);
      t1 = oracles::direct_term(spec, k + 1);
    } catch (const Error&) {
      continue;  // random pole in the reference path
    }
    if (std::abs(t0) < 1e-280) continue;
    const Complex want = t1 / t0;
    const Complex got = term_ratio(spec, k);
    CHECK(std::abs(got - want) <= 1e-13 * std::max(std::abs(want), 1e-30));
  }
}

TEST_CASE("term_ratio vs direct quotients for F and H kinds") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto param = [&] { return Complex(-4.0 + 8.0 * unit(rng), 0.0); };
  for (int trial = 0; trial < 100; ++trial) {
    SeriesSpec spec;
    spec.kind = unit(rng) < 0.5 ? SeriesKind::F : SeriesKind::H;
    spec.numerator_params = {param(), param()};
    spec.denominator_params = {param(), param()};
    spec.argument = kOne;
    const long k = spec.kind == SeriesKind::H ? long(-5 + 11 * unit(rng))
                                              : long(5 * unit(rng));
    Complex t0, t1;
    try {
      t0 = oracles::direct_term(spec, k);
      t1 = oracles::direct_term(spec, k + 1);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(t0) < 1e-280 || std::abs(t1) < 1e-280) continue;
    const Complex want = t1 / t0;
    CHECK(std::abs(term_ratio(spec, k) - want) <= 1e-13 * std::max(std::abs(want), 1e-30));
  }
}

TEST_CASE("1phi0 with a=q telescopes to 1/(1-z)") {
  const QBase q({0.5, 0.0});
  const SeriesSpec spec = make_phi({{0.5, 0.0}}, {}, q, {0.5, 0.0});
  const EvalResult r = eval_unilateral(spec);
  CHECK(rel_err(r.value, {2.0, 0.0}) < 1e-13);
  CHECK(r.status == EvalStatus::OK);
}

TEST_CASE("terminating 2F1(-1,1;2;1) = 1/2") {
  const SeriesSpec spec = make_f({{-1.0, 0.0}, kOne}, {{2.0, 0.0}}, kOne);
  const EvalResult r = eval_unilateral(spec);
  CHECK(rel_err(r.value, {0.5, 0.0}) < 1e-15);
  CHECK(r.terminated_above);
  CHECK(r.upper_terms_used == 2);
}

TEST_CASE("q-Gauss instance matches its product form") {
  // In-domain point (|c/ab| = 1/2): the sum against (c/a,c/b;q)inf/(c,c/ab;q)inf.
  const Complex a(0.3, 0.0), b(0.4, 0.0), c(0.06, 0.0), q(0.5, 0.0);
  const QBase base(q);
  const SeriesSpec spec = make_phi({a, b}, {c}, base, c / (a * b));
  const EvalResult r = eval_unilateral(spec);
  const Complex want = qpoch_inf(c / a, base) * qpoch_inf(c / b, base) /
                       (qpoch_inf(c, base) * qpoch_inf(c / (a * b), base));
  CHECK(rel_err(r.value, want) < 1e-10);
}

TEST_CASE("bilateral 1psi1 frozen value") {
  // a=4, b=0.25, q=0.5, z=0.4: everything is rational and the sum collapses
  // to -33/700 (checked against a 40-digit reference).
  const SeriesSpec spec =
      make_psi({{4.0, 0.0}}, {{0.25, 0.0}}, QBase({0.5, 0.0}), {0.4, 0.0});
  const EvalResult r = eval_bilateral(spec);
  CHECK(rel_err(r.value, {-33.0 / 700.0, 0.0}) < 1e-12);
  CHECK(r.terminated_below);  // b = q^2 kills the tail below k = -1
}

TEST_CASE("1psi1 with b=q reduces to 1phi0") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Complex q(0.1 + 0.8 * unit(rng), 0.0);
    const Complex a(0.2 + 3.0 * unit(rng), 0.0);
    const Complex z(0.05 + 0.85 * unit(rng), 0.0);
    const SeriesSpec psi = make_psi({a}, {q}, QBase(q), z);
    const SeriesSpec phi = make_phi({a}, {}, QBase(q), z);
    const EvalResult rp = eval_bilateral(psi);
    const EvalResult ru = eval_unilateral(phi);
    CHECK(rp.terminated_below);
    CHECK(rel_err(rp.value, ru.value) < 1e-12);
  }
}

TEST_CASE("2H2 with d=1 reduces to 2F1 at unit argument") {
  const Complex a(0.2, 0.0), b(0.3, 0.0), c(4.4, 0.0);
  const SeriesSpec h = make_h({a, b}, {c, kOne}, kOne);
  const SeriesSpec f = make_f({a, b}, {c}, kOne);
  const EvalResult rh = eval_bilateral(h);
  const EvalResult rf = eval_unilateral(f);
  CHECK(rh.terminated_below);
  CHECK(rel_err(rh.value, rf.value) < 1e-12);
}

TEST_CASE("bilateral series outside the annulus raises DivergentSeries") {
  // |b/a| = 10 > |z|: the lower tail grows geometrically.
  const SeriesSpec spec =
      make_psi({{0.3, 0.0}}, {{3.0, 0.0}}, QBase({0.5, 0.0}), {0.5, 0.0});
  CHECK_THROWS_AS(eval_bilateral(spec), DivergentSeries);
}

TEST_CASE("pole in terms raises PoleError") {
  // denominator parameter b = q^{-2}: upward factor vanishes at k = 2
  const SeriesSpec spec =
      make_psi({{0.3, 0.0}}, {{4.0, 0.0}}, QBase({0.5, 0.0}), {0.5, 0.0});
  CHECK_THROWS_AS(eval_bilateral(spec), PoleError);
}

TEST_CASE("classify_poise recognises the displayed series") {
  const Complex q(0.5, 0.0);
  const Complex a(1.21, 0.0), sa(1.1, 0.0);
  const Complex b(3.0, 0.0), c(4.0, 0.0), d(5.0, 0.0), e(6.0, 0.0);

  // explicit 6psi6 of the summation formula
  SeriesSpec psi66 = make_psi({q * sa, -q * sa, b, c, d, e},
                              {sa, -sa, a * q / b, a * q / c, a * q / d, a * q / e},
                              QBase(q), a * a * q / (b * c * d * e));
  CHECK(classify_poise(psi66) == Poise::VERY_WELL_POISED);

  // explicit 6phi5
  SeriesSpec phi65 = make_phi({a, q * sa, -q * sa, b, c, d},
                              {sa, -sa, a * q / b, a * q / c, a * q / d}, QBase(q),
                              a * q / (b * c * d));
  CHECK(classify_poise(phi65) == Poise::VERY_WELL_POISED);

  // folded forms used by the catalog
  SeriesSpec folded65 = make_phi({a, b, c, d}, {a * q / b, a * q / c, a * q / d},
                                 QBase(q), a * q / (b * c * d), a);
  CHECK(classify_poise(folded65) == Poise::VERY_WELL_POISED);

  // well-poised but not very-well-poised 3phi2
  SeriesSpec wp = make_phi({a, b, c}, {a * q / b, a * q / c}, QBase(q), {0.1, 0.0});
  CHECK(classify_poise(wp) == Poise::WELL_POISED);

  // generic 2phi1
  SeriesSpec generic = make_phi({{0.3, 0.0}, {0.7, 0.0}}, {{0.2, 0.0}}, QBase(q),
                                {0.1, 0.0});
  CHECK(classify_poise(generic) == Poise::GENERAL);
}

TEST_CASE("detect_termination") {
  const Complex q(0.5, 0.0);
  // numerator parameter q^{-3}
  SeriesSpec spec = make_phi({{8.0, 0.0}, {0.3, 0.0}}, {{0.2, 0.0}}, QBase(q),
                             {0.1, 0.0});
  auto tb = detect_termination(spec);
  REQUIRE(tb.has_value());
  REQUIRE(tb->upper.has_value());
  CHECK(*tb->upper == 3);
  CHECK_FALSE(tb->lower.has_value());

  SeriesSpec generic = make_phi({{0.3, 0.0}}, {}, QBase(q), {0.1, 0.0});
  CHECK_FALSE(detect_termination(generic).has_value());

  // 1psi1 with b = q terminates below at 0
  SeriesSpec psi = make_psi({{0.3, 0.0}}, {q}, QBase(q), {0.5, 0.0});
  auto tb2 = detect_termination(psi);
  REQUIRE(tb2.has_value());
  REQUIRE(tb2->lower.has_value());
  CHECK(*tb2->lower == 0);

  // F-kind: nonpositive-integer numerator parameter
  SeriesSpec f = make_f({{-4.0, 0.0}, kOne}, {{2.5, 0.0}}, kOne);
  auto tb3 = detect_termination(f);
  REQUIRE(tb3.has_value());
  CHECK(*tb3->upper == 4);
}

TEST_CASE("terminating series equals the explicit finite sum") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Complex q(0.15 + 0.7 * unit(rng), 0.0);
    const long n = 1 + long(6 * unit(rng));
    SeriesSpec spec;
    spec.kind = SeriesKind::PHI;
    spec.base = QBase(q);
    spec.numerator_params = {ipow(q, -n), Complex(0.2 + unit(rng), 0.0)};
    spec.denominator_params = {Complex(0.1 + 0.3 * unit(rng), 0.0)};
    spec.argument = Complex(0.3 + unit(rng), 0.0);
    AccumulatorState acc;
    for (long k = 0; k <= n; ++k) acc = accumulate(acc, oracles::direct_term(spec, k));
    const EvalResult r = eval_unilateral(spec);
    CHECK(r.terminated_above);
    CHECK(rel_err(r.value, acc.value()) < 1e-12);
  }
}

TEST_CASE("bilateral evaluation is invariant under parameter permutations") {
  const QBase q({0.45, 0.0});
  const Complex a(1.21, 0.0), b(3.0, 0.0), c(4.0, 0.0), d(5.0, 0.0), e(6.0, 0.0);
  std::vector<Complex> num = {b, c, d, e};
  std::vector<Complex> den = {a * 0.45 / b, a * 0.45 / c, a * 0.45 / d, a * 0.45 / e};
  const Complex z = a * a * 0.45 / (b * c * d * e);
  const EvalResult base_val = eval_bilateral(make_psi(num, den, q, z, a));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto n2 = num;
    auto d2 = den;
    std::shuffle(n2.begin(), n2.end(), rng);
    std::shuffle(d2.begin(), d2.end(), rng);
    const EvalResult r = eval_bilateral(make_psi(n2, d2, q, z, a));
    CHECK(rel_err(r.value, base_val.value) < 1e-12);
  }
}

TEST_CASE("doubling max_terms moves a status-OK result by at most 4 tails") {
  const SeriesSpec spec =
      make_psi({{4.0, 0.0}}, {{0.3, 0.0}}, QBase({0.6, 0.0}), {0.7, 0.0});
  TruncationPolicy p1;
  p1.max_terms_per_tail = 200;
  p1.rel_tol = 1e-10;
  TruncationPolicy p2 = p1;
  p2.max_terms_per_tail = 400;
  const EvalResult r1 = eval_bilateral(spec, p1);
  const EvalResult r2 = eval_bilateral(spec, p2);
  REQUIRE(r1.status == EvalStatus::OK);
  CHECK(std::abs(r1.value - r2.value) <= 4.0 * std::max(r1.tail_estimate, 1e-300));
}

TEST_CASE("slow convergence is reported, not silently truncated") {
  const SeriesSpec spec = make_f({{0.2, 0.0}, {0.3, 0.0}}, {{1.6, 0.0}}, kOne);
  TruncationPolicy tight;
  tight.max_terms_per_tail = 50;
  const EvalResult r = eval_unilateral(spec, tight);
  CHECK(r.status == EvalStatus::SLOW_CONVERGENCE);
  CHECK(r.tail_estimate > 0.0);
}
