#include <doctest.h>

#include <random>

#include "qseries/catalog.hpp"

using namespace qseries;

namespace {

double rel_err(const Complex& got, const Complex& want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Complex cx(double re) { return Complex(re, 0.0); }

}  // namespace

TEST_CASE("catalog names are stable and reachable") {
  CHECK(catalog().size() == 11);
  for (const Identity& entry : catalog()) {
    const Identity* found = find_identity(entry.name);
    REQUIRE(found != nullptr);
    CHECK(found->id == entry.id);
  }
  CHECK(find_identity("no_such_identity") == nullptr);
}

TEST_CASE("ramanujan_1psi1 domain") {
  // annulus |b/a| < |z| < 1 with margin slack
  CHECK(domain_check(IdentityId::RAMANUJAN_1PSI1, {cx(4), cx(0.25), cx(0.4), cx(0.5)},
                     0.05));
  // z = 0.5 makes az = q^{-1}: a closed-form factor vanishes exactly, so the
  // point is rejected as ill-conditioned even though the bare annulus holds.
  CHECK_FALSE(domain_check(IdentityId::RAMANUJAN_1PSI1,
                           {cx(4), cx(0.25), cx(0.5), cx(0.5)}, 0.05));
  // annulus violated
  CHECK_FALSE(domain_check(IdentityId::RAMANUJAN_1PSI1,
                           {cx(0.5), cx(0.4), cx(0.5), cx(0.5)}, 0.05));
}

TEST_CASE("bailey_6psi6 domain rejects |a^2 q/bcde| >= 1") {
  // a^2 q / bcde = 1.2
  const double e = 4.0 * 0.5 / (1.3 * 1.1 * 0.9 * 1.2);
  CHECK_FALSE(domain_check(IdentityId::BAILEY_6PSI6,
                           {cx(2), cx(1.3), cx(1.1), cx(0.9), cx(e), cx(0.5)}, 0.05));
}

TEST_CASE("gauss_2f1 domain boundary") {
  CHECK_FALSE(domain_check(IdentityId::GAUSS_2F1, {cx(1), cx(1), cx(1.5)}, 0.0));
  CHECK(domain_check(IdentityId::GAUSS_2F1, {cx(0.2), cx(0.3), cx(4.0)}, 0.05));
}

TEST_CASE("rhs special values") {
  CHECK(rel_err(rhs_closed_form(IdentityId::QBINOMIAL, {cx(0.7), cx(0.0), cx(0.5)}),
                {1.0, 0.0}) < 1e-15);
  // rogers_6phi5 at d=1: numerator and denominator products coincide pairwise
  CHECK(rel_err(rhs_closed_form(IdentityId::ROGERS_6PHI5,
                                {cx(1.21), cx(3), cx(4), cx(1), cx(0.5)}),
                {1.0, 0.0}) < 1e-13);
  // jackson_8phi7 at n=0: empty products
  CHECK(rhs_closed_form(IdentityId::JACKSON_8PHI7,
                        {cx(1.3), cx(2.1), cx(0.8), cx(1.7), cx(0.45), cx(0)}) ==
        Complex(1.0, 0.0));
  CHECK_THROWS_AS(
      rhs_closed_form(IdentityId::PSI22_TRANSFORM, {cx(3), cx(4), cx(0.3), cx(0.7), cx(0.5)}),
      DomainError);
}

TEST_CASE("residual on key instances") {
  // 6psi6 at e = a collapses to rogers_6phi5
  {
    const Params p = {cx(1.21), cx(8), cx(8), cx(8), cx(1.21), cx(0.5)};
    const ResidualReport r = residual(IdentityId::BAILEY_6PSI6, p);
    CHECK(r.pass);
    CHECK(r.rel_residual < 1e-10);
    const Complex rogers =
        rhs_closed_form(IdentityId::ROGERS_6PHI5, {cx(1.21), cx(8), cx(8), cx(8), cx(0.5)});
    CHECK(rel_err(r.rhs.value, rogers) < 1e-12);
  }
  // dougall_2h2 at the slow power-law point needs a widened term budget
  {
    TruncationPolicy policy;
    policy.max_terms_per_tail = 2000000;
    policy.rel_tol = 1e-15;
    const ResidualReport r =
        residual(IdentityId::DOUGALL_2H2, {cx(0.2), cx(0.3), cx(1.4), cx(1.6)}, policy);
    CHECK(r.pass);
    CHECK(r.rel_residual < 1e-9);
  }
  // ramanujan_1psi1 product side
  {
    const ResidualReport r =
        residual(IdentityId::RAMANUJAN_1PSI1, {cx(4), cx(0.25), cx(0.4), cx(0.5)});
    CHECK(r.pass);
    CHECK(r.rel_residual < 1e-10);
  }
}

TEST_CASE("psi22 transform against bailey22 transform under the substitution") {
  // The simultaneous substitutions a->b, b->a, z->d/ab carry one transform
  // into the other; both right sides must then agree with the common lhs.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int tested = 0;
  while (tested < 10) {
    const Complex q(0.15 + 0.6 * unit(rng), 0.0);
    const Complex a(1.0 + 3.0 * unit(rng), 0.0), b(1.0 + 3.0 * unit(rng), 0.0);
    const Complex c(0.05 + 0.4 * unit(rng), 0.0), d(0.1 + 0.6 * unit(rng), 0.0);
    const Params tf = {a, b, c, d, q};
    const Params btf = {b, a, c, d, d / (a * b), q};
    if (!domain_check(IdentityId::PSI22_TRANSFORM, tf, 0.05)) continue;
    if (!domain_check(IdentityId::BAILEY22_TRANSFORM, btf, 0.05)) continue;
    ++tested;
    const RhsEval lhs_tf = rhs_eval(IdentityId::PSI22_TRANSFORM, tf, {});
    const RhsEval lhs_btf = rhs_eval(IdentityId::BAILEY22_TRANSFORM, btf, {});
    CHECK(rel_err(lhs_tf.value, lhs_btf.value) < 1e-9);
    CHECK(residual(IdentityId::PSI22_TRANSFORM, tf).pass);
    CHECK(residual(IdentityId::BAILEY22_TRANSFORM, btf).pass);
  }
}

TEST_CASE("psi22_sum is psi22_transform at d = aq") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int tested = 0;
  while (tested < 10) {
    const Complex q(0.15 + 0.6 * unit(rng), 0.0);
    const Complex a(0.3 + 2.0 * unit(rng), 0.0);
    const Complex b(2.0 + 6.0 * unit(rng), 0.0);
    const Complex c(0.05 + 0.4 * unit(rng), 0.0);
    const Params sum_p = {a, b, c, q};
    const Params tf_p = {a, b, c, a * q, q};
    if (!domain_check(IdentityId::PSI22_SUM, sum_p, 0.05)) continue;
    if (!domain_check(IdentityId::PSI22_TRANSFORM, tf_p, 0.05)) continue;
    ++tested;
    const Complex sum_rhs = rhs_closed_form(IdentityId::PSI22_SUM, sum_p);
    const RhsEval tf_rhs = rhs_eval(IdentityId::PSI22_TRANSFORM, tf_p, {});
    // the 2phi1 collapses to its first term: series value 1
    REQUIRE(tf_rhs.series.has_value());
    CHECK(rel_err(tf_rhs.series->value, {1.0, 0.0}) < 1e-12);
    CHECK(rel_err(tf_rhs.value, sum_rhs) < 1e-10);
    CHECK(residual(IdentityId::PSI22_SUM, sum_p).pass);
  }
}

TEST_CASE("bailey_6psi6 residual is symmetric in (b,c,d,e)") {
  const Params p = {cx(1.21), cx(3), cx(4), cx(5), cx(6), cx(0.5)};
  REQUIRE(domain_check(IdentityId::BAILEY_6PSI6, p, 0.01));
  const double base_res = residual(IdentityId::BAILEY_6PSI6, p).rel_residual;
  const int perms[][4] = {{2, 1, 4, 3}, {4, 3, 2, 1}, {3, 4, 1, 2}, {1, 3, 2, 4}};
  for (const auto& perm : perms) {
    Params shuffled = p;
    for (int i = 0; i < 4; ++i) shuffled[size_t(i) + 1] = p[size_t(perm[i])];
    const ResidualReport r = residual(IdentityId::BAILEY_6PSI6, shuffled);
    CHECK(r.pass);
    CHECK(std::abs(r.rel_residual - base_res) < 1e-10);
  }
}

TEST_CASE("dougall_2h2 residual is symmetric under a<->b and c<->d") {
  const Params p = {cx(0.2), cx(0.3), cx(2.4), cx(2.6)};
  const ResidualReport r1 = residual(IdentityId::DOUGALL_2H2, p);
  const ResidualReport r2 = residual(IdentityId::DOUGALL_2H2, {p[1], p[0], p[3], p[2]});
  CHECK(r1.pass);
  CHECK(r2.pass);
  CHECK(std::abs(r1.rel_residual - r2.rel_residual) < 1e-10);
}

TEST_CASE("jackson_8phi7 terminating residuals are exact-scale") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int tested = 0;
  while (tested < 20) {
    const Complex q(0.15 + 0.6 * unit(rng), 0.0);
    Params p = {Complex(0.3 + 2.0 * unit(rng), 0.0), Complex(0.3 + 2.0 * unit(rng), 0.0),
                Complex(0.3 + 2.0 * unit(rng), 0.0), Complex(0.3 + 2.0 * unit(rng), 0.0),
                q, Complex(double(1 + int(unit(rng) * 12)), 0.0)};
    if (!domain_check(IdentityId::JACKSON_8PHI7, p, 0.05)) continue;
    ++tested;
    const ResidualReport r = residual(IdentityId::JACKSON_8PHI7, p);
    CHECK(r.pass);
    CHECK(r.rel_residual <= 1e-12);
    CHECK(r.lhs.terminated_above);
  }
}

TEST_CASE("residual records evaluation errors instead of NaN") {
  // out-of-domain 6psi6: |a^2 q/bcde| > 1 diverges
  const Params p = {cx(2), cx(0.4), cx(0.45), cx(0.5), cx(0.55), cx(0.5)};
  const ResidualReport r = residual(IdentityId::BAILEY_6PSI6, p);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.error.empty());
  CHECK_FALSE(std::isnan(r.rel_residual));
}
