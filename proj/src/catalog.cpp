#include "qseries/catalog.hpp"

#include <algorithm>
#include <array>

namespace qseries {

namespace {

const Complex kOne(1.0, 0.0);

Complex qinf_multi(std::initializer_list<Complex> args, const QBase& base) {
  Complex p = kOne;
  for (const Complex& a : args) p *= qpoch_inf(a, base);
  return p;
}

Complex qfin_multi(std::initializer_list<Complex> args, const QBase& base, long n) {
  Complex p = kOne;
  for (const Complex& a : args) p *= qpoch(a, base, n).value;
  return p;
}

bool mod_ok(const Complex& v, double margin) { return std::abs(v) <= 1.0 - margin; }
bool re_ok(const Complex& v, double margin) { return v.real() >= margin; }

// Keeps an infinite-product argument away from the zeros x = q^{-j}.
bool qinf_arg_safe(const Complex& x, const Complex& q) {
  Complex xq = x;
  for (int j = 0; j < 4000; ++j) {
    const double m = std::abs(xq);
    if (m < 0.5) return true;
    if (std::abs(kOne - xq) < kPoleMargin * std::max(1.0, m)) return false;
    xq *= q;
  }
  return true;
}

bool qfin_arg_safe(const Complex& x, const Complex& q, long n) {
  Complex xq = x;
  for (long j = 0; j < n; ++j) {
    if (std::abs(kOne - xq) < kPoleMargin * std::max(1.0, std::abs(xq))) return false;
    xq *= q;
  }
  return true;
}

bool gamma_arg_safe(const Complex& z) {
  const double n = std::round(z.real());
  return !(n <= 0.5 && std::abs(z - Complex(n, 0.0)) < kPoleMargin);
}

bool all_qinf_safe(std::initializer_list<Complex> args, const Complex& q) {
  return std::all_of(args.begin(), args.end(),
                     [&](const Complex& x) { return qinf_arg_safe(x, q); });
}

bool all_gamma_safe(std::initializer_list<Complex> args) {
  return std::all_of(args.begin(), args.end(), gamma_arg_safe);
}

long int_param(const Complex& v, const char* what) {
  const double n = std::round(v.real());
  if (std::abs(v - Complex(n, 0.0)) > kTermDetectTol || n < 0 || n > 64)
    throw DomainError(std::string(what) + ": expected an integer in [0,64]");
  return long(n);
}

void check_arity(IdentityId id, const Params& p) {
  if (p.size() != identity(id).param_names.size())
    throw DomainError("identity '" + identity(id).name + "' expects " +
                      std::to_string(identity(id).param_names.size()) + " parameters");
}

}  // namespace

const std::vector<Identity>& catalog() {
  static const std::vector<Identity> entries = {
      {IdentityId::QBINOMIAL, "qbinomial", {"a", "z", "q"}, false, false, 1e-10, "", ""},
      {IdentityId::QGAUSS, "qgauss", {"a", "b", "c", "q"}, false, false, 1e-10, "", ""},
      {IdentityId::RAMANUJAN_1PSI1, "ramanujan_1psi1", {"a", "b", "z", "q"}, true, false,
       1e-8, "", ""},
      {IdentityId::PSI22_TRANSFORM, "psi22_transform", {"a", "b", "c", "d", "q"}, true,
       true, 1e-8, "",
       "all three of |d/ab|, |c|, |c/a| below 1; the sources do not discuss "
       "dropping any of them"},
      {IdentityId::PSI22_SUM, "psi22_sum", {"a", "b", "c", "q"}, true, false, 1e-8, "",
       ""},
      {IdentityId::BAILEY22_TRANSFORM, "bailey22_transform", {"a", "b", "c", "d", "z", "q"},
       true, true, 1e-8, "", ""},
      {IdentityId::GAUSS_2F1, "gauss_2f1", {"a", "b", "c"}, false, false, 1e-10, "", ""},
      {IdentityId::DOUGALL_2H2, "dougall_2h2", {"a", "b", "c", "d"}, true, false, 1e-8,
       "Re(a) < Re(c+d-b-1) by analytic continuation",
       "Re(c-a) > 0, Re(d-a-b) > 0 and Re(c+d-a-b-1) > 0"},
      {IdentityId::ROGERS_6PHI5, "rogers_6phi5", {"a", "b", "c", "d", "q"}, false, false,
       1e-10, "", ""},
      {IdentityId::BAILEY_6PSI6, "bailey_6psi6", {"a", "b", "c", "d", "e", "q"}, true,
       false, 1e-8, "|1/c| < |bde/a^2 q| by analytic continuation",
       "|aq/bc| < 1, |aq/cde| < 1 and |a^2 q/bcde| < 1"},
      {IdentityId::JACKSON_8PHI7, "jackson_8phi7", {"a", "b", "c", "d", "q", "n"}, false,
       false, 1e-10, "", ""},
  };
  return entries;
}

const Identity& identity(IdentityId id) {
  for (const Identity& e : catalog())
    if (e.id == id) return e;
  throw DomainError("unknown identity id");
}

const Identity* find_identity(const std::string& name) {
  for (const Identity& e : catalog())
    if (e.name == name) return &e;
  return nullptr;
}

bool domain_check(IdentityId id, const Params& p, double margin) {
  check_arity(id, p);
  switch (id) {
    case IdentityId::QBINOMIAL: {
      const Complex a = p[0], z = p[1], q = p[2];
      QBase base(q);
      const bool terminating = detect_termination(lhs_spec(id, p)).has_value();
      if (!terminating && !mod_ok(z, margin)) return false;
      return all_qinf_safe({a * z, z}, q);
    }
    case IdentityId::QGAUSS: {
      const Complex a = p[0], b = p[1], c = p[2], q = p[3];
      QBase base(q);
      const bool terminating = detect_termination(lhs_spec(id, p)).has_value();
      if (!terminating && !mod_ok(c / (a * b), margin)) return false;
      return all_qinf_safe({c / a, c / b, c, c / (a * b)}, q);
    }
    case IdentityId::RAMANUJAN_1PSI1: {
      const Complex a = p[0], b = p[1], z = p[2], q = p[3];
      QBase base(q);
      if (!mod_ok(z, margin)) return false;
      if (std::abs(b / a) > (1.0 - margin) * std::abs(z)) return false;
      return all_qinf_safe({b / a, a * z, q / (a * z), b, q / a, z, b / (a * z)}, q);
    }
    case IdentityId::PSI22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      if (!mod_ok(d / (a * b), margin) || !mod_ok(c, margin) || !mod_ok(c / a, margin))
        return false;
      return all_qinf_safe(
          {c / a, d / a, d / b, q / a, c, d, d / (a * b), q / b}, q);
    }
    case IdentityId::PSI22_SUM: {
      const Complex a = p[0], b = p[1], c = p[2], q = p[3];
      QBase base(q);
      if (!mod_ok(q / b, margin) || !mod_ok(c, margin)) return false;
      return all_qinf_safe({a * q / b, c / a, a * q, q / a, q / b, c}, q);
    }
    case IdentityId::BAILEY22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], z = p[4], q = p[5];
      QBase base(q);
      const Complex w = c * d / (a * b * z);
      if (!mod_ok(z, margin) || !mod_ok(w, margin) || !mod_ok(d / a, margin) ||
          !mod_ok(c / b, margin))
        return false;
      return all_qinf_safe({a * z, d / a, c / b, d * q / (a * b * z), z, d, q / b,
                            c * d / (a * b * z), c, q / a},
                           q);
    }
    case IdentityId::GAUSS_2F1: {
      const Complex a = p[0], b = p[1], c = p[2];
      if (!re_ok(c - a - b, margin)) return false;
      return all_gamma_safe({c, c - a - b, c - a, c - b});
    }
    case IdentityId::DOUGALL_2H2: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3];
      if (!re_ok(c + d - a - b - kOne, margin)) return false;
      return all_gamma_safe({kOne - a, kOne - b, c, d, c + d - a - b - kOne, c - a,
                             c - b, d - a, d - b});
    }
    case IdentityId::ROGERS_6PHI5: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      if (std::abs(kOne - a) < kPoleMargin) return false;  // (1-a) divides the terms
      const bool terminating = detect_termination(lhs_spec(id, p)).has_value();
      if (!terminating && !mod_ok(a * q / (b * c * d), margin)) return false;
      return all_qinf_safe({a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d),
                            a * q / b, a * q / c, a * q / d, a * q / (b * c * d)},
                           q);
    }
    case IdentityId::BAILEY_6PSI6: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], e = p[4], q = p[5];
      QBase base(q);
      if (std::abs(kOne - a) < kPoleMargin) return false;
      if (!mod_ok(a * a * q / (b * c * d * e), margin)) return false;
      return all_qinf_safe(
          {a * q, a * q / (b * c), a * q / (b * d), a * q / (b * e), a * q / (c * d),
           a * q / (c * e), a * q / (d * e), q / a, a * q / b, a * q / c, a * q / d,
           a * q / e, q / b, q / c, q / d, q / e, a * a * q / (b * c * d * e)},
          q);
    }
    case IdentityId::JACKSON_8PHI7: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      const long n = int_param(p[5], "jackson_8phi7 n");
      if (std::abs(kOne - a) < kPoleMargin) return false;
      const Complex qmn = ipow(q, -n);
      const std::array<Complex, 8> closed = {a * q,     a * q / (b * c), a * q / (b * d),
                                             a * q / (c * d), a * q / b, a * q / c,
                                             a * q / d, a * q / (b * c * d)};
      for (const Complex& x : closed)
        if (!qfin_arg_safe(x, q, n)) return false;
      const std::array<Complex, 2> lhs_den = {b * c * d * qmn / a, a * q * ipow(q, n)};
      for (const Complex& x : lhs_den)
        if (!qfin_arg_safe(x, q, n + 1)) return false;
      return true;
    }
  }
  return false;
}

SeriesSpec lhs_spec(IdentityId id, const Params& p) {
  check_arity(id, p);
  switch (id) {
    case IdentityId::QBINOMIAL:
      return make_phi({p[0]}, {}, QBase(p[2]), p[1]);
    case IdentityId::QGAUSS: {
      const Complex a = p[0], b = p[1], c = p[2], q = p[3];
      return make_phi({a, b}, {c}, QBase(q), c / (a * b));
    }
    case IdentityId::RAMANUJAN_1PSI1:
      return make_psi({p[0]}, {p[1]}, QBase(p[3]), p[2]);
    case IdentityId::PSI22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      return make_psi({a, b}, {c, d}, QBase(q), d / (a * b));
    }
    case IdentityId::PSI22_SUM: {
      const Complex a = p[0], b = p[1], c = p[2], q = p[3];
      return make_psi({a, b}, {a * q, c}, QBase(q), q / b);
    }
    case IdentityId::BAILEY22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], z = p[4], q = p[5];
      return make_psi({a, b}, {c, d}, QBase(q), z);
    }
    case IdentityId::GAUSS_2F1:
      return make_f({p[0], p[1]}, {p[2]}, kOne);
    case IdentityId::DOUGALL_2H2:
      return make_h({p[0], p[1]}, {p[2], p[3]}, kOne);
    case IdentityId::ROGERS_6PHI5: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      return make_phi({a, b, c, d}, {a * q / b, a * q / c, a * q / d}, QBase(q),
                      a * q / (b * c * d), a);
    }
    case IdentityId::BAILEY_6PSI6: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], e = p[4], q = p[5];
      return make_psi({b, c, d, e}, {a * q / b, a * q / c, a * q / d, a * q / e},
                      QBase(q), a * a * q / (b * c * d * e), a);
    }
    case IdentityId::JACKSON_8PHI7: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      const long n = int_param(p[5], "jackson_8phi7 n");
      const Complex qn = ipow(q, n), qmn = ipow(q, -n);
      return make_phi({a, b, c, d, a * a * q * qn / (b * c * d), qmn},
                      {a * q / b, a * q / c, a * q / d, b * c * d * qmn / a, a * q * qn},
                      QBase(q), q, a);
    }
  }
  throw DomainError("unknown identity id");
}

Complex rhs_closed_form(IdentityId id, const Params& p) {
  check_arity(id, p);
  switch (id) {
    case IdentityId::QBINOMIAL: {
      const Complex a = p[0], z = p[1];
      QBase base(p[2]);
      return qpoch_inf(a * z, base) / qpoch_inf(z, base);
    }
    case IdentityId::QGAUSS: {
      const Complex a = p[0], b = p[1], c = p[2];
      QBase base(p[3]);
      return qinf_multi({c / a, c / b}, base) / qinf_multi({c, c / (a * b)}, base);
    }
    case IdentityId::RAMANUJAN_1PSI1: {
      const Complex a = p[0], b = p[1], z = p[2], q = p[3];
      QBase base(q);
      return qinf_multi({q, b / a, a * z, q / (a * z)}, base) /
             qinf_multi({b, q / a, z, b / (a * z)}, base);
    }
    case IdentityId::PSI22_SUM: {
      const Complex a = p[0], b = p[1], c = p[2], q = p[3];
      QBase base(q);
      return qinf_multi({q, q, a * q / b, c / a}, base) /
             qinf_multi({a * q, q / a, q / b, c}, base);
    }
    case IdentityId::GAUSS_2F1: {
      const Complex a = p[0], b = p[1], c = p[2];
      return gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b));
    }
    case IdentityId::DOUGALL_2H2: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3];
      return gamma(kOne - a) * gamma(kOne - b) * gamma(c) * gamma(d) *
             gamma(c + d - a - b - kOne) /
             (gamma(c - a) * gamma(c - b) * gamma(d - a) * gamma(d - b));
    }
    case IdentityId::ROGERS_6PHI5: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      return qinf_multi({a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d)}, base) /
             qinf_multi({a * q / b, a * q / c, a * q / d, a * q / (b * c * d)}, base);
    }
    case IdentityId::BAILEY_6PSI6: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], e = p[4], q = p[5];
      QBase base(q);
      return qinf_multi({a * q, a * q / (b * c), a * q / (b * d), a * q / (b * e),
                         a * q / (c * d), a * q / (c * e), a * q / (d * e), q, q / a},
                        base) /
             qinf_multi({a * q / b, a * q / c, a * q / d, a * q / e, q / b, q / c, q / d,
                         q / e, a * a * q / (b * c * d * e)},
                        base);
    }
    case IdentityId::JACKSON_8PHI7: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      const long n = int_param(p[5], "jackson_8phi7 n");
      return qfin_multi({a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d)}, base,
                        n) /
             qfin_multi({a * q / b, a * q / c, a * q / d, a * q / (b * c * d)}, base, n);
    }
    case IdentityId::PSI22_TRANSFORM:
    case IdentityId::BAILEY22_TRANSFORM:
      throw DomainError(
          "rhs_closed_form: transformation entries evaluate as prefactor x series");
  }
  throw DomainError("unknown identity id");
}

RhsEval rhs_eval(IdentityId id, const Params& p, const TruncationPolicy& policy) {
  RhsEval out;
  switch (id) {
    case IdentityId::PSI22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], q = p[4];
      QBase base(q);
      out.prefactor = qinf_multi({q, c / a, d / a, d / b}, base) /
                      qinf_multi({q / a, c, d, d / (a * b)}, base);
      const SeriesSpec s = make_phi({q / c, a * q / d}, {q / b}, base, c / a);
      out.series = eval_unilateral(s, policy);
      out.value = out.prefactor * out.series->value;
      return out;
    }
    case IdentityId::BAILEY22_TRANSFORM: {
      const Complex a = p[0], b = p[1], c = p[2], d = p[3], z = p[4], q = p[5];
      QBase base(q);
      out.prefactor = qinf_multi({a * z, d / a, c / b, d * q / (a * b * z)}, base) /
                      qinf_multi({z, d, q / b, c * d / (a * b * z)}, base);
      const SeriesSpec s = make_psi({a, a * b * z / d}, {a * z, c}, base, d / a);
      out.series = eval_bilateral(s, policy);
      out.value = out.prefactor * out.series->value;
      return out;
    }
    default:
      out.value = rhs_closed_form(id, p);
      out.prefactor = out.value;
      return out;
  }
}

ResidualReport residual(IdentityId id, const Params& p, const TruncationPolicy& policy,
                        double tol) {
  const Identity& meta = identity(id);
  ResidualReport rep;
  rep.params = p;
  rep.tolerance = tol > 0 ? tol : meta.default_tol;
  try {
    const SeriesSpec spec = lhs_spec(id, p);
    rep.lhs = meta.bilateral ? eval_bilateral(spec, policy) : eval_unilateral(spec, policy);
    rep.rhs = rhs_eval(id, p, policy);
    const Complex l = rep.lhs.value;
    const Complex r = rep.rhs.value;
    rep.abs_residual = std::abs(l - r);
    rep.rel_residual = rep.abs_residual / std::max({std::abs(l), std::abs(r), 1e-300});
    const bool lhs_ok = rep.lhs.status == EvalStatus::OK;
    const bool rhs_ok = !rep.rhs.series || rep.rhs.series->status == EvalStatus::OK;
    rep.pass = lhs_ok && rhs_ok && rep.rel_residual <= rep.tolerance;
  } catch (const Error& e) {
    rep.error = e.what();
    rep.lhs.status = EvalStatus::POLE_IN_TERMS;
    rep.rel_residual = std::numeric_limits<double>::infinity();
    rep.abs_residual = rep.rel_residual;
    rep.pass = false;
  }
  return rep;
}

}  // namespace qseries
