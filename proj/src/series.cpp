#include "qseries/series.hpp"

#include <algorithm>

namespace qseries {

SeriesSpec make_phi(std::vector<Complex> num, std::vector<Complex> den,
                    const QBase& base, Complex z, std::optional<Complex> vwp_a) {
  return SeriesSpec{SeriesKind::PHI, std::move(num), std::move(den), base, z, vwp_a};
}

SeriesSpec make_psi(std::vector<Complex> num, std::vector<Complex> den,
                    const QBase& base, Complex z, std::optional<Complex> vwp_a) {
  return SeriesSpec{SeriesKind::PSI, std::move(num), std::move(den), base, z, vwp_a};
}

SeriesSpec make_f(std::vector<Complex> num, std::vector<Complex> den, Complex z) {
  return SeriesSpec{SeriesKind::F, std::move(num), std::move(den), std::nullopt, z,
                    std::nullopt};
}

SeriesSpec make_h(std::vector<Complex> num, std::vector<Complex> den, Complex z) {
  return SeriesSpec{SeriesKind::H, std::move(num), std::move(den), std::nullopt, z,
                    std::nullopt};
}

namespace {

bool is_q_kind(SeriesKind k) { return k == SeriesKind::PHI || k == SeriesKind::PSI; }

struct RatioParts {
  Complex value{1.0, 0.0};
  bool numerator_vanished = false;    // terminates the walk direction
  bool denominator_vanished = false;  // pole in the terms
};

// t_{k+1}/t_k.  All linear factors are paired numerator-against-denominator
// so that for k < 0 each quotient can be formed as (w - a)/(w - b) with
// w = q^{-k} = q^{|k|}, which stays bounded (and underflows harmlessly to
// the a/b limit) where q^k itself would overflow.
RatioParts ratio_parts_q(const SeriesSpec& spec, long k) {
  const Complex q = spec.base->q;
  const auto& num = spec.numerator_params;
  const auto& den = spec.denominator_params;
  const bool phi = spec.kind == SeriesKind::PHI;
  // ((-1)^k q^C(k,2))^expo contributes (-q^k)^expo to the ratio.
  const long expo = (phi ? 1 : 0) + spec.effective_s() - spec.effective_r();
  RatioParts rp;
  rp.value = spec.argument;

  const size_t paired = std::min(num.size(), den.size());
  if (k >= 0) {
    const Complex qk = ipow(q, k);
    for (size_t i = 0; i < num.size(); ++i) {
      const Complex f = Complex(1.0, 0.0) - num[i] * qk;
      if (std::abs(f) <= kVanishTol) rp.numerator_vanished = true;
      rp.value *= f;
    }
    for (size_t i = 0; i < den.size(); ++i) {
      const Complex f = Complex(1.0, 0.0) - den[i] * qk;
      if (std::abs(f) <= kVanishTol) {
        rp.denominator_vanished = true;
        return rp;
      }
      rp.value /= f;
    }
    if (phi) rp.value /= Complex(1.0, 0.0) - qk * q;  // 1 - q^{k+1}, never 0
    if (spec.very_well_poised_a) {
      const Complex a = *spec.very_well_poised_a;
      const Complex q2k = qk * qk;
      const Complex fn = Complex(1.0, 0.0) - a * q2k * q * q;
      const Complex fd = Complex(1.0, 0.0) - a * q2k;
      if (std::abs(fn) <= kVanishTol) rp.numerator_vanished = true;
      if (std::abs(fd) <= kVanishTol) {
        rp.denominator_vanished = true;
        return rp;
      }
      rp.value *= fn / fd;
    }
    if (expo != 0) rp.value *= ipow(-qk, expo);
    return rp;
  }

  // k < 0: paired stable quotients.
  const Complex w = ipow(q, -k);  // q^{|k|}, tiny
  const double wmag = std::abs(w);
  for (size_t i = 0; i < paired; ++i) {
    const Complex fn = w - num[i];
    const Complex fd = w - den[i];
    if (std::abs(fn) <= kVanishTol * wmag) rp.numerator_vanished = true;
    if (std::abs(fd) <= kVanishTol * wmag) {
      rp.denominator_vanished = true;
      return rp;
    }
    rp.value *= fn / fd;
  }
  // Leftover factors absorb one power of (-q^k)^{+-1} each so that nothing
  // of size q^k is ever materialised:
  //   (1 - a q^k) * (-q^k)^{-1} = a - w,   (-q^k) / (1 - b q^k) = 1/(b - w).
  long powers = expo;  // remaining exponent of (-q^k)
  for (size_t i = paired; i < num.size(); ++i) {
    const Complex f = w - num[i];
    if (std::abs(f) <= kVanishTol * wmag) rp.numerator_vanished = true;
    rp.value *= num[i] - w;
    ++powers;  // consumed one (-q^k)^{-1}
  }
  for (size_t i = paired; i < den.size(); ++i) {
    const Complex f = w - den[i];
    if (std::abs(f) <= kVanishTol * wmag) {
      rp.denominator_vanished = true;
      return rp;
    }
    rp.value /= den[i] - w;
    --powers;
  }
  if (spec.very_well_poised_a) {
    const Complex a = *spec.very_well_poised_a;
    const Complex w2 = w * w;  // q^{-2k}
    const Complex fn = w2 - a * q * q;  // (1 - a q^{2k+2}) * q^{-2k}
    const Complex fd = w2 - a;          // (1 - a q^{2k})   * q^{-2k}
    if (std::abs(fn) <= kVanishTol * std::abs(w2)) rp.numerator_vanished = true;
    if (std::abs(fd) <= kVanishTol * std::abs(w2)) {
      rp.denominator_vanished = true;
      return rp;
    }
    rp.value *= fn / fd;
  }
  if (powers != 0) rp.value *= ipow(-w, -powers);  // (-q^k)^powers
  return rp;
}

RatioParts ratio_parts_ordinary(const SeriesSpec& spec, long k) {
  RatioParts rp;
  rp.value = spec.argument;
  const Complex kk(double(k), 0.0);
  for (const Complex& a : spec.numerator_params) {
    const Complex f = a + kk;
    if (std::abs(f) <= kVanishTol) rp.numerator_vanished = true;
    rp.value *= f;
  }
  for (const Complex& b : spec.denominator_params) {
    const Complex f = b + kk;
    if (std::abs(f) <= kVanishTol) {
      rp.denominator_vanished = true;
      return rp;
    }
    rp.value /= f;
  }
  if (spec.kind == SeriesKind::F)
    rp.value /= Complex(1.0 + double(k), 0.0);
  return rp;
}

RatioParts ratio_parts(const SeriesSpec& spec, long k) {
  if (is_q_kind(spec.kind)) {
    if (!spec.base) throw DomainError("series: PHI/PSI spec needs a base");
    return ratio_parts_q(spec, k);
  }
  return ratio_parts_ordinary(spec, k);
}

constexpr double kDivergenceSlack = 1.0 + 1e-9;
constexpr int kDivergenceWindow = 32;

struct TailSum {
  AccumulatorState acc;
  long terms = 0;
  double tail_estimate = 0.0;
  bool terminated = false;
  bool slow = false;
};

}  // namespace

Complex term_ratio(const SeriesSpec& spec, long k) {
  const RatioParts rp = ratio_parts(spec, k);
  if (rp.denominator_vanished)
    throw PoleError("term_ratio: denominator factor vanishes at k=" + std::to_string(k));
  if (rp.numerator_vanished) return Complex(0.0, 0.0);
  return rp.value;
}

RatioInfo term_ratio_info(const SeriesSpec& spec, long k) {
  const RatioParts rp = ratio_parts(spec, k);
  return RatioInfo{rp.value, rp.numerator_vanished, rp.denominator_vanished};
}

namespace {

// Walks one tail.  direction = +1 follows t_{k+1} = t_k * ratio(k) from
// t_0 = 1 (the k = 0 term is added here); direction = -1 follows
// t_{k-1} = t_k / ratio(k-1) and adds terms from k = -1 downward.
TailSum walk_tail(const SeriesSpec& spec, const TruncationPolicy& policy, int direction,
                  std::optional<long> bound) {
  TailSum out;
  Complex t(1.0, 0.0);
  if (direction > 0) {
    out.acc = accumulate(out.acc, t);
    out.terms = 1;
  }
  int small_run = 0;
  int diverge_run = 0;
  double last_ratio_mag = 0.0;
  long index = 0;  // current term index along the walk
  for (long step = 0; step < policy.max_terms_per_tail; ++step) {
    if (bound && ((direction > 0 && index >= *bound) || (direction < 0 && index <= -*bound))) {
      out.terminated = true;
      break;
    }
    const long ratio_at = direction > 0 ? index : index - 1;
    const RatioParts rp = ratio_parts(spec, ratio_at);
    if (direction > 0) {
      if (rp.denominator_vanished)
        throw PoleError("series: denominator factor vanishes at k=" +
                        std::to_string(ratio_at));
      if (rp.numerator_vanished) {
        out.terminated = true;
        break;
      }
      t *= rp.value;
      last_ratio_mag = std::abs(rp.value);
    } else {
      // Going down, a vanishing denominator factor of ratio(k-1) makes
      // t_{k-1} identically zero (the lower tail terminates); a vanishing
      // numerator factor would divide by zero, i.e. the term t_{k-1} is a
      // genuine pole of the series.
      if (rp.denominator_vanished) {
        out.terminated = true;
        break;
      }
      if (rp.numerator_vanished)
        throw PoleError("series: term has a pole at k=" + std::to_string(ratio_at));
      t /= rp.value;
      last_ratio_mag = 1.0 / std::abs(rp.value);
    }
    index += direction;
    if (!is_finite(t)) throw OverflowError("series: term overflow at k=" + std::to_string(index));
    out.acc = accumulate(out.acc, t);
    ++out.terms;

    if (last_ratio_mag > kDivergenceSlack && !bound) {
      if (++diverge_run >= kDivergenceWindow)
        throw DivergentSeries("series: term ratios exceed modulus 1 persistently");
    } else {
      diverge_run = 0;
    }
    const double scale = std::max(std::abs(out.acc.value()), 1e-300);
    if (std::abs(t) <= policy.rel_tol * scale) {
      if (++small_run >= policy.consecutive_small && out.terms >= policy.min_terms) {
        const double rho = last_ratio_mag;
        out.tail_estimate = rho < 1.0 ? std::abs(t) * rho / (1.0 - rho) : std::abs(t);
        return out;
      }
    } else {
      small_run = 0;
    }
  }
  if (!out.terminated) {
    out.slow = true;
    const double rho = last_ratio_mag;
    out.tail_estimate = rho < 1.0 ? std::abs(t) * rho / (1.0 - rho) : std::abs(t);
  }
  return out;
}

}  // namespace

EvalResult eval_unilateral(const SeriesSpec& spec, const TruncationPolicy& policy) {
  if (spec.kind != SeriesKind::PHI && spec.kind != SeriesKind::F)
    throw DomainError("eval_unilateral: spec must be PHI or F");
  std::optional<long> upper;
  if (auto b = detect_termination(spec); b && b->upper) upper = *b->upper;
  const TailSum up = walk_tail(spec, policy, +1, upper);
  EvalResult res;
  res.value = up.acc.value();
  res.upper_terms_used = up.terms;
  res.tail_estimate = up.tail_estimate;
  res.terminated_above = up.terminated;
  res.status = up.slow ? EvalStatus::SLOW_CONVERGENCE : EvalStatus::OK;
  ensure_finite(res.value, "eval_unilateral");
  return res;
}

EvalResult eval_bilateral(const SeriesSpec& spec, const TruncationPolicy& policy) {
  if (spec.kind != SeriesKind::PSI && spec.kind != SeriesKind::H)
    throw DomainError("eval_bilateral: spec must be PSI or H");
  std::optional<long> upper, lower;
  if (auto b = detect_termination(spec)) {
    upper = b->upper;
    lower = b->lower;
  }
  const TailSum up = walk_tail(spec, policy, +1, upper);
  const TailSum down = walk_tail(spec, policy, -1, lower);
  EvalResult res;
  AccumulatorState merged = up.acc;
  merged = accumulate(merged, down.acc.sum);
  merged = accumulate(merged, down.acc.compensation);
  res.value = merged.value();
  res.upper_terms_used = up.terms;
  res.lower_terms_used = down.terms;
  res.tail_estimate = up.tail_estimate + down.tail_estimate;
  res.terminated_above = up.terminated;
  res.terminated_below = down.terminated;
  res.status = (up.slow || down.slow) ? EvalStatus::SLOW_CONVERGENCE : EvalStatus::OK;
  ensure_finite(res.value, "eval_bilateral");
  return res;
}

namespace {

bool rel_close(const Complex& x, const Complex& y, double tol) {
  return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-30});
}

}  // namespace

Poise classify_poise(const SeriesSpec& spec) {
  const auto& num = spec.numerator_params;
  const auto& den = spec.denominator_params;
  if (!is_q_kind(spec.kind) || !spec.base) return Poise::GENERAL;
  const Complex q = spec.base->q;

  if (spec.kind == SeriesKind::PHI) {
    // r+1 phi r with a_1 q = a_{i+1} b_i.  A folded spec keeps a_1 in the
    // numerator list and hides the +-sqrt(a) pair in very_well_poised_a.
    if (num.size() != den.size() + 1 || num.empty()) return Poise::GENERAL;
    const Complex aq = num[0] * q;
    for (size_t i = 0; i + 1 < num.size(); ++i)
      if (!rel_close(num[i + 1] * den[i], aq, kTermDetectTol)) return Poise::GENERAL;
    if (spec.very_well_poised_a)
      return rel_close(*spec.very_well_poised_a, num[0], kTermDetectTol)
                 ? Poise::VERY_WELL_POISED
                 : Poise::WELL_POISED;
    // Explicit pair {q sqrt(a), -q sqrt(a)}: sum 0, product -a q^2.
    for (size_t i = 1; i < num.size(); ++i)
      for (size_t j = i + 1; j < num.size(); ++j)
        if (std::abs(num[i] + num[j]) <=
                kTermDetectTol * std::max(std::abs(num[i]), 1.0) &&
            rel_close(num[i] * num[j], -num[0] * q * q, kTermDetectTol))
          return Poise::VERY_WELL_POISED;
    return Poise::WELL_POISED;
  }

  if (spec.kind == SeriesKind::PSI) {
    // r psi r with a_i b_i = a q constant across pairs.
    if (num.size() != den.size() || num.empty()) return Poise::GENERAL;
    const Complex aq = num[0] * den[0];
    for (size_t i = 1; i < num.size(); ++i)
      if (!rel_close(num[i] * den[i], aq, kTermDetectTol)) return Poise::GENERAL;
    if (spec.very_well_poised_a)
      return rel_close(*spec.very_well_poised_a * q, aq, kTermDetectTol)
                 ? Poise::VERY_WELL_POISED
                 : Poise::WELL_POISED;
    for (size_t i = 0; i < num.size(); ++i)
      for (size_t j = i + 1; j < num.size(); ++j)
        if (std::abs(num[i] + num[j]) <=
                kTermDetectTol * std::max(std::abs(num[i]), 1.0) &&
            rel_close(num[i] * num[j], -aq * q, kTermDetectTol))
          return Poise::VERY_WELL_POISED;
    return Poise::WELL_POISED;
  }
  return Poise::GENERAL;
}

std::optional<TerminationBounds> detect_termination(const SeriesSpec& spec) {
  TerminationBounds tb;
  constexpr long kMaxIndex = 64;
  if (is_q_kind(spec.kind)) {
    if (!spec.base) return std::nullopt;
    const Complex q = spec.base->q;
    for (const Complex& a : spec.numerator_params) {
      Complex qm(1.0, 0.0);  // q^{-m} built as 1/q^m
      for (long m = 0; m <= kMaxIndex; ++m) {
        const Complex target = Complex(1.0, 0.0) / qm;
        if (rel_close(a, target, kTermDetectTol)) {
          tb.upper = tb.upper ? std::min(*tb.upper, m) : m;
          break;
        }
        qm *= q;
      }
    }
    if (spec.kind == SeriesKind::PSI) {
      for (const Complex& b : spec.denominator_params) {
        Complex qm = q;  // q^{m+1}
        for (long m = 0; m <= kMaxIndex; ++m) {
          if (rel_close(b, qm, kTermDetectTol)) {
            tb.lower = tb.lower ? std::min(*tb.lower, m) : m;
            break;
          }
          qm *= q;
        }
      }
    }
  } else {
    for (const Complex& a : spec.numerator_params) {
      const double m = std::round(-a.real());
      if (m >= 0 && m <= double(kMaxIndex) &&
          std::abs(a + Complex(m, 0.0)) <= kTermDetectTol * std::max(1.0, m))
        tb.upper = tb.upper ? std::min(*tb.upper, long(m)) : long(m);
    }
    if (spec.kind == SeriesKind::H) {
      for (const Complex& b : spec.denominator_params) {
        const double m = std::round(b.real()) - 1.0;
        if (m >= 0 && m <= double(kMaxIndex) &&
            std::abs(b - Complex(m + 1.0, 0.0)) <= kTermDetectTol * std::max(1.0, m + 1.0))
          tb.lower = tb.lower ? std::min(*tb.lower, long(m)) : long(m);
      }
    }
  }
  if (!tb.upper && !tb.lower) return std::nullopt;
  return tb;
}

}  // namespace qseries
