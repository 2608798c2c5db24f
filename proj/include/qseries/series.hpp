#ifndef QSERIES_SERIES_HPP
#define QSERIES_SERIES_HPP

#include <optional>
#include <vector>

#include "qseries/pochhammer.hpp"

namespace qseries {

enum class SeriesKind { PHI, PSI, F, H };

/// One r_phi_s / r_psi_s / rFs / rHs series.  PHI and F sum over k >= 0,
/// PSI and H over all integers.  PHI terms carry the implicit (q;q)_k
/// denominator and the ((-1)^k q^C(k,2))^{1+s-r} factor; PSI terms carry the
/// exponent s-r and no implicit factor.
///
/// A very-well-poised pair {q sqrt(a), -q sqrt(a)} over {sqrt(a), -sqrt(a)}
/// is stored folded as very_well_poised_a = a; the per-term contribution is
/// then the rational factor (1 - a q^{2k})/(1 - a), which is algebraically
/// identical and avoids the square-root branch.  The folded pair still
/// counts two parameters on each side of the exponent bookkeeping.
struct SeriesSpec {
  SeriesKind kind = SeriesKind::PHI;
  std::vector<Complex> numerator_params;
  std::vector<Complex> denominator_params;
  std::optional<QBase> base;  // required for PHI/PSI
  Complex argument{1.0, 0.0};
  std::optional<Complex> very_well_poised_a;

  long effective_r() const {
    return long(numerator_params.size()) + (very_well_poised_a ? 2 : 0);
  }
  long effective_s() const {
    return long(denominator_params.size()) + (very_well_poised_a ? 2 : 0);
  }
};

SeriesSpec make_phi(std::vector<Complex> num, std::vector<Complex> den,
                    const QBase& base, Complex z,
                    std::optional<Complex> vwp_a = std::nullopt);
SeriesSpec make_psi(std::vector<Complex> num, std::vector<Complex> den,
                    const QBase& base, Complex z,
                    std::optional<Complex> vwp_a = std::nullopt);
SeriesSpec make_f(std::vector<Complex> num, std::vector<Complex> den, Complex z);
SeriesSpec make_h(std::vector<Complex> num, std::vector<Complex> den, Complex z);

struct TruncationPolicy {
  long max_terms_per_tail = 10000;
  double rel_tol = 1e-14;
  int consecutive_small = 8;
  int min_terms = 12;
};

enum class EvalStatus { OK, SLOW_CONVERGENCE, POLE_IN_TERMS };

struct EvalResult {
  Complex value{0.0, 0.0};
  long upper_terms_used = 0;
  long lower_terms_used = 0;
  double tail_estimate = 0.0;
  bool terminated_above = false;
  bool terminated_below = false;
  EvalStatus status = EvalStatus::OK;
};

struct TerminationBounds {
  std::optional<long> upper;  // terms vanish for k > upper
  std::optional<long> lower;  // terms vanish for k < -lower
};

/// t_{k+1}/t_k assembled from linear factors; k may be negative for
/// bilateral kinds.  Throws PoleError when a denominator factor vanishes.
Complex term_ratio(const SeriesSpec& spec, long k);

/// Non-throwing variant reporting which side of the ratio vanished; walking
/// down, a vanished denominator means the lower tail terminates while a
/// vanished numerator is a genuine pole.
struct RatioInfo {
  Complex value{1.0, 0.0};
  bool numerator_vanished = false;
  bool denominator_vanished = false;
};
RatioInfo term_ratio_info(const SeriesSpec& spec, long k);

/// Forward summation from t_0 = 1 for PHI/F.
EvalResult eval_unilateral(const SeriesSpec& spec, const TruncationPolicy& policy = {});

/// Both tails for PSI/H: k >= 0 forward from t_0 = 1, k <= -1 backward via
/// inverse term ratios; the two compensated tails are merged.
EvalResult eval_bilateral(const SeriesSpec& spec, const TruncationPolicy& policy = {});

enum class Poise { GENERAL, WELL_POISED, VERY_WELL_POISED };

Poise classify_poise(const SeriesSpec& spec);

/// Static termination scan: a numerator parameter within relative 1e-10 of
/// q^{-m} (or of a nonpositive integer -m for F/H) bounds the sum above by
/// m; a bilateral denominator parameter matching q^{m+1} (or the positive
/// integer m+1) bounds it below by -m.  m is searched up to 64.
std::optional<TerminationBounds> detect_termination(const SeriesSpec& spec);

}  // namespace qseries

#endif
