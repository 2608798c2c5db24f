#ifndef QSERIES_CATALOG_HPP
#define QSERIES_CATALOG_HPP

#include <string>
#include <vector>

#include "qseries/series.hpp"

namespace qseries {

enum class IdentityId {
  QBINOMIAL,
  QGAUSS,
  RAMANUJAN_1PSI1,
  PSI22_TRANSFORM,
  PSI22_SUM,
  BAILEY22_TRANSFORM,
  GAUSS_2F1,
  DOUGALL_2H2,
  ROGERS_6PHI5,
  BAILEY_6PSI6,
  JACKSON_8PHI7,
};

/// Parameter vector, ordered as Identity::param_names.  Integer parameters
/// (the n of the terminating sum) travel as real integer-valued entries.
using Params = std::vector<Complex>;

struct Identity {
  IdentityId id;
  std::string name;  // stable lowercase id used by the CLI and reports
  std::vector<std::string> param_names;
  bool bilateral = false;
  bool transform = false;  // rhs is prefactor x series instead of a product
  double default_tol = 1e-10;
  /// Convergence region the sources claim after analytic continuation, when
  /// it is wider than the region verification samples from.
  std::string claimed_region;
  std::string verified_region;
};

const std::vector<Identity>& catalog();
const Identity& identity(IdentityId id);
const Identity* find_identity(const std::string& name);

/// True iff every modulus condition of the identity holds with slack
/// `margin` (|v| <= 1 - margin, real-part conditions >= margin) and no
/// closed-form product or Gamma factor sits within kPoleMargin of a
/// singular point.
bool domain_check(IdentityId id, const Params& params, double margin);

SeriesSpec lhs_spec(IdentityId id, const Params& params);

/// The displayed product / Gamma quotient.  DomainError for the two
/// transformation entries, whose right side is prefactor x series.
Complex rhs_closed_form(IdentityId id, const Params& params);

struct RhsEval {
  Complex value{1.0, 0.0};
  Complex prefactor{1.0, 0.0};
  std::optional<EvalResult> series;  // present for transformation entries
};

RhsEval rhs_eval(IdentityId id, const Params& params, const TruncationPolicy& policy);

struct ResidualReport {
  Params params;
  EvalResult lhs;
  RhsEval rhs;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // nonempty when evaluation raised
};

/// Evaluates both sides and reports |lhs-rhs| / max(|lhs|,|rhs|,1e-300).
/// Evaluation errors are recorded in the report, never rethrown.
ResidualReport residual(IdentityId id, const Params& params,
                        const TruncationPolicy& policy = {}, double tol = -1.0);

}  // namespace qseries

#endif
