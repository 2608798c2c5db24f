#ifndef QSERIES_REPLAY_HPP
#define QSERIES_REPLAY_HPP

#include "qseries/catalog.hpp"

namespace qseries {

/// The three summation derivations replayed numerically: multiply a key
/// identity by a weight sequence, sum over all integers n, interchange with
/// the inner index on a finite rectangle, shift n -> n-k, close the inner
/// sums, and assemble the target identity.
enum class PipelineId { P1_1PSI1, P2A_2PSI2, P2B_2H2, P3_6PSI6 };

struct PipelineInfo {
  PipelineId id;
  std::string name;
  std::vector<std::string> param_names;
  long default_m = 60;
  long default_k = 60;
  double default_tol = 1e-9;
};

const std::vector<PipelineInfo>& pipelines();
const PipelineInfo& pipeline(PipelineId id);
const PipelineInfo* find_pipeline(const std::string& name);

struct ProofPipeline {
  PipelineId id;
  Params params;
  long window_m = 60;  // shifted row index m = n+k runs over [0, M]
  long window_k = 60;  // inner index k runs over [0, K]
};

struct StepResidual {
  std::string step;
  double rel_residual = 0.0;
};

struct ProofReport {
  PipelineId id;
  Params params;
  long window_m = 0;
  long window_k = 0;
  std::vector<StepResidual> steps;
  bool pass = false;
  std::string error;
};

/// Relative residual of prefactor * sum_{k=0}^{K} (q/b;q)_k (a;q)_{n+k} /
/// ((q;q)_k (q;q)_{n+k}) (b/a)^k against (a;q)_n/(b;q)_n.
double verify_key0(const Complex& a, const Complex& b, const QBase& base, long n, long K);

/// Gamma-prefactored analogue: sum_k (1-c)_k (a)_{n+k}/((1)_k (1)_{n+k})
/// against (a)_n/(c)_n, for Re(c-a) > 0.
double verify_key_2f1(const Complex& a, const Complex& c, long n, long K);

/// The very-well-poised key: the (1-c q^{2k}/a)/(1-c/a) weighted sum against
/// (b,c;q)_n/(aq/b,aq/c;q)_n (a/b)^n, for |aq/bc| < 1.
double verify_key1(const Complex& a, const Complex& b, const Complex& c,
                   const QBase& base, long n, long K);

/// Runs the four replay steps:
///   row_key_identity  - the key identity at every n in the window (the
///                       "multiply by the weight and sum" move, row by row);
///   interchange       - the windowed double sum re-added in shifted k-outer
///                       order; exact up to rounding at any window;
///   inner_closed_form - each k-column against its closed form;
///   end_to_end        - the assembled outer series against the target RHS.
ProofReport verify_interchange(const ProofPipeline& pipeline, double tol = -1.0);

}  // namespace qseries

#endif
