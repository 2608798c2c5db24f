#ifndef QSERIES_HARNESS_HPP
#define QSERIES_HARNESS_HPP

#include <cstdint>

#include "qseries/replay.hpp"

namespace qseries {

struct SamplerConfig {
  std::uint64_t seed = 1;
  double margin = 0.05;       // slack on every modulus / real-part condition
  bool complex_params = false;  // default: real parameters, real q in [0.1, 0.9]
  long trials = 100;
  double tol = -1.0;  // <= 0 picks the per-identity / per-pipeline default
};

/// Rejection-samples a parameter vector for the identity until domain_check
/// passes at the configured margin.  Magnitudes are log-uniform in
/// [0.1, 10]; the per-trial stream is derived from (seed, trial) so batches
/// are reproducible at any parallelism.  Identities whose convergence rate
/// is a real-part condition (gauss_2f1, dougall_2h2) carry an additional
/// floor on that exponent so sampled points converge to tolerance in a
/// bounded number of terms.  Throws SamplingExhausted after 1e5 rejections.
Params sample_params(IdentityId id, const SamplerConfig& cfg, long trial = 0);

/// In-domain point for a proof pipeline (the per-pipeline conditions are
/// stricter than the target identity's own domain).
Params sample_pipeline_params(PipelineId id, const SamplerConfig& cfg, long trial = 0);

struct VerificationReport {
  std::string identity;
  SamplerConfig config;
  TruncationPolicy policy;
  std::vector<ResidualReport> trials;
  long pass_count = 0;
  double max_rel_residual = 0.0;
  double wall_time_seconds = 0.0;  // never serialized
};

VerificationReport run_verification(IdentityId id, const SamplerConfig& cfg,
                                    const TruncationPolicy& policy = {});

struct ReplayBatchReport {
  std::string pipeline;
  SamplerConfig config;
  long window_m = 0;
  long window_k = 0;
  std::vector<ProofReport> trials;
  long pass_count = 0;
  double max_rel_residual = 0.0;  // over all non-interchange steps
  double wall_time_seconds = 0.0;
};

ReplayBatchReport run_replay(PipelineId id, const SamplerConfig& cfg, long window_m = -1,
                             long window_k = -1);

/// Fixed-schema JSON (schema_version 1).  Deterministic for a given build:
/// identical (seed, config) produce byte-identical strings.  Wall time is
/// deliberately not part of the schema.
std::string to_json(const VerificationReport& report);
std::string to_json(const ReplayBatchReport& report);

}  // namespace qseries

#endif
