#include "qseries/harness.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

namespace qseries {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One deterministic stream per (seed, trial); the uniform doubles are built
// from the raw 64-bit output so results do not depend on the standard
// library's distribution implementations.
class TrialRng {
public:
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : eng_(splitmix64(seed ^ splitmix64(trial + 1))) {}

  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform_magnitude() {
    return 0.1 * std::exp(uniform() * std::log(100.0));  // [0.1, 10]
  }

  long uniform_int(long lo, long hi) {  // inclusive
    return lo + long(double(hi - lo + 1) * uniform());
  }

  Complex parameter(bool complex_mode) {
    const double mag = log_uniform_magnitude();
    if (complex_mode) {
      const double phase = uniform() * 2.0 * std::numbers::pi;
      return Complex(mag * std::cos(phase), mag * std::sin(phase));
    }
    return Complex(uniform() < 0.5 ? -mag : mag, 0.0);
  }

  Complex base_q(bool complex_mode, double margin) {
    const double hi = std::min(0.9, 1.0 - margin);
    const double mag = uniform(0.1, hi);
    if (complex_mode) {
      const double phase = uniform() * 2.0 * std::numbers::pi;
      return Complex(mag * std::cos(phase), mag * std::sin(phase));
    }
    return Complex(mag, 0.0);
  }

private:
  std::mt19937_64 eng_;
};

constexpr long kMaxRejections = 100000;

// Power-law series need the decay exponent bounded away from zero to reach
// 1e-8..1e-10 residuals within the term budget; the margin alone caps out
// at 0.5, so the sampler enforces these floors on the Re conditions.
constexpr double kReFloorVerify = 3.0;
constexpr double kReFloorReplay = 3.2;

bool extra_feasibility(IdentityId id, const Params& p) {
  switch (id) {
    case IdentityId::GAUSS_2F1:
      return (p[2] - p[0] - p[1]).real() >= kReFloorVerify;
    case IdentityId::DOUGALL_2H2:
      return (p[2] + p[3] - p[0] - p[1] - Complex(1.0, 0.0)).real() >= kReFloorVerify;
    default:
      return true;
  }
}

}  // namespace

Params sample_params(IdentityId id, const SamplerConfig& cfg, long trial) {
  const Identity& meta = identity(id);
  TrialRng rng(cfg.seed, std::uint64_t(trial));
  for (long attempt = 0; attempt < kMaxRejections; ++attempt) {
    Params p;
    p.reserve(meta.param_names.size());
    for (const std::string& name : meta.param_names) {
      if (name == "q")
        p.push_back(rng.base_q(cfg.complex_params, cfg.margin));
      else if (name == "n")
        p.push_back(Complex(double(rng.uniform_int(0, 12)), 0.0));
      else
        p.push_back(rng.parameter(cfg.complex_params));
    }
    if (!extra_feasibility(id, p)) continue;
    if (domain_check(id, p, cfg.margin)) return p;
  }
  throw SamplingExhausted("sample_params: no in-domain point for '" + meta.name +
                          "' after 1e5 rejections (margin too tight?)");
}

Params sample_pipeline_params(PipelineId id, const SamplerConfig& cfg, long trial) {
  TrialRng rng(cfg.seed, std::uint64_t(trial));
  const double margin = cfg.margin;
  for (long attempt = 0; attempt < kMaxRejections; ++attempt) {
    switch (id) {
      case PipelineId::P1_1PSI1: {
        Params p = {rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.parameter(cfg.complex_params), rng.base_q(cfg.complex_params, margin)};
        if (domain_check(IdentityId::RAMANUJAN_1PSI1, p, margin)) return p;
        break;
      }
      case PipelineId::P2A_2PSI2: {
        Params p = {rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.base_q(cfg.complex_params, margin)};
        if (domain_check(IdentityId::PSI22_TRANSFORM, p, margin)) return p;
        break;
      }
      case PipelineId::P2B_2H2: {
        Params p = {rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params)};
        const Complex a = p[0], b = p[1], c = p[2], d = p[3];
        if ((c - a).real() < kReFloorReplay || (d - a - b).real() < kReFloorReplay ||
            (c + d - a - b - Complex(1.0, 0.0)).real() < kReFloorReplay)
          break;
        if (domain_check(IdentityId::DOUGALL_2H2, p, margin)) return p;
        break;
      }
      case PipelineId::P3_6PSI6: {
        Params p = {rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.parameter(cfg.complex_params), rng.parameter(cfg.complex_params),
                    rng.parameter(cfg.complex_params), rng.base_q(cfg.complex_params, margin)};
        const Complex a = p[0], b = p[1], c = p[2], d = p[3], e = p[4], q = p[5];
        if (std::abs(a * q / (b * c)) > 1.0 - margin) break;
        if (std::abs(a * q / (c * d * e)) > 1.0 - margin) break;
        if (domain_check(IdentityId::BAILEY_6PSI6, p, margin)) return p;
        break;
      }
    }
  }
  throw SamplingExhausted("sample_pipeline_params: no in-domain point after 1e5 rejections");
}

VerificationReport run_verification(IdentityId id, const SamplerConfig& cfg,
                                    const TruncationPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  const Identity& meta = identity(id);
  VerificationReport rep;
  rep.identity = meta.name;
  rep.config = cfg;
  rep.policy = policy;
  const double tol = cfg.tol > 0 ? cfg.tol : meta.default_tol;
  for (long trial = 0; trial < cfg.trials; ++trial) {
    ResidualReport r;
    try {
      const Params p = sample_params(id, cfg, trial);
      r = residual(id, p, policy, tol);
    } catch (const Error& e) {
      r.error = e.what();
      r.pass = false;
      r.rel_residual = std::numeric_limits<double>::infinity();
    }
    if (r.pass) ++rep.pass_count;
    if (r.error.empty()) rep.max_rel_residual = std::max(rep.max_rel_residual, r.rel_residual);
    rep.trials.push_back(std::move(r));
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ReplayBatchReport run_replay(PipelineId id, const SamplerConfig& cfg, long window_m,
                             long window_k) {
  const auto start = std::chrono::steady_clock::now();
  const PipelineInfo& info = pipeline(id);
  ReplayBatchReport rep;
  rep.pipeline = info.name;
  rep.config = cfg;
  rep.window_m = window_m > 0 ? window_m : info.default_m;
  rep.window_k = window_k > 0 ? window_k : info.default_k;
  const double tol = cfg.tol > 0 ? cfg.tol : info.default_tol;
  for (long trial = 0; trial < cfg.trials; ++trial) {
    ProofReport r;
    try {
      const Params p = sample_pipeline_params(id, cfg, trial);
      r = verify_interchange({id, p, rep.window_m, rep.window_k}, tol);
    } catch (const Error& e) {
      r.id = id;
      r.error = e.what();
      r.pass = false;
    }
    if (r.pass) ++rep.pass_count;
    for (const StepResidual& s : r.steps)
      if (s.step != "interchange")
        rep.max_rel_residual = std::max(rep.max_rel_residual, s.rel_residual);
    rep.trials.push_back(std::move(r));
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json complex_json(const Complex& z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json params_json(const std::vector<std::string>& names, const Params& p) {
  ordered_json obj = ordered_json::object();
  for (size_t i = 0; i < p.size(); ++i)
    obj[i < names.size() ? names[i] : "p" + std::to_string(i)] = complex_json(p[i]);
  return obj;
}

const char* status_name(EvalStatus s) {
  switch (s) {
    case EvalStatus::OK: return "ok";
    case EvalStatus::SLOW_CONVERGENCE: return "slow_convergence";
    case EvalStatus::POLE_IN_TERMS: return "pole_in_terms";
  }
  return "unknown";
}

ordered_json eval_json(const EvalResult& e) {
  ordered_json obj = ordered_json::object();
  obj["value"] = complex_json(e.value);
  obj["upper_terms_used"] = e.upper_terms_used;
  obj["lower_terms_used"] = e.lower_terms_used;
  obj["tail_estimate"] = e.tail_estimate;
  obj["terminated_above"] = e.terminated_above;
  obj["terminated_below"] = e.terminated_below;
  obj["status"] = status_name(e.status);
  return obj;
}

ordered_json config_json(const SamplerConfig& cfg, double resolved_tol) {
  ordered_json obj = ordered_json::object();
  obj["seed"] = cfg.seed;
  obj["margin"] = cfg.margin;
  obj["complex_params"] = cfg.complex_params;
  obj["trials"] = cfg.trials;
  obj["tol"] = resolved_tol;
  return obj;
}

}  // namespace

std::string to_json(const VerificationReport& rep) {
  const Identity& meta = *find_identity(rep.identity);
  ordered_json root = ordered_json::object();
  root["schema_version"] = 1;
  root["identity"] = rep.identity;
  root["config"] = config_json(rep.config,
                               rep.config.tol > 0 ? rep.config.tol : meta.default_tol);
  ordered_json trials = ordered_json::array();
  for (const ResidualReport& t : rep.trials) {
    ordered_json e = ordered_json::object();
    e["params"] = params_json(meta.param_names, t.params);
    e["lhs"] = eval_json(t.lhs);
    ordered_json rhs = ordered_json::object();
    rhs["value"] = complex_json(t.rhs.value);
    if (t.rhs.series) {
      rhs["prefactor"] = complex_json(t.rhs.prefactor);
      rhs["series"] = eval_json(*t.rhs.series);
    }
    e["rhs"] = rhs;
    e["rel_residual"] =
        std::isfinite(t.rel_residual) ? ordered_json(t.rel_residual) : ordered_json(nullptr);
    e["status"] = !t.error.empty() ? "error: " + t.error : (t.pass ? "pass" : "fail");
    trials.push_back(std::move(e));
  }
  root["trials"] = std::move(trials);
  ordered_json summary = ordered_json::object();
  summary["pass_count"] = rep.pass_count;
  summary["max_rel_residual"] = rep.max_rel_residual;
  root["summary"] = std::move(summary);
  return root.dump(2) + "\n";
}

std::string to_json(const ReplayBatchReport& rep) {
  const PipelineInfo& info = *find_pipeline(rep.pipeline);
  ordered_json root = ordered_json::object();
  root["schema_version"] = 1;
  root["pipeline"] = rep.pipeline;
  ordered_json cfg = config_json(rep.config,
                                 rep.config.tol > 0 ? rep.config.tol : info.default_tol);
  cfg["window"] = ordered_json::array({rep.window_m, rep.window_k});
  root["config"] = std::move(cfg);
  ordered_json trials = ordered_json::array();
  for (const ProofReport& t : rep.trials) {
    ordered_json e = ordered_json::object();
    e["params"] = params_json(info.param_names, t.params);
    ordered_json steps = ordered_json::array();
    double worst = 0.0;
    for (const StepResidual& s : t.steps) {
      ordered_json sj = ordered_json::object();
      sj["step"] = s.step;
      sj["rel_residual"] = s.rel_residual;
      steps.push_back(std::move(sj));
      worst = std::max(worst, s.rel_residual);
    }
    e["steps"] = std::move(steps);
    e["rel_residual"] = t.error.empty() ? ordered_json(worst) : ordered_json(nullptr);
    e["status"] = !t.error.empty() ? "error: " + t.error : (t.pass ? "pass" : "fail");
    trials.push_back(std::move(e));
  }
  root["trials"] = std::move(trials);
  ordered_json summary = ordered_json::object();
  summary["pass_count"] = rep.pass_count;
  summary["max_rel_residual"] = rep.max_rel_residual;
  root["summary"] = std::move(summary);
  return root.dump(2) + "\n";
}

}  // namespace qseries
