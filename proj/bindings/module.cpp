#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qseries/harness.hpp"

namespace py = pybind11;
using namespace qseries;

namespace {

SeriesSpec build_spec(const std::string& kind, const std::vector<Complex>& num,
                      const std::vector<Complex>& den, Complex z,
                      std::optional<Complex> q, std::optional<Complex> vwp_a) {
  if (kind == "phi" || kind == "psi") {
    if (!q) throw DomainError("phi/psi series need q");
    return kind == "phi" ? make_phi(num, den, QBase(*q), z, vwp_a)
                         : make_psi(num, den, QBase(*q), z, vwp_a);
  }
  if (kind == "f") return make_f(num, den, z);
  if (kind == "h") return make_h(num, den, z);
  throw DomainError("kind must be one of phi|psi|f|h");
}

TruncationPolicy build_policy(long max_terms, double rel_tol) {
  TruncationPolicy p;
  p.max_terms_per_tail = max_terms;
  p.rel_tol = rel_tol;
  return p;
}

IdentityId id_from_name(const std::string& name) {
  const Identity* meta = find_identity(name);
  if (!meta) throw DomainError("unknown identity '" + name + "'");
  return meta->id;
}

PipelineId pipeline_from_name(const std::string& name) {
  const PipelineInfo* info = find_pipeline(name);
  if (!info) throw DomainError("unknown pipeline '" + name + "'");
  return info->id;
}

const char* status_str(EvalStatus s) {
  switch (s) {
    case EvalStatus::OK: return "ok";
    case EvalStatus::SLOW_CONVERGENCE: return "slow_convergence";
    case EvalStatus::POLE_IN_TERMS: return "pole_in_terms";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_qseries, m) {
  m.doc() = "numerical kernel and verification harness for unilateral and "
            "bilateral (basic) hypergeometric series";

  py::register_exception<PoleError>(m, "PoleError");
  py::register_exception<DivisionByVanishingFactor>(m, "DivisionByVanishingFactor");
  py::register_exception<qseries::OverflowError>(m, "QSeriesOverflowError");
  py::register_exception<DivergentSeries>(m, "DivergentSeries");
  py::register_exception<DomainError>(m, "QSeriesDomainError");
  py::register_exception<SamplingExhausted>(m, "SamplingExhausted");

  py::class_<PochResult>(m, "PochResult")
      .def_readonly("value", &PochResult::value)
      .def_readonly("is_zero", &PochResult::is_zero)
      .def_readonly("zero_order", &PochResult::zero_order)
      .def("__repr__", [](const PochResult& r) {
        return "PochResult(value=(" + std::to_string(r.value.real()) + "," +
               std::to_string(r.value.imag()) + "), zero_order=" +
               std::to_string(r.zero_order) + ")";
      });

  py::class_<EvalResult>(m, "EvalResult")
      .def_readonly("value", &EvalResult::value)
      .def_readonly("upper_terms_used", &EvalResult::upper_terms_used)
      .def_readonly("lower_terms_used", &EvalResult::lower_terms_used)
      .def_readonly("tail_estimate", &EvalResult::tail_estimate)
      .def_readonly("terminated_above", &EvalResult::terminated_above)
      .def_readonly("terminated_below", &EvalResult::terminated_below)
      .def_property_readonly("status",
                             [](const EvalResult& r) { return status_str(r.status); });

  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("params", &ResidualReport::params)
      .def_readonly("lhs", &ResidualReport::lhs)
      .def_property_readonly("rhs_value",
                             [](const ResidualReport& r) { return r.rhs.value; })
      .def_readonly("abs_residual", &ResidualReport::abs_residual)
      .def_readonly("rel_residual", &ResidualReport::rel_residual)
      .def_readonly("tolerance", &ResidualReport::tolerance)
      .def_readonly("pass_", &ResidualReport::pass)
      .def_readonly("error", &ResidualReport::error);

  py::class_<StepResidual>(m, "StepResidual")
      .def_readonly("step", &StepResidual::step)
      .def_readonly("rel_residual", &StepResidual::rel_residual);

  py::class_<ProofReport>(m, "ProofReport")
      .def_readonly("params", &ProofReport::params)
      .def_readonly("steps", &ProofReport::steps)
      .def_readonly("pass_", &ProofReport::pass)
      .def_readonly("error", &ProofReport::error);

  m.def("gamma", &qseries::gamma, py::arg("z"), "complex Gamma");
  m.def(
      "qpoch",
      [](Complex a, Complex q, long k) { return qpoch(a, QBase(q), k); },
      py::arg("a"), py::arg("q"), py::arg("k"),
      "q-shifted factorial (a;q)_k, either sign of k");
  m.def(
      "qpoch_inf", [](Complex a, Complex q) { return qpoch_inf(a, QBase(q)); },
      py::arg("a"), py::arg("q"), "(a;q)_infinity");
  m.def(
      "qpoch_multi",
      [](const std::vector<Complex>& params, Complex q, std::optional<long> k) {
        return qpoch_multi(params, QBase(q), k);
      },
      py::arg("params"), py::arg("q"), py::arg("k") = std::nullopt,
      "(a_1,...,a_m;q)_k; k=None means infinity");
  m.def("poch", &qseries::poch, py::arg("a"), py::arg("k"), "shifted factorial (a)_k");

  m.def(
      "eval_series",
      [](const std::string& kind, const std::vector<Complex>& num,
         const std::vector<Complex>& den, Complex z, std::optional<Complex> q,
         std::optional<Complex> vwp_a, long max_terms, double rel_tol) {
        const SeriesSpec spec = build_spec(kind, num, den, z, q, vwp_a);
        const TruncationPolicy policy = build_policy(max_terms, rel_tol);
        return (kind == "psi" || kind == "h") ? eval_bilateral(spec, policy)
                                              : eval_unilateral(spec, policy);
      },
      py::arg("kind"), py::arg("num"), py::arg("den"), py::arg("z"),
      py::arg("q") = std::nullopt, py::arg("vwp_a") = std::nullopt,
      py::arg("max_terms") = 10000, py::arg("rel_tol") = 1e-14,
      "evaluate a phi/psi/F/H series");
  m.def(
      "term_ratio",
      [](const std::string& kind, const std::vector<Complex>& num,
         const std::vector<Complex>& den, Complex z, std::optional<Complex> q, long k,
         std::optional<Complex> vwp_a) {
        return term_ratio(build_spec(kind, num, den, z, q, vwp_a), k);
      },
      py::arg("kind"), py::arg("num"), py::arg("den"), py::arg("z"),
      py::arg("q") = std::nullopt, py::arg("k") = 0, py::arg("vwp_a") = std::nullopt);

  m.def("identities", [] {
    std::vector<std::string> names;
    for (const Identity& e : catalog()) names.push_back(e.name);
    return names;
  });
  m.def("param_names", [](const std::string& name) {
    return identity(id_from_name(name)).param_names;
  });
  m.def(
      "domain_check",
      [](const std::string& name, const Params& p, double margin) {
        return domain_check(id_from_name(name), p, margin);
      },
      py::arg("identity"), py::arg("params"), py::arg("margin") = 0.05);
  m.def(
      "rhs_closed_form",
      [](const std::string& name, const Params& p) {
        return rhs_closed_form(id_from_name(name), p);
      },
      py::arg("identity"), py::arg("params"));
  m.def(
      "residual",
      [](const std::string& name, const Params& p, double tol, long max_terms,
         double rel_tol) {
        return residual(id_from_name(name), p, build_policy(max_terms, rel_tol), tol);
      },
      py::arg("identity"), py::arg("params"), py::arg("tol") = -1.0,
      py::arg("max_terms") = 10000, py::arg("rel_tol") = 1e-14);

  m.def("pipelines", [] {
    std::vector<std::string> names;
    for (const PipelineInfo& info : pipelines()) names.push_back(info.name);
    return names;
  });
  m.def(
      "verify_key0",
      [](Complex a, Complex b, Complex q, long n, long K) {
        return verify_key0(a, b, QBase(q), n, K);
      },
      py::arg("a"), py::arg("b"), py::arg("q"), py::arg("n"), py::arg("K") = 2000);
  m.def("verify_key_2f1", &verify_key_2f1, py::arg("a"), py::arg("c"), py::arg("n"),
        py::arg("K") = 4000);
  m.def(
      "verify_key1",
      [](Complex a, Complex b, Complex c, Complex q, long n, long K) {
        return verify_key1(a, b, c, QBase(q), n, K);
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("q"), py::arg("n"),
      py::arg("K") = 2000);
  m.def(
      "verify_interchange",
      [](const std::string& name, const Params& p, long window_m, long window_k,
         double tol) {
        return verify_interchange({pipeline_from_name(name), p, window_m, window_k}, tol);
      },
      py::arg("pipeline"), py::arg("params"), py::arg("window_m") = 60,
      py::arg("window_k") = 60, py::arg("tol") = -1.0);

  m.def(
      "sample_params",
      [](const std::string& name, std::uint64_t seed, long trial, double margin,
         bool complex_params) {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.margin = margin;
        cfg.complex_params = complex_params;
        return sample_params(id_from_name(name), cfg, trial);
      },
      py::arg("identity"), py::arg("seed") = 1, py::arg("trial") = 0,
      py::arg("margin") = 0.05, py::arg("complex_params") = false);
  m.def(
      "run_verification",
      [](const std::string& name, long trials, std::uint64_t seed, double margin,
         double tol, bool complex_params, long max_terms) {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.margin = margin;
        cfg.trials = trials;
        cfg.tol = tol;
        cfg.complex_params = complex_params;
        TruncationPolicy policy;
        policy.max_terms_per_tail = max_terms;
        const VerificationReport rep = run_verification(id_from_name(name), cfg, policy);
        return py::make_tuple(rep.pass_count, rep.max_rel_residual, to_json(rep));
      },
      py::arg("identity"), py::arg("trials") = 100, py::arg("seed") = 1,
      py::arg("margin") = 0.05, py::arg("tol") = -1.0, py::arg("complex_params") = false,
      py::arg("max_terms") = 10000,
      "returns (pass_count, max_rel_residual, json_report)");
  m.def(
      "run_replay",
      [](const std::string& name, long trials, std::uint64_t seed, double margin,
         long window_m, long window_k) {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.margin = margin;
        cfg.trials = trials;
        const ReplayBatchReport rep =
            run_replay(pipeline_from_name(name), cfg, window_m, window_k);
        return py::make_tuple(rep.pass_count, rep.max_rel_residual, to_json(rep));
      },
      py::arg("pipeline"), py::arg("trials") = 20, py::arg("seed") = 1,
      py::arg("margin") = 0.45, py::arg("window_m") = -1, py::arg("window_k") = -1,
      "returns (pass_count, max_rel_residual, json_report)");

  m.attr("__version__") = "1.0.0";
}
