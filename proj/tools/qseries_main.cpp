#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qseries/harness.hpp"

namespace {

using qseries::Complex;

// Accepts "1.5", "-2", "1.5+0.3i", "2i", "-i", "3.2e-4-1e-2i".
std::optional<Complex> parse_complex(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string s = text;
  double re = 0.0, im = 0.0;
  const bool has_i = s.back() == 'i' || s.back() == 'I';
  if (!has_i) {
    char* end = nullptr;
    re = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return Complex(re, im);
  }
  s.pop_back();  // strip the i
  // split at the last +/- that is not part of an exponent
  size_t split = std::string::npos;
  for (size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  char* end = nullptr;
  im = std::strtod(im_part.c_str(), &end);
  if (end != im_part.c_str() + im_part.size()) return std::nullopt;
  if (!re_part.empty()) {
    re = std::strtod(re_part.c_str(), &end);
    if (end != re_part.c_str() + re_part.size()) return std::nullopt;
  }
  return Complex(re, im);
}

std::optional<std::vector<Complex>> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto z = parse_complex(item);
    if (!z) return std::nullopt;
    out.push_back(*z);
  }
  return out;
}

std::string format_complex(const Complex& z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  }
  return buf;
}

bool write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << body;
  return bool(out);
}

struct VerifyArgs {
  std::string id;
  long trials = 100;
  std::uint64_t seed = 1;
  double margin = 0.05;
  double tol = -1.0;
  bool complex_params = false;
  long max_terms = 10000;
  std::string json_path;
};

struct ReplayArgs {
  std::string id;
  long trials = 20;
  std::uint64_t seed = 1;
  double margin = 0.45;
  double tol = -1.0;
  std::string window;
  std::string json_path;
};

struct EvalArgs {
  std::string kind;
  std::string num, den, q, z = "1";
  long max_terms = 10000;
};

int do_verify(const VerifyArgs& args) {
  const qseries::Identity* meta = qseries::find_identity(args.id);
  if (!meta) {
    std::cerr << "unknown identity id '" << args.id << "' (see `qseries list`)\n";
    return 2;
  }
  qseries::SamplerConfig cfg;
  cfg.seed = args.seed;
  cfg.margin = args.margin;
  cfg.trials = args.trials;
  cfg.tol = args.tol;
  cfg.complex_params = args.complex_params;
  qseries::TruncationPolicy policy;
  policy.max_terms_per_tail = args.max_terms;
  const auto report = qseries::run_verification(meta->id, cfg, policy);
  std::cout << report.identity << ": " << report.pass_count << "/" << cfg.trials
            << " trials passed, max_rel_residual = " << report.max_rel_residual << " ("
            << report.wall_time_seconds << " s)\n";
  for (size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    if (!t.pass) {
      std::cout << "  trial " << i << " FAILED";
      if (!t.error.empty()) std::cout << " [" << t.error << "]";
      std::cout << " rel_residual=" << t.rel_residual << " params:";
      for (size_t j = 0; j < t.params.size(); ++j)
        std::cout << " " << meta->param_names[j] << "=" << format_complex(t.params[j]);
      std::cout << "\n";
    }
  }
  if (!args.json_path.empty() && !write_file(args.json_path, qseries::to_json(report))) {
    std::cerr << "cannot write report to " << args.json_path << "\n";
    return 2;
  }
  return report.pass_count == cfg.trials ? 0 : 1;
}

int do_replay(const ReplayArgs& args) {
  const qseries::PipelineInfo* info = qseries::find_pipeline(args.id);
  if (!info) {
    std::cerr << "unknown pipeline id '" << args.id << "' (see `qseries list`)\n";
    return 2;
  }
  long m = -1, k = -1;
  if (!args.window.empty()) {
    if (std::sscanf(args.window.c_str(), "%ld,%ld", &m, &k) != 2 || m < 1 || k < 1) {
      std::cerr << "--window expects M,K with positive integers\n";
      return 2;
    }
  }
  qseries::SamplerConfig cfg;
  cfg.seed = args.seed;
  cfg.margin = args.margin;
  cfg.trials = args.trials;
  cfg.tol = args.tol;
  const auto report = qseries::run_replay(info->id, cfg, m, k);
  std::cout << report.pipeline << ": " << report.pass_count << "/" << cfg.trials
            << " trials passed, max_rel_residual = " << report.max_rel_residual << " ("
            << report.wall_time_seconds << " s)\n";
  for (size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    if (!t.pass) {
      std::cout << "  trial " << i << " FAILED";
      if (!t.error.empty()) std::cout << " [" << t.error << "]";
      for (const auto& s : t.steps) std::cout << " " << s.step << "=" << s.rel_residual;
      std::cout << "\n";
    }
  }
  if (!args.json_path.empty() && !write_file(args.json_path, qseries::to_json(report))) {
    std::cerr << "cannot write report to " << args.json_path << "\n";
    return 2;
  }
  return report.pass_count == cfg.trials ? 0 : 1;
}

int do_eval(const EvalArgs& args) {
  const auto num = parse_complex_list(args.num);
  const auto den = parse_complex_list(args.den);
  const auto z = parse_complex(args.z);
  if (!num || !den || !z) {
    std::cerr << "cannot parse --num/--den/--z (complex values like 0.5 or 0.5+0.1i)\n";
    return 2;
  }
  qseries::SeriesSpec spec;
  if (args.kind == "phi" || args.kind == "psi") {
    const auto q = args.q.empty() ? std::nullopt : std::optional<Complex>(parse_complex(args.q).value_or(Complex(0, 0)));
    if (!q) {
      std::cerr << "phi/psi series need --q\n";
      return 2;
    }
    try {
      spec = args.kind == "phi" ? qseries::make_phi(*num, *den, qseries::QBase(*q), *z)
                                : qseries::make_psi(*num, *den, qseries::QBase(*q), *z);
    } catch (const qseries::DomainError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  } else if (args.kind == "f") {
    spec = qseries::make_f(*num, *den, *z);
  } else if (args.kind == "h") {
    spec = qseries::make_h(*num, *den, *z);
  } else {
    std::cerr << "kind must be one of phi|psi|f|h\n";
    return 2;
  }
  qseries::TruncationPolicy policy;
  policy.max_terms_per_tail = args.max_terms;
  try {
    const bool bilateral = args.kind == "psi" || args.kind == "h";
    const qseries::EvalResult r = bilateral ? qseries::eval_bilateral(spec, policy)
                                            : qseries::eval_unilateral(spec, policy);
    std::cout << "value = " << format_complex(r.value) << "\n";
    std::cout << "terms_used = " << r.upper_terms_used << " (upper)";
    if (bilateral) std::cout << " + " << r.lower_terms_used << " (lower)";
    std::cout << "\ntail_estimate = " << r.tail_estimate << "\n";
    if (r.terminated_above) std::cout << "terminated above\n";
    if (r.terminated_below) std::cout << "terminated below\n";
    if (r.status == qseries::EvalStatus::SLOW_CONVERGENCE)
      std::cout << "status = slow_convergence (max_terms reached)\n";
    return 0;
  } catch (const qseries::Error& e) {
    std::cerr << "evaluation failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical kernel and verification harness for unilateral and bilateral "
               "(basic) hypergeometric series"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "print identity and pipeline ids");

  VerifyArgs vargs;
  auto* verify_cmd = app.add_subcommand("verify", "verify one identity at random in-domain points");
  verify_cmd->add_option("identity", vargs.id, "identity id (see `qseries list`)")->required();
  verify_cmd->add_option("--trials", vargs.trials, "number of sampled points")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", vargs.seed, "RNG seed");
  verify_cmd->add_option("--margin", vargs.margin, "slack on domain conditions")->check(CLI::Range(1e-9, 0.4999));
  verify_cmd->add_option("--tol", vargs.tol, "residual tolerance (default per identity)");
  verify_cmd->add_flag("--complex", vargs.complex_params, "sample complex parameters");
  verify_cmd->add_option("--max-terms", vargs.max_terms, "term budget per tail")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--json", vargs.json_path, "write the JSON report here");

  ReplayArgs rargs;
  auto* replay_cmd = app.add_subcommand("replay", "replay one derivation pipeline");
  replay_cmd->add_option("pipeline", rargs.id, "pipeline id (see `qseries list`)")->required();
  replay_cmd->add_option("--trials", rargs.trials, "number of sampled points")->check(CLI::PositiveNumber);
  replay_cmd->add_option("--seed", rargs.seed, "RNG seed");
  replay_cmd->add_option("--margin", rargs.margin, "slack on domain conditions")->check(CLI::Range(1e-9, 0.4999));
  replay_cmd->add_option("--tol", rargs.tol, "step tolerance (default per pipeline)");
  replay_cmd->add_option("--window", rargs.window, "truncation rectangle M,K");
  replay_cmd->add_option("--json", rargs.json_path, "write the JSON report here");

  EvalArgs eargs;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate one series");
  eval_cmd->add_option("kind", eargs.kind, "phi|psi|f|h")->required();
  eval_cmd->add_option("--num", eargs.num, "numerator parameters, comma separated");
  eval_cmd->add_option("--den", eargs.den, "denominator parameters, comma separated");
  eval_cmd->add_option("--q", eargs.q, "base (phi/psi only)");
  eval_cmd->add_option("--z", eargs.z, "argument");
  eval_cmd->add_option("--max-terms", eargs.max_terms, "term budget per tail")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& entry : qseries::catalog()) std::cout << entry.name << "\n";
      for (const auto& info : qseries::pipelines()) std::cout << info.name << "\n";
      return 0;
    }
    if (verify_cmd->parsed()) return do_verify(vargs);
    if (replay_cmd->parsed()) return do_replay(rargs);
    if (eval_cmd->parsed()) return do_eval(eargs);
  } catch (const qseries::SamplingExhausted& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const qseries::DomainError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const qseries::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
