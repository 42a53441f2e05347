#pragma once

// Command implementations behind the `tracecert` executable. Each command
// renders its whole output into a string; run_command maps library errors
// onto the exit-code contract and writes the output.
//
// Exit codes: 0 pass, 1 numerical failure, 2 parameter error, 3 I/O error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tracecert/bases.hpp"
#include "tracecert/block_operator.hpp"
#include "tracecert/diagnostics.hpp"
#include "tracecert/error.hpp"
#include "tracecert/io.hpp"
#include "tracecert/timefreq.hpp"

namespace tracecert {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitPass = 0, kExitNumerical = 1, kExitParameter = 2, kExitIo = 3 };

enum class EmitFormat { csv, json };

struct RunConfig {
  double p = kDefaultP;
  long n_max = 64;
  BasisKind kind = BasisKind::fourier;
  /// Flat tolerance for Gram and resolution-of-identity deviations.
  double tol = 1e-10;
  std::string out;  // empty: stdout
  std::optional<EmitFormat> emit;
  long grid = kDefaultSamples;
  double period = kDefaultPeriod;
  unsigned long long seed = 0;
  /// export subcommand only: operator, block, kernel, family, family-samples.
  std::string what = "operator";

  void validate() const {
    require_p(p);
    if (n_max < 1) throw ParameterError("--nmax must be >= 1, got " + std::to_string(n_max));
    if (!(tol > 0.0)) throw ParameterError("--tol must be positive");
  }
};

struct CommandResult {
  int exit_code = kExitPass;
  std::string output;
  std::string message;  // for stderr
};

inline Json config_echo(const std::string& command, const RunConfig& c) {
  return {
      {"tool", "tracecert"},
      {"version", kVersion},
      {"command", command},
      {"config",
       {{"p", round15(c.p)},
        {"nmax", c.n_max},
        {"kind", to_string(c.kind)},
        {"tol", round15(c.tol)},
        {"grid", c.grid},
        {"period", round15(c.period)},
        {"seed", c.seed}}},
  };
}

namespace detail {

struct SuiteResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string first_failure;  // "(n,k)=(..) deviation=.."
};

inline std::string failure_at(long n, long k, double dev) {
  return "(n,k)=(" + std::to_string(n) + "," + std::to_string(k) + ") deviation=" + format_number(dev);
}

inline void record(SuiteResult& s, double dev, long n, long k) {
  s.max_deviation = std::max(s.max_deviation, dev);
  if (!(dev <= s.tolerance) && s.pass) {
    s.pass = false;
    s.first_failure = failure_at(n, k, dev);
  }
}

inline std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Orthonormality, resolution of identity, l1 bounds, PSD, trace consistency
/// and eigen-recovery over blocks n <= nmax of the configured kind.
inline CommandResult cmd_verify(const RunConfig& c) {
  c.validate();
  const TruncatedOperator op = assemble(c.n_max, c.p, c.kind);

  detail::SuiteResult ortho{"orthonormality", 0.0, c.tol, true, {}};
  detail::SuiteResult identity{"resolution_of_identity", 0.0, c.tol, true, {}};
  detail::SuiteResult l1{"l1_bounds", 0.0, 0.0, true, {}};
  detail::SuiteResult psd{"psd", 0.0, 0.0, true, {}};
  detail::SuiteResult trace{"trace_consistency", 0.0, 1e-12, true, {}};
  detail::SuiteResult eigvals{"eigenvalue_recovery", 0.0, 1e-11, true, {}};
  detail::SuiteResult eigvecs{"eigenvector_recovery", 0.0, 1e-9, true, {}};

  for (long n = 1; n <= c.n_max; ++n) {
    detail::record(ortho, check_orthonormal(n, c.kind), n, 0);
    detail::record(identity, resolution_of_identity(n, c.kind), n, 0);
    visit_basis_matrix(n, c.kind, [&](const auto& v) {
      const double root_n = std::sqrt(static_cast<double>(n));
      for (long k = 0; k < n; ++k) {
        const double value = l1_norm(v.col(k));
        if (c.kind == BasisKind::fourier) {
          // exact sqrt(n) up to 1e-12 relative: report the excess over that
          detail::record(l1, std::max(0.0, std::abs(value - root_n) / root_n - 1e-12), n, k);
        } else {
          const L1Report r = make_l1_report(n, k, c.kind, value);
          detail::record(l1, std::max({0.0, r.lower_bound - l1_tolerance(n) - value, value - r.upper_bound - l1_tolerance(n)}), n, k);
        }
      }
      return 0;
    });
    const SpectrumCheck sc = check_block_spectrum(op.block(n));
    const double nd = static_cast<double>(n);
    detail::record(psd, std::max(0.0, -sc.min_eigenvalue - 1e-12 * 2.0 / (nd * nd * nd)), n, 0);
    detail::record(eigvals, sc.eigenvalue_error, n, 0);
    detail::record(eigvecs, 1.0 - sc.min_overlap, n, sc.worst_overlap_k);
  }
  const double closed = trace_closed_form(c.n_max, c.p);
  detail::record(trace, std::abs(trace_matrix(op) - closed) / closed, c.n_max, 0);

  const std::vector<detail::SuiteResult> suites{ortho, identity, l1, psd, trace, eigvals, eigvecs};
  CommandResult result;
  const bool all_pass = std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.pass; });
  result.exit_code = all_pass ? kExitPass : kExitNumerical;
  for (const auto& s : suites) {
    if (!s.pass) {
      result.message = "verify: suite " + s.name + " failed at " + s.first_failure;
      break;
    }
  }

  if (c.emit.value_or(EmitFormat::json) == EmitFormat::csv) {
    std::ostringstream os;
    os << "suite,max_deviation,tolerance,pass\n";
    for (const auto& s : suites) {
      os << s.name << ',' << format_number(s.max_deviation) << ',' << format_number(s.tolerance) << ','
         << (s.pass ? "true" : "false") << '\n';
    }
    result.output = os.str();
    return result;
  }
  Json j = config_echo("verify", c);
  Json arr = Json::array();
  for (const auto& s : suites) {
    Json e{{"suite", s.name}, {"max_deviation", round15(s.max_deviation)}, {"tolerance", round15(s.tolerance)}, {"pass", s.pass}};
    if (!s.pass) e["first_failure"] = s.first_failure;
    arr.push_back(e);
  }
  j["suites"] = arr;
  j["pass"] = all_pass;
  result.output = detail::render(j);
  return result;
}

/// Trace, Type-A and Type-B partial sums at log-spaced N (25 per decade).
inline CommandResult cmd_sums(const RunConfig& c) {
  c.validate();
  const std::vector<long> ns = log_spaced(1, c.n_max);
  const std::vector<PartialSumSeries> series{
      partial_sum_series(SeriesLabel::trace, ns, c.p, c.kind),
      partial_sum_series(SeriesLabel::type_a, ns, c.p, c.kind),
      partial_sum_series(SeriesLabel::type_b, ns, c.p, c.kind),
  };
  CommandResult result;
  if (c.emit.value_or(EmitFormat::csv) == EmitFormat::csv) {
    std::ostringstream os;
    write_series_csv(os, series);
    result.output = os.str();
    return result;
  }
  Json j = config_echo("sums", c);
  j["series"] = Json::array();
  for (const auto& s : series) j["series"].push_back(series_to_json(s));
  result.output = detail::render(j);
  return result;
}

inline CommandResult cmd_certificate(const RunConfig& c) {
  c.validate();
  if (c.emit == EmitFormat::csv) throw ParameterError("certificate is only emitted as json");
  const CounterexampleCertificate cert = make_certificate(c.n_max, c.p, c.kind);
  Json j = config_echo("certificate", c);
  j["certificate"] = certificate_to_json(cert);
  CommandResult result;
  result.output = detail::render(j);
  if (!cert.all_evidence()) {
    result.exit_code = kExitNumerical;
    result.message = "certificate: at least one evidence flag is false";
  }
  return result;
}

/// Tight window, Wilson family, h_{n,k} for n <= nmax, their M1 coefficient
/// norms against the l1 bounds, the kernel/operator cross-check and a
/// seeded STFT energy check.
inline CommandResult cmd_wilson(const RunConfig& c) {
  c.validate();
  const SampleGrid grid{c.period, c.grid};
  grid.validate();
  const long count = operator_dimension(c.n_max);
  if (count > grid.samples / 2) {
    throw UsageError("nmax=" + std::to_string(c.n_max) + " needs " + std::to_string(count) +
                     " Wilson members; grid " + std::to_string(grid.samples) + " supports at most " +
                     std::to_string(grid.samples / 2));
  }
  constexpr double kTol = 1e-8;
  const GaborLattice lattice{0.5, 1.0};
  const SampledFunction gauss = sample_gaussian(grid);
  const SampledFunction window = tight_window(gauss, lattice);
  const double window_dev = frame_deviation(window, lattice);
  const WilsonFamily fam = wilson_family(window, count);
  const double family_gram = fam.gram_deviation();

  Eigen::MatrixXcd hs(grid.samples, count);
  Json m1 = Json::array();
  bool bounds_ok = true;
  bool term_ok = true;
  long col = 0;
  for (long n = 1; n <= c.n_max; ++n) {
    for (long k = 0; k < n; ++k) {
      const SampledFunction h = build_h_nk(fam, n, k);
      hs.col(col++) = h.values;
      const double value = m1_coefficient_norm(h, fam);
      const L1Report r = make_l1_report(n, k, BasisKind::hartley, value);
      const bool in = r.lower_bound - kTol <= value && value <= r.upper_bound + kTol;
      const double lam = eigenvalue(n, k, c.p);
      const bool term = lam * value <= lam * std::sqrt(static_cast<double>(n)) + kTol;
      bounds_ok = bounds_ok && in;
      term_ok = term_ok && term;
      m1.push_back({{"n", n}, {"k", k}, {"m1", round15(value)}, {"lower", round15(r.lower_bound)},
                    {"upper", round15(r.upper_bound)}, {"within_bounds", in}});
    }
  }
  const double h_gram =
      (grid.step() * hs.adjoint() * hs - Eigen::MatrixXcd::Identity(count, count)).cwiseAbs().maxCoeff();

  const KernelMatrix kernel = kernel_expand(eigen_specs(c.n_max, c.p), fam);
  const Eigen::MatrixXcd global = assemble(c.n_max, c.p, BasisKind::hartley).materialize();
  const double cross = (kernel.coefficients - global).cwiseAbs().maxCoeff();

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  double plancherel = 0.0;
  for (int i = 0; i < 20; ++i) {
    SampledFunction f{grid, Eigen::VectorXcd(grid.samples)};
    for (long j = 0; j < grid.samples; ++j) f.values(j) = {normal(rng), normal(rng)};
    const double expect = f.norm() * gauss.norm();
    plancherel = std::max(plancherel, std::abs(mp_norm_stft(f, gauss, 2) - expect) / expect);
  }

  struct Check {
    const char* name;
    double value;
    bool pass;
  };
  const std::vector<Check> checks{
      {"window_frame_deviation", window_dev, window_dev <= kTol},
      {"wilson_gram_deviation", family_gram, family_gram <= kTol},
      {"h_gram_deviation", h_gram, h_gram <= kTol},
      {"m1_within_l1_bounds", bounds_ok ? 0.0 : 1.0, bounds_ok},
      {"m1_per_term_bound", term_ok ? 0.0 : 1.0, term_ok},
      {"kernel_operator_deviation", cross, cross <= kTol},
      {"stft_plancherel_deviation", plancherel, plancherel <= kTol},
  };
  CommandResult result;
  const bool all_pass = std::all_of(checks.begin(), checks.end(), [](const Check& ch) { return ch.pass; });
  result.exit_code = all_pass ? kExitPass : kExitNumerical;
  for (const auto& ch : checks) {
    if (!ch.pass) {
      result.message = std::string("wilson: check ") + ch.name + " failed (" + format_number(ch.value) + ")";
      break;
    }
  }
  if (c.emit.value_or(EmitFormat::json) == EmitFormat::csv) {
    std::ostringstream os;
    os << "n,k,m1,lower,upper,within_bounds\n";
    for (const auto& e : m1) {
      os << e["n"].get<long>() << ',' << e["k"].get<long>() << ',' << format_number(e["m1"].get<double>()) << ','
         << format_number(e["lower"].get<double>()) << ',' << format_number(e["upper"].get<double>()) << ','
         << (e["within_bounds"].get<bool>() ? "true" : "false") << '\n';
    }
    result.output = os.str();
    return result;
  }
  Json j = config_echo("wilson", c);
  Json arr = Json::array();
  for (const auto& ch : checks) arr.push_back({{"check", ch.name}, {"value", round15(ch.value)}, {"tolerance", kTol}, {"pass", ch.pass}});
  j["checks"] = arr;
  j["m1_norms"] = m1;
  j["family"] = family_manifest(fam);
  j["pass"] = all_pass;
  result.output = detail::render(j);
  return result;
}

/// Matrix and family dumps: operator (global CSV), block (block nmax CSV),
/// kernel (Wilson kernel coefficients CSV), family (JSON manifest),
/// family-samples (CSV).
inline CommandResult cmd_export(const RunConfig& c) {
  c.validate();
  std::ostringstream os;
  if (c.what == "operator") {
    write_matrix_csv(os, assemble(c.n_max, c.p, c.kind).materialize());
  } else if (c.what == "block") {
    write_matrix_csv(os, build_block(c.n_max, c.p, c.kind).as_complex());
  } else if (c.what == "kernel" || c.what == "family" || c.what == "family-samples") {
    const SampleGrid grid{c.period, c.grid};
    const long count = operator_dimension(c.n_max);
    if (count > grid.samples / 2) {
      throw UsageError("nmax=" + std::to_string(c.n_max) + " needs more Wilson members than the grid supports");
    }
    const WilsonFamily fam = wilson_family(tight_window(sample_gaussian(grid), {0.5, 1.0}), count);
    if (c.what == "kernel") {
      write_kernel_csv(os, kernel_expand(eigen_specs(c.n_max, c.p), fam));
    } else if (c.what == "family") {
      Json j = config_echo("export", c);
      j["family"] = family_manifest(fam);
      os << detail::render(j);
    } else {
      write_family_samples_csv(os, fam);
    }
  } else {
    throw ParameterError("unknown export target '" + c.what + "'");
  }
  return {kExitPass, os.str(), {}};
}

/// Runs a command, writes its output to config.out (or `stdout_sink`) and
/// returns the exit code. Error text goes to `stderr_sink`.
inline int run_command(const std::string& name, const RunConfig& c, std::ostream& stdout_sink, std::ostream& stderr_sink) {
  CommandResult r;
  try {
    if (name == "verify") r = cmd_verify(c);
    else if (name == "sums") r = cmd_sums(c);
    else if (name == "certificate") r = cmd_certificate(c);
    else if (name == "wilson") r = cmd_wilson(c);
    else if (name == "export") r = cmd_export(c);
    else throw UsageError("unknown command '" + name + "'");
  } catch (const NumericalError& e) {
    stderr_sink << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    stderr_sink << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    stderr_sink << "parameter error: " << e.what() << '\n';
    return kExitParameter;
  }
  if (c.out.empty()) {
    stdout_sink << r.output;
  } else {
    std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << r.output) || !file.flush()) {
      stderr_sink << "i/o error: cannot write '" << c.out << "'\n";
      return kExitIo;
    }
  }
  if (!r.message.empty()) stderr_sink << r.message << '\n';
  return r.exit_code;
}

}  // namespace tracecert
