// tracecert: verification suites, partial-sum series and certificates for
// the block-diagonal trace-class counterexample family.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tracecert/cli.hpp"

int main(int argc, char** argv) {
  using namespace tracecert;
  CLI::App app{"Construct and verify the truncated Type-B / not-Type-A trace-class operators"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig config;
  std::string kind = "fourier";
  std::string emit;

  const std::map<std::string, std::string> commands{
      {"verify", "Run basis, spectral, PSD and trace suites for blocks n <= nmax"},
      {"sums", "Emit trace / Type-A / Type-B partial sums at log-spaced N"},
      {"certificate", "Emit the counterexample certificate as JSON"},
      {"wilson", "Realize h_{n,k} in a sampled Wilson basis and check it"},
      {"export", "Dump the operator, a block, the kernel coefficients or the Wilson family"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--p", config.p, "Eigenvalue decay exponent, p > 1")->capture_default_str();
    sub->add_option("--nmax", config.n_max, "Largest block size N")->capture_default_str();
    sub->add_option("--kind", kind, "Block basis")->check(CLI::IsMember({"fourier", "hartley"}))->capture_default_str();
    sub->add_option("--tol", config.tol, "Gram / identity tolerance")->capture_default_str();
    sub->add_option("--out", config.out, "Output path (default stdout)");
    sub->add_option("--emit", emit, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--grid", config.grid, "Samples on the periodic grid")->capture_default_str();
    sub->add_option("--period", config.period, "Period of the sampling grid")->capture_default_str();
    sub->add_option("--seed", config.seed, "Seed for randomized checks")->capture_default_str();
    if (name == "export") {
      sub->add_option("--what", config.what, "operator | block | kernel | family | family-samples")->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParameter;
  }

  config.kind = parse_basis_kind(kind);
  if (!emit.empty()) config.emit = emit == "csv" ? EmitFormat::csv : EmitFormat::json;
  const std::string name = app.get_subcommands().front()->get_name();
  return run_command(name, config, std::cout, std::cerr);
}
