// qprob: quantum prospect probabilities, quarter-law tables, condensate
// interference simulations and the invariant self-check.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using qprob::cli::json;

struct Overrides {
  std::optional<std::string> config, out, report, preset, weights, state, filter, diag, observable, mode;
  std::optional<std::string> alpha, beta, mu, nu, lambdaPlus;
  std::optional<std::uint64_t> seed, paths, stride, M, dimA, dimB, dim;
  std::optional<double> dt, tmax, sigma, b, s0, x0;
  bool plot = false, normalized = false, raw = false, strict = false, numeric = false, corrupt = false;

  json to_json() const {
    json j = json::object();
    auto put = [&](const char* key, const auto& opt) {
      if (opt) j[key] = *opt;
    };
    put("out", out);
    put("report", report);
    put("preset", preset);
    put("weights", weights);
    put("state", state);
    put("filter", filter);
    put("diag", diag);
    put("observable", observable);
    put("mode", mode);
    put("alpha", alpha);
    put("beta", beta);
    put("mu", mu);
    put("nu", nu);
    put("lambdaPlus", lambdaPlus);
    put("seed", seed);
    put("paths", paths);
    put("stride", stride);
    put("M", M);
    put("dimA", dimA);
    put("dimB", dimB);
    put("dim", dim);
    put("dt", dt);
    put("tmax", tmax);
    put("sigma", sigma);
    put("b", b);
    put("s0", s0);
    put("x0", x0);
    if (plot) j["plot"] = true;
    if (strict) j["strict"] = true;
    if (numeric) j["numeric"] = true;
    if (corrupt) j["corrupt-state"] = true;
    if (normalized) j["mode"] = "normalized";
    if (raw) j["mode"] = "raw";
    return j;
  }
};

void common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file (flags override it)");
  cmd->add_option("--out", o.out, "Output path");
  cmd->add_option("--seed", o.seed, "Random seed (default: QPROB_SEED or built-in)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qprob: quantum probabilities for composite and uncertain measurements"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qprob::cli::kVersion));
  Overrides o;

  auto* measure = app.add_subcommand("measure", "Event and uncertain-union probabilities on one system");
  common_options(measure, o);
  measure->add_option("--dim", o.dim, "Hilbert space dimension");
  measure->add_option("--preset", o.preset, "State: plus | diag | file");
  measure->add_option("--diag", o.diag, "Diagonal of the state for preset diag, e.g. 0.3,0.7");
  measure->add_option("--state", o.state, "JSON file with {\"rho\": matrix} for preset file");
  measure->add_option("--observable", o.observable, "standard, or a JSON file with {\"matrix\": ...}");
  measure->add_option("--weights", o.weights, "Uncertain-union weights, e.g. 1,1 or 0.5:0.5,0.7");
  measure->add_flag("--strict", o.strict, "Reject weights that are not normalized");

  auto* prospect = app.add_subcommand("prospect", "Prospect probabilities p = f + q on a bipartite state");
  common_options(prospect, o);
  prospect->add_option("--preset", o.preset, "product | max-entangled | bell-like | file");
  prospect->add_option("--M", o.M, "Mode count for max-entangled");
  prospect->add_option("--dimA", o.dimA, "A dimension for product");
  prospect->add_option("--dimB", o.dimB, "B dimension for product");
  prospect->add_option("--state", o.state, "JSON file with {dimA, dimB, rho} for preset file");
  prospect->add_option("--weights", o.weights, "B-basis weights b_alpha");
  prospect->add_flag("--strict", o.strict, "Reject weights that are not normalized");
  auto* norm_flag = prospect->add_flag("--normalized", o.normalized, "Report only the normalized family");
  prospect->add_flag("--raw", o.raw, "Report only the raw family")->excludes(norm_flag);

  auto* quarter = app.add_subcommand("quarter-law", "q+ / q- table for two-branch beta distributions");
  common_options(quarter, o);
  quarter->add_option("--alpha", o.alpha, "alpha values (comma separated)");
  quarter->add_option("--beta", o.beta, "beta values (default: alpha)");
  quarter->add_option("--mu", o.mu, "mu values (default: alpha)");
  quarter->add_option("--nu", o.nu, "nu values (default: mu)");
  quarter->add_option("--lambda-plus", o.lambdaPlus, "lambda+ values (default: 0.5)");
  quarter->add_flag("--numeric", o.numeric, "Use quadrature instead of the closed form");

  auto* bec = app.add_subcommand("bec-sim", "Two-mode condensate interference factor q_n(t)");
  common_options(bec, o);
  bec->add_option("--paths", o.paths, "Ensemble size");
  bec->add_option("--dt", o.dt, "Time step");
  bec->add_option("--tmax", o.tmax, "Horizon");
  bec->add_option("--sigma", o.sigma, "Phase noise strength");
  bec->add_option("--b", o.b, "Pumping amplitude");
  bec->add_option("--s0", o.s0, "Initial population imbalance");
  bec->add_option("--x0", o.x0, "Initial phase difference");
  bec->add_option("--stride", o.stride, "Output every stride-th step");
  bec->add_option("--report", o.report, "JSON report path (default: <out>.json)");
  bec->add_flag("--plot", o.plot, "Also write an SVG plot of q1(t) next to the CSV");

  auto* verify = app.add_subcommand("verify", "Run the invariant self-check suite");
  common_options(verify, o);
  verify->add_option("--filter", o.filter, "Comma-separated suites: events,uncertain,prospects,quarterlaw,bec");
  verify->add_option("--paths", o.paths, "Ensemble size for the stochastic check");
  verify->add_flag("--corrupt-state", o.corrupt, "Test hook: corrupt the prospect family")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : qprob::cli::kValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json cfg;
  try {
    json file_cfg;
    if (o.config) file_cfg = qprob::cli::detail::read_json_file(*o.config);
    cfg = qprob::cli::effective_config(command, file_cfg, o.to_json());
  } catch (const qprob::InvalidArgument& e) {
    std::cerr << "qprob " << command << ": invalid input: " << e.what() << '\n';
    return qprob::cli::kValidation;
  }
  return qprob::cli::run_command(command, cfg, std::cout, std::cerr);
}
