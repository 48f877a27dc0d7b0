#pragma once

// qprob subcommands. Each takes the effective flat JSON config (built-in
// defaults < config file < flags) and returns the process exit code:
// 0 success, 1 invariant failure, 2 input validation, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qprob/becsim.hpp"
#include "qprob/events.hpp"
#include "qprob/prospects.hpp"
#include "qprob/quarterlaw.hpp"
#include "qprob/report.hpp"
#include "qprob/sampling.hpp"
#include "qprob/uncertain.hpp"
#include "qprob/verify.hpp"

namespace qprob::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kValidation = 2, kNumerical = 3 };

inline constexpr const char* kVersion = "1.0.0";
inline constexpr std::uint64_t kBuiltinSeed = 20240601;

// Default seed: QPROB_SEED when set, else the built-in value.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("QPROB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw InvalidArgument("QPROB_SEED must be an unsigned integer");
    return v;
  }
  return kBuiltinSeed;
}

inline json builtin_defaults(const std::string& command) {
  json d = json::object();
  d["seed"] = default_seed();
  if (command == "bec-sim") {
    const bec::BecParams p;
    d["b"] = p.b;
    d["sigma"] = p.sigma;
    d["s0"] = p.s0;
    d["x0"] = p.x0;
    d["dt"] = p.dt;
    d["tmax"] = p.tMax;
    d["paths"] = p.nPaths;
    d["stride"] = 100;
    d["plot"] = false;
    d["out"] = "qprob_bec.csv";
  } else if (command == "prospect") {
    d["preset"] = "bell-like";
    d["M"] = 2;
    d["dimA"] = 2;
    d["dimB"] = 2;
    d["strict"] = false;
    d["mode"] = "both";
  } else if (command == "quarter-law") {
    d["numeric"] = false;
  } else if (command == "measure") {
    d["dim"] = 2;
    d["preset"] = "plus";
    d["observable"] = "standard";
    d["strict"] = false;
  } else if (command == "verify") {
    d["paths"] = 200;
    d["filter"] = "";
    d["corrupt-state"] = false;
  }
  return d;
}

namespace detail {

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidArgument("expected a number or a [re, im] pair, got " + j.dump());
}

// "0.6,0.8" or "0.5:0.5,0.7071" (re:im) or a JSON array of numbers / pairs.
inline std::vector<cplx> parse_complex_list(const json& j) {
  std::vector<cplx> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(parse_complex(e));
    return out;
  }
  if (!j.is_string()) throw InvalidArgument("expected a list of complex numbers");
  std::stringstream ss(j.get<std::string>());
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      std::size_t used = 0;
      if (colon == std::string::npos) {
        out.emplace_back(std::stod(item, &used), 0.0);
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      } else {
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

inline std::vector<double> parse_real_list(const json& j) {
  std::vector<double> out;
  for (const auto& z : parse_complex_list(j)) {
    if (z.imag() != 0.0) throw InvalidArgument("expected real values");
    out.push_back(z.real());
  }
  return out;
}

inline Matrix parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  std::vector<cplx> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw InvalidArgument("matrix rows must have equal length");
    for (const auto& e : row) entries.push_back(parse_complex(e));
  }
  return Matrix(rows, cols, std::move(entries));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T get(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw InvalidArgument(std::string("missing parameter '") + key + "'");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("parameter '") + key + "' has the wrong type");
  }
}

inline double get_double(const json& cfg, const char* key) { return get<double>(cfg, key); }

inline std::uint64_t get_count(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw InvalidArgument(std::string("parameter '") + key + "' must be a non-negative integer");
}

inline ModeWeights weights_from(const json& cfg, std::size_t d, json& echo) {
  std::vector<cplx> w = cfg.contains("weights") ? parse_complex_list(cfg.at("weights")) : std::vector<cplx>(d, cplx{1.0, 0.0});
  if (w.size() != d) {
    throw InvalidArgument("weights: expected " + std::to_string(d) + " entries, got " + std::to_string(w.size()));
  }
  const bool strict = cfg.value("strict", false);
  echo["weightsNormalizedBySolver"] = !strict;
  return strict ? ModeWeights(std::move(w)) : ModeWeights::normalized(std::move(w));
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << text;
}

inline void emit(const json& cfg, const std::string& text, std::ostream& out) {
  const std::string path = cfg.value("out", std::string{});
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

inline json metadata() { return json{{"tool", "qprob"}, {"version", kVersion}}; }

inline json result_json(const ProspectResult& r) { return json{{"p", r.p}, {"f", r.f}, {"q", r.q}}; }

}  // namespace detail

// ---------------------------------------------------------------------------
// prospect

inline CompositeState prospect_state_from(const json& cfg) {
  const auto preset = detail::get<std::string>(cfg, "preset");
  if (preset == "bell-like") {
    return CompositeState(DensityOperator::pure(Vector{0.5, 0.5, 0.5, -0.5}), 2, 2);
  }
  if (preset == "max-entangled") {
    return max_entangled_state(detail::get_count(cfg, "M"));
  }
  if (preset == "product") {
    // Seeded random mixed factors.
    CounterEngine rng(detail::get_count(cfg, "seed"), 7);
    const auto dA = detail::get_count(cfg, "dimA");
    const auto dB = detail::get_count(cfg, "dimB");
    if (dA == 0 || dB == 0 || dA * dB > kMaxEigenDim) throw InvalidArgument("product preset: need 1 <= dimA*dimB <= 64");
    return product_state(random_mixed_state(rng, dA), random_mixed_state(rng, dB));
  }
  if (preset == "file") {
    const auto spec = detail::read_json_file(detail::get<std::string>(cfg, "state"));
    const auto dA = detail::get_count(spec, "dimA");
    const auto dB = detail::get_count(spec, "dimB");
    return CompositeState(DensityOperator(detail::parse_matrix(spec.at("rho"))), dA, dB);
  }
  throw InvalidArgument("unknown preset '" + preset + "' (expected product | max-entangled | bell-like | file)");
}

inline int cmd_prospect(const json& cfg, std::ostream& out, std::ostream& err) {
  const auto state = prospect_state_from(cfg);
  json report;
  report["command"] = "prospect";
  report["config"] = cfg;
  const auto b = detail::weights_from(cfg, state.dimB(), report);
  const auto mode = detail::get<std::string>(cfg, "mode");
  if (mode != "raw" && mode != "normalized" && mode != "both") throw InvalidArgument("mode must be raw | normalized | both");

  report["dimA"] = state.dimA();
  report["dimB"] = state.dimB();
  json wj = json::array();
  for (const auto& w : b.values()) wj.push_back(detail::complex_json(w));
  report["weights"] = wj;

  json checks = json::object();
  std::string violated;
  auto check = [&](const char* name, bool ok) {
    checks[name] = ok;
    if (!ok && violated.empty()) violated = name;
  };
  constexpr double kTol = 1e-10;

  const auto raw = prospect_probabilities(state, b, ProspectMode::raw);
  if (mode != "normalized") {
    report["raw"] = detail::result_json(raw);
    double worst = 0.0;
    for (std::size_t n = 0; n < raw.p.size(); ++n) worst = std::max(worst, std::abs(raw.p[n] - raw.f[n] - raw.q[n]));
    check("raw_p_equals_f_plus_q", worst < 1e-12);
  }
  if (mode != "raw") {
    const auto nr = prospect_probabilities(state, b, ProspectMode::normalized);
    report["normalized"] = detail::result_json(nr);
    double sp = 0.0, sf = 0.0, sq = 0.0, worst = 0.0;
    bool bp = true, bf = true, bq = true;
    for (std::size_t n = 0; n < nr.p.size(); ++n) {
      sp += nr.p[n];
      sf += nr.f[n];
      sq += nr.q[n];
      worst = std::max(worst, std::abs(nr.p[n] - nr.f[n] - nr.q[n]));
      bp = bp && nr.p[n] >= 0.0 && nr.p[n] <= 1.0;
      bf = bf && nr.f[n] >= 0.0 && nr.f[n] <= 1.0;
      bq = bq && nr.q[n] >= -1.0 && nr.q[n] <= 1.0;
    }
    check("normalized_p_equals_f_plus_q", worst < 1e-12);
    check("sum_p_is_one", std::abs(sp - 1.0) < kTol && bp);
    check("sum_f_is_one", std::abs(sf - 1.0) < kTol && bf);
    check("sum_q_is_zero", std::abs(sq) < kTol && bq);
  }
  report["checks"] = checks;
  report["metadata"] = detail::metadata();
  detail::emit(cfg, report.dump(2) + "\n", out);
  if (!violated.empty()) {
    err << "qprob prospect: invariant violated: " << violated << '\n';
    return kInvariantFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// measure: projective events and an optional uncertain union on one system

inline int cmd_measure(const json& cfg, std::ostream& out, std::ostream&) {
  const auto d = detail::get_count(cfg, "dim");
  if (d < 1 || d > kMaxEigenDim) throw InvalidArgument("dim must lie in [1, 64]");
  const auto preset = detail::get<std::string>(cfg, "preset");
  const DensityOperator rho = [&] {
    if (preset == "plus") return DensityOperator::pure(Vector(ModeWeights::uniform(d).values()));
    if (preset == "diag") {
      const auto diag = detail::parse_real_list(cfg.at("diag"));
      if (diag.size() != d) throw InvalidArgument("diag: expected dim entries");
      return DensityOperator(Matrix::diagonal(diag));
    }
    if (preset == "file") return DensityOperator(detail::parse_matrix(detail::read_json_file(detail::get<std::string>(cfg, "state")).at("rho")));
    throw InvalidArgument("unknown preset '" + preset + "' (expected plus | diag | file)");
  }();
  if (rho.dim() != d) throw InvalidArgument("state dimension differs from dim");
  const auto obs_spec = detail::get<std::string>(cfg, "observable");
  const Observable obs = obs_spec == "standard"
                             ? Observable::standard(d)
                             : Observable::from_matrix(detail::parse_matrix(detail::read_json_file(obs_spec).at("matrix")));
  if (obs.dim() != d) throw InvalidArgument("observable dimension differs from dim");

  json report;
  report["command"] = "measure";
  report["config"] = cfg;
  std::vector<double> probs;
  double sum = 0.0;
  for (std::size_t n = 0; n < d; ++n) {
    probs.push_back(event_probability(rho, obs, n));
    sum += probs.back();
  }
  report["eigenvalues"] = obs.spectral().eigenvalues;
  report["events"] = {{"p", probs}, {"sum", sum}};
  if (cfg.contains("weights")) {
    UncertainUnion u(obs, detail::weights_from(cfg, d, report));
    const auto r = uncertain_probability(rho, u);
    report["uncertain"] = {{"p", r.p}, {"diagonal", r.diag}, {"q", r.q}};
  }
  report["metadata"] = detail::metadata();
  detail::emit(cfg, report.dump(2) + "\n", out);
  return kOk;
}

// ---------------------------------------------------------------------------
// quarter-law

struct QuarterLawRow {
  double alpha, beta, mu, nu, lambdaPlus;
};

inline std::vector<QuarterLawRow> quarter_law_rows(const json& cfg) {
  std::vector<QuarterLawRow> rows;
  if (cfg.contains("rows")) {
    for (const auto& r : cfg.at("rows")) {
      rows.push_back({detail::get_double(r, "alpha"), detail::get_double(r, "beta"), detail::get_double(r, "mu"),
                      detail::get_double(r, "nu"), r.value("lambdaPlus", 0.5)});
    }
    return rows;
  }
  // Grid: beta defaults to alpha, mu to alpha, nu to mu (the symmetric family).
  const auto alphas = cfg.contains("alpha") ? detail::parse_real_list(cfg.at("alpha")) : std::vector<double>{0.5, 1, 2, 5};
  const auto lambdas = cfg.contains("lambdaPlus") ? detail::parse_real_list(cfg.at("lambdaPlus")) : std::vector<double>{0.5};
  const auto betas = cfg.contains("beta") ? detail::parse_real_list(cfg.at("beta")) : std::vector<double>{};
  const auto mus = cfg.contains("mu") ? detail::parse_real_list(cfg.at("mu")) : std::vector<double>{};
  const auto nus = cfg.contains("nu") ? detail::parse_real_list(cfg.at("nu")) : std::vector<double>{};
  for (double a : alphas)
    for (double b : betas.empty() ? std::vector<double>{a} : betas)
      for (double m : mus.empty() ? std::vector<double>{a} : mus)
        for (double n : nus.empty() ? std::vector<double>{m} : nus)
          for (double l : lambdas) rows.push_back({a, b, m, n, l});
  return rows;
}

inline int cmd_quarter_law(const json& cfg, std::ostream& out, std::ostream&) {
  const bool numeric = cfg.value("numeric", false);
  std::ostringstream csv;
  csv << "alpha,beta,mu,nu,lambdaPlus,qPlus,qMinus,residual\n";
  for (const auto& r : quarter_law_rows(cfg)) {
    for (double s : {r.alpha, r.beta, r.mu, r.nu}) {
      if (!(s > 0.0)) throw InvalidArgument("shape parameters must be positive");
    }
    const BetaPairDistribution d(r.alpha, r.beta, r.mu, r.nu, r.lambdaPlus, 1.0 - r.lambdaPlus);
    const auto s = numeric ? q_split_numeric(d, 1e-10) : q_split_closed(d);
    csv << format_g17(r.alpha) << ',' << format_g17(r.beta) << ',' << format_g17(r.mu) << ',' << format_g17(r.nu) << ','
        << format_g17(r.lambdaPlus) << ',' << format_g17(s.qPlus) << ',' << format_g17(s.qMinus) << ','
        << format_g17(s.qPlus + s.qMinus) << '\n';
  }
  detail::emit(cfg, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// bec-sim

inline bec::BecParams bec_params_from(const json& cfg) {
  bec::BecParams p;
  p.b = detail::get_double(cfg, "b");
  p.sigma = detail::get_double(cfg, "sigma");
  p.s0 = detail::get_double(cfg, "s0");
  p.x0 = detail::get_double(cfg, "x0");
  p.dt = detail::get_double(cfg, "dt");
  p.tMax = detail::get_double(cfg, "tmax");
  p.nPaths = detail::get_count(cfg, "paths");
  p.seed = detail::get_count(cfg, "seed");
  p.validate();
  return p;
}

inline std::string sibling_path(const std::string& path, const char* ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

inline int cmd_bec_sim(const json& cfg, std::ostream& out, std::ostream&) {
  const auto p = bec_params_from(cfg);
  const auto stride = detail::get_count(cfg, "stride");
  if (stride == 0) throw InvalidArgument("stride must be positive");
  const std::string csv_path = detail::get<std::string>(cfg, "out");
  if (csv_path.empty()) throw InvalidArgument("bec-sim needs an output path (--out)");

  // b_c first: an undefined critical amplitude should fail before the long run.
  const double bc = bec::critical_amplitude(p.s0, p.x0);
  const auto regime = bec::regime_classify(p.b, p.s0, p.x0);
  const auto r = bec::ensemble_interference(p, {stride, 0});
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write '" + csv_path + "'");
    write_ensemble_csv(f, r);
  }

  json report;
  report["command"] = "bec-sim";
  report["config"] = cfg;
  report["regime"] = bec::to_string(regime);
  report["criticalAmplitude"] = bc;
  report["rows"] = r.times.size();
  report["csv"] = csv_path;
  double antisym = 0.0;
  for (std::size_t i = 0; i < r.q1.size(); ++i) antisym = std::max(antisym, std::abs(r.q1[i] + r.q2[i]));
  report["summary"] = {{"q1TimeVariance", bec::time_variance(r.times, r.q1)},
                       {"q1MaxAbs", bec::max_abs_until(r.times, r.q1, p.tMax).first},
                       {"maxAbsQ1PlusQ2", antisym}};

  if (cfg.value("plot", false)) {
    const std::string svg_path = sibling_path(csv_path, ".svg");
    char caption[160];
    std::snprintf(caption, sizeof caption, "b = %.3g %s b_c = %.3f (%s), sigma = %.3g, %llu paths", p.b,
                  p.b < bc ? "<" : (p.b > bc ? ">" : "="), bc, bec::to_string(regime), p.sigma,
                  static_cast<unsigned long long>(p.nPaths));
    std::ostringstream svg;
    write_svg_line_plot(svg, r.times, r.q1, {"Interference factor q1(t)", caption, "t", "q1"});
    detail::write_text(svg_path, svg.str());
    report["svg"] = svg_path;
  }
  report["metadata"] = detail::metadata();
  const std::string report_path = cfg.value("report", sibling_path(csv_path, ".json"));
  detail::write_text(report_path, report.dump(2) + "\n");
  out << "wrote " << csv_path << " (" << r.times.size() << " rows), regime " << bec::to_string(regime) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

inline int cmd_verify(const json& cfg, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  opt.seed = detail::get_count(cfg, "seed");
  opt.paths = detail::get_count(cfg, "paths");
  if (opt.paths < 2) throw InvalidArgument("verify: paths must be at least 2");
  opt.corruptState = cfg.value("corrupt-state", false);
  std::stringstream filter(cfg.value("filter", std::string{}));
  for (std::string s; std::getline(filter, s, ',');) {
    if (!s.empty()) opt.suites.push_back(s);
  }
  std::ostringstream text;
  const auto outcomes = run_verify(opt, text);
  detail::emit(cfg, text.str(), out);
  if (!cfg.value("out", std::string{}).empty()) out << text.str();
  for (const auto& c : outcomes) {
    if (!c.pass) {
      err << "qprob verify: invariant failed: [" << c.suite << "] " << c.name << '\n';
      return kInvariantFailure;
    }
  }
  return kOk;
}

// Runs a command with the exit-code contract applied to thrown errors.
inline int run_command(const std::string& command, const json& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (command == "prospect") return cmd_prospect(cfg, out, err);
    if (command == "measure") return cmd_measure(cfg, out, err);
    if (command == "quarter-law") return cmd_quarter_law(cfg, out, err);
    if (command == "bec-sim") return cmd_bec_sim(cfg, out, err);
    if (command == "verify") return cmd_verify(cfg, out, err);
    err << "qprob: unknown command '" << command << "'\n";
    return kValidation;
  } catch (const InvalidArgument& e) {
    err << "qprob " << command << ": invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    err << "qprob " << command << ": invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "qprob " << command << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

// defaults < config file < flag overrides
inline json effective_config(const std::string& command, const json& file_cfg, const json& overrides) {
  json cfg = builtin_defaults(command);
  for (const auto* layer : {&file_cfg, &overrides}) {
    if (layer->is_null()) continue;
    if (!layer->is_object()) throw InvalidArgument("config must be a JSON object");
    for (auto it = layer->begin(); it != layer->end(); ++it) {
      if (it.key() != "command") cfg[it.key()] = it.value();
    }
  }
  return cfg;
}

}  // namespace qprob::cli
