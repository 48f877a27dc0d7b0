#pragma once

// Self-check suite behind `qprob verify`: re-derives the measure axioms, the
// zero-interference results, the quarter law and the condensate invariants
// on seeded random instances and prints one line per check. Output depends
// only on the options, never on timing or worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qprob/becsim.hpp"
#include "qprob/events.hpp"
#include "qprob/prospects.hpp"
#include "qprob/quarterlaw.hpp"
#include "qprob/sampling.hpp"
#include "qprob/uncertain.hpp"

namespace qprob {

struct VerifyOptions {
  std::vector<std::string> suites;  // empty: all
  bool corruptState = false;        // test hook: perturbs the prospect family
  std::uint64_t seed = 20240601;
  std::uint64_t paths = 200;        // ensemble size of the stochastic check
  unsigned workers = 0;
};

struct CheckOutcome {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"events", "uncertain", "prospects", "quarterlaw", "bec"};
  return names;
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class CheckLog {
 public:
  CheckLog(std::ostream& os, std::vector<CheckOutcome>& out) : os_(os), out_(out) {}

  void record(const std::string& suite, const std::string& name, bool pass, const std::string& detail) {
    out_.push_back({suite, name, pass, detail});
    os_ << (pass ? "PASS" : "FAIL") << "  [" << suite << "] " << name << ": " << detail << '\n';
  }

  // Runs body; a thrown error counts as a failure of that check.
  void run(const std::string& suite, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, detail] = body();
      record(suite, name, ok, detail);
    } catch (const std::exception& e) {
      record(suite, name, false, std::string("error: ") + e.what());
    }
  }

 private:
  std::ostream& os_;
  std::vector<CheckOutcome>& out_;
};

inline void verify_events(CheckLog& log, const VerifyOptions& opt) {
  log.run("events", "event probabilities form a probability measure", [&] {
    CounterEngine rng(opt.seed, 101);
    double worst = 0.0;
    bool bounded = true;
    for (std::size_t d : {2u, 3u, 4u, 8u}) {
      for (int i = 0; i < 250; ++i) {
        const auto rho = random_mixed_state(rng, d);
        const auto obs = random_observable(rng, d);
        double sum = 0.0;
        for (std::size_t n = 0; n < d; ++n) {
          const double p = event_probability(rho, obs, n);
          bounded = bounded && p >= 0.0 && p <= 1.0;
          sum += p;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    return std::pair{bounded && worst < 1e-10, "max |sum p - 1| = " + sci(worst) + " over 1000 states"};
  });
  log.run("events", "standard unions are additive", [&] {
    CounterEngine rng(opt.seed, 102);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const auto rho = random_mixed_state(rng, 4);
      const auto obs = random_observable(rng, 4);
      const std::size_t first[] = {0, 2};
      const std::size_t second[] = {1, 3};
      const double a = union_probability(rho, obs, first);
      const double b = union_probability(rho, obs, second);
      worst = std::max(worst, std::abs(a + b - 1.0));
      worst = std::max(worst, std::abs(a - event_probability(rho, obs, 0) - event_probability(rho, obs, 2)));
    }
    return std::pair{worst < 1e-12, "max additivity defect = " + sci(worst)};
  });
}

inline void verify_uncertain(CheckLog& log, const VerifyOptions& opt) {
  log.run("uncertain", "uncertain probability equals Tr(rho P_A)", [&] {
    CounterEngine rng(opt.seed, 201);
    double worst = 0.0;
    for (std::size_t d : {2u, 3u, 4u}) {
      for (int i = 0; i < 300; ++i) {
        const auto rho = random_mixed_state(rng, d);
        UncertainUnion u(random_observable(rng, d), random_weights(rng, d));
        const auto r = uncertain_probability(rho, u);
        const double direct = trace(rho.matrix() * proposition_operator(u)).real();
        worst = std::max({worst, std::abs(r.p - direct), std::abs(r.p - r.diag - r.q)});
      }
    }
    return std::pair{worst < 1e-12, "max |p - Tr(rho P_A)| = " + sci(worst)};
  });
  log.run("uncertain", "interference vanishes for states diagonal in the eigenbasis", [&] {
    CounterEngine rng(opt.seed, 202);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> diag{rng.uniform(), rng.uniform(), rng.uniform()};
      const double total = diag[0] + diag[1] + diag[2];
      const auto rho = DensityOperator(Matrix::diagonal({diag[0] / total, diag[1] / total, diag[2] / total}));
      UncertainUnion u(Observable::standard(3), random_weights(rng, 3));
      worst = std::max(worst, std::abs(uncertain_probability(rho, u).q));
    }
    return std::pair{worst < 1e-14, "max |q| = " + sci(worst)};
  });
  log.run("uncertain", "uncertain unions are not additive", [&] {
    const double h = 1.0 / std::sqrt(2.0);
    const auto rho = DensityOperator::pure(Vector{h, h});
    UncertainUnion u(Observable::standard(2), ModeWeights::uniform(2));
    const auto r = uncertain_probability(rho, u);
    return std::pair{std::abs(r.q) > 0.1, "p = " + sci(r.p) + ", diagonal part = " + sci(r.diag) + ", q = " + sci(r.q)};
  });
}

inline void verify_prospects(CheckLog& log, const VerifyOptions& opt) {
  struct Axioms {
    double decomposition = 0.0, sum_p = 0.0, sum_f = 0.0, sum_q = 0.0;
    bool bounds_p = true, bounds_f = true, bounds_q = true;
  } ax;
  {
    CounterEngine rng(opt.seed, 301);
    const std::pair<std::size_t, std::size_t> dims[] = {{2, 2}, {2, 3}, {3, 3}};
    for (int i = 0; i < 1000; ++i) {
      const auto [dA, dB] = dims[i % 3];
      const auto state = random_entangled_state(rng, dA, dB);
      const auto b = random_weights(rng, dB);
      const auto raw = prospect_probabilities(state, b, ProspectMode::raw);
      auto r = prospect_probabilities(state, b, ProspectMode::normalized);
      if (opt.corruptState) {
        for (auto& p : r.p) p *= 1.25;
      }
      double sp = 0.0, sf = 0.0, sq = 0.0;
      for (std::size_t n = 0; n < dA; ++n) {
        ax.decomposition = std::max({ax.decomposition, std::abs(raw.p[n] - raw.f[n] - raw.q[n]),
                                     std::abs(r.p[n] - r.f[n] - r.q[n])});
        ax.bounds_p = ax.bounds_p && r.p[n] >= 0.0 && r.p[n] <= 1.0;
        ax.bounds_f = ax.bounds_f && r.f[n] >= 0.0 && r.f[n] <= 1.0;
        ax.bounds_q = ax.bounds_q && r.q[n] >= -1.0 && r.q[n] <= 1.0;
        sp += r.p[n];
        sf += r.f[n];
        sq += r.q[n];
      }
      ax.sum_p = std::max(ax.sum_p, std::abs(sp - 1.0));
      ax.sum_f = std::max(ax.sum_f, std::abs(sf - 1.0));
      ax.sum_q = std::max(ax.sum_q, std::abs(sq));
    }
  }
  log.record("prospects", "prospect probability normalization (sum p = 1, 0 <= p <= 1)",
             ax.sum_p < 1e-10 && ax.bounds_p, "max |sum p - 1| = " + sci(ax.sum_p) + " over 1000 entangled states");
  log.record("prospects", "classical part normalization (sum f = 1, 0 <= f <= 1)", ax.sum_f < 1e-10 && ax.bounds_f,
             "max |sum f - 1| = " + sci(ax.sum_f));
  log.record("prospects", "interference alternation (sum q = 0, -1 <= q <= 1)", ax.sum_q < 1e-10 && ax.bounds_q,
             "max |sum q| = " + sci(ax.sum_q));
  log.record("prospects", "decomposition p = f + q", ax.decomposition < 1e-12,
             "max |p - f - q| = " + sci(ax.decomposition));

  log.run("prospects", "product states carry no interference (normalized family)", [&] {
    CounterEngine rng(opt.seed, 302);
    double worst = 0.0;
    const std::pair<std::size_t, std::size_t> dims[] = {{2, 2}, {2, 3}, {3, 3}};
    for (int i = 0; i < 300; ++i) {
      const auto [dA, dB] = dims[i % 3];
      const auto s = product_state(random_mixed_state(rng, dA), random_mixed_state(rng, dB));
      const auto r = prospect_probabilities(s, random_weights(rng, dB), ProspectMode::normalized);
      for (double q : r.q) worst = std::max(worst, std::abs(q));
    }
    return std::pair{worst < 1e-12, "max |q| = " + sci(worst)};
  });
  log.run("prospects", "maximally entangled state carries no interference", [&] {
    CounterEngine rng(opt.seed, 303);
    double worst = 0.0;
    for (std::size_t M = 2; M <= 6; ++M) {
      const auto s = max_entangled_state(M);
      for (int i = 0; i < 50; ++i) {
        const auto r = prospect_probabilities(s, random_weights(rng, M), ProspectMode::raw);
        for (double q : r.q) worst = std::max(worst, std::abs(q));
      }
    }
    return std::pair{worst < 1e-12, "max |q| = " + sci(worst) + " for M = 2..6"};
  });
  log.run("prospects", "entanglement of the maximally entangled state is log2 M", [&] {
    double worst = 0.0;
    for (std::size_t M = 2; M <= 6; ++M) {
      worst = std::max(worst, std::abs(entanglement_measure_maxstate(M) - std::log2(static_cast<double>(M))));
    }
    return std::pair{worst == 0.0 && entanglement_measure_maxstate(4) == 2.0, "log2 4 = 2, max defect " + sci(worst)};
  });
  log.run("prospects", "entangled state with nonzero interference exists", [&] {
    const auto psi = Vector{0.5, 0.5, 0.5, -0.5};
    const CompositeState s(DensityOperator::pure(psi), 2, 2);
    const auto r = prospect_probabilities(s, ModeWeights::uniform(2), ProspectMode::raw);
    const bool ok = std::abs(r.q[0] - 0.25) < 1e-12 && std::abs(r.q[1] + 0.25) < 1e-12;
    return std::pair{ok, "q = (" + sci(r.q[0]) + ", " + sci(r.q[1]) + ")"};
  });
  log.run("prospects", "decoherence drives q linearly to zero", [&] {
    CounterEngine rng(opt.seed, 304);
    double worst_linear = 0.0;
    double at_zero = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto s = random_entangled_state(rng, 2, 3);
      const auto b = random_weights(rng, 3);
      const auto full = prospect_probabilities(s, b, ProspectMode::raw);
      for (double lambda : {0.0, 0.25, 0.5, 0.75}) {
        const auto r = prospect_probabilities(partially_decohered(s, lambda), b, ProspectMode::raw);
        for (std::size_t n = 0; n < r.q.size(); ++n) {
          worst_linear = std::max(worst_linear, std::abs(r.q[n] - lambda * full.q[n]));
          if (lambda == 0.0) at_zero = std::max(at_zero, std::abs(r.q[n]));
        }
      }
    }
    return std::pair{worst_linear < 1e-12 && at_zero == 0.0,
                     "max |q(lambda) - lambda q(1)| = " + sci(worst_linear) + ", |q(0)| = " + sci(at_zero)};
  });
}

inline void verify_quarterlaw(CheckLog& log, const VerifyOptions& opt) {
  log.run("quarterlaw", "quarter law for symmetric beta priors (closed form)", [&] {
    bool exact = true;
    for (double a : {0.3, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      for (double m : {0.3, 1.0, 7.0}) {
        const auto s = q_split_closed(BetaPairDistribution::symmetric(a, m));
        exact = exact && s.qPlus == 0.25 && s.qMinus == -0.25;
      }
    }
    return std::pair{exact, "q+ = 1/4 and q- = -1/4 exactly for alpha, mu in {0.3..10}"};
  });
  log.run("quarterlaw", "quadrature matches closed form", [&] {
    CounterEngine rng(opt.seed, 401);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(0.3, 10.0), b = rng.uniform(0.3, 10.0);
      const double m = rng.uniform(0.3, 10.0), n = rng.uniform(0.3, 10.0);
      const double lp = rng.uniform();
      const BetaPairDistribution d(a, b, m, n, lp, 1.0 - lp);
      const auto c = q_split_closed(d);
      const auto q = q_split_numeric(d, 1e-10);
      worst = std::max({worst, std::abs(c.qPlus - q.qPlus), std::abs(c.qMinus - q.qMinus),
                        std::abs(pdf_integral(d, 1e-10) - 1.0)});
    }
    return std::pair{worst < 1e-8, "max deviation = " + sci(worst) + " over 200 random shapes"};
  });
  log.run("quarterlaw", "balanced asymmetric distribution has zero mean", [&] {
    const auto r = solve_balanced(2.0, 1.0, 0.4, 4.0, 5.0);
    const auto bad = solve_balanced(2.0, 1.0, 0.9, 1.0, 1.0);
    const bool ok = r.feasible() && std::abs(r.residual) < 1e-12 && !bad.feasible() && std::abs(bad.residual - 0.55) < 1e-12;
    return std::pair{ok, "residual = " + sci(r.residual) + ", infeasible residual = " + sci(bad.residual)};
  });
}

inline void verify_bec(CheckLog& log, const VerifyOptions& opt) {
  log.run("bec", "critical amplitude for s0 = -0.9, x0 = 0", [&] {
    const double bc = bec::critical_amplitude(-0.9, 0.0);
    return std::pair{std::abs(bc - 0.282) < 5e-4, "b_c = " + sci(bc)};
  });
  log.run("bec", "energy conservation of the noiseless flow", [&] {
    double worst = 0.0;
    for (double b : {0.25, 0.5}) {
      bec::BecParams p;
      p.b = b;
      const auto tr = bec::integrate_deterministic(p);
      const double h0 = bec::energy(tr.s.front(), tr.x.front(), b);
      for (std::size_t i = 0; i < tr.s.size(); ++i) worst = std::max(worst, std::abs(bec::energy(tr.s[i], tr.x[i], b) - h0));
    }
    return std::pair{worst < 1e-6, "max |H(t) - H(0)| = " + sci(worst) + " on [0,100]"};
  });
  log.run("bec", "zero-crossing dichotomy of the population imbalance", [&] {
    bec::BecParams p;
    p.tMax = 200.0;
    p.b = 0.25;
    const auto sub = bec::integrate_deterministic(p);
    p.b = 0.5;
    const auto super = bec::integrate_deterministic(p);
    const double sub_max = *std::max_element(sub.s.begin(), sub.s.end());
    const double super_max = *std::max_element(super.s.begin(), super.s.end());
    return std::pair{sub_max < 0.0 && super_max > 0.0,
                     "max s: b=0.25 -> " + sci(sub_max) + ", b=0.5 -> " + sci(super_max)};
  });
  log.run("bec", "ensemble interference: q2 = -q1 and larger supercritical fluctuations", [&] {
    bec::BecParams p;
    p.seed = opt.seed;
    p.nPaths = opt.paths;
    const bec::EnsembleOptions eo{10, opt.workers};
    p.b = 0.25;
    const auto sub = bec::ensemble_interference(p, eo);
    p.b = 0.5;
    const auto super = bec::ensemble_interference(p, eo);
    double antisym = 0.0;
    for (const auto* r : {&sub, &super})
      for (std::size_t i = 0; i < r->q1.size(); ++i) antisym = std::max(antisym, std::abs(r->q1[i] + r->q2[i]));
    const double v_sub = bec::time_variance(sub.times, sub.q1);
    const double v_super = bec::time_variance(super.times, super.q1);
    return std::pair{antisym < 1e-14 && v_super > v_sub,
                     "max |q1 + q2| = " + sci(antisym) + ", var q1: b=0.25 -> " + sci(v_sub) + ", b=0.5 -> " + sci(v_super)};
  });
}

}  // namespace detail

inline std::vector<CheckOutcome> run_verify(const VerifyOptions& opt, std::ostream& os) {
  for (const auto& s : opt.suites) {
    const auto& names = verify_suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) throw InvalidArgument("verify: unknown suite '" + s + "'");
  }
  auto wanted = [&](const std::string& s) {
    return opt.suites.empty() || std::find(opt.suites.begin(), opt.suites.end(), s) != opt.suites.end();
  };
  std::vector<CheckOutcome> out;
  detail::CheckLog log(os, out);
  if (wanted("events")) detail::verify_events(log, opt);
  if (wanted("uncertain")) detail::verify_uncertain(log, opt);
  if (wanted("prospects")) detail::verify_prospects(log, opt);
  if (wanted("quarterlaw")) detail::verify_quarterlaw(log, opt);
  if (wanted("bec")) detail::verify_bec(log, opt);

  const auto failed = std::count_if(out.begin(), out.end(), [](const CheckOutcome& c) { return !c.pass; });
  os << "summary: " << out.size() - failed << " passed, " << failed << " failed\n";
  const auto first = std::find_if(out.begin(), out.end(), [](const CheckOutcome& c) { return !c.pass; });
  if (first != out.end()) os << "first failure: [" << first->suite << "] " << first->name << '\n';
  return out;
}

}  // namespace qprob
