#include "interf/interf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace interf;

/// Raw option values; strings are parsed into the enums after CLI11 is done.
struct Options {
  ExperimentConfig config;
  std::string graph, method = "eigenvector", problem = "phase", sigma_policy;
  std::optional<int> m;
  std::optional<double> p, eta, eta_rel, sigma;
  double tol = 1e-7;
  int trial = 0;
};

ExperimentConfig resolve(Options& o) {
  ExperimentConfig c = o.config;
  if (!o.graph.empty()) c.graph = parse_graph_kind(o.graph);
  try {
    c.method = parse_method(o.method);
  } catch (const std::invalid_argument& e) {
    throw HarnessError("invalid-config", e.what());
  }
  c.problem = parse_problem_kind(o.problem);
  if (!o.sigma_policy.empty()) c.sigma_policy = parse_sigma_policy(o.sigma_policy);
  c.m = o.m;
  c.p = o.p;
  c.eta = o.eta;
  c.eta_rel = o.eta_rel;
  c.sigma = o.sigma;
  c.solver.tol_primal = o.tol;
  c.solver.tol_dual = o.tol;
  return c;
}

/// Output stream for --out, or stdout.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw HarnessError("io", "cannot open '" + path + "' for writing");
    os = &file;
  }
};

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int fail(const std::string& code, const std::string& message, int status) {
  std::cerr << "error: code=" << code << " message=" << one_line(message) << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interferometric recovery experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with the same keys as the flags");

  Options o;
  auto& c = o.config;
  app.add_option("--n", c.n, "signal length")->capture_default_str();
  app.add_option("--graph", o.graph, "path | path+k | er");
  app.add_option("--k", c.k, "extra edges for path+k")->capture_default_str();
  app.add_option("--p", o.p, "edge probability for er");
  app.add_option("--method", o.method, "eigenvector | lifted-phase | lifted-basic | lifted-twostep")->capture_default_str();
  app.add_option("--problem", o.problem, "phase | general")->capture_default_str();
  app.add_option("--m", o.m, "data length for the general problem (default 2n)");
  app.add_option("--kappa", c.kappa, "condition number of the operator")->capture_default_str();
  app.add_option("--eta", o.eta, "noise level");
  app.add_option("--eta-rel", o.eta_rel, "noise level relative to lambda2");
  app.add_option("--sigma-policy", o.sigma_policy, "zero | twice-l1 | twice-l1-offdiag | explicit");
  app.add_option("--sigma", o.sigma, "misfit target for the explicit policy");
  app.add_option("--trials", c.trials, "trials per setting")->capture_default_str();
  app.add_option("--trial", o.trial, "trial index for single")->capture_default_str();
  app.add_option("--seed", c.seed, "base seed")->capture_default_str();
  app.add_option("--rho", c.solver.rho, "ADMM penalty")->capture_default_str();
  app.add_option("--max-iter", c.solver.max_iter, "ADMM iteration cap")->capture_default_str();
  app.add_option("--tol", o.tol, "ADMM relative residual tolerance")->capture_default_str();
  app.add_option("--max-attempts", c.max_attempts, "Erdos-Renyi resampling cap")->capture_default_str();
  app.add_option("--k-list", c.k_list, "gap sweep K values")->delimiter(',');
  app.add_option("--p-list", c.p_list, "gap sweep p values")->delimiter(',');
  app.add_option("--eta-points", c.eta_points, "noise sweep grid size")->capture_default_str();
  app.add_option("--eta-rel-min", c.eta_rel_min, "noise sweep lower end, times lambda2")->capture_default_str();
  app.add_option("--eta-rel-max", c.eta_rel_max, "noise sweep upper end, times lambda2")->capture_default_str();
  app.add_option("--out", c.out, "output path (default stdout)");
  app.add_option("--trace", c.trace, "solver trace CSV path (single)");
  app.add_option("--xhat", c.xhat, "recovered vector path (single)");

  auto* gen = app.add_subcommand("gen-graph", "write the configured graph as an edge list");
  auto* single = app.add_subcommand("single", "one end-to-end recovery, one CSV row");
  auto* gap = app.add_subcommand("sweep-gap", "error against spectral gap over path, path+K and ER graphs");
  auto* noise = app.add_subcommand("sweep-noise", "error against noise level on a fixed graph");
  auto* check = app.add_subcommand("check-bounds", "randomized trials; fails when a proved bound is violated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    ExperimentConfig config = resolve(o);
    Sink sink(config.out);
    if (gen->parsed()) {
      config.validate();
      const auto inst = detail::default_instance(config, trial_seed(config, o.trial));
      inst.graph.write(*sink.os);
    } else if (single->parsed()) {
      TrialArtifacts art;
      auto rec = run_single(config, o.trial, &art);
      write_csv(*sink.os, {rec});
      if (!config.trace.empty()) {
        std::ofstream t(config.trace);
        if (!t) throw HarnessError("io", "cannot open '" + config.trace + "' for writing");
        write_trace_csv(t, art.trace);
      }
      if (!config.xhat.empty()) save_vector(config.xhat, art.x_hat);
    } else if (gap->parsed()) {
      write_csv(*sink.os, run_gap_sweep(config));
    } else if (noise->parsed()) {
      write_csv(*sink.os, run_noise_sweep(config));
    } else if (check->parsed()) {
      auto rows = run_trials(config);
      write_csv(*sink.os, rows);
      int bad = 0;
      for (const auto& r : rows) bad += within_bound(r) ? 0 : 1;
      if (bad > 0) return fail("bound-violation", std::to_string(bad) + " rows exceed their bound", 3);
    }
    sink.os->flush();
  } catch (const HarnessError& e) {
    return fail(e.code(), e.what(), 1);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
