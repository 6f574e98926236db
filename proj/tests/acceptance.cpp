// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select criteria by number.
#include "interf/interf.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace interf;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string rows_without_runtime(std::vector<TrialRecord> rows) {
  for (auto& r : rows) r.runtime_ms = 0.0;
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

// 1
Verdict noiseless_exact_recovery() {
  ExperimentConfig c;
  c.n = 128;
  c.k = 15;
  c.method = Method::Eigenvector;
  const auto eig = run_single(c);
  c.method = Method::LiftedPhase;
  const auto t0 = std::chrono::steady_clock::now();
  const auto lifted = run_single(c);
  const double secs = seconds_since(t0);
  const bool ok = eig.aligned_error <= 1e-9 && lifted.aligned_error <= 1e-5 && secs <= 60.0;
  return {ok, fmt("eigenvector error %.3g (<= 1e-9), lifted-phase error %.3g (<= 1e-5) in %.1f s (<= 60 s)",
                  eig.aligned_error, lifted.aligned_error, secs)};
}

// 2
struct ContainmentTally {
  int met = 0;
  int attempted = 0;
  int violations = 0;
  double worst_ratio = 0.0;
};

ContainmentTally containment(const std::function<ExperimentConfig(int)>& make, int wanted, int cap) {
  ContainmentTally t;
  for (int i = 0; i < cap && t.met < wanted; ++i) {
    const auto c = make(i);
    const auto r = run_single(c, i);
    ++t.attempted;
    if (!r.hypothesis_met) continue;
    ++t.met;
    if (!within_bound(r)) ++t.violations;
    if (r.bound_value > 0.0) t.worst_ratio = std::max(t.worst_ratio, r.bounded_error() / r.bound_value);
  }
  return t;
}

Verdict bound_containment() {
  const int wanted = 200, cap = 400;
  const std::vector<double> eta_rel = {1e-6, 1e-5, 1e-4};
  const std::vector<double> kappas = {1.0, 3.0, 10.0};
  const std::vector<int> ks = {5, 15, 40};

  auto phase = [&](Method m) {
    return [&, m](int i) {
      ExperimentConfig c;
      c.n = 48;
      c.k = ks[i % 3];
      c.method = m;
      c.seed = 1000 + static_cast<std::uint64_t>(m);
      c.eta_rel = m == Method::Eigenvector ? 1e-3 * eta_rel[(i / 3) % 3] * 100 : 10.0 * eta_rel[(i / 3) % 3];
      if (m == Method::LiftedPhase) {
        c.sigma_policy = i % 4 == 0 ? SigmaPolicy::Zero : SigmaPolicy::TwiceL1;
        c.solver.tol_primal = c.solver.tol_dual = 1e-5;
        c.solver.max_iter = 2000;
      }
      return c;
    };
  };
  auto general = [&](Method m) {
    return [&, m](int i) {
      ExperimentConfig c;
      c.n = 48;
      c.m = 96;
      c.problem = ProblemKind::General;
      c.method = m;
      c.kappa = kappas[i % 3];
      c.seed = 2000 + static_cast<std::uint64_t>(m);
      c.eta_rel = eta_rel[(i / 3) % 3];
      c.sigma_policy = i % 4 == 0 ? SigmaPolicy::Zero : SigmaPolicy::TwiceL1;
      c.solver.tol_primal = c.solver.tol_dual = 1e-5;
      c.solver.max_iter = 2000;
      return c;
    };
  };

  const std::vector<std::pair<std::string, ContainmentTally>> tallies = {
      {"lifted-phase", containment(phase(Method::LiftedPhase), wanted, cap)},
      {"eigenvector", containment(phase(Method::Eigenvector), wanted, cap)},
      {"lifted-basic", containment(general(Method::LiftedBasic), wanted, cap)},
      {"lifted-twostep", containment(general(Method::LiftedTwostep), wanted, cap)},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, t] : tallies) {
    ok = ok && t.met >= wanted && t.violations == 0;
    detail += fmt("%s %d/%d in hypothesis, %d violations, worst error/bound %.3g; ", name.c_str(), t.met,
                  t.attempted, t.violations, t.worst_ratio);
  }
  return {ok, detail};
}

// 3
Verdict eigenvector_gap_scaling() {
  ExperimentConfig c;
  c.n = 128;
  c.method = Method::Eigenvector;
  c.trials = 20;
  const auto rows = run_gap_sweep(c);
  std::vector<double> gaps, errs;
  for (const auto& r : rows) {
    gaps.push_back(r.lambda2_tilde);
    errs.push_back(r.aligned_error);
  }
  const auto fit = fit_loglog_slope(gaps, errs);
  const bool ok = fit.slope >= -1.3 && fit.slope <= -0.7;
  return {ok, fmt("slope of error vs lambda2_tilde %.3f over %zu rows (want [-1.3, -0.7])", fit.slope, fit.used)};
}

// 4
Verdict feasibility_gap_scaling() {
  ExperimentConfig c;
  c.n = 128;
  c.method = Method::LiftedPhase;
  c.trials = 2;
  c.k_list = {1, 2, 4, 8, 16, 32, 50};
  const auto rows = run_gap_sweep(c);
  std::vector<double> gaps, errs;
  for (const auto& r : rows) {
    gaps.push_back(r.lambda2);
    errs.push_back(r.aligned_error);
  }
  const auto fit = fit_loglog_slope(gaps, errs);
  const bool ok = fit.slope >= -0.8 && fit.slope <= -0.2;
  const auto [lo, hi] = std::minmax_element(errs.begin(), errs.end());
  return {ok, fmt("slope of error vs lambda2 %.3f over %zu rows (want [-0.8, -0.2]); errors span %.3g to %.3g",
                  fit.slope, fit.used, *lo, *hi)};
}

// 5
Verdict eigenvector_noise_scaling() {
  ExperimentConfig c;
  c.n = 128;
  c.k = 15;
  c.method = Method::Eigenvector;
  c.trials = 20;
  const auto rows = run_noise_sweep(c);
  std::vector<double> eps, errs;
  for (const auto& r : rows) {
    eps.push_back(r.eps_spectral);
    errs.push_back(r.aligned_error);
  }
  const auto fit = fit_loglog_slope(eps, errs);
  const bool ok = fit.slope >= 0.8 && fit.slope <= 1.2;
  return {ok, fmt("slope of error vs noise norm %.3f over %zu rows (want [0.8, 1.2])", fit.slope, fit.used)};
}

// 6
Verdict perturbation_oracles() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  int one_fail = 0, one_applicable = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 15;
    std::vector<double> lambdas(n, 0.0), c(n);
    for (int k = 1; k < n; ++k) lambdas[k] = 1e-3 + 10.0 * u(rng);
    std::sort(lambdas.begin() + 1, lambdas.end());
    c[0] = 30.0 * u(rng);
    for (int k = 1; k < n; ++k) c[k] = u(rng);
    double total = 0.0;
    for (double w : c) total += w;
    for (double& w : c) w /= total;
    total = 0.0;
    for (int k = 1; k < n; ++k) total += c[k];
    c[0] = 1.0 - total;
    const auto r = lemma_one_oracle(c, lambdas);
    one_applicable += r.applicable;
    one_fail += !r.holds;
  }
  int two_fail = 0, two_outside = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + t % 20;
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    CMatrix h = 0.5 * (m + m.adjoint());
    h /= hermitian_norm(h);
    const double delta = (t % 4 == 0 ? 0.49 : 0.49 * u(rng)) * v.squaredNorm();
    const CMatrix x = v * v.adjoint() + delta * h;
    for (auto mode : {LemmaTwoMode::ScaleByNormV, LemmaTwoMode::ScaleBySqrtEta}) {
      const auto r = lemma_two_oracle(x, v, mode);
      two_outside += !r.hypothesis_met;
      two_fail += !r.holds;
    }
  }
  const bool ok = one_fail == 0 && two_fail == 0 && two_outside == 0;
  return {ok, fmt("first oracle: %d failures in 1000 draws (%d with mu <= lambda2); second oracle: %d failures in "
                  "1000 evaluations",
                  one_fail, one_applicable, two_fail)};
}

// 7
Verdict structural_invariants() {
  int fails = 0;
  std::string first;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond && fails++ == 0) first = what;
  };
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = erdos_renyi_connected(40, 0.15, s).graph;
    const auto a = make_operator(40, 20, 1.0 + static_cast<double>(s % 10), s + 1);
    const CVector b = a.apply(unit_modulus_signal(20, s + 2));
    const RVector mag = b.cwiseAbs();
    const CMatrix lw = data_weighted_laplacian(g, mag);
    const CMatrix lp = phased_laplacian(g, b);
    check((lw * mag.cast<cplx>()).norm() <= 1e-10 * hermitian_norm(lw) * mag.norm(), "weighted null vector");
    check((lp * b).norm() <= 1e-10 * hermitian_norm(lp) * b.norm(), "phased null vector");
    const RVector ew = spectral_report(lw).eigenvalues, ep = spectral_report(lp).eigenvalues;
    check((ew - ep).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, ew.cwiseAbs().maxCoeff()), "phase invariance");
    const auto plain = spectral_report(laplacian(g));
    check(plain.lambda_max() <= 2.0 * g.max_degree() + 1e-10, "gershgorin");
  }
  std::mt19937_64 rng(77);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto g = path_plus_random_edges(30, static_cast<int>(s % 20), s);
    std::uniform_int_distribution<int> node(0, 29);
    int i = node(rng), j = node(rng);
    while (i == j || g.has_edge(i, j)) {
      i = node(rng);
      j = node(rng);
    }
    const double before = spectral_report(laplacian(g)).lambda2();
    const double after = spectral_report(laplacian(g.with_edge(Edge(i, j)))).lambda2();
    check(after >= before - 1e-10, "edge monotonicity");
  }
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = erdos_renyi_connected(32, 0.2, s + 500).graph;
    const auto a = make_operator(32, 16, 3.0, s + 501);
    const auto x0 = unit_modulus_signal(16, s + 502);
    const auto noise = hermitian_gaussian_noise(g, 1e-3 * static_cast<double>(1 + s % 10), s + 503, true);
    const auto noisy = synthesize_clean(a, x0, g, true).plus(noise.data);
    const double l2t = spectral_report(noisy_data_laplacian(g, noisy)).lambda2();
    const double l2 = spectral_report(data_weighted_laplacian(g, a.apply(x0).cwiseAbs())).lambda2();
    const auto lb = lambda2_lower_bound_from_noisy(l2t, noise.norms.linf, noise.norms.spectral, g.max_degree());
    check(l2 >= lb.value - 1e-9, "gap lower bound");
  }
  return {fails == 0, fails == 0 ? std::string("all 600 checks hold")
                                 : fmt("%d failures, first: %s", fails, first.c_str())};
}

// 8
Verdict polarization_round_trip() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const cplx fi(g(rng), g(rng)), fj(g(rng), g(rng));
    worst = std::max(worst, std::abs(polarize(phaseless_intensities(fi, fj)) - fi * std::conj(fj)));
  }
  return {worst <= 1e-12, fmt("worst error %.3g over 100 pairs (<= 1e-12)", worst)};
}

// 9
Verdict kappa_separation() {
  const std::vector<double> kappas = {1.0, 3.0, 10.0, 30.0};
  const int seeds = 5;
  auto exponent = [&](Method m) {
    std::vector<double> xs, ys;
    for (double kappa : kappas) {
      std::vector<double> errs;
      for (int s = 0; s < seeds; ++s) {
        ExperimentConfig c;
        c.n = 32;
        c.m = 64;
        c.problem = ProblemKind::General;
        c.method = m;
        c.kappa = kappa;
        c.seed = 900 + static_cast<std::uint64_t>(s);
        c.eta = 1e-5;  // harness default sigma policy: misfit minimization
        errs.push_back(run_single(c).relative_error);
      }
      xs.push_back(kappa);
      ys.push_back(median(errs));
    }
    return std::make_pair(fit_loglog_slope(xs, ys, 0.0).slope, ys);
  };
  const auto [basic, basic_errs] = exponent(Method::LiftedBasic);
  const auto [twostep, twostep_errs] = exponent(Method::LiftedTwostep);
  const bool ok = twostep <= basic && basic <= 2.3;
  return {ok, fmt("growth exponent in kappa: lifted-twostep %.3f, lifted-basic %.3f (want twostep <= basic <= 2.3); "
                  "median errors basic %.3g..%.3g, twostep %.3g..%.3g",
                  twostep, basic, basic_errs.front(), basic_errs.back(), twostep_errs.front(), twostep_errs.back())};
}

// 10
Verdict determinism() {
  std::vector<std::string> mismatched;
  auto same = [&](const std::string& what, const std::function<std::vector<TrialRecord>()>& run) {
    if (rows_without_runtime(run()) != rows_without_runtime(run())) mismatched.push_back(what);
  };
  ExperimentConfig single;
  single.n = 32;
  single.method = Method::LiftedPhase;
  single.eta = 1e-3;
  single.sigma_policy = SigmaPolicy::TwiceL1;
  same("single", [&] { return std::vector<TrialRecord>{run_single(single, 3)}; });

  ExperimentConfig gap;
  gap.n = 32;
  gap.trials = 2;
  gap.k_list = {1, 5, 10};
  gap.p_list = {0.3};
  same("sweep-gap", [&] { return run_gap_sweep(gap); });

  ExperimentConfig noise;
  noise.n = 32;
  noise.trials = 2;
  noise.eta_points = 4;
  same("sweep-noise", [&] { return run_noise_sweep(noise); });

  ExperimentConfig bounds;
  bounds.n = 8;
  bounds.problem = ProblemKind::General;
  bounds.method = Method::LiftedTwostep;
  bounds.kappa = 3.0;
  bounds.eta = 1e-5;
  bounds.sigma_policy = SigmaPolicy::TwiceL1;
  bounds.trials = 3;
  same("check-bounds", [&] { return run_trials(bounds); });

  auto graph_text = [] {
    std::ostringstream os;
    erdos_renyi_connected(40, 0.1, 12).graph.write(os);
    path_plus_random_edges(40, 9, 12).write(os);
    return os.str();
  };
  if (graph_text() != graph_text()) mismatched.push_back("gen-graph");

  std::string list;
  for (const auto& m : mismatched) list += " " + m;
  return {mismatched.empty(), mismatched.empty() ? std::string("gen-graph, single, sweep-gap, sweep-noise, "
                                                               "check-bounds all repeat identically")
                                                 : "differences in:" + list};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"noiseless exact recovery", noiseless_exact_recovery},
      {"bound containment", bound_containment},
      {"eigenvector gap scaling", eigenvector_gap_scaling},
      {"feasibility gap scaling", feasibility_gap_scaling},
      {"eigenvector noise scaling", eigenvector_noise_scaling},
      {"perturbation oracles", perturbation_oracles},
      {"structural invariants", structural_invariants},
      {"polarization round trip", polarization_round_trip},
      {"kappa separation", kappa_separation},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
