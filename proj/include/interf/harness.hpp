#pragma once

#include "interf/bounds.hpp"
#include "interf/graphs.hpp"
#include "interf/lifting.hpp"
#include "interf/model.hpp"
#include "interf/numerics.hpp"
#include "interf/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace interf {

/// Error with a short machine-readable code ("invalid-config", "not-connected", "io", ...).
class HarnessError : public std::runtime_error {
 public:
  HarnessError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

enum class GraphKind { Path, PathPlusK, ErdosRenyi };
enum class ProblemKind { Phase, General };
enum class SigmaPolicy { Zero, TwiceL1, TwiceL1OffDiagonal, Explicit };

inline std::string_view to_string(GraphKind g) {
  switch (g) {
    case GraphKind::Path: return "path";
    case GraphKind::PathPlusK: return "path+k";
    case GraphKind::ErdosRenyi: return "er";
  }
  return "unknown";
}

inline std::string_view to_string(ProblemKind p) { return p == ProblemKind::Phase ? "phase" : "general"; }

inline std::string_view to_string(SigmaPolicy s) {
  switch (s) {
    case SigmaPolicy::Zero: return "zero";
    case SigmaPolicy::TwiceL1: return "twice-l1";
    case SigmaPolicy::TwiceL1OffDiagonal: return "twice-l1-offdiag";
    case SigmaPolicy::Explicit: return "explicit";
  }
  return "unknown";
}

inline GraphKind parse_graph_kind(std::string_view s) {
  if (s == "path") return GraphKind::Path;
  if (s == "path+k") return GraphKind::PathPlusK;
  if (s == "er") return GraphKind::ErdosRenyi;
  throw HarnessError("invalid-config", "unknown graph '" + std::string(s) + "'");
}

inline ProblemKind parse_problem_kind(std::string_view s) {
  if (s == "phase") return ProblemKind::Phase;
  if (s == "general") return ProblemKind::General;
  throw HarnessError("invalid-config", "unknown problem '" + std::string(s) + "'");
}

inline SigmaPolicy parse_sigma_policy(std::string_view s) {
  if (s == "zero") return SigmaPolicy::Zero;
  if (s == "twice-l1") return SigmaPolicy::TwiceL1;
  if (s == "twice-l1-offdiag") return SigmaPolicy::TwiceL1OffDiagonal;
  if (s == "explicit") return SigmaPolicy::Explicit;
  throw HarnessError("invalid-config", "unknown sigma policy '" + std::string(s) + "'");
}

/// Everything needed to reproduce a run. Optional fields fall back to method- or problem-specific
/// defaults (see resolved_* accessors).
struct ExperimentConfig {
  int n = 128;
  std::optional<GraphKind> graph;  // phase: path+k, general: er
  int k = 15;
  std::optional<double> p;  // phase: 0.04, general: 1.5 log(m)/m
  Method method = Method::Eigenvector;
  ProblemKind problem = ProblemKind::Phase;
  std::optional<int> m;  // general problem only; default 2n
  double kappa = 1.0;
  std::optional<double> eta;      // absolute noise level
  std::optional<double> eta_rel;  // noise level as a multiple of lambda2
  std::optional<SigmaPolicy> sigma_policy;
  std::optional<double> sigma;  // with the explicit policy
  int trials = 20;
  std::uint64_t seed = 1;
  SolverParams solver;
  int max_attempts = 1000;

  // sweep grids
  std::vector<int> k_list;       // gap sweep; default 1..50
  std::vector<double> p_list;    // gap sweep; default 0.03, 0.04, 0.05
  int eta_points = 11;           // noise sweep
  double eta_rel_min = 1e-6;
  double eta_rel_max = 1e-1;

  // artifacts
  std::string out;
  std::string trace;
  std::string xhat;

  int data_size() const { return problem == ProblemKind::Phase ? n : m.value_or(2 * n); }

  GraphKind resolved_graph() const {
    return graph.value_or(problem == ProblemKind::Phase ? GraphKind::PathPlusK : GraphKind::ErdosRenyi);
  }

  double resolved_p() const {
    if (p) return *p;
    if (problem == ProblemKind::Phase) return 0.04;
    const double size = data_size();
    return std::min(0.99, 1.5 * std::log(size) / size);
  }

  SigmaPolicy resolved_sigma_policy() const { return sigma_policy.value_or(SigmaPolicy::Zero); }

  std::vector<int> resolved_k_list() const {
    if (!k_list.empty()) return k_list;
    std::vector<int> out;
    for (int v = 1; v <= 50; ++v) out.push_back(v);
    return out;
  }

  std::vector<double> resolved_p_list() const {
    if (!p_list.empty()) return p_list;
    return {0.03, 0.04, 0.05};
  }

  /// Throws HarnessError("invalid-config", ...) on the first problem found.
  void validate() const {
    auto fail = [](const std::string& msg) { throw HarnessError("invalid-config", msg); };
    if (n < 1) fail("n must be positive");
    if (trials < 1) fail("trials must be positive");
    if (max_attempts < 1) fail("max-attempts must be positive");
    if (!(kappa >= 1.0)) fail("kappa must be >= 1");
    if (problem == ProblemKind::Phase) {
      if (method != Method::Eigenvector && method != Method::LiftedPhase)
        fail(std::string(to_string(method)) + " needs the general problem");
      if (m && *m != n) fail("m is only meaningful for the general problem");
      if (kappa != 1.0) fail("kappa is only meaningful for the general problem");
    } else {
      if (method == Method::Eigenvector || method == Method::LiftedPhase)
        fail(std::string(to_string(method)) + " needs the phase problem");
      if (data_size() < n) fail("m must be >= n");
      if (n == 1 && kappa != 1.0) fail("a single unknown forces kappa = 1");
    }
    const int size = data_size();
    const auto g = resolved_graph();
    if (size < 2) fail("graphs need at least 2 nodes");
    if (g == GraphKind::PathPlusK) {
      const long long room = static_cast<long long>(size) * (size - 1) / 2 - (size - 1);
      if (k < 0 || k > room) fail("k exceeds the number of non-path pairs");
    }
    if (g == GraphKind::ErdosRenyi) {
      const double pv = resolved_p();
      if (!(pv > 0.0 && pv < 1.0)) fail("p must lie in (0, 1)");
    }
    if (eta && eta_rel) fail("give eta or eta-rel, not both");
    if (eta && !(*eta >= 0.0)) fail("eta must be >= 0");
    if (eta_rel && !(*eta_rel >= 0.0)) fail("eta-rel must be >= 0");
    const auto policy = resolved_sigma_policy();
    if (policy == SigmaPolicy::Explicit && !sigma) fail("sigma-policy explicit needs sigma");
    if (policy != SigmaPolicy::Explicit && sigma) fail("sigma is only used with sigma-policy explicit");
    if (sigma && !(*sigma >= 0.0)) fail("sigma must be >= 0");
    if (policy == SigmaPolicy::TwiceL1OffDiagonal && problem == ProblemKind::Phase)
      fail("twice-l1-offdiag applies to the general problem");
    if (method == Method::Eigenvector && policy != SigmaPolicy::Zero) fail("the eigenvector method takes no sigma");
    for (int v : k_list) {
      const long long room = static_cast<long long>(size) * (size - 1) / 2 - (size - 1);
      if (v < 0 || v > room) fail("k-list entry out of range");
    }
    for (double v : p_list)
      if (!(v > 0.0 && v < 1.0)) fail("p-list entries must lie in (0, 1)");
    if (eta_points < 2) fail("eta-points must be >= 2");
    if (!(eta_rel_min > 0.0) || !(eta_rel_max > eta_rel_min)) fail("need 0 < eta-rel-min < eta-rel-max");
    try {
      solver.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
};

/// One CSV row. eps_l1 counts each unordered pair once; eps_l1_sym and sigma use the symmetric sum
/// that the bounds take.
struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string graph;
  int n = 0;
  int m = 0;
  int k = 0;
  double p = 0.0;
  std::size_t num_edges = 0;
  double eta = 0.0;
  double lambda2 = 0.0;
  double lambda2_tilde = 0.0;
  double eps_l1 = 0.0;
  double eps_l1_sym = 0.0;
  double eps_spectral = 0.0;
  double eps_inf = 0.0;
  double sigma = 0.0;
  double kappa = 1.0;
  std::string method;
  double aligned_error = 0.0;
  double relative_error = 0.0;
  double bound_value = 0.0;
  bool hypothesis_met = false;
  double achieved_misfit = 0.0;
  int iterations = 0;
  bool converged = true;
  double runtime_ms = 0.0;

  /// Error the bound speaks about: relative for the general problem, absolute otherwise.
  double bounded_error() const {
    return method == "lifted-basic" || method == "lifted-twostep" ? relative_error : aligned_error;
  }
};

inline constexpr std::string_view kCsvHeader =
    "trial,seed,graph,n,m,k,p,num_edges,eta,lambda2,lambda2_tilde,eps_l1,eps_l1_sym,eps_spectral,eps_inf,sigma,"
    "kappa,method,aligned_error,relative_error,bound_value,hypothesis_met,achieved_misfit,iterations,converged,"
    "runtime_ms";

inline void write_csv_row(std::ostream& os, const TrialRecord& r) {
  std::ostringstream s;
  s.precision(17);
  s << r.trial << ',' << r.seed << ',' << r.graph << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.p << ','
    << r.num_edges << ',' << r.eta << ',' << r.lambda2 << ',' << r.lambda2_tilde << ',' << r.eps_l1 << ','
    << r.eps_l1_sym << ',' << r.eps_spectral << ',' << r.eps_inf << ',' << r.sigma << ',' << r.kappa << ','
    << r.method << ',' << r.aligned_error << ',' << r.relative_error << ',' << r.bound_value << ','
    << (r.hypothesis_met ? 1 : 0) << ',' << r.achieved_misfit << ',' << r.iterations << ','
    << (r.converged ? 1 : 0) << ',' << r.runtime_ms << '\n';
  os << s.str();
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

/// Bound containment for one row; rows outside the hypothesis pass trivially.
inline bool within_bound(const TrialRecord& r, double slack = 1e-9) {
  return !r.hypothesis_met || r.bounded_error() <= r.bound_value + slack;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
};

/// Least squares on (log10 x, log10 y) after dropping the lowest and highest 10% of x.
/// Pairs with a non-positive coordinate are ignored.
inline SlopeFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys, double trim = 0.1) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog_slope: length mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i]))
      pts.emplace_back(std::log10(xs[i]), std::log10(ys[i]));
  std::sort(pts.begin(), pts.end());
  const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(pts.size())));
  if (pts.size() < 2 * cut + 2) throw std::invalid_argument("fit_loglog_slope: too few usable points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t lo = cut, hi = pts.size() - cut;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  const double cnt = static_cast<double>(hi - lo);
  const double den = cnt * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_loglog_slope: x values are all equal");
  SlopeFit f;
  f.slope = (cnt * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / cnt;
  f.used = hi - lo;
  return f;
}

/// Artifacts of a single trial beyond its CSV row.
struct TrialArtifacts {
  CVector x_hat;
  std::vector<TraceRow> trace;
};

namespace detail {

enum SeedStream : std::uint64_t { kGraphStream = 1, kSignalStream = 2, kNoiseStream = 3, kOperatorStream = 4 };

inline MeasurementGraph build_graph(const ExperimentConfig& c, GraphKind kind, int k, double p, std::uint64_t seed) {
  const int size = c.data_size();
  switch (kind) {
    case GraphKind::Path: return path_graph(size);
    case GraphKind::PathPlusK: return path_plus_random_edges(size, k, seed);
    case GraphKind::ErdosRenyi:
      try {
        return erdos_renyi_connected(size, p, seed, c.max_attempts).graph;
      } catch (const NotConnectedError& e) {
        throw HarnessError("not-connected", e.what());
      }
  }
  throw HarnessError("invalid-config", "unknown graph kind");
}

struct Instance {
  MeasurementGraph graph;
  int k = 0;
  double p = 0.0;
};

inline Instance default_instance(const ExperimentConfig& c, std::uint64_t trial_seed) {
  const auto kind = c.resolved_graph();
  Instance inst;
  inst.k = kind == GraphKind::PathPlusK ? c.k : 0;
  inst.p = kind == GraphKind::ErdosRenyi ? c.resolved_p() : 0.0;
  inst.graph = build_graph(c, kind, inst.k, inst.p, derive_seed(trial_seed, kGraphStream));
  return inst;
}

inline std::string graph_label(const MeasurementGraph& g, const Instance& inst) {
  if (inst.p > 0.0) return "er";
  if (g.edge_count() == static_cast<std::size_t>(g.size() - 1) && inst.k == 0) return "path";
  return "path+k";
}

/// One full pipeline pass on a given graph: operator, data, noise, solve, align, bound.
inline TrialRecord run_on_graph(const ExperimentConfig& c, const Instance& inst, int trial, std::uint64_t trial_seed,
                                const std::optional<CVector>& fixed_signal, std::uint64_t operator_seed,
                                TrialArtifacts* artifacts) {
  const auto start = std::chrono::steady_clock::now();
  const auto& g = inst.graph;
  const bool general = c.problem == ProblemKind::General;

  TrialRecord rec;
  rec.trial = trial;
  rec.seed = trial_seed;
  rec.graph = graph_label(g, inst);
  rec.n = c.n;
  rec.m = c.data_size();
  rec.k = inst.k;
  rec.p = inst.p;
  rec.num_edges = g.edge_count();
  rec.method = std::string(to_string(c.method));

  const CVector x0 = fixed_signal ? *fixed_signal : unit_modulus_signal(c.n, derive_seed(trial_seed, kSignalStream));
  ForwardOperator a = general ? make_operator(c.data_size(), c.n, c.kappa, operator_seed)
                              : ForwardOperator::identity(c.n);
  rec.kappa = a.kappa();
  if (!general) rec.kappa = 1.0;
  const EdgeData clean = general ? synthesize_clean(a, x0, g, true) : synthesize_clean(x0, g);

  if (general)
    rec.lambda2 = spectral_report(data_weighted_laplacian(g, a.apply(x0).cwiseAbs())).lambda2();
  else
    rec.lambda2 = spectral_report(laplacian(g)).lambda2();

  rec.eta = c.eta ? *c.eta : c.eta_rel ? *c.eta_rel * rec.lambda2 : 0.0;
  auto noise = hermitian_gaussian_noise(g, rec.eta, derive_seed(trial_seed, kNoiseStream), general);
  const EdgeData data = clean.plus(noise.data);
  rec.eps_l1 = noise.norms.l1;
  rec.eps_l1_sym = noise.norms.l1_symmetric;
  rec.eps_spectral = noise.norms.spectral;
  rec.eps_inf = noise.norms.linf;
  rec.lambda2_tilde = spectral_report(general ? noisy_data_laplacian(g, data) : noisy_phase_laplacian(g, data)).lambda2();

  SolverParams params = c.solver;
  params.sigma.reset();
  switch (c.resolved_sigma_policy()) {
    case SigmaPolicy::Zero: break;
    case SigmaPolicy::TwiceL1: params.sigma = 2.0 * noise.norms.l1_symmetric; break;
    case SigmaPolicy::TwiceL1OffDiagonal:
      params.sigma = 2.0 * edge_norms(noise.data, g.index_set(false)).l1_symmetric;
      break;
    case SigmaPolicy::Explicit: params.sigma = *c.sigma; break;
  }

  RecoveryOutcome out;
  switch (c.method) {
    case Method::Eigenvector: out = eigenvector_method(g, data); break;
    case Method::LiftedPhase: out = solve_lifted_phase(g, data, params); break;
    case Method::LiftedBasic: out = solve_lifted_basic(g, data, a, params); break;
    case Method::LiftedTwostep: out = solve_lifted_twostep(g, data, a, params); break;
  }
  score_against(out, x0);
  rec.aligned_error = *out.aligned_error;
  rec.relative_error = *out.relative_error;

  if (out.estimate) {
    rec.achieved_misfit = out.estimate->achieved_misfit_symmetric;
    rec.iterations = out.estimate->iterations;
    rec.converged = out.estimate->converged;
    // The returned point is feasible for any sigma at least its own misfit.
    rec.sigma = std::max(params.sigma.value_or(0.0), rec.achieved_misfit);
  }

  BoundReport bound;
  switch (c.method) {
    case Method::Eigenvector: bound = bound_thm2(rec.eps_spectral, std::max(rec.lambda2_tilde, 0.0), c.n); break;
    case Method::LiftedPhase: bound = bound_thm1(rec.eps_l1_sym, rec.sigma, std::max(rec.lambda2, 0.0), c.n); break;
    case Method::LiftedBasic: bound = bound_thm3(rec.eps_l1_sym, rec.sigma, std::max(rec.lambda2, 0.0), rec.kappa); break;
    case Method::LiftedTwostep: bound = bound_thm4(rec.eps_l1_sym, rec.sigma, std::max(rec.lambda2, 0.0), rec.kappa); break;
  }
  rec.bound_value = bound.value;
  rec.hypothesis_met = bound.hypothesis_met;

  if (artifacts) {
    artifacts->x_hat = out.x_hat;
    if (out.estimate) artifacts->trace = out.estimate->trace;
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace detail

inline std::uint64_t trial_seed(const ExperimentConfig& c, int trial) {
  return derive_seed(c.seed, static_cast<std::uint64_t>(trial));
}

/// End-to-end single trial: graph, operator, data, noise, solve, align, bound.
inline TrialRecord run_single(const ExperimentConfig& c, int trial = 0, TrialArtifacts* artifacts = nullptr) {
  c.validate();
  const auto seed = trial_seed(c, trial);
  return detail::run_on_graph(c, detail::default_instance(c, seed), trial, seed, std::nullopt,
                              derive_seed(seed, detail::kOperatorStream), artifacts);
}

/// config.trials independent single trials (used by check-bounds).
inline std::vector<TrialRecord> run_trials(const ExperimentConfig& c) {
  c.validate();
  std::vector<TrialRecord> rows;
  rows.reserve(static_cast<std::size_t>(c.trials));
  for (int t = 0; t < c.trials; ++t) rows.push_back(run_single(c, t));
  return rows;
}

/// Gap-sweep defaults: eigenvector runs use eta = 1e-8, lifted runs use no noise and sigma = 1e-4.
inline ExperimentConfig gap_sweep_defaults(ExperimentConfig c) {
  if (c.method == Method::Eigenvector) {
    if (!c.eta && !c.eta_rel) c.eta = 1e-8;
  } else {
    if (!c.eta && !c.eta_rel) c.eta = 0.0;
    if (!c.sigma_policy) {
      c.sigma_policy = SigmaPolicy::Explicit;
      if (!c.sigma) c.sigma = 1e-4;
    }
  }
  return c;
}

/// Graph family sweep: the path, path plus K edges for each K in k_list, Erdos-Renyi for each p in
/// p_list; config.trials realizations of each. Rows come out in a fixed order.
inline std::vector<TrialRecord> run_gap_sweep(const ExperimentConfig& config) {
  const ExperimentConfig c = gap_sweep_defaults(config);
  c.validate();
  std::vector<detail::Instance> plan;
  std::vector<std::uint64_t> seeds;
  int index = 0;
  auto add = [&](GraphKind kind, int k, double p) {
    for (int t = 0; t < c.trials; ++t, ++index) {
      const auto seed = trial_seed(c, index);
      detail::Instance inst;
      inst.k = k;
      inst.p = p;
      inst.graph = detail::build_graph(c, kind, k, p, derive_seed(seed, detail::kGraphStream));
      plan.push_back(std::move(inst));
      seeds.push_back(seed);
    }
  };
  add(GraphKind::Path, 0, 0.0);
  for (int k : c.resolved_k_list()) add(GraphKind::PathPlusK, k, 0.0);
  for (double p : c.resolved_p_list()) add(GraphKind::ErdosRenyi, 0, p);

  std::vector<TrialRecord> rows;
  rows.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i)
    rows.push_back(detail::run_on_graph(c, plan[i], static_cast<int>(i), seeds[i], std::nullopt,
                                        derive_seed(seeds[i], detail::kOperatorStream), nullptr));
  return rows;
}

/// Noise-sweep defaults: lifted runs pick sigma as twice the l1 noise norm.
inline ExperimentConfig noise_sweep_defaults(ExperimentConfig c) {
  if (c.method != Method::Eigenvector && !c.sigma_policy) c.sigma_policy = SigmaPolicy::TwiceL1;
  return c;
}

/// Fixed graph, signal and operator; eta log-spaced over [eta_rel_min, eta_rel_max] times lambda2, config.trials
/// noise draws per level.
inline std::vector<TrialRecord> run_noise_sweep(const ExperimentConfig& config) {
  ExperimentConfig c = noise_sweep_defaults(config);
  if (c.eta || c.eta_rel) throw HarnessError("invalid-config", "the noise sweep sets eta itself");
  c.validate();
  const auto base = trial_seed(c, 0);
  const auto inst = detail::default_instance(c, base);
  const CVector x0 = unit_modulus_signal(c.n, derive_seed(base, detail::kSignalStream));

  std::vector<TrialRecord> rows;
  int index = 0;
  for (int level = 0; level < c.eta_points; ++level) {
    const double t = static_cast<double>(level) / (c.eta_points - 1);
    const double rel = c.eta_rel_min * std::pow(c.eta_rel_max / c.eta_rel_min, t);
    for (int trial = 0; trial < c.trials; ++trial, ++index) {
      ExperimentConfig at = c;
      at.eta_rel = rel;
      rows.push_back(detail::run_on_graph(at, inst, index, trial_seed(c, index), x0,
                                          derive_seed(base, detail::kOperatorStream), nullptr));
    }
  }
  return rows;
}

inline void save_vector(const std::string& path, const CVector& x) {
  std::ofstream f(path);
  if (!f) throw HarnessError("io", "cannot open '" + path + "' for writing");
  f.precision(17);
  f << x.size() << '\n';
  for (Eigen::Index i = 0; i < x.size(); ++i) f << x(i).real() << ' ' << x(i).imag() << '\n';
}

}  // namespace interf
