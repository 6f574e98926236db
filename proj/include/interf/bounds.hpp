#pragma once

#include "interf/numerics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace interf {

/// A stability bound evaluated at given inputs. margin > 0 means strictly inside the hypothesis,
/// margin == 0 on its boundary (still met), margin < 0 outside.
struct BoundReport {
  double value = 0.0;
  bool hypothesis_met = false;
  double hypothesis_margin = 0.0;
  bool zero_gap = false;
  bool relative = false;  // bound applies to ||x - e^{ia} x0|| / ||x0||
  // echoed inputs
  double eps = 0.0;  // l1 or spectral, depending on the bound
  double sigma = 0.0;
  double gap = 0.0;
  double kappa = 1.0;
  int n = 0;
};

namespace detail {

inline void require_nonnegative(double v, const char* who, const char* name) {
  if (!(v >= 0.0)) throw std::invalid_argument(std::string(who) + ": " + name + " must be nonnegative");
}

/// value = scale * sqrt(load / gap); hypothesis load <= limit.
inline BoundReport sqrt_bound(double scale, double load, double gap, double limit) {
  BoundReport r;
  r.zero_gap = gap == 0.0;
  if (r.zero_gap)
    r.value = load == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  else
    r.value = scale * std::sqrt(load / gap);
  r.hypothesis_margin = limit - load;
  r.hypothesis_met = r.zero_gap ? load == 0.0 : r.hypothesis_margin >= 0.0;
  return r;
}

}  // namespace detail

/// Lifted phase problem: 4 sqrt((eps1 + sigma) / lambda2) under eps1 + sigma <= n lambda2.
/// eps_l1 and sigma use the symmetric l1 sum.
inline BoundReport bound_thm1(double eps_l1, double sigma, double lambda2, int n) {
  detail::require_nonnegative(eps_l1, "bound_thm1", "eps_l1");
  detail::require_nonnegative(sigma, "bound_thm1", "sigma");
  detail::require_nonnegative(lambda2, "bound_thm1", "lambda2");
  if (n < 1) throw std::invalid_argument("bound_thm1: n must be positive");
  auto r = detail::sqrt_bound(4.0, eps_l1 + sigma, lambda2, n * lambda2);
  r.eps = eps_l1;
  r.sigma = sigma;
  r.gap = lambda2;
  r.n = n;
  return r;
}

/// Signal-level noise: 4 sqrt(sigma / lambda2) + ||e|| under sigma <= n lambda2.
inline BoundReport bound_cor1(double sigma, double lambda2, double e_norm, int n) {
  detail::require_nonnegative(sigma, "bound_cor1", "sigma");
  detail::require_nonnegative(lambda2, "bound_cor1", "lambda2");
  detail::require_nonnegative(e_norm, "bound_cor1", "e_norm");
  if (n < 1) throw std::invalid_argument("bound_cor1: n must be positive");
  auto r = detail::sqrt_bound(4.0, sigma, lambda2, n * lambda2);
  r.value += e_norm;
  r.eps = e_norm;
  r.sigma = sigma;
  r.gap = lambda2;
  r.n = n;
  return r;
}

/// Eigenvector method: sqrt(2n) ||eps|| / lambda2_tilde under ||eps|| <= lambda2_tilde / 2.
inline BoundReport bound_thm2(double eps_spectral, double lambda2_tilde, int n) {
  detail::require_nonnegative(eps_spectral, "bound_thm2", "eps_spectral");
  if (!(lambda2_tilde >= 0.0)) throw std::invalid_argument("bound_thm2: lambda2_tilde must be nonnegative");
  if (n < 1) throw std::invalid_argument("bound_thm2: n must be positive");
  BoundReport r;
  r.zero_gap = lambda2_tilde == 0.0;
  if (r.zero_gap)
    r.value = eps_spectral == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  else
    r.value = std::sqrt(2.0 * n) * eps_spectral / lambda2_tilde;
  r.hypothesis_margin = lambda2_tilde / 2.0 - eps_spectral;
  r.hypothesis_met = !r.zero_gap && r.hypothesis_margin >= 0.0;
  r.eps = eps_spectral;
  r.gap = lambda2_tilde;
  r.n = n;
  return r;
}

namespace detail {

inline BoundReport general_bound(double power, double eps_l1, double sigma, double lambda2, double kappa,
                                 const char* who) {
  require_nonnegative(eps_l1, who, "eps_l1");
  require_nonnegative(sigma, who, "sigma");
  require_nonnegative(lambda2, who, "lambda2");
  if (!(kappa >= 1.0)) throw std::invalid_argument(std::string(who) + ": kappa must be >= 1");
  auto r = sqrt_bound(15.0 * std::pow(kappa, power), eps_l1 + sigma, lambda2, lambda2 / 2.0);
  r.relative = true;
  r.eps = eps_l1;
  r.sigma = sigma;
  r.gap = lambda2;
  r.kappa = kappa;
  return r;
}

}  // namespace detail

/// Basic lift: 15 kappa^2 sqrt((eps1 + sigma) / lambda2) on the relative error, under eps1 + sigma <= lambda2 / 2.
inline BoundReport bound_thm3(double eps_l1, double sigma, double lambda2_weighted, double kappa) {
  return detail::general_bound(2.0, eps_l1, sigma, lambda2_weighted, kappa, "bound_thm3");
}

/// Two-step lift: as bound_thm3 with kappa to the first power.
inline BoundReport bound_thm4(double eps_l1, double sigma, double lambda2_weighted, double kappa) {
  return detail::general_bound(1.0, eps_l1, sigma, lambda2_weighted, kappa, "bound_thm4");
}

struct GapLowerBound {
  double value = 0.0;
  bool clamped = false;
};

/// lambda2 of L_|b| from the noisy data Laplacian: lambda2_tilde - ((d+1)||eps||_inf + ||eps||), floored at 0.
inline GapLowerBound lambda2_lower_bound_from_noisy(double lambda2_tilde, double eps_inf, double eps_spectral,
                                                    int max_degree) {
  detail::require_nonnegative(eps_inf, "lambda2_lower_bound_from_noisy", "eps_inf");
  detail::require_nonnegative(eps_spectral, "lambda2_lower_bound_from_noisy", "eps_spectral");
  if (max_degree < 0) throw std::invalid_argument("lambda2_lower_bound_from_noisy: negative degree");
  const double raw = lambda2_tilde - ((max_degree + 1) * eps_inf + eps_spectral);
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

struct LemmaOneResult {
  double mu = 0.0;
  double c1_lower_bound = 0.0;
  bool applicable = false;  // mu <= lambda2
  bool holds = true;
};

/// For simplex weights c and an ascending spectrum with lambda1 = 0: mu = sum c_j lambda_j and,
/// when mu <= lambda2, c1 >= 1 - mu / lambda2.
inline LemmaOneResult lemma_one_oracle(const std::vector<double>& c, const std::vector<double>& lambdas,
                                       double slack = 1e-12) {
  if (c.size() != lambdas.size() || c.size() < 2) throw std::invalid_argument("lemma_one_oracle: need matching lengths >= 2");
  for (double w : c)
    if (!(w >= 0.0)) throw std::invalid_argument("lemma_one_oracle: weights must be nonnegative");
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("lemma_one_oracle: weights must sum to 1");
  if (lambdas[0] != 0.0) throw std::invalid_argument("lemma_one_oracle: lambda1 must be 0");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (lambdas[k] < lambdas[k - 1]) throw std::invalid_argument("lemma_one_oracle: spectrum must be ascending");
  if (!(lambdas[1] > 0.0)) throw std::invalid_argument("lemma_one_oracle: lambda2 must be positive");

  LemmaOneResult r;
  for (std::size_t k = 0; k < c.size(); ++k) r.mu += c[k] * lambdas[k];
  r.c1_lower_bound = 1.0 - r.mu / lambdas[1];
  r.applicable = r.mu <= lambdas[1];
  r.holds = !r.applicable || c[0] >= r.c1_lower_bound - slack;
  return r;
}

enum class LemmaTwoMode { ScaleByNormV, ScaleBySqrtEta };

struct LemmaTwoResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool hypothesis_met = false;  // ||X - vv*|| < ||v||^2 / 2
  bool holds = true;
};

/// Eigenvector perturbation: with x1 the top unit eigenvector of X and x = x1 ||v|| or x1 sqrt(eta1),
/// min_a || x ||x|| - e^{ia} v ||v|| || <= 2 sqrt(2) ||X - vv*|| whenever ||X - vv*|| < ||v||^2 / 2.
inline LemmaTwoResult lemma_two_oracle(const CMatrix& x_mat, const CVector& v, LemmaTwoMode mode,
                                       double slack = 1e-9) {
  require_hermitian(x_mat, "lemma_two_oracle", 1e-10);
  if (x_mat.rows() != v.size()) throw std::invalid_argument("lemma_two_oracle: dimension mismatch");
  const double nv = v.norm();
  if (!(nv > 0.0)) throw std::invalid_argument("lemma_two_oracle: v must be nonzero");
  const CMatrix h = 0.5 * (x_mat + x_mat.adjoint());
  const auto top = top_eigenpair(h);
  const CVector x = mode == LemmaTwoMode::ScaleByNormV ? CVector(top.vector * nv)
                                                       : CVector(top.vector * std::sqrt(std::max(top.value, 0.0)));
  const double delta = hermitian_norm(h - v * v.adjoint());
  LemmaTwoResult r;
  r.lhs = phase_aligned_distance(x * x.norm(), v * nv).distance;
  r.rhs = 2.0 * std::sqrt(2.0) * delta;
  r.hypothesis_met = delta < nv * nv / 2.0;
  r.holds = !r.hypothesis_met || r.lhs <= r.rhs + slack;
  return r;
}

}  // namespace interf
