#pragma once

#include "interf/edge_data.hpp"
#include "interf/graphs.hpp"
#include "interf/model.hpp"
#include "interf/numerics.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace interf {

enum class Method { Eigenvector, LiftedPhase, LiftedBasic, LiftedTwostep };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Eigenvector: return "eigenvector";
    case Method::LiftedPhase: return "lifted-phase";
    case Method::LiftedBasic: return "lifted-basic";
    case Method::LiftedTwostep: return "lifted-twostep";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  if (s == "eigenvector") return Method::Eigenvector;
  if (s == "lifted-phase") return Method::LiftedPhase;
  if (s == "lifted-basic") return Method::LiftedBasic;
  if (s == "lifted-twostep") return Method::LiftedTwostep;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

/// ADMM settings. sigma, when set, is a target on the symmetric l1 misfit (each off-diagonal
/// pair counted twice) and turns on early stopping at the first certified point that meets it.
struct SolverParams {
  double rho = 1.0;
  int max_iter = 5000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  std::optional<double> sigma;
  bool adaptive_rho = true;

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("SolverParams: rho must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverParams: max_iter must be positive");
    if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw std::invalid_argument("SolverParams: tolerances must be positive");
    if (sigma && !(*sigma >= 0.0)) throw std::invalid_argument("SolverParams: sigma must be nonnegative");
  }
};

struct TraceRow {
  int iter = 0;
  double misfit = 0.0;  // symmetric l1 misfit of the Z iterate
  double primal_res = 0.0;
  double dual_res = 0.0;
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "iter,misfit,primal_res,dual_res\n";
  auto old = os.precision(17);
  for (const auto& r : rows) os << r.iter << ',' << r.misfit << ',' << r.primal_res << ',' << r.dual_res << '\n';
  os.precision(old);
}

struct LiftedEstimate {
  CMatrix matrix;  // PSD; satisfies the structure exactly
  EigenPair top;
  double achieved_misfit = 0.0;            // unordered-pair l1 of matrix - targets on the fit set
  double achieved_misfit_symmetric = 0.0;  // same, off-diagonal pairs counted twice
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::vector<TraceRow> trace;
};

/// Constraint set of the lifted variable besides X >= 0.
class LiftStructure {
 public:
  enum class Kind { UnitDiagonal, FreeDiagonal, Range };

  static LiftStructure unit_diagonal() { return LiftStructure(Kind::UnitDiagonal, {}); }
  static LiftStructure free_diagonal() { return LiftStructure(Kind::FreeDiagonal, {}); }

  /// X restricted to {Q W Q*} for a basis with orthonormal columns.
  static LiftStructure range_basis(CMatrix basis) {
    const CMatrix gram = basis.adjoint() * basis;
    if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() > 1e-10)
      throw std::invalid_argument("LiftStructure: basis columns are not orthonormal");
    return LiftStructure(Kind::Range, std::move(basis));
  }

  /// X restricted to {P X P} for an orthogonal projector P.
  static LiftStructure range_projector(const CMatrix& p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("LiftStructure: projector must be square");
    const double scale = std::max(1.0, p.norm());
    if ((p * p - p).norm() > 1e-10 * scale || hermitian_defect(p) > 1e-10 * scale)
      throw std::invalid_argument("LiftStructure: not an orthogonal projector");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (p + p.adjoint()));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()(k) > 0.5) keep.push_back(k);
    CMatrix basis(p.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    return LiftStructure(Kind::Range, std::move(basis));
  }

  Kind kind() const { return kind_; }
  const CMatrix& basis() const { return basis_; }

 private:
  LiftStructure(Kind k, CMatrix b) : kind_(k), basis_(std::move(b)) {}
  Kind kind_;
  CMatrix basis_;
};

/// Residual balancing only looks at every this-many iterations; per-iteration updates oscillate.
inline constexpr int kRhoUpdateInterval = 50;

namespace detail {

struct FitEntry {
  int i, j;
  cplx target;
};

inline std::vector<FitEntry> fit_entries(const EdgeData& fit) {
  std::vector<FitEntry> out;
  out.reserve(fit.size());
  for (const auto& [e, v] : fit.entries()) out.push_back({e.i, e.j, v});
  return out;
}

struct Misfit {
  double unordered = 0.0;
  double symmetric = 0.0;
};

inline Misfit misfit_of(const CMatrix& x, const std::vector<FitEntry>& fit) {
  Misfit m;
  for (const auto& f : fit) {
    const double a = std::abs(x(f.i, f.j) - f.target);
    m.unordered += a;
    m.symmetric += f.i == f.j ? a : 2.0 * a;
  }
  return m;
}

/// D^{-1/2} X D^{-1/2}; a row with vanishing diagonal is replaced by the unit vector.
inline CMatrix normalize_unit_diagonal(const CMatrix& x) {
  const Eigen::Index n = x.rows();
  RVector scale(n);
  std::vector<Eigen::Index> dead;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x(i, i).real();
    if (d > 1e-300) {
      scale(i) = 1.0 / std::sqrt(d);
    } else {
      scale(i) = 0.0;
      dead.push_back(i);
    }
  }
  CMatrix out = scale.asDiagonal() * x * scale.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = 1.0;
  for (auto i : dead) {
    out.row(i).setZero();
    out.col(i).setZero();
    out(i, i) = 1.0;
  }
  return out;
}

inline CMatrix project_cone(const CMatrix& h, const LiftStructure& s) {
  if (s.kind() == LiftStructure::Kind::Range) return psd_project_in_range(h, s.basis());
  return psd_project(h);
}

/// A point satisfying every constraint exactly, derived from the cone iterate.
inline CMatrix certify(const CMatrix& x, const LiftStructure& s) {
  CMatrix out = 0.5 * (x + x.adjoint());
  if (s.kind() == LiftStructure::Kind::UnitDiagonal) out = normalize_unit_diagonal(out);
  return out;
}

}  // namespace detail

/// Scaled-form ADMM for  min sum_{fit} |X_ij - T_ij|  s.t. X >= 0 and the structure.
///
/// X-step projects onto the PSD cone (inside the range when required); Z-step resets the unit
/// diagonal and soft-thresholds fit entries toward their targets with threshold 1/rho; the
/// remaining entries of Z pass through. The returned matrix is the certified point built from
/// the last cone iterate.
inline LiftedEstimate admm_l1_psd(int dim, const EdgeData& fit, const LiftStructure& structure,
                                  const SolverParams& params) {
  params.validate();
  if (dim < 1 || fit.dimension() != dim) throw std::invalid_argument("admm_l1_psd: dimension mismatch");
  const bool unit_diag = structure.kind() == LiftStructure::Kind::UnitDiagonal;
  if (structure.kind() == LiftStructure::Kind::Range && structure.basis().rows() != dim)
    throw std::invalid_argument("admm_l1_psd: range basis has the wrong row count");
  const auto entries = detail::fit_entries(fit);
  if (unit_diag)
    for (const auto& f : entries)
      if (f.i == f.j) throw std::invalid_argument("admm_l1_psd: unit-diagonal structure fixes the diagonal");

  CMatrix z = CMatrix::Zero(dim, dim);
  if (unit_diag) z.setIdentity();
  for (const auto& f : entries) {
    z(f.i, f.j) = f.target;
    z(f.j, f.i) = std::conj(f.target);
  }
  CMatrix u = CMatrix::Zero(dim, dim);
  CMatrix x;
  double rho = params.rho;

  LiftedEstimate est;
  est.trace.reserve(static_cast<std::size_t>(std::min(params.max_iter, 100000)));
  std::optional<CMatrix> early;
  int it = 0;
  for (it = 1; it <= params.max_iter; ++it) {
    x = detail::project_cone(z - u, structure);

    if (params.sigma) {
      CMatrix cert = detail::certify(x, structure);
      if (detail::misfit_of(cert, entries).symmetric <= *params.sigma) {
        early = std::move(cert);
        break;
      }
    }

    const CMatrix v = x + u;
    CMatrix z_next = v;
    if (unit_diag)
      for (int i = 0; i < dim; ++i) z_next(i, i) = 1.0;
    const double tau = 1.0 / rho;
    for (const auto& f : entries) {
      const cplx w = f.target + complex_soft_threshold(v(f.i, f.j) - f.target, tau);
      if (f.i == f.j) {
        z_next(f.i, f.i) = w.real();
      } else {
        z_next(f.i, f.j) = w;
        z_next(f.j, f.i) = std::conj(w);
      }
    }

    const double r = (x - z_next).norm();
    const double s = rho * (z_next - z).norm();
    u += x - z_next;
    z = std::move(z_next);
    est.primal_residual = r;
    est.dual_residual = s;
    est.trace.push_back({it, detail::misfit_of(z, entries).symmetric, r, s});

    const double scale = std::max({x.norm(), z.norm(), 1.0});
    if (r <= params.tol_primal * scale && s <= params.tol_dual * std::max(rho * u.norm(), scale)) {
      est.converged = true;
      break;
    }
    if (params.adaptive_rho && it % kRhoUpdateInterval == 0) {
      if (r > 10.0 * s) {
        rho *= 2.0;
        u /= 2.0;
      } else if (s > 10.0 * r) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }

  if (early) {
    est.matrix = std::move(*early);
    est.converged = true;
  } else {
    est.matrix = detail::certify(x, structure);
  }
  est.iterations = std::min(it, params.max_iter);
  const auto m = detail::misfit_of(est.matrix, entries);
  est.achieved_misfit = m.unordered;
  est.achieved_misfit_symmetric = m.symmetric;
  est.top = top_eigenpair(est.matrix);
  return est;
}

struct RecoveryOutcome {
  CVector x_hat;
  Method method = Method::Eigenvector;
  std::optional<LiftedEstimate> estimate;
  double gap = 0.0;  // lambda2-tilde of the noisy Laplacian (eigenvector) or lambda2 of L (lifted phase)
  bool degenerate = false;
  std::optional<bool> feasible;  // achieved symmetric misfit <= sigma, when sigma was given
  // Filled by score_against.
  std::optional<double> aligned_error;
  std::optional<double> relative_error;
  double alpha = 0.0;
};

inline void score_against(RecoveryOutcome& out, const CVector& x0) {
  const auto d = phase_aligned_distance(out.x_hat, x0);
  out.aligned_error = d.distance;
  const double nx = x0.norm();
  out.relative_error = nx > 0.0 ? d.distance / nx : d.distance;
  out.alpha = d.alpha;
}

namespace detail {

inline void require_phase_data(const MeasurementGraph& g, const EdgeData& b, const char* who) {
  if (b.includes_diagonal()) throw std::invalid_argument(std::string(who) + ": phase data must not carry a diagonal");
  require_edges_match(g, b, who);
}

inline void require_general_data(const MeasurementGraph& g, const EdgeData& b, const ForwardOperator& a,
                                 const char* who) {
  if (a.rows() != b.dimension()) throw std::invalid_argument(std::string(who) + ": operator rows must equal data size");
  require_edges_match(g, b, who);
}

inline RecoveryOutcome lifted_outcome(Method method, LiftedEstimate est, CVector x, const SolverParams& params) {
  RecoveryOutcome out;
  out.method = method;
  out.x_hat = std::move(x);
  out.degenerate = est.top.degenerate_gap;
  if (params.sigma) out.feasible = est.achieved_misfit_symmetric <= *params.sigma;
  out.estimate = std::move(est);
  return out;
}

}  // namespace detail

/// x = v1 sqrt(n), v1 the bottom unit eigenvector of the noisy phase Laplacian.
inline RecoveryOutcome eigenvector_method(const MeasurementGraph& g, const EdgeData& b) {
  detail::require_phase_data(g, b, "eigenvector_method");
  const CMatrix l = noisy_phase_laplacian(g, b);
  auto dec = hermitian_eigendecomposition(l);
  RecoveryOutcome out;
  out.method = Method::Eigenvector;
  out.x_hat = dec.vectors.col(0) * std::sqrt(static_cast<double>(g.size()));
  out.gap = dec.values.size() > 1 ? dec.values(1) : 0.0;
  if (dec.values.size() > 1) {
    const double scale = std::max({std::abs(dec.values(0)), std::abs(dec.values(dec.values.size() - 1)), 1e-300});
    out.degenerate = dec.values(1) - dec.values(0) <= 1e-8 * scale;
  }
  return out;
}

/// Unit-diagonal lift on E; x is the top eigenvector scaled to norm sqrt(n).
inline RecoveryOutcome solve_lifted_phase(const MeasurementGraph& g, const EdgeData& b, const SolverParams& params = {}) {
  detail::require_phase_data(g, b, "solve_lifted_phase");
  auto est = admm_l1_psd(g.size(), b, LiftStructure::unit_diagonal(), params);
  CVector x = est.top.vector * std::sqrt(static_cast<double>(g.size()));
  auto out = detail::lifted_outcome(Method::LiftedPhase, std::move(est), std::move(x), params);
  out.gap = spectral_report(laplacian(g)).lambda2();
  return out;
}

/// Basic lift AXA* on E and D, solved as Y = AXA* restricted to range(A); x = x1 sqrt(eta1) of X.
inline RecoveryOutcome solve_lifted_basic(const MeasurementGraph& g, const EdgeData& b, const ForwardOperator& a,
                                          const SolverParams& params = {}) {
  detail::require_general_data(g, b, a, "solve_lifted_basic");
  auto est = admm_l1_psd(a.rows(), b, LiftStructure::range_basis(a.left_singular_vectors()), params);
  const CMatrix pinv = a.pinv();
  CMatrix x_lift = pinv * est.matrix * pinv.adjoint();
  x_lift = 0.5 * (x_lift + x_lift.adjoint());
  const auto top = top_eigenpair(x_lift);
  CVector x = top.vector * std::sqrt(std::max(top.value, 0.0));
  auto out = detail::lifted_outcome(Method::LiftedBasic, std::move(est), std::move(x), params);
  out.degenerate = top.degenerate_gap;
  return out;
}

/// Two-step lift: Y >= 0 on E and D, then x = A+ y1 sqrt(eta1).
inline RecoveryOutcome solve_lifted_twostep(const MeasurementGraph& g, const EdgeData& b, const ForwardOperator& a,
                                            const SolverParams& params = {}) {
  detail::require_general_data(g, b, a, "solve_lifted_twostep");
  auto est = admm_l1_psd(a.rows(), b, LiftStructure::free_diagonal(), params);
  CVector x = a.apply_pinv(est.top.vector * std::sqrt(std::max(est.top.value, 0.0)));
  return detail::lifted_outcome(Method::LiftedTwostep, std::move(est), std::move(x), params);
}

/// Residual M_ij - B_ij of a lifted matrix on the data's index set.
inline EdgeData lifted_residual(const CMatrix& m, const EdgeData& b) {
  if (m.rows() != b.dimension() || m.cols() != b.dimension())
    throw std::invalid_argument("lifted_residual: dimension mismatch");
  EdgeData out(b.dimension(), b.includes_diagonal());
  for (const auto& [e, v] : b.entries()) out.set(e.i, e.j, m(e.i, e.j) - v);
  return out;
}

/// Misfit evaluator for the nonlinear forms: residual (Ax)_i conj((Ax)_j) - B_ij.
inline EdgeData rank_one_residual(const ForwardOperator& a, const CVector& x, const EdgeData& b) {
  const CVector y = a.apply(x);
  return lifted_residual(y * y.adjoint(), b);
}

}  // namespace interf
