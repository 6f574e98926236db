#pragma once

#include "interf/edge_data.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace interf {

inline double hermitian_defect(const CMatrix& h) {
  return (h - h.adjoint()).norm();
}

/// True when ||H - H*||_F <= rel_tol * ||H||_F.
inline bool is_hermitian(const CMatrix& h, double rel_tol = 1e-12) {
  if (h.rows() != h.cols()) return false;
  return hermitian_defect(h) <= rel_tol * std::max(h.norm(), 1e-300);
}

inline void require_hermitian(const CMatrix& h, const char* who, double rel_tol = 1e-12) {
  if (!is_hermitian(h, rel_tol)) throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
}

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

inline EigenDecomposition hermitian_eigendecomposition(const CMatrix& h) {
  require_hermitian(h, "hermitian_eigendecomposition");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eigendecomposition: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct EigenPair {
  double value = 0.0;
  CVector vector;
  /// Set when the selected eigenvalue is not separated from its neighbour.
  bool degenerate_gap = false;
};

namespace detail {

inline bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace detail

inline EigenPair top_eigenpair(const CMatrix& h) {
  auto dec = hermitian_eigendecomposition(h);
  const auto n = dec.values.size();
  EigenPair out{dec.values(n - 1), dec.vectors.col(n - 1), false};
  if (n > 1) out.degenerate_gap = detail::nearly_equal(dec.values(n - 1), dec.values(n - 2), 1e-8);
  return out;
}

inline EigenPair bottom_eigenpair(const CMatrix& h) {
  auto dec = hermitian_eigendecomposition(h);
  EigenPair out{dec.values(0), dec.vectors.col(0), false};
  if (dec.values.size() > 1) {
    const double scale = std::max(std::abs(dec.values(0)), std::abs(dec.values(dec.values.size() - 1)));
    out.degenerate_gap = dec.values(1) - dec.values(0) <= 1e-8 * std::max(scale, 1e-300);
  }
  return out;
}

namespace detail {

/// Eigenpairs of the Hermitian part of h with eigenvalue in (0, inf), via LAPACK zheevr.
/// Returns false when LAPACK reports an error.
inline bool positive_eigenpairs(const CMatrix& h, RVector& values, CMatrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  CMatrix work = h;
  RVector w(n);
  CMatrix z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0,
      std::numeric_limits<double>::max(), 0, 0, 0.0, &found, w.data(),
      reinterpret_cast<lapack_complex_double*>(z.data()), n, support.data());
  if (info != 0) return false;
  values = w.head(found);
  vectors = z.leftCols(found);
  return true;
}

}  // namespace detail

/// Frobenius-nearest positive semidefinite matrix: eigenvalues clipped at zero.
inline CMatrix psd_project(const CMatrix& h) {
  RVector values;
  CMatrix vectors;
  if (!detail::positive_eigenpairs(h, values, vectors)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  }
  if (values.size() == 0) return CMatrix::Zero(h.rows(), h.cols());
  CMatrix out = vectors * values.asDiagonal() * vectors.adjoint();
  return out;
}

/// Projection onto {Y = Q W Q*, W >= 0} for a basis Q with orthonormal columns.
inline CMatrix psd_project_in_range(const CMatrix& h, const CMatrix& basis) {
  CMatrix core = basis.adjoint() * h * basis;
  return basis * psd_project(core) * basis.adjoint();
}

/// z * max(1 - tau/|z|, 0).
inline cplx complex_soft_threshold(cplx z, double tau) {
  if (tau < 0.0) throw std::invalid_argument("complex_soft_threshold: negative threshold");
  const double a = std::abs(z);
  if (a <= tau || a == 0.0) return {0.0, 0.0};
  return z * (1.0 - tau / a);
}

struct AlignedDistance {
  double distance = 0.0;
  double alpha = 0.0;  // in [0, 2*pi)
};

/// min over alpha of ||x - e^{i alpha} x0||, with the minimizing alpha.
inline AlignedDistance phase_aligned_distance(const CVector& x, const CVector& x0) {
  if (x.size() != x0.size()) throw std::invalid_argument("phase_aligned_distance: length mismatch");
  const cplx inner = x0.dot(x);  // x0^* x
  double alpha = 0.0;
  cplx rot(1.0, 0.0);
  if (std::abs(inner) > 0.0) {
    alpha = std::arg(inner);
    if (alpha < 0.0) alpha += 2.0 * std::numbers::pi;
    if (alpha >= 2.0 * std::numbers::pi) alpha = 0.0;
    rot = inner / std::abs(inner);
  }
  return {(x - rot * x0).norm(), alpha};
}

struct EdgeNorms {
  double l1 = 0.0;            // each unordered pair counted once
  double linf = 0.0;
  double spectral = 0.0;      // operator norm of the Hermitian embedding
  double l1_symmetric = 0.0;  // off-diagonal pairs counted twice, diagonal once
};

/// Norms of values restricted to index_set. Every index in the set must be present.
inline EdgeNorms edge_norms(const EdgeData& values, const IndexSet& index_set) {
  EdgeNorms out;
  const int n = values.dimension();
  CMatrix embed = CMatrix::Zero(n, n);
  for (const Edge& e : index_set) {
    if (!values.contains(e.i, e.j)) throw std::invalid_argument("edge_norms: missing entry");
    const cplx v = values.at(e.i, e.j);
    const double a = std::abs(v);
    out.l1 += a;
    out.l1_symmetric += e.diagonal() ? a : 2.0 * a;
    out.linf = std::max(out.linf, a);
    embed(e.i, e.j) = v;
    embed(e.j, e.i) = std::conj(v);
  }
  if (!index_set.empty()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(embed, Eigen::EigenvaluesOnly);
    out.spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return out;
}

inline EdgeNorms edge_norms(const EdgeData& values) { return edge_norms(values, values.index_set()); }

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace interf
