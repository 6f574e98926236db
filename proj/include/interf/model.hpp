#pragma once

#include "interf/edge_data.hpp"
#include "interf/graphs.hpp"
#include "interf/numerics.hpp"
#include "interf/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>

namespace interf {

/// Dense left-invertible m x n operator with its thin SVD.
class ForwardOperator {
 public:
  ForwardOperator() = default;

  explicit ForwardOperator(CMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() < matrix_.cols() || matrix_.cols() < 1)
      throw std::invalid_argument("ForwardOperator: need m >= n >= 1");
    Eigen::JacobiSVD<CMatrix> svd(matrix_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    s_ = svd.singularValues();
    v_ = svd.matrixV();
    if (!(s_(s_.size() - 1) > 0.0)) throw std::invalid_argument("ForwardOperator: matrix is not left-invertible");
  }

  static ForwardOperator identity(int n) { return ForwardOperator(CMatrix::Identity(n, n)); }

  int rows() const { return static_cast<int>(matrix_.rows()); }
  int cols() const { return static_cast<int>(matrix_.cols()); }
  const CMatrix& matrix() const { return matrix_; }
  const CMatrix& left_singular_vectors() const { return u_; }
  const RVector& singular_values() const { return s_; }  // descending
  const CMatrix& right_singular_vectors() const { return v_; }

  double kappa() const { return s_(0) / s_(s_.size() - 1); }
  double norm() const { return s_(0); }

  /// A+ = V S^-1 U*.
  CMatrix pinv() const { return v_ * s_.cwiseInverse().asDiagonal() * u_.adjoint(); }

  CVector apply(const CVector& x) const {
    if (x.size() != cols()) throw std::invalid_argument("ForwardOperator: dimension mismatch");
    return matrix_ * x;
  }

  CVector apply_pinv(const CVector& y) const {
    if (y.size() != rows()) throw std::invalid_argument("ForwardOperator: dimension mismatch");
    return v_ * (s_.cwiseInverse().asDiagonal() * (u_.adjoint() * y));
  }

 private:
  CMatrix matrix_;
  CMatrix u_;
  RVector s_;
  CMatrix v_;
};

namespace detail {

inline CMatrix gaussian_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) g(r, c) = cplx(normal(rng), normal(rng));
  return g;
}

/// Orthonormal columns from the QR factorization of a Gaussian matrix, R-diagonal phases removed.
inline CMatrix haar_columns(int rows, int cols, std::mt19937_64& rng) {
  CMatrix g = gaussian_complex(rows, cols, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  const CMatrix& r = qr.matrixQR();
  for (int c = 0; c < cols; ++c) {
    const cplx d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

}  // namespace detail

/// Random operator U diag(s) V* with s geometric from 1 down to 1/kappa_target.
inline ForwardOperator make_operator(int m, int n, double kappa_target, std::uint64_t seed) {
  if (n < 1 || m < n) throw std::invalid_argument("make_operator: need m >= n >= 1");
  if (!(kappa_target >= 1.0)) throw std::invalid_argument("make_operator: kappa_target must be >= 1");
  if (n == 1 && kappa_target != 1.0) throw std::invalid_argument("make_operator: a single column has kappa 1");
  auto rng = make_rng(seed);
  CMatrix u = detail::haar_columns(m, n, rng);
  CMatrix v = detail::haar_columns(n, n, rng);
  RVector s(n);
  for (int k = 0; k < n; ++k)
    s(k) = n == 1 ? 1.0 : std::pow(kappa_target, -static_cast<double>(k) / static_cast<double>(n - 1));
  return ForwardOperator(u * s.asDiagonal() * v.adjoint());
}

/// Entries e^{i theta}, theta uniform on [0, 2 pi).
inline CVector unit_modulus_signal(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("unit_modulus_signal: n must be positive");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = std::polar(1.0, angle(rng));
  return x;
}

/// Interferometric products b_i conj(b_j) of b on the edges (and |b_i|^2 on the diagonal).
inline EdgeData products_on(const CVector& b, const MeasurementGraph& g, bool include_diagonal) {
  if (b.size() != g.size()) throw std::invalid_argument("synthesize_clean: dimension mismatch");
  EdgeData out(g.size(), include_diagonal);
  for (const Edge& e : g.edges()) out.set(e.i, e.j, b(e.i) * std::conj(b(e.j)));
  if (include_diagonal)
    for (int i = 0; i < g.size(); ++i) out.set(i, i, std::norm(b(i)));
  return out;
}

/// Phase problem (A = I): data on E only.
inline EdgeData synthesize_clean(const CVector& x0, const MeasurementGraph& g) {
  return products_on(x0, g, false);
}

/// General problem: b = A x0, data on E and optionally on the diagonal.
inline EdgeData synthesize_clean(const ForwardOperator& a, const CVector& x0, const MeasurementGraph& g,
                                 bool include_diagonal) {
  if (x0.size() != a.cols() || g.size() != a.rows())
    throw std::invalid_argument("synthesize_clean: dimension mismatch");
  return products_on(a.apply(x0), g, include_diagonal);
}

struct NoiseRealization {
  EdgeData data;
  EdgeNorms norms;
  double eta = 0.0;
};

/// Circular complex Gaussian noise CN(0, eta^2) per unordered pair, Hermitian by construction.
/// Diagonal draws are symmetrized to their real part.
inline NoiseRealization hermitian_gaussian_noise(const MeasurementGraph& g, double eta, std::uint64_t seed,
                                                 bool include_diagonal) {
  if (!(eta >= 0.0)) throw std::invalid_argument("hermitian_gaussian_noise: eta must be >= 0");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = eta / std::sqrt(2.0);
  EdgeData data(g.size(), include_diagonal);
  for (const Edge& e : g.edges()) {
    const double re = normal(rng), im = normal(rng);
    data.set(e.i, e.j, cplx(scale * re, scale * im));
  }
  if (include_diagonal) {
    for (int i = 0; i < g.size(); ++i) {
      const cplx z(scale * normal(rng), scale * normal(rng));
      data.set(i, i, 0.5 * (z + std::conj(z)));
    }
  }
  auto norms = edge_norms(data);
  return {std::move(data), norms, eta};
}

/// Four phaseless intensities q_k = |f_i + e^{i pi k/2} f_j|^2, k = 1..4, for one pair.
struct PhaselessQuadruple {
  Edge pair;
  std::array<double, 4> q{};
};

inline std::array<double, 4> phaseless_intensities(cplx fi, cplx fj) {
  std::array<double, 4> q{};
  for (int k = 1; k <= 4; ++k) q[static_cast<std::size_t>(k - 1)] = std::norm(fi + std::polar(1.0, std::numbers::pi * k / 2.0) * fj);
  return q;
}

/// f_i conj(f_j) = 1/4 sum_k e^{+i pi k/2} q_k. With the weights e^{-i pi k/2} the same sum is the
/// conjugate product conj(f_i) f_j.
inline cplx polarize(const std::array<double, 4>& q) {
  cplx acc(0.0, 0.0);
  for (int k = 1; k <= 4; ++k) {
    const double qk = q[static_cast<std::size_t>(k - 1)];
    if (qk < 0.0) throw std::invalid_argument("polarization_products: negative intensity");
    acc += std::polar(1.0, std::numbers::pi * k / 2.0) * qk;
  }
  return 0.25 * acc;
}

inline EdgeData polarization_products(int n, std::span<const PhaselessQuadruple> quadruples) {
  bool diag = false;
  for (const auto& item : quadruples) diag = diag || item.pair.diagonal();
  EdgeData out(n, diag);
  for (const auto& item : quadruples) out.set(item.pair.i, item.pair.j, polarize(item.q));
  return out;
}

}  // namespace interf
