#pragma once

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <iosfwd>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace interf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Unordered index pair stored with i <= j. i == j denotes a diagonal entry.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  bool diagonal() const { return i == j; }
  auto operator<=>(const Edge&) const = default;
};

using IndexSet = std::vector<Edge>;

/// Sparse Hermitian-symmetric complex values on a set of index pairs.
///
/// Only the upper triangle (i <= j) is stored; the value at (j, i) is the
/// conjugate of the stored value. Diagonal entries are kept real.
class EdgeData {
 public:
  EdgeData() = default;
  EdgeData(int n, bool includes_diagonal) : n_(n), includes_diagonal_(includes_diagonal) {
    if (n < 1) throw std::invalid_argument("EdgeData: dimension must be positive");
  }

  int dimension() const { return n_; }
  bool includes_diagonal() const { return includes_diagonal_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<Edge, cplx>& entries() const { return entries_; }

  /// Stores v at (i, j), i.e. conj(v) at (j, i). Diagonal values are symmetrized to their real part.
  void set(int i, int j, cplx v) {
    check_index(i);
    check_index(j);
    if (i == j) {
      if (!includes_diagonal_)
        throw std::invalid_argument("EdgeData: diagonal entry on data without diagonal");
      entries_[Edge(i, i)] = cplx(v.real(), 0.0);
      return;
    }
    if (i < j)
      entries_[Edge(i, j)] = v;
    else
      entries_[Edge(j, i)] = std::conj(v);
  }

  bool contains(int i, int j) const { return entries_.count(Edge(i, j)) != 0; }

  /// Value at the ordered pair (i, j).
  cplx at(int i, int j) const {
    auto it = entries_.find(Edge(i, j));
    if (it == entries_.end())
      throw std::invalid_argument("EdgeData: missing entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
    return i <= j ? it->second : std::conj(it->second);
  }

  IndexSet index_set() const {
    IndexSet out;
    out.reserve(entries_.size());
    for (const auto& [e, v] : entries_) out.push_back(e);
    return out;
  }

  /// Dense Hermitian matrix with the stored entries and zeros elsewhere.
  CMatrix embedding() const {
    CMatrix h = CMatrix::Zero(n_, n_);
    for (const auto& [e, v] : entries_) {
      h(e.i, e.j) = v;
      h(e.j, e.i) = std::conj(v);
    }
    return h;
  }

  EdgeData scaled(double c) const {
    EdgeData out(n_, includes_diagonal_);
    for (const auto& [e, v] : entries_) out.entries_[e] = c * v;
    return out;
  }

  /// Entrywise sum; both operands must share dimension and diagonal flag.
  EdgeData plus(const EdgeData& other) const {
    if (other.n_ != n_ || other.includes_diagonal_ != includes_diagonal_)
      throw std::invalid_argument("EdgeData: incompatible operands");
    EdgeData out = *this;
    for (const auto& [e, v] : other.entries_) out.entries_[e] += v;
    return out;
  }

  /// B_ij -> u_i B_ij conj(u_j).
  EdgeData conjugated_by(const CVector& u) const {
    if (u.size() != n_) throw std::invalid_argument("EdgeData: phase vector length mismatch");
    EdgeData out(n_, includes_diagonal_);
    for (const auto& [e, v] : entries_) {
      cplx w = u(e.i) * v * std::conj(u(e.j));
      out.entries_[e] = e.diagonal() ? cplx(w.real(), 0.0) : w;
    }
    return out;
  }

  /// Text form: header "n m diag=0|1", then rows "i j re im" with i <= j.
  void write(std::ostream& os) const {
    os << n_ << ' ' << entries_.size() << " diag=" << (includes_diagonal_ ? 1 : 0) << '\n';
    auto old = os.precision(17);
    for (const auto& [e, v] : entries_) os << e.i << ' ' << e.j << ' ' << v.real() << ' ' << v.imag() << '\n';
    os.precision(old);
  }

  static EdgeData read(std::istream& is) {
    int n = 0;
    std::size_t m = 0;
    std::string flag;
    if (!(is >> n >> m >> flag)) throw std::invalid_argument("EdgeData: malformed header");
    bool diag;
    if (flag == "diag=0")
      diag = false;
    else if (flag == "diag=1")
      diag = true;
    else
      throw std::invalid_argument("EdgeData: malformed diagonal flag '" + flag + "'");
    EdgeData out(n, diag);
    for (std::size_t k = 0; k < m; ++k) {
      int i, j;
      double re, im;
      if (!(is >> i >> j >> re >> im)) throw std::invalid_argument("EdgeData: truncated entry list");
      if (i > j) throw std::invalid_argument("EdgeData: rows must have i <= j");
      out.set(i, j, cplx(re, im));
    }
    return out;
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("EdgeData: index out of range");
  }

  int n_ = 0;
  bool includes_diagonal_ = false;
  std::map<Edge, cplx> entries_;
};

}  // namespace interf
