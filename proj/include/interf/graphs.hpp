#pragma once

#include "interf/edge_data.hpp"
#include "interf/numerics.hpp"
#include "interf/random.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace interf {

/// Undirected loop-free graph on nodes 0..n-1, edges stored as a sorted list of pairs i < j.
class MeasurementGraph {
 public:
  MeasurementGraph() = default;

  MeasurementGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1) throw std::invalid_argument("MeasurementGraph: node count must be positive");
    for (const Edge& e : edges_) {
      if (e.diagonal()) throw std::invalid_argument("MeasurementGraph: self-loop");
      if (e.i < 0 || e.j >= n) throw std::invalid_argument("MeasurementGraph: node index out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  int size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(int i, int j) const {
    if (i == j) return false;
    return std::binary_search(edges_.begin(), edges_.end(), Edge(i, j));
  }

  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n_), 0);
    for (const Edge& e : edges_) {
      ++d[static_cast<std::size_t>(e.i)];
      ++d[static_cast<std::size_t>(e.j)];
    }
    return d;
  }

  int max_degree() const {
    auto d = degrees();
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
  }

  MeasurementGraph with_edge(Edge e) const {
    auto edges = edges_;
    edges.push_back(e);
    return MeasurementGraph(n_, std::move(edges));
  }

  /// E, optionally followed by the diagonal D.
  IndexSet index_set(bool include_diagonal) const {
    IndexSet out(edges_.begin(), edges_.end());
    if (include_diagonal)
      for (int i = 0; i < n_; ++i) out.emplace_back(i, i);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Edge-list text: "n m" then one "i j" line per edge, i < j.
  void write(std::ostream& os) const {
    os << n_ << ' ' << edges_.size() << '\n';
    for (const Edge& e : edges_) os << e.i << ' ' << e.j << '\n';
  }

  static MeasurementGraph read(std::istream& is) {
    int n = 0;
    std::size_t m = 0;
    if (!(is >> n >> m)) throw std::invalid_argument("MeasurementGraph: malformed header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      int i, j;
      if (!(is >> i >> j)) throw std::invalid_argument("MeasurementGraph: truncated edge list");
      if (i >= j) throw std::invalid_argument("MeasurementGraph: edge rows must have i < j");
      edges.emplace_back(i, j);
    }
    return MeasurementGraph(n, std::move(edges));
  }

  bool operator==(const MeasurementGraph&) const = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Ascending spectrum of a Hermitian (Laplacian-type) matrix.
struct SpectralReport {
  RVector eigenvalues;

  double lambda1() const { return eigenvalues(0); }
  double lambda2() const { return eigenvalues.size() > 1 ? eigenvalues(1) : 0.0; }
  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
};

inline SpectralReport spectral_report(const CMatrix& h) {
  require_hermitian(h, "spectral_report");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()};
}

class NotConnectedError : public std::runtime_error {
 public:
  NotConnectedError(int attempts, double last_lambda2)
      : std::runtime_error("graph not connected after " + std::to_string(attempts) +
                           " attempts (last lambda2 = " + std::to_string(last_lambda2) + ")"),
        attempts_(attempts),
        last_lambda2_(last_lambda2) {}

  int attempts() const { return attempts_; }
  double last_lambda2() const { return last_lambda2_; }

 private:
  int attempts_;
  double last_lambda2_;
};

inline constexpr double kConnectedGapTolerance = 1e-10;

// Laplacian variants. All return dense Hermitian matrices.

inline CMatrix laplacian(const MeasurementGraph& g) {
  const int n = g.size();
  CMatrix l = CMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.i, e.i) += 1.0;
    l(e.j, e.j) += 1.0;
    l(e.i, e.j) = -1.0;
    l(e.j, e.i) = -1.0;
  }
  return l;
}

/// L_|b|: diagonal sum of |b_k|^2 over neighbours k, off-diagonal -|b_i||b_j|.
inline CMatrix data_weighted_laplacian(const MeasurementGraph& g, const RVector& magnitudes) {
  const int n = g.size();
  if (magnitudes.size() != n) throw std::invalid_argument("data_weighted_laplacian: length mismatch");
  if ((magnitudes.array() < 0.0).any()) throw std::invalid_argument("data_weighted_laplacian: negative magnitude");
  CMatrix l = CMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const double bi = magnitudes(e.i), bj = magnitudes(e.j);
    l(e.i, e.i) += bj * bj;
    l(e.j, e.j) += bi * bi;
    l(e.i, e.j) = -bi * bj;
    l(e.j, e.i) = -bi * bj;
  }
  return l;
}

/// Laplacian with phases: off-diagonal -b_i conj(b_j); b spans its null space.
inline CMatrix phased_laplacian(const MeasurementGraph& g, const CVector& b) {
  const int n = g.size();
  if (b.size() != n) throw std::invalid_argument("phased_laplacian: length mismatch");
  CMatrix l = CMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.i, e.i) += std::norm(b(e.j));
    l(e.j, e.j) += std::norm(b(e.i));
    const cplx v = -b(e.i) * std::conj(b(e.j));
    l(e.i, e.j) = v;
    l(e.j, e.i) = std::conj(v);
  }
  return l;
}

namespace detail {

inline void require_edges_match(const MeasurementGraph& g, const EdgeData& data, const char* who) {
  if (data.dimension() != g.size()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  for (const Edge& e : g.edges())
    if (!data.contains(e.i, e.j)) throw std::invalid_argument(std::string(who) + ": missing edge value");
  for (const auto& [e, v] : data.entries())
    if (!e.diagonal() && !g.has_edge(e.i, e.j))
      throw std::invalid_argument(std::string(who) + ": value outside the edge set");
}

}  // namespace detail

/// Noisy Laplacian for the phase problem: degree on the diagonal, -B_ij on edges.
inline CMatrix noisy_phase_laplacian(const MeasurementGraph& g, const EdgeData& data) {
  detail::require_edges_match(g, data, "noisy_phase_laplacian");
  CMatrix l = CMatrix::Zero(g.size(), g.size());
  for (const Edge& e : g.edges()) {
    l(e.i, e.i) += 1.0;
    l(e.j, e.j) += 1.0;
    const cplx v = data.at(e.i, e.j);
    l(e.i, e.j) = -v;
    l(e.j, e.i) = -std::conj(v);
  }
  return l;
}

/// Noisy data-weighted Laplacian: diagonal sum of B_kk over neighbours k, -B_ij on edges.
inline CMatrix noisy_data_laplacian(const MeasurementGraph& g, const EdgeData& data) {
  detail::require_edges_match(g, data, "noisy_data_laplacian");
  const int n = g.size();
  for (int i = 0; i < n; ++i)
    if (!data.contains(i, i)) throw std::invalid_argument("noisy_data_laplacian: missing diagonal value");
  CMatrix l = CMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.i, e.i) += data.at(e.j, e.j).real();
    l(e.j, e.j) += data.at(e.i, e.i).real();
    const cplx v = data.at(e.i, e.j);
    l(e.i, e.j) = -v;
    l(e.j, e.i) = -std::conj(v);
  }
  return l;
}

// Generators.

inline MeasurementGraph path_graph(int n) {
  if (n < 2) throw std::invalid_argument("path_graph: need at least 2 nodes");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return MeasurementGraph(n, std::move(edges));
}

/// Path on n nodes plus K distinct non-path edges drawn uniformly without replacement.
inline MeasurementGraph path_plus_random_edges(int n, int k, std::uint64_t seed) {
  auto path = path_graph(n);
  const long long complement = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
  if (k < 0 || k > complement) throw std::invalid_argument("path_plus_random_edges: too many extra edges");
  std::vector<Edge> candidates;
  candidates.reserve(static_cast<std::size_t>(complement));
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j) candidates.emplace_back(i, j);
  auto rng = make_rng(seed);
  // partial Fisher-Yates: the first k slots become a uniform k-subset
  for (int s = 0; s < k; ++s) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(s), candidates.size() - 1);
    std::swap(candidates[static_cast<std::size_t>(s)], candidates[pick(rng)]);
  }
  auto edges = path.edges();
  edges.insert(edges.end(), candidates.begin(), candidates.begin() + k);
  return MeasurementGraph(n, std::move(edges));
}

struct ErdosRenyiResult {
  MeasurementGraph graph;
  int attempts = 0;
  double lambda2 = 0.0;
};

/// G(n, p) resampled until the Laplacian spectral gap exceeds kConnectedGapTolerance.
inline ErdosRenyiResult erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts = 1000) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("erdos_renyi_connected: p must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("erdos_renyi_connected: need at least 2 nodes");
  if (max_attempts < 1) throw std::invalid_argument("erdos_renyi_connected: max_attempts must be positive");
  auto rng = make_rng(seed);
  std::bernoulli_distribution coin(p);
  double gap = 0.0;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (coin(rng)) edges.emplace_back(i, j);
    MeasurementGraph g(n, std::move(edges));
    gap = spectral_report(laplacian(g)).lambda2();
    if (gap > kConnectedGapTolerance) return {std::move(g), attempt, gap};
  }
  throw NotConnectedError(max_attempts, gap);
}

}  // namespace interf
