#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aggsamp/spectral.hpp"

namespace aggsamp {

/// Directed edge src -> dst; in the shift matrix it lands at (dst, src), so
/// node dst combines the value of src in one shift. 0-based in memory,
/// 1-based on disk.
struct Edge {
  Index src = 0;
  Index dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeListGraph {
  Index node_count = 0;
  std::vector<Edge> edges;
  /// Undirected graphs store each pair once and mirror it in the adjacency.
  bool directed = false;

  /// Throws InvalidArgument on out-of-range endpoints or repeated pairs.
  void validate() const;
  /// Dense weighted adjacency, A(dst, src) = weight.
  RMatrix adjacency() const;
  /// Reachability over the symmetrized pattern.
  bool is_connected() const;
};

/// Each pair (unordered when symmetric, ordered otherwise) present with
/// probability p. Attempt a uses Rng::stream(seed, a); disconnected draws are
/// discarded when `require_connected`, up to 1e4 attempts.
EdgeListGraph erdos_renyi(Index nodes, double p, std::uint64_t seed, bool require_connected = true,
                          bool symmetric = true);

/// Edges i -> i+1 (mod N): ones on the first cyclic subdiagonal of A.
EdgeListGraph directed_cycle(Index nodes);

/// Weighted undirected graph U diag(strengths) U^T plus a sparse background:
/// U is a random orthonormal N x F basis, and each ER(p) edge gets an extra
/// N(0, scale^2) weight. Self-loops are kept; entries below 1e-3 in modulus
/// are dropped.
EdgeListGraph factor_graph(Index nodes, const std::vector<double>& strengths, double p,
                           double scale, std::uint64_t seed);

enum class ShiftKind { Adjacency, IdentityMinusAdjacency, HalfAdjacencySquared, Laplacian, Custom };

ShiftKind parse_shift_kind(const std::string& name);
std::string to_string(ShiftKind kind);

/// Dense shift with the matching sparsity pattern. HalfAdjacencySquared
/// allows the two-hop neighbourhood; Laplacian is diag(in-weight) - A; Custom
/// takes `custom` and keeps the graph's edge pattern.
ShiftOperator shift_from_graph(const EdgeListGraph& graph, ShiftKind kind,
                               const std::optional<CMatrix>& custom = std::nullopt);

struct IngestedTable {
  EdgeListGraph graph;
  Index dropped = 0;  ///< nonzero off-diagonal weights removed by the threshold
};

/// Square numeric CSV table U (row i, column j = flow i -> j). Optionally
/// symmetrized to (U_ij + U_ji)/2, then entries below `threshold` dropped.
/// The diagonal is ignored. Throws MalformedTable.
IngestedTable ingest_weighted_table(const std::string& csv, bool symmetrize, double threshold);

/// `src,dst,weight` with 1-based nodes. Undirected graphs write each pair once.
std::string write_edge_csv(const EdgeListGraph& graph);
EdgeListGraph read_edge_csv(const std::string& csv, Index node_count = 0, bool directed = false);

/// `node,value_re,value_im` with 1-based nodes.
std::string write_signal_csv(const CVector& signal);
CVector read_signal_csv(const std::string& csv);

/// Whole-file helpers; IOFailure on open/read/write errors.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace aggsamp
