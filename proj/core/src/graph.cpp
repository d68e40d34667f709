#include "aggsamp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aggsamp/errors.hpp"
#include "aggsamp/rng.hpp"

namespace aggsamp {

namespace {

constexpr int kConnectivityAttempts = 10000;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

double parse_double(const std::string& field, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v))
    throw Error(ErrorCode::MalformedTable,
                "line " + std::to_string(line_no) + ": '" + field + "' is not a finite number");
  return v;
}

Index parse_index(const std::string& field, std::size_t line_no) {
  long long v = 0;
  const auto* begin = field.data();
  const auto* end = begin + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != end)
    throw Error(ErrorCode::MalformedTable,
                "line " + std::to_string(line_no) + ": '" + field + "' is not an integer");
  return static_cast<Index>(v);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void expect_header(const std::vector<std::string>& lines, const std::string& header) {
  if (lines.empty() || trim(lines.front()) != header)
    throw Error(ErrorCode::MalformedTable, "expected header '" + header + "'");
}

}  // namespace

void EdgeListGraph::validate() const {
  if (node_count < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one node");
  std::set<std::pair<Index, Index>> seen;
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= node_count || e.dst < 0 || e.dst >= node_count)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint outside [1, N]");
    auto key = directed ? std::make_pair(e.src, e.dst)
                        : std::make_pair(std::min(e.src, e.dst), std::max(e.src, e.dst));
    if (!seen.insert(key).second)
      throw Error(ErrorCode::InvalidArgument, "repeated edge (" + std::to_string(e.src + 1) +
                                                  ", " + std::to_string(e.dst + 1) + ")");
  }
}

RMatrix EdgeListGraph::adjacency() const {
  RMatrix a = RMatrix::Zero(node_count, node_count);
  for (const auto& e : edges) {
    a(e.dst, e.src) = e.weight;
    if (!directed) a(e.src, e.dst) = e.weight;
  }
  return a;
}

bool EdgeListGraph::is_connected() const {
  if (node_count <= 1) return true;
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(node_count));
  for (const auto& e : edges) {
    if (e.src == e.dst) continue;
    adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index reached = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index w : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == node_count;
}

EdgeListGraph erdos_renyi(Index nodes, double p, std::uint64_t seed, bool require_connected,
                          bool symmetric) {
  if (nodes < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one node");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "edge probability must be in (0, 1)");
  for (int attempt = 0; attempt < kConnectivityAttempts; ++attempt) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(attempt));
    EdgeListGraph g{nodes, {}, !symmetric};
    for (Index i = 0; i < nodes; ++i)
      for (Index j = symmetric ? i + 1 : 0; j < nodes; ++j)
        if (i != j && rng.bernoulli(p)) g.edges.push_back({i, j, 1.0});
    if (!require_connected || g.is_connected()) return g;
  }
  throw Error(ErrorCode::ConnectivityBudgetExceeded,
              "no connected draw in 10000 attempts (N = " + std::to_string(nodes) +
                  ", p = " + format_double(p) + ")");
}

EdgeListGraph directed_cycle(Index nodes) {
  if (nodes < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one node");
  EdgeListGraph g{nodes, {}, true};
  for (Index i = 0; i < nodes; ++i) g.edges.push_back({i, (i + 1) % nodes, 1.0});
  return g;
}

EdgeListGraph factor_graph(Index nodes, const std::vector<double>& strengths, double p,
                           double scale, std::uint64_t seed) {
  const auto factors = static_cast<Index>(strengths.size());
  if (factors < 1 || factors > nodes)
    throw Error(ErrorCode::InvalidArgument, "need between 1 and N factor strengths");
  if (!(scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "background scale must be nonnegative");
  Rng rng(seed);
  RMatrix g(nodes, factors);
  for (Index i = 0; i < nodes; ++i)
    for (Index f = 0; f < factors; ++f) g(i, f) = rng.gaussian();
  const Eigen::HouseholderQR<RMatrix> qr(g);
  const RMatrix u = qr.householderQ() * RMatrix::Identity(nodes, factors);
  const RVector theta = Eigen::Map<const RVector>(strengths.data(), factors);
  RMatrix s = u * theta.asDiagonal() * u.transpose();
  const EdgeListGraph background = erdos_renyi(nodes, p, rng.next_u64());
  for (const auto& e : background.edges) {
    const double w = scale * rng.gaussian();
    s(e.src, e.dst) += w;
    s(e.dst, e.src) += w;
  }
  EdgeListGraph out{nodes, {}, false};
  for (Index i = 0; i < nodes; ++i)
    for (Index j = i; j < nodes; ++j)
      if (std::abs(s(i, j)) > 1e-3) out.edges.push_back({i, j, s(i, j)});
  return out;
}

ShiftKind parse_shift_kind(const std::string& name) {
  if (name == "adjacency" || name == "A") return ShiftKind::Adjacency;
  if (name == "identity_minus_adjacency" || name == "I-A") return ShiftKind::IdentityMinusAdjacency;
  if (name == "half_adjacency_squared" || name == "0.5A2") return ShiftKind::HalfAdjacencySquared;
  if (name == "laplacian" || name == "L") return ShiftKind::Laplacian;
  if (name == "custom") return ShiftKind::Custom;
  throw Error(ErrorCode::InvalidArgument, "unknown shift kind '" + name + "'");
}

std::string to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Adjacency: return "adjacency";
    case ShiftKind::IdentityMinusAdjacency: return "identity_minus_adjacency";
    case ShiftKind::HalfAdjacencySquared: return "half_adjacency_squared";
    case ShiftKind::Laplacian: return "laplacian";
    case ShiftKind::Custom: return "custom";
  }
  return "unknown";
}

ShiftOperator shift_from_graph(const EdgeListGraph& graph, ShiftKind kind,
                               const std::optional<CMatrix>& custom) {
  graph.validate();
  const Index n = graph.node_count;
  const RMatrix a = graph.adjacency();
  using Pattern = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  Pattern reach = (a.array() != 0.0).cast<int>().matrix();
  reach.diagonal().setOnes();

  RMatrix s;
  switch (kind) {
    case ShiftKind::Adjacency:
      s = a;
      break;
    case ShiftKind::IdentityMinusAdjacency:
      s = RMatrix::Identity(n, n) - a;
      break;
    case ShiftKind::HalfAdjacencySquared:
      s = 0.5 * a * a;
      reach = ((reach * reach).array() != 0).cast<int>().matrix();
      break;
    case ShiftKind::Laplacian:
      s = RMatrix(a.rowwise().sum().asDiagonal()) - a;
      break;
    case ShiftKind::Custom: {
      if (!custom || custom->rows() != n || custom->cols() != n)
        throw Error(ErrorCode::InvalidArgument, "custom shift must be N x N");
      std::vector<std::pair<Index, Index>> pattern;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (reach(i, j)) pattern.emplace_back(i, j);
      return ShiftOperator(*custom, std::move(pattern));
    }
  }
  std::vector<std::pair<Index, Index>> pattern;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (reach(i, j)) pattern.emplace_back(i, j);
  return ShiftOperator(s.cast<cplx>(), std::move(pattern));
}

IngestedTable ingest_weighted_table(const std::string& csv, bool symmetrize, double threshold) {
  const auto lines = lines_of(csv);
  if (lines.empty()) throw Error(ErrorCode::MalformedTable, "empty table");
  const auto n = static_cast<Index>(lines.size());
  RMatrix u(n, n);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (static_cast<Index>(fields.size()) != n)
      throw Error(ErrorCode::MalformedTable,
                  "line " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                      " fields; a " + std::to_string(n) + "-row table must be square");
    for (std::size_t c = 0; c < fields.size(); ++c)
      u(static_cast<Index>(r), static_cast<Index>(c)) = parse_double(fields[c], r + 1);
  }
  if (symmetrize) u = (0.5 * (u + u.transpose())).eval();

  IngestedTable out{{n, {}, !symmetrize}, 0};
  for (Index i = 0; i < n; ++i)
    for (Index j = symmetrize ? i + 1 : 0; j < n; ++j) {
      if (i == j || u(i, j) == 0.0) continue;
      if (u(i, j) < threshold) {
        ++out.dropped;
        continue;
      }
      out.graph.edges.push_back({i, j, u(i, j)});
    }
  return out;
}

std::string write_edge_csv(const EdgeListGraph& graph) {
  std::string out = "src,dst,weight\n";
  for (const auto& e : graph.edges)
    out += std::to_string(e.src + 1) + "," + std::to_string(e.dst + 1) + "," + format_double(e.weight) + "\n";
  return out;
}

EdgeListGraph read_edge_csv(const std::string& csv, Index node_count, bool directed) {
  const auto lines = lines_of(csv);
  expect_header(lines, "src,dst,weight");
  EdgeListGraph g{node_count, {}, directed};
  Index largest = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != 3)
      throw Error(ErrorCode::MalformedTable, "line " + std::to_string(r + 1) + ": expected 3 fields");
    const Index src = parse_index(fields[0], r + 1);
    const Index dst = parse_index(fields[1], r + 1);
    if (src < 1 || dst < 1)
      throw Error(ErrorCode::MalformedTable, "line " + std::to_string(r + 1) + ": nodes are 1-based");
    g.edges.push_back({src - 1, dst - 1, parse_double(fields[2], r + 1)});
    largest = std::max({largest, src, dst});
  }
  if (node_count == 0) g.node_count = largest;
  if (largest > g.node_count)
    throw Error(ErrorCode::MalformedTable, "edge endpoint exceeds the node count");
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedTable, e.what());
  }
  return g;
}

std::string write_signal_csv(const CVector& signal) {
  std::string out = "node,value_re,value_im\n";
  for (Index i = 0; i < signal.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(signal(i).real()) + "," +
           format_double(signal(i).imag()) + "\n";
  return out;
}

CVector read_signal_csv(const std::string& csv) {
  const auto lines = lines_of(csv);
  expect_header(lines, "node,value_re,value_im");
  CVector out(static_cast<Index>(lines.size() - 1));
  std::vector<char> seen(lines.size() - 1, 0);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != 3)
      throw Error(ErrorCode::MalformedTable, "line " + std::to_string(r + 1) + ": expected 3 fields");
    const Index node = parse_index(fields[0], r + 1);
    if (node < 1 || node > out.size() || seen[static_cast<std::size_t>(node - 1)])
      throw Error(ErrorCode::MalformedTable, "line " + std::to_string(r + 1) + ": bad or repeated node");
    seen[static_cast<std::size_t>(node - 1)] = 1;
    out(node - 1) = cplx(parse_double(fields[1], r + 1), parse_double(fields[2], r + 1));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IOFailure, "read failed for '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IOFailure, "write failed for '" + path + "'");
}

}  // namespace aggsamp
