#include "jod/dag.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "jod/error.hpp"

namespace jod {

Dag::Dag(int p) : p_(p), parents_(static_cast<std::size_t>(p), NodeSet(p)), children_(static_cast<std::size_t>(p), NodeSet(p)) {
  if (p < 0) throw ValidationError("negative node count");
}

Dag Dag::from_edges(int p, std::span<const Edge> edges) {
  Dag g(p);
  for (const Edge& e : edges) g.add_edge(e.tail, e.head);
  if (!g.is_acyclic()) throw ValidationError("edge set contains a directed cycle");
  return g;
}

Dag Dag::from_labeled_edges(int p, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<Edge> out;
  for (auto [i, j] : edges) out.push_back({i - 1, j - 1});
  return from_edges(p, out);
}

void Dag::check_node(Node v) const {
  if (v < 0 || v >= p_) throw ValidationError("node label out of range: " + std::to_string(v + 1));
}

void Dag::add_edge(Node i, Node j) {
  check_node(i);
  check_node(j);
  if (i == j) throw ValidationError("self-loop on node " + std::to_string(i + 1));
  children_[static_cast<std::size_t>(i)].insert(j);
  parents_[static_cast<std::size_t>(j)].insert(i);
}

void Dag::remove_edge(Node i, Node j) {
  children_[static_cast<std::size_t>(i)].erase(j);
  parents_[static_cast<std::size_t>(j)].erase(i);
}

void Dag::reverse_edge(Node i, Node j) {
  remove_edge(i, j);
  add_edge(j, i);
}

void Dag::set_parents(Node j, const NodeSet& parents) {
  parents_[static_cast<std::size_t>(j)].for_each([&](Node i) { children_[static_cast<std::size_t>(i)].erase(j); });
  parents_[static_cast<std::size_t>(j)] = parents;
  parents.for_each([&](Node i) {
    if (i == j) throw ValidationError("self-loop on node " + std::to_string(i + 1));
    children_[static_cast<std::size_t>(i)].insert(j);
  });
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (const auto& c : children_) n += static_cast<std::size_t>(c.size());
  return n;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (Node i = 0; i < p_; ++i) children(i).for_each([&](Node j) { out.push_back({i, j}); });
  return out;
}

std::optional<std::vector<Node>> Dag::topological_order() const {
  std::vector<int> indegree(static_cast<std::size_t>(p_));
  for (Node j = 0; j < p_; ++j) indegree[static_cast<std::size_t>(j)] = parents(j).size();
  std::vector<Node> order;
  order.reserve(static_cast<std::size_t>(p_));
  std::vector<Node> ready;
  for (Node j = p_ - 1; j >= 0; --j) {
    if (indegree[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  }
  while (!ready.empty()) {
    // Smallest ready label first, so the order is canonical.
    auto it = std::min_element(ready.begin(), ready.end());
    const Node v = *it;
    ready.erase(it);
    order.push_back(v);
    children(v).for_each([&](Node c) {
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    });
  }
  if (static_cast<int>(order.size()) != p_) return std::nullopt;
  return order;
}

bool Dag::is_acyclic() const { return topological_order().has_value(); }

void WeightedDag::validate() const {
  const int p = dag.size();
  if (weights.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
    throw ValidationError("weight matrix has wrong shape");
  }
  if (noise_vars.size() != static_cast<std::size_t>(p)) throw ValidationError("noise variance vector has wrong length");
  for (Node i = 0; i < p; ++i) {
    for (Node j = 0; j < p; ++j) {
      const double w = weight(i, j);
      if (dag.has_edge(i, j) && w == 0.0) throw ValidationError("zero weight on an edge");
      if (!dag.has_edge(i, j) && w != 0.0) throw ValidationError("weight off the edge set");
    }
  }
  for (double v : noise_vars) {
    if (!(v > 0.0)) throw ValidationError("noise variances must be positive");
  }
}

WeightedDag make_weighted(const Dag& g) {
  const auto p = static_cast<std::size_t>(g.size());
  return WeightedDag{g, std::vector<double>(p * p, 0.0), std::vector<double>(p, 1.0)};
}

bool is_consistent(const Dag& g, const Ordering& sigma) {
  if (g.size() != sigma.size()) throw ValidationError("graph and ordering differ in size");
  for (Node i = 0; i < g.size(); ++i) {
    bool ok = true;
    g.children(i).for_each([&](Node j) { ok = ok && sigma.position(i) < sigma.position(j); });
    if (!ok) return false;
  }
  return true;
}

std::vector<std::pair<Node, Node>> skeleton(const Dag& g) {
  std::vector<std::pair<Node, Node>> out;
  for (Node i = 0; i < g.size(); ++i) {
    for (Node j = i + 1; j < g.size(); ++j) {
      if (g.adjacent(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<std::tuple<Node, Node, Node>> v_structures(const Dag& g) {
  std::vector<std::tuple<Node, Node, Node>> out;
  for (Node j = 0; j < g.size(); ++j) {
    const auto pa = g.parents(j).members();
    for (std::size_t a = 0; a < pa.size(); ++a) {
      for (std::size_t b = a + 1; b < pa.size(); ++b) {
        if (!g.adjacent(pa[a], pa[b])) out.emplace_back(pa[a], j, pa[b]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> covered_edges(const Dag& g) {
  std::vector<Edge> out;
  for (const Edge& e : g.edges()) {
    NodeSet expected = g.parents(e.tail);
    expected.insert(e.tail);
    if (expected == g.parents(e.head)) out.push_back(e);
  }
  return out;
}

int hamming(const Dag& g, const Dag& h) {
  if (g.size() != h.size()) throw ValidationError("graphs differ in size");
  int d = 0;
  for (Node i = 0; i < g.size(); ++i) d += g.children(i).symmetric_difference_size(h.children(i));
  return d;
}

namespace {

int parse_int(std::string_view tok, std::string_view what) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\r' || tok.back() == '\t')) tok.remove_suffix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw IoError("malformed " + std::string(what) + ": '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

void write_edge_list(std::ostream& out, const Dag& g) {
  out << "p=" << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.tail + 1 << ',' << e.head + 1 << '\n';
}

Dag read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("p=", 0) != 0) throw IoError("edge list must start with 'p=<n>'");
  const int p = parse_int(std::string_view(line).substr(2), "node count");
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed edge line '" + line + "'");
    const int i = parse_int(std::string_view(line).substr(0, comma), "edge tail");
    const int j = parse_int(std::string_view(line).substr(comma + 1), "edge head");
    if (i < 1 || i > p || j < 1 || j > p) throw IoError("edge endpoint out of range in '" + line + "'");
    edges.push_back({i - 1, j - 1});
  }
  return Dag::from_edges(p, edges);
}

void write_adjacency_csv(std::ostream& out, const Dag& g) {
  for (Node i = 0; i < g.size(); ++i) {
    for (Node j = 0; j < g.size(); ++j) out << (j ? "," : "") << (g.has_edge(i, j) ? 1 : 0);
    out << '\n';
  }
}

Dag read_adjacency_csv(std::istream& in) {
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(parse_int(tok, "adjacency entry"));
    rows.push_back(std::move(row));
  }
  const int p = static_cast<int>(rows.size());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != p) throw IoError("adjacency matrix is not square");
    for (int j = 0; j < p; ++j) {
      if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) edges.push_back({i, j});
    }
  }
  return Dag::from_edges(p, edges);
}

std::string format_edges(const Dag& g) {
  std::string out = "{";
  bool first = true;
  for (const Edge& e : g.edges()) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(e.tail + 1) + "->" + std::to_string(e.head + 1);
  }
  return out + "}";
}

}  // namespace jod
