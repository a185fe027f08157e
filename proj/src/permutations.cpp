#include "jod/permutations.hpp"

#include <charconv>
#include <string>

#include "jod/error.hpp"

namespace jod {

Ordering::Ordering(std::vector<Node> nodes) : nodes_(std::move(nodes)), inverse_(nodes_.size(), -1) {
  const int p = size();
  for (int t = 0; t < p; ++t) {
    const Node v = nodes_[static_cast<std::size_t>(t)];
    if (v < 0 || v >= p) throw ValidationError("ordering label out of range: " + std::to_string(v + 1));
    if (inverse_[static_cast<std::size_t>(v)] != -1) {
      throw ValidationError("ordering repeats label " + std::to_string(v + 1));
    }
    inverse_[static_cast<std::size_t>(v)] = t;
  }
}

Ordering Ordering::identity(int p) {
  std::vector<Node> nodes(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) nodes[static_cast<std::size_t>(i)] = i;
  return Ordering(std::move(nodes));
}

Ordering Ordering::from_labels(std::span<const int> one_based) {
  std::vector<Node> nodes;
  nodes.reserve(one_based.size());
  for (int v : one_based) nodes.push_back(v - 1);
  return Ordering(std::move(nodes));
}

std::vector<int> Ordering::labels() const {
  std::vector<int> out;
  out.reserve(nodes_.size());
  for (Node v : nodes_) out.push_back(v + 1);
  return out;
}

Ordering Ordering::reversed() const { return Ordering(std::vector<Node>(nodes_.rbegin(), nodes_.rend())); }

NodeSet predecessors(const Ordering& sigma, Node j) {
  if (j < 0 || j >= sigma.size()) throw ValidationError("node label out of range");
  NodeSet out(sigma.size());
  const int pos = sigma.position(j);
  for (int t = 0; t < pos; ++t) out.insert(sigma.at(t));
  return out;
}

namespace {
void check_position(const Ordering& sigma, int pos) {
  if (pos < 0 || pos >= sigma.size()) throw ValidationError("position out of range: " + std::to_string(pos + 1));
}
}  // namespace

Ordering insert_move(const Ordering& sigma, int from, int to) {
  check_position(sigma, from);
  check_position(sigma, to);
  if (from == to) throw ValidationError("insert move needs distinct positions");
  std::vector<Node> nodes(sigma.nodes().begin(), sigma.nodes().end());
  const Node moved = nodes[static_cast<std::size_t>(from)];
  if (from > to) {
    for (int t = from; t > to; --t) nodes[static_cast<std::size_t>(t)] = nodes[static_cast<std::size_t>(t - 1)];
  } else {
    for (int t = from; t < to; ++t) nodes[static_cast<std::size_t>(t)] = nodes[static_cast<std::size_t>(t + 1)];
  }
  nodes[static_cast<std::size_t>(to)] = moved;
  return Ordering(std::move(nodes));
}

Ordering r2r_move(const Ordering& sigma, int i, int j) { return insert_move(sigma, j, i); }

Ordering adj_move(const Ordering& sigma, int i) {
  check_position(sigma, i);
  check_position(sigma, i + 1);
  return rts_move(sigma, i, i + 1);
}

Ordering rts_move(const Ordering& sigma, int i, int j) {
  check_position(sigma, i);
  check_position(sigma, j);
  if (i >= j) throw ValidationError("transposition needs i < j");
  std::vector<Node> nodes(sigma.nodes().begin(), sigma.nodes().end());
  std::swap(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
  return Ordering(std::move(nodes));
}

std::string_view to_string(Neighborhood n) {
  switch (n) {
    case Neighborhood::r2r: return "r2r";
    case Neighborhood::adj: return "adj";
    case Neighborhood::rts: return "rts";
  }
  return "?";
}

Neighborhood parse_neighborhood(std::string_view s) {
  if (s == "r2r") return Neighborhood::r2r;
  if (s == "adj") return Neighborhood::adj;
  if (s == "rts") return Neighborhood::rts;
  throw ValidationError("unknown neighborhood '" + std::string(s) + "' (expected r2r|adj|rts)");
}

Ordering Move::apply(const Ordering& sigma) const {
  switch (kind) {
    case Neighborhood::r2r: return insert_move(sigma, a, b);
    case Neighborhood::adj:
    case Neighborhood::rts: return rts_move(sigma, a, b);
  }
  return sigma;
}

std::size_t neighborhood_size(Neighborhood kind, int p) {
  if (p < 2) throw ValidationError("neighborhood needs p >= 2");
  const auto q = static_cast<std::size_t>(p);
  switch (kind) {
    case Neighborhood::r2r: return (q - 1) * (q - 1);
    case Neighborhood::adj: return q - 1;
    case Neighborhood::rts: return q * (q - 1) / 2;
  }
  return 0;
}

Move neighborhood_move(Neighborhood kind, int p, std::size_t index) {
  if (index >= neighborhood_size(kind, p)) throw ValidationError("neighborhood index out of range");
  switch (kind) {
    case Neighborhood::adj: {
      const int i = static_cast<int>(index);
      return {kind, i, i + 1};
    }
    case Neighborhood::rts: {
      // Row-major over pairs i < j.
      std::size_t rest = index;
      for (int i = 0; i < p - 1; ++i) {
        const auto row = static_cast<std::size_t>(p - 1 - i);
        if (rest < row) return {kind, i, i + 1 + static_cast<int>(rest)};
        rest -= row;
      }
      break;
    }
    case Neighborhood::r2r: {
      const std::size_t left = static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
      if (index < left) {
        // source s in 1..p-1 contributes s leftward targets 0..s-1.
        std::size_t rest = index;
        for (int s = 1; s < p; ++s) {
          if (rest < static_cast<std::size_t>(s)) return {kind, s, static_cast<int>(rest)};
          rest -= static_cast<std::size_t>(s);
        }
      } else {
        // source s in 0..p-3 contributes targets s+2..p-1.
        std::size_t rest = index - left;
        for (int s = 0; s + 2 < p; ++s) {
          const auto row = static_cast<std::size_t>(p - 2 - s);
          if (rest < row) return {kind, s, s + 2 + static_cast<int>(rest)};
          rest -= row;
        }
      }
      break;
    }
  }
  throw ValidationError("neighborhood index out of range");
}

std::vector<Ordering> neighborhood(Neighborhood kind, const Ordering& sigma) {
  const std::size_t n = neighborhood_size(kind, sigma.size());
  std::vector<Ordering> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(neighborhood_move(kind, sigma.size(), k).apply(sigma));
  return out;
}

std::vector<Ordering> r2r_left_neighborhood(const Ordering& sigma) {
  std::vector<Ordering> out;
  for (int s = 1; s < sigma.size(); ++s) {
    for (int t = 0; t < s; ++t) out.push_back(insert_move(sigma, s, t));
  }
  return out;
}

long long discordant_pairs(const Ordering& a, const Ordering& b) {
  if (a.size() != b.size()) throw ValidationError("orderings differ in length");
  long long d = 0;
  const int p = a.size();
  for (Node u = 0; u < p; ++u) {
    for (Node v = u + 1; v < p; ++v) {
      const bool in_a = a.position(u) < a.position(v);
      const bool in_b = b.position(u) < b.position(v);
      if (in_a != in_b) ++d;
    }
  }
  return d;
}

double kendall_tau(const Ordering& a, const Ordering& b) {
  const long long d = discordant_pairs(a, b);
  const long long p = a.size();
  const long long pairs = p * (p - 1) / 2;
  if (pairs == 0) return 1.0;
  return static_cast<double>(pairs - 2 * d) / static_cast<double>(pairs);
}

std::string format_ordering(const Ordering& sigma) {
  std::string out;
  for (int t = 0; t < sigma.size(); ++t) {
    if (t) out += ',';
    out += std::to_string(sigma.at(t) + 1);
  }
  return out;
}

Ordering parse_ordering(std::string_view text) {
  std::vector<int> labels;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(start, end - start);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '"')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '"' || tok.back() == '\r')) tok.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
      throw ValidationError("malformed ordering '" + std::string(text) + "'");
    }
    labels.push_back(v);
    start = end + 1;
  }
  return Ordering::from_labels(labels);
}

}  // namespace jod
