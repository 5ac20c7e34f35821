#include "stlfd/specgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace stlfd {

std::string_view to_string(SpecKind kind) { return kind == SpecKind::Hard ? "hard" : "soft"; }

std::vector<double> softmax(const std::vector<double>& xs, double temperature) {
  if (xs.empty()) return {};
  if (!(temperature > 0)) throw ValidationError("softmax temperature must be positive");
  const double top = *std::max_element(xs.begin(), xs.end());
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = std::exp((xs[i] - top) / temperature);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

// Returns a cycle (first node repeated at the end) or an empty vector.
std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = succ.size();
  enum Color : char { White, Grey, Black };
  std::vector<Color> color(n, White);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != White) continue;
    // Iterative DFS; stack holds (node, next successor position).
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next == succ[u].size()) {
        color[u] = Black;
        stack.pop_back();
        continue;
      }
      const std::size_t v = succ[u][next++];
      if (color[v] == Grey) {
        std::vector<std::size_t> cycle{v};
        for (std::size_t w = u; w != v; w = parent[w]) cycle.push_back(w);
        cycle.push_back(v);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (color[v] == White) {
        color[v] = Grey;
        parent[v] = u;
        stack.emplace_back(v, 0);
      }
    }
  }
  return {};
}

}  // namespace

SpecGraph SpecGraph::build(std::vector<SpecNode> nodes, std::vector<SpecEdge> edges,
                           double temperature) {
  SpecGraph g;
  g.temperature_ = temperature;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i].name, i).second) {
      throw GraphError("duplicate specification name '" + nodes[i].name + "'");
    }
  }
  const std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> succ(n);
  g.preds_.assign(n, {});
  for (const auto& e : edges) {
    auto from = index.find(e.from);
    auto to = index.find(e.to);
    if (from == index.end()) throw GraphError("edge references unknown specification '" + e.from + "'");
    if (to == index.end()) throw GraphError("edge references unknown specification '" + e.to + "'");
    if (std::find(succ[from->second].begin(), succ[from->second].end(), to->second) !=
        succ[from->second].end()) {
      continue;
    }
    succ[from->second].push_back(to->second);
    g.preds_[to->second].push_back(from->second);
  }

  if (auto cycle = find_cycle(succ); !cycle.empty()) {
    std::vector<std::string> names;
    std::string text;
    for (std::size_t i : cycle) {
      names.push_back(nodes[i].name);
      text += (text.empty() ? "" : " -> ") + nodes[i].name;
    }
    throw GraphError("dependency cycle: " + text, std::move(names));
  }

  g.ancestors_.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack(g.preds_[v].begin(), g.preds_[v].end());
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = 1;
      for (std::size_t p : g.preds_[u]) stack.push_back(p);
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (seen[u]) g.ancestors_[v].push_back(u);
    }
    if (nodes[v].kind == SpecKind::Hard) {
      for (std::size_t u : g.ancestors_[v]) {
        if (nodes[u].kind == SpecKind::Soft) {
          throw GraphError("soft specification '" + nodes[u].name +
                           "' cannot be a prerequisite of hard specification '" +
                           nodes[v].name + "'");
        }
      }
    }
  }

  g.raw_weights_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    g.raw_weights_[v] = static_cast<double>(n) - static_cast<double>(g.ancestors_[v].size());
  }
  g.softmax_ = softmax(g.raw_weights_, temperature);
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  return g;
}

std::size_t SpecGraph::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  throw ValidationError("unknown specification '" + std::string(name) + "'");
}

std::vector<std::size_t> SpecGraph::hard_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == SpecKind::Hard) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SpecGraph::soft_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == SpecKind::Soft) out.push_back(i);
  }
  return out;
}

const std::vector<std::size_t>& SpecGraph::ancestors(std::string_view name) const {
  return ancestors_[index_of(name)];
}

double SpecGraph::raw_weight(std::string_view name) const { return raw_weights_[index_of(name)]; }

std::map<std::string, double> SpecGraph::softmax_weights() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[nodes_[i].name] = softmax_[i];
  return out;
}

std::vector<std::string> SpecGraph::topological_order() const {
  const std::size_t n = nodes_.size();
  std::vector<std::size_t> missing(n);
  for (std::size_t v = 0; v < n; ++v) missing[v] = preds_[v].size();
  std::vector<char> done(n, 0);
  std::vector<std::string> order;
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || missing[v] != 0) continue;
      if (pick == n || (nodes_[v].kind == SpecKind::Hard && nodes_[pick].kind == SpecKind::Soft)) {
        pick = v;
      }
    }
    done[pick] = 1;
    order.push_back(nodes_[pick].name);
    for (std::size_t v = 0; v < n; ++v) {
      if (std::find(preds_[v].begin(), preds_[v].end(), pick) != preds_[v].end()) --missing[v];
    }
  }
  return order;
}

SpecGraph SpecGraph::bind(const stl::ParamMap& params) const {
  SpecGraph out = *this;
  for (auto& node : out.nodes_) node.formula = node.formula.bind(params);
  return out;
}

}  // namespace stlfd
