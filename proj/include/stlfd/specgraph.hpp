#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stlfd/error.hpp"
#include "stlfd/stl/formula.hpp"
#include "stlfd/stl/robustness.hpp"

namespace stlfd {

enum class SpecKind { Hard, Soft };

std::string_view to_string(SpecKind kind);

struct SpecNode {
  std::string name;
  stl::Formula formula;
  SpecKind kind = SpecKind::Soft;
  stl::Squash squash{};
};

// `to` depends on `from`.
struct SpecEdge {
  std::string from;
  std::string to;
};

class GraphError : public ValidationError {
 public:
  GraphError(std::string message, std::vector<std::string> cycle = {})
      : ValidationError(std::move(message)), cycle_(std::move(cycle)) {}
  // Witness cycle when the graph is cyclic, first node repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

// Specifications arranged as a DAG. Node weight is |nodes| - |ancestors|
// and the softmax over those weights prioritises specs with fewer
// prerequisites.
class SpecGraph {
 public:
  SpecGraph() = default;

  // Throws GraphError on duplicate names, dangling edges, cycles, or a soft
  // spec that is an ancestor of a hard one.
  static SpecGraph build(std::vector<SpecNode> nodes, std::vector<SpecEdge> edges,
                         double temperature = 1.0);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<SpecNode>& nodes() const { return nodes_; }
  const std::vector<SpecEdge>& edges() const { return edges_; }
  const SpecNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t index_of(std::string_view name) const;
  double temperature() const { return temperature_; }

  std::vector<std::size_t> hard_indices() const;
  std::vector<std::size_t> soft_indices() const;

  // Indices of every node with a path into `name`, ascending.
  const std::vector<std::size_t>& ancestors(std::string_view name) const;
  double raw_weight(std::string_view name) const;
  const std::vector<double>& raw_weights() const { return raw_weights_; }
  // Softmax of the raw weights, aligned with nodes().
  const std::vector<double>& weights() const { return softmax_; }
  std::map<std::string, double> softmax_weights() const;

  // Kahn order; among ready nodes hard specs come first, then input order.
  std::vector<std::string> topological_order() const;

  // Same graph with every formula's parameters substituted.
  SpecGraph bind(const stl::ParamMap& params) const;

 private:
  std::vector<SpecNode> nodes_;
  std::vector<SpecEdge> edges_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> ancestors_;
  std::vector<double> raw_weights_;
  std::vector<double> softmax_;
  double temperature_ = 1.0;
};

std::vector<double> softmax(const std::vector<double>& xs, double temperature = 1.0);

}  // namespace stlfd
