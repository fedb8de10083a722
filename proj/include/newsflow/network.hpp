#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace newsflow::network {

enum class NodeClass { returns, polarity };

struct NodeInfo {
  std::string label;
  NodeClass cls = NodeClass::returns;
};

/// Min-max rescaling of the off-diagonal entries to [0, 1]; the diagonal
/// stays 0. Throws DegenerateRange when all off-diagonal entries are equal.
Eigen::MatrixXd rescale_ete(const Eigen::Ref<const Eigen::MatrixXd>& ete);

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;
};

struct DirectedGraph {
  std::vector<NodeInfo> nodes;
  std::vector<Edge> edges;
  double threshold = 0.0;
};

/// Edge j -> i exists iff rescaled(i, j) >= th and i != j.
DirectedGraph threshold_graph(const Eigen::Ref<const Eigen::MatrixXd>& rescaled,
                              std::span<const NodeInfo> nodes, double th);

struct DegreeRecord {
  std::vector<int> in_degree;
  std::vector<int> out_degree;
};

DegreeRecord degrees(const DirectedGraph& graph);

/// Out-degree of polarity nodes over out-degree of return nodes. A positive
/// numerator over a zero denominator is the `infinite` sentinel; 0/0 is
/// `undefined`. Both are excluded from sweep argmax selection and serialized
/// explicitly ("inf" / "undefined").
struct OutDegreeRatio {
  enum class Kind { finite, infinite, undefined };
  Kind kind = Kind::undefined;
  double value = 0.0;  // meaningful only when kind == finite
  long polarity_out = 0;
  long return_out = 0;

  std::string str() const;
};

enum class RatioMode { class_sum, per_node_mean };

OutDegreeRatio relative_out_degree(const DirectedGraph& graph,
                                   RatioMode mode = RatioMode::class_sum);

struct SweepPoint {
  double th = 0.0;
  OutDegreeRatio ratio;
  std::size_t edges = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Highest finite ratio; ties broken toward the largest threshold. Empty
  /// when every point is a sentinel.
  std::optional<SweepPoint> argmax;
};

SweepResult threshold_sweep(const Eigen::Ref<const Eigen::MatrixXd>& rescaled,
                            std::span<const NodeInfo> nodes,
                            std::span<const double> grid,
                            RatioMode mode = RatioMode::class_sum);

/// 0.00, 0.01, ..., 1.00.
std::vector<double> default_threshold_grid();

}  // namespace newsflow::network
