#include "newsflow/network.hpp"

#include <cmath>
#include <limits>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow::network {

Eigen::MatrixXd rescale_ete(const Eigen::Ref<const Eigen::MatrixXd>& ete) {
  const Eigen::Index n = ete.rows();
  if (n != ete.cols()) throw ShapeMismatch("rescale_ete needs a square matrix");
  if (!ete.allFinite()) throw DataError("rescale_ete input has non-finite entries");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lo = std::min(lo, ete(i, j));
      hi = std::max(hi, ete(i, j));
    }
  }
  if (!(hi > lo)) throw DegenerateRange("off-diagonal entries are constant");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out(i, j) = (ete(i, j) - lo) / (hi - lo);
    }
  }
  return out;
}

DirectedGraph threshold_graph(const Eigen::Ref<const Eigen::MatrixXd>& rescaled,
                              std::span<const NodeInfo> nodes, double th) {
  const Eigen::Index n = rescaled.rows();
  if (n != rescaled.cols()) throw ShapeMismatch("threshold_graph needs a square matrix");
  if (static_cast<Eigen::Index>(nodes.size()) != n) {
    throw ShapeMismatch("node list does not match matrix dimension");
  }
  DirectedGraph graph;
  graph.nodes.assign(nodes.begin(), nodes.end());
  graph.threshold = th;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rescaled(i, j) >= th) {
        graph.edges.push_back(
            {static_cast<int>(j), static_cast<int>(i), rescaled(i, j)});
      }
    }
  }
  return graph;
}

DegreeRecord degrees(const DirectedGraph& graph) {
  DegreeRecord record;
  record.in_degree.assign(graph.nodes.size(), 0);
  record.out_degree.assign(graph.nodes.size(), 0);
  for (const Edge& e : graph.edges) {
    ++record.out_degree[static_cast<std::size_t>(e.src)];
    ++record.in_degree[static_cast<std::size_t>(e.dst)];
  }
  return record;
}

std::string OutDegreeRatio::str() const {
  switch (kind) {
    case Kind::finite:
      return format_double(value);
    case Kind::infinite:
      return "inf";
    case Kind::undefined:
      return "undefined";
  }
  return "undefined";
}

OutDegreeRatio relative_out_degree(const DirectedGraph& graph, RatioMode mode) {
  long polarity_nodes = 0;
  long return_nodes = 0;
  for (const NodeInfo& node : graph.nodes) {
    (node.cls == NodeClass::polarity ? polarity_nodes : return_nodes) += 1;
  }
  if (polarity_nodes == 0 || return_nodes == 0) {
    throw InvalidInput("relative_out_degree needs both node classes");
  }
  const DegreeRecord record = degrees(graph);
  OutDegreeRatio ratio;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    (graph.nodes[i].cls == NodeClass::polarity ? ratio.polarity_out
                                               : ratio.return_out) +=
        record.out_degree[i];
  }
  double num = static_cast<double>(ratio.polarity_out);
  double den = static_cast<double>(ratio.return_out);
  if (mode == RatioMode::per_node_mean) {
    num /= static_cast<double>(polarity_nodes);
    den /= static_cast<double>(return_nodes);
  }
  if (den == 0.0) {
    ratio.kind = num > 0.0 ? OutDegreeRatio::Kind::infinite
                           : OutDegreeRatio::Kind::undefined;
  } else {
    ratio.kind = OutDegreeRatio::Kind::finite;
    ratio.value = num / den;
  }
  return ratio;
}

SweepResult threshold_sweep(const Eigen::Ref<const Eigen::MatrixXd>& rescaled,
                            std::span<const NodeInfo> nodes,
                            std::span<const double> grid, RatioMode mode) {
  SweepResult result;
  result.points.reserve(grid.size());
  for (double th : grid) {
    const DirectedGraph graph = threshold_graph(rescaled, nodes, th);
    SweepPoint point;
    point.th = th;
    point.edges = graph.edges.size();
    point.ratio = relative_out_degree(graph, mode);
    // Argmax over finite ratios only; ties break toward the largest threshold.
    if (point.ratio.kind == OutDegreeRatio::Kind::finite &&
        (!result.argmax || point.ratio.value > result.argmax->ratio.value ||
         (point.ratio.value == result.argmax->ratio.value &&
          point.th >= result.argmax->th))) {
      result.argmax = point;
    }
    result.points.push_back(point);
  }
  return result;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  grid.reserve(101);
  for (int i = 0; i <= 100; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  return grid;
}

}  // namespace newsflow::network
