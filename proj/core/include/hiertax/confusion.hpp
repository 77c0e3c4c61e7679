#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiertax {

struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;  // row = true class, col = predicted

  std::uint64_t& at(std::size_t i, std::size_t j) { return counts[i * classes + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * classes + j]; }
  std::uint64_t row_sum(std::size_t i) const;
};

ConfusionMatrix confusion_matrix(const std::vector<std::uint32_t>& truths,
                                 const std::vector<std::uint32_t>& top1_predictions,
                                 std::size_t classes);

struct ConfusionEdge {
  std::uint32_t from = 0;  // true class
  std::uint32_t to = 0;    // predicted class
  double weight = 0.0;
};

struct ConfusionGraph {
  std::size_t vertices = 0;
  std::vector<ConfusionEdge> edges;
};

// Edge i->j when row-normalized CM(i,j) >= alpha (off-diagonal only). With
// absolute_counts the threshold applies to raw counts instead.
ConfusionGraph build_graph(const ConfusionMatrix& cm, double alpha,
                           bool absolute_counts = false);

enum class GroupMode { weak, strong, biconnected };

struct GroupSet {
  std::vector<std::vector<std::uint32_t>> groups;  // multi-vertex only
  std::vector<std::uint32_t> isolated;
};

GroupSet groups(const ConfusionGraph& graph, GroupMode mode);

// DOT digraph; group membership rendered as vertex colors, edge labels are
// weights to 3 decimals.
std::string export_dot(const ConfusionGraph& graph, const GroupSet& group_set,
                       const std::vector<std::string>& names = {});

std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& names = {});

}  // namespace hiertax
