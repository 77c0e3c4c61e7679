#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hiertax {

using NodeId = std::uint32_t;
using PathId = std::uint32_t;

// Depth classifiers reserve this label for paths that end above the depth.
// It is outside the NodeId space and never appears in the node table.
inline constexpr std::uint32_t kNoneLabel = 0xffffffffu;

struct TaxonomyNode {
  NodeId id;
  std::string name;
  std::optional<NodeId> parent;
  std::uint32_t depth;  // 1-based, root nodes have depth 1
};

// Rooted category tree. Node identity is (parent, name), so equal names under
// different parents get distinct ids. A path is identified by its final node;
// a path may be a strict prefix of another path.
class TaxonomyTree {
 public:
  static TaxonomyTree build(const std::vector<std::vector<std::string>>& paths);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t path_count() const { return paths_.size(); }
  std::uint32_t max_depth() const { return max_depth_; }

  const TaxonomyNode& node(NodeId id) const;
  std::vector<NodeId> nodes_at_depth(std::uint32_t k) const;

  // Ordered root-first node list of a path; its size is the path depth.
  const std::vector<NodeId>& path_nodes(PathId id) const;
  std::optional<NodeId> node_label_at_depth(PathId id, std::uint32_t k) const;

  std::vector<std::string> path_names(PathId id) const;
  std::optional<PathId> find_path(const std::vector<std::string>& names) const;

  std::string to_json() const;
  static TaxonomyTree from_json(const std::string& text);

 private:
  std::vector<TaxonomyNode> nodes_;
  std::vector<std::vector<NodeId>> paths_;
  std::uint32_t max_depth_ = 0;

  void rebuild_lookup();
  // child lookup key: parent id (kNoneLabel for roots) + name
  std::map<std::pair<std::uint64_t, std::string>, NodeId> child_lookup_;
  std::optional<NodeId> find_child(std::optional<NodeId> parent, const std::string& name) const;
  std::vector<std::optional<PathId>> node_to_path_;
};

}  // namespace hiertax
