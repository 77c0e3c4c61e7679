#include "hiertax/taxonomy.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"

namespace hiertax {

using json = nlohmann::json;

namespace {
constexpr int kFormatVersion = 1;

std::uint64_t parent_key(std::optional<NodeId> parent) {
  return parent ? static_cast<std::uint64_t>(*parent) : static_cast<std::uint64_t>(kNoneLabel);
}
}  // namespace

TaxonomyTree TaxonomyTree::build(const std::vector<std::vector<std::string>>& paths) {
  if (paths.empty()) throw Error("empty_taxonomy", "no paths given");
  TaxonomyTree tree;
  for (const auto& names : paths) {
    if (names.empty()) throw Error("empty_path", "a taxonomy path must have length >= 1");
    std::optional<NodeId> parent;
    NodeId last = 0;
    for (std::size_t depth = 0; depth < names.size(); ++depth) {
      auto key = std::make_pair(parent_key(parent), names[depth]);
      auto it = tree.child_lookup_.find(key);
      if (it == tree.child_lookup_.end()) {
        NodeId id = static_cast<NodeId>(tree.nodes_.size());
        tree.nodes_.push_back({id, names[depth], parent, static_cast<std::uint32_t>(depth + 1)});
        tree.child_lookup_.emplace(key, id);
        last = id;
      } else {
        last = it->second;
      }
      parent = last;
    }
    // one path per end node, deduplicated
    if (tree.node_to_path_.size() < tree.nodes_.size()) tree.node_to_path_.resize(tree.nodes_.size());
    if (!tree.node_to_path_[last]) {
      std::vector<NodeId> chain;
      std::optional<NodeId> cur = last;
      while (cur) {
        chain.push_back(*cur);
        cur = tree.nodes_[*cur].parent;
      }
      std::reverse(chain.begin(), chain.end());
      tree.node_to_path_[last] = static_cast<PathId>(tree.paths_.size());
      tree.paths_.push_back(std::move(chain));
    }
  }
  tree.node_to_path_.resize(tree.nodes_.size());
  for (const auto& n : tree.nodes_) tree.max_depth_ = std::max(tree.max_depth_, n.depth);
  return tree;
}

const TaxonomyNode& TaxonomyTree::node(NodeId id) const {
  if (id >= nodes_.size()) throw Error("unknown_node", "node id " + std::to_string(id));
  return nodes_[id];
}

std::vector<NodeId> TaxonomyTree::nodes_at_depth(std::uint32_t k) const {
  if (k < 1 || k > max_depth_) throw Error("depth_out_of_range", "depth " + std::to_string(k));
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.depth == k) out.push_back(n.id);
  return out;
}

const std::vector<NodeId>& TaxonomyTree::path_nodes(PathId id) const {
  if (id >= paths_.size()) throw Error("unknown_path", "path id " + std::to_string(id));
  return paths_[id];
}

std::optional<NodeId> TaxonomyTree::node_label_at_depth(PathId id, std::uint32_t k) const {
  const auto& chain = path_nodes(id);
  if (k < 1 || k > max_depth_) throw Error("depth_out_of_range", "depth " + std::to_string(k));
  if (k > chain.size()) return std::nullopt;  // path ended before depth k
  return chain[k - 1];
}

std::vector<std::string> TaxonomyTree::path_names(PathId id) const {
  std::vector<std::string> out;
  for (NodeId n : path_nodes(id)) out.push_back(nodes_[n].name);
  return out;
}

std::optional<NodeId> TaxonomyTree::find_child(std::optional<NodeId> parent,
                                               const std::string& name) const {
  auto it = child_lookup_.find(std::make_pair(parent_key(parent), name));
  if (it == child_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<PathId> TaxonomyTree::find_path(const std::vector<std::string>& names) const {
  std::optional<NodeId> cur;
  for (const auto& name : names) {
    cur = find_child(cur, name);
    if (!cur) return std::nullopt;
  }
  return node_to_path_[*cur];
}

void TaxonomyTree::rebuild_lookup() {
  child_lookup_.clear();
  node_to_path_.assign(nodes_.size(), std::nullopt);
  for (const auto& n : nodes_)
    child_lookup_.emplace(std::make_pair(parent_key(n.parent), n.name), n.id);
  for (PathId p = 0; p < paths_.size(); ++p) node_to_path_[paths_[p].back()] = p;
  max_depth_ = 0;
  for (const auto& n : nodes_) max_depth_ = std::max(max_depth_, n.depth);
}

std::string TaxonomyTree::to_json() const {
  json j;
  j["format_version"] = kFormatVersion;
  json nodes = json::array();
  for (const auto& n : nodes_) {
    json e;
    e["id"] = n.id;
    e["name"] = n.name;
    if (n.parent)
      e["parent"] = *n.parent;
    else
      e["parent"] = nullptr;
    e["depth"] = n.depth;
    nodes.push_back(e);
  }
  j["nodes"] = nodes;
  json paths = json::array();
  for (PathId p = 0; p < paths_.size(); ++p) paths.push_back(paths_[p]);
  j["paths"] = paths;
  return j.dump(2);
}

TaxonomyTree TaxonomyTree::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("taxonomy_parse_error", e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion)
    throw Error("taxonomy_parse_error", "unsupported format_version");
  TaxonomyTree tree;
  for (const auto& e : j.at("nodes")) {
    TaxonomyNode n;
    n.id = e.at("id").get<NodeId>();
    n.name = e.at("name").get<std::string>();
    if (!e.at("parent").is_null()) n.parent = e.at("parent").get<NodeId>();
    n.depth = e.at("depth").get<std::uint32_t>();
    if (n.id != tree.nodes_.size()) throw Error("taxonomy_parse_error", "non-dense node ids");
    tree.nodes_.push_back(n);
  }
  for (const auto& p : j.at("paths")) tree.paths_.push_back(p.get<std::vector<NodeId>>());
  tree.rebuild_lookup();
  return tree;
}

}  // namespace hiertax
