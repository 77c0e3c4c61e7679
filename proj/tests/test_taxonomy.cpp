#include <doctest.h>

#include <set>

#include "hiertax/error.hpp"
#include "hiertax/taxonomy.hpp"

using namespace hiertax;

TEST_SUITE("taxonomy") {

TEST_CASE("build assigns first-seen ids and dedups paths") {
  auto tree = TaxonomyTree::build({{"a", "b"}, {"a", "c"}});
  CHECK(tree.node_count() == 3);
  CHECK(tree.path_count() == 2);

  auto dedup = TaxonomyTree::build({{"a"}, {"a"}});
  CHECK(dedup.node_count() == 1);
  CHECK(dedup.path_count() == 1);
}

TEST_CASE("same name under different parents gets distinct ids") {
  auto tree = TaxonomyTree::build({{"a", "b"}, {"x", "b"}});
  CHECK(tree.node_count() == 4);
  auto p1 = tree.find_path({"a", "b"});
  auto p2 = tree.find_path({"x", "b"});
  REQUIRE(p1);
  REQUIRE(p2);
  CHECK(tree.path_nodes(*p1).back() != tree.path_nodes(*p2).back());
}

TEST_CASE("build rejects empty input") {
  CHECK_THROWS_AS(TaxonomyTree::build({}), Error);
  CHECK_THROWS_AS(TaxonomyTree::build({{}}), Error);
}

TEST_CASE("prefix paths are allowed") {
  auto tree = TaxonomyTree::build({{"a"}, {"a", "b"}});
  CHECK(tree.path_count() == 2);
  CHECK(tree.node_count() == 2);
}

TEST_CASE("nodes_at_depth") {
  auto tree = TaxonomyTree::build({{"a", "b"}, {"a", "c"}});
  CHECK(tree.nodes_at_depth(1).size() == 1);
  CHECK(tree.nodes_at_depth(2).size() == 2);
  CHECK_THROWS_AS(tree.nodes_at_depth(3), Error);
  CHECK_THROWS_AS(tree.nodes_at_depth(0), Error);

  auto chain = TaxonomyTree::build({{"a", "b", "c"}});
  auto leaf = chain.nodes_at_depth(3);
  REQUIRE(leaf.size() == 1);
  CHECK(chain.node(leaf[0]).name == "c");
}

TEST_CASE("path_nodes size equals depth and siblings share their prefix") {
  auto tree = TaxonomyTree::build({{"a", "b", "c"}, {"a", "b", "d"}, {"e"}});
  auto p1 = *tree.find_path({"a", "b", "c"});
  auto p2 = *tree.find_path({"a", "b", "d"});
  CHECK(tree.path_nodes(p1).size() == 3);
  CHECK(tree.path_nodes(*tree.find_path({"e"})).size() == 1);

  std::set<NodeId> s1(tree.path_nodes(p1).begin(), tree.path_nodes(p1).end());
  std::set<NodeId> s2(tree.path_nodes(p2).begin(), tree.path_nodes(p2).end());
  std::set<NodeId> inter;
  for (NodeId n : s1)
    if (s2.count(n)) inter.insert(n);
  CHECK(inter.size() == 2);  // a and a/b
  CHECK_THROWS_AS(tree.path_nodes(99), Error);
}

TEST_CASE("node_label_at_depth returns NONE past the path end") {
  auto tree = TaxonomyTree::build({{"a", "b"}, {"a", "b", "c"}});
  auto short_path = *tree.find_path({"a", "b"});
  CHECK(tree.node_label_at_depth(short_path, 2).has_value());
  CHECK_FALSE(tree.node_label_at_depth(short_path, 3).has_value());
  CHECK(tree.node_label_at_depth(short_path, 1).has_value());
  CHECK(tree.node(*tree.node_label_at_depth(short_path, 1)).depth == 1);
}

TEST_CASE("depth union partitions the node table") {
  auto tree = TaxonomyTree::build({{"a", "b", "c"}, {"a", "d"}, {"e", "f"}});
  std::set<NodeId> all;
  std::size_t total = 0;
  for (std::uint32_t k = 1; k <= tree.max_depth(); ++k) {
    auto nodes = tree.nodes_at_depth(k);
    total += nodes.size();
    all.insert(nodes.begin(), nodes.end());
  }
  CHECK(total == tree.node_count());   // disjoint
  CHECK(all.size() == tree.node_count());
}

TEST_CASE("label-at-depth is always a member of path_nodes") {
  auto tree = TaxonomyTree::build({{"a", "b", "c"}, {"a", "d"}, {"e"}});
  for (PathId p = 0; p < tree.path_count(); ++p) {
    const auto& nodes = tree.path_nodes(p);
    for (std::uint32_t k = 1; k <= nodes.size(); ++k) {
      auto label = tree.node_label_at_depth(p, k);
      REQUIRE(label);
      CHECK(std::find(nodes.begin(), nodes.end(), *label) != nodes.end());
    }
  }
}

TEST_CASE("serialization round-trip is the identity") {
  auto tree = TaxonomyTree::build({{"a", "b", "c"}, {"a", "d"}, {"e", "f"}, {"a", "b"}});
  auto restored = TaxonomyTree::from_json(tree.to_json());
  CHECK(restored.to_json() == tree.to_json());
  CHECK(restored.node_count() == tree.node_count());
  CHECK(restored.path_count() == tree.path_count());
  CHECK(restored.find_path({"a", "b", "c"}) == tree.find_path({"a", "b", "c"}));
}

}  // TEST_SUITE
