#include "hiertax/confusion.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "hiertax/error.hpp"

namespace hiertax {

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes; ++j) s += at(i, j);
  return s;
}

ConfusionMatrix confusion_matrix(const std::vector<std::uint32_t>& truths,
                                 const std::vector<std::uint32_t>& top1_predictions,
                                 std::size_t classes) {
  if (truths.size() != top1_predictions.size())
    throw Error("shape_mismatch", "truths and predictions differ in length");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes * classes, 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= classes || top1_predictions[i] >= classes)
      throw Error("label_out_of_range", "case " + std::to_string(i));
    ++cm.at(truths[i], top1_predictions[i]);
  }
  return cm;
}

ConfusionGraph build_graph(const ConfusionMatrix& cm, double alpha, bool absolute_counts) {
  if (!absolute_counts && (alpha < 0.0 || alpha > 1.0))
    throw Error("bad_config", "alpha must be in [0,1] in probability mode");
  ConfusionGraph g;
  g.vertices = cm.classes;
  for (std::size_t i = 0; i < cm.classes; ++i) {
    const std::uint64_t total = cm.row_sum(i);
    for (std::size_t j = 0; j < cm.classes; ++j) {
      if (i == j) continue;
      const std::uint64_t count = cm.at(i, j);
      if (count == 0) continue;
      if (absolute_counts) {
        if (static_cast<double>(count) >= alpha)
          g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<double>(count)});
      } else {
        const double conf = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
        if (conf >= alpha && conf > 0.0)
          g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), conf});
      }
    }
  }
  return g;
}

namespace {

std::vector<std::vector<std::uint32_t>> undirected_adj(const ConfusionGraph& g) {
  std::vector<std::set<std::uint32_t>> adj(g.vertices);
  for (const auto& e : g.edges) {
    adj[e.from].insert(e.to);
    adj[e.to].insert(e.from);
  }
  std::vector<std::vector<std::uint32_t>> out(g.vertices);
  for (std::size_t v = 0; v < g.vertices; ++v) out[v].assign(adj[v].begin(), adj[v].end());
  return out;
}

GroupSet weak_components(const ConfusionGraph& g) {
  auto adj = undirected_adj(g);
  GroupSet result;
  std::vector<bool> seen(g.vertices, false);
  for (std::uint32_t start = 0; start < g.vertices; ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> comp, stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      std::uint32_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (std::uint32_t w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    if (comp.size() > 1)
      result.groups.push_back(std::move(comp));
    else
      result.isolated.push_back(comp[0]);
  }
  return result;
}

// Tarjan strongly connected components, iterative.
GroupSet strong_components(const ConfusionGraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.vertices);
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);

  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> index(g.vertices, kUnset), low(g.vertices, 0);
  std::vector<bool> on_stack(g.vertices, false);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0;
  GroupSet result;

  struct Frame {
    std::uint32_t v;
    std::size_t child;
  };
  for (std::uint32_t root = 0; root < g.vertices; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      if (child < adj[v].size()) {
        std::uint32_t w = adj[v][child++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<std::uint32_t> comp;
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != v);
          std::sort(comp.begin(), comp.end());
          if (comp.size() > 1)
            result.groups.push_back(std::move(comp));
          else
            result.isolated.push_back(comp[0]);
        }
        std::uint32_t finished = v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
      }
    }
  }
  std::sort(result.isolated.begin(), result.isolated.end());
  return result;
}

// Biconnected components of the undirected projection (Hopcroft-Tarjan).
// Articulation vertices may appear in several groups.
GroupSet biconnected_components(const ConfusionGraph& g) {
  auto adj = undirected_adj(g);
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> index(g.vertices, kUnset), low(g.vertices, 0),
      parent(g.vertices, kUnset);
  std::uint32_t counter = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_stack;
  GroupSet result;
  std::vector<bool> in_group(g.vertices, false);

  auto emit = [&](std::size_t keep) {
    std::set<std::uint32_t> verts;
    while (edge_stack.size() > keep) {
      verts.insert(edge_stack.back().first);
      verts.insert(edge_stack.back().second);
      edge_stack.pop_back();
    }
    if (verts.size() > 1) {
      std::vector<std::uint32_t> comp(verts.begin(), verts.end());
      for (std::uint32_t v : comp) in_group[v] = true;
      result.groups.push_back(std::move(comp));
    }
  };

  struct Frame {
    std::uint32_t v;
    std::size_t child;
    std::size_t stack_mark;
  };
  for (std::uint32_t root = 0; root < g.vertices; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> frames{{root, 0, edge_stack.size()}};
    index[root] = low[root] = counter++;
    while (!frames.empty()) {
      auto& fr = frames.back();
      const std::uint32_t v = fr.v;
      if (fr.child < adj[v].size()) {
        std::uint32_t w = adj[v][fr.child++];
        if (index[w] == kUnset) {
          parent[w] = v;
          edge_stack.emplace_back(v, w);
          index[w] = low[w] = counter++;
          frames.push_back({w, 0, edge_stack.size() - 1});
        } else if (w != parent[v] && index[w] < index[v]) {
          edge_stack.emplace_back(v, w);
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        const std::uint32_t finished = v;
        const std::size_t mark = fr.stack_mark;
        frames.pop_back();
        if (!frames.empty()) {
          const std::uint32_t p = frames.back().v;
          low[p] = std::min(low[p], low[finished]);
          if (low[finished] >= index[p]) emit(mark);
        }
      }
    }
  }
  for (std::uint32_t v = 0; v < g.vertices; ++v)
    if (!in_group[v]) result.isolated.push_back(v);
  return result;
}

}  // namespace

GroupSet groups(const ConfusionGraph& graph, GroupMode mode) {
  switch (mode) {
    case GroupMode::weak:
      return weak_components(graph);
    case GroupMode::strong:
      return strong_components(graph);
    case GroupMode::biconnected:
      return biconnected_components(graph);
  }
  throw Error("bad_config", "unknown group mode");
}

std::string export_dot(const ConfusionGraph& graph, const GroupSet& group_set,
                       const std::vector<std::string>& names) {
  static const char* kPalette[] = {"lightblue", "lightgreen", "lightsalmon", "gold",
                                   "plum",      "palegreen",  "lightpink",   "khaki"};
  std::vector<int> group_of(graph.vertices, -1);
  for (std::size_t gi = 0; gi < group_set.groups.size(); ++gi)
    for (std::uint32_t v : group_set.groups[gi]) group_of[v] = static_cast<int>(gi);

  auto label = [&](std::uint32_t v) {
    return v < names.size() ? names[v] : "c" + std::to_string(v);
  };

  std::ostringstream out;
  out << "digraph confusion {\n";
  for (std::uint32_t v = 0; v < graph.vertices; ++v) {
    out << "  n" << v << " [label=\"" << label(v) << "\"";
    if (group_of[v] >= 0)
      out << ", style=filled, fillcolor=\"" << kPalette[group_of[v] % 8] << "\"";
    out << "];\n";
  }
  char buf[32];
  for (const auto& e : graph.edges) {
    std::snprintf(buf, sizeof(buf), "%.3f", e.weight);
    out << "  n" << e.from << " -> n" << e.to << " [label=\"" << buf << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& names) {
  auto label = [&](std::size_t v) { return v < names.size() ? names[v] : "c" + std::to_string(v); };
  std::ostringstream out;
  out << "true,predicted,count,conf\n";
  char buf[32];
  for (std::size_t i = 0; i < cm.classes; ++i) {
    const std::uint64_t total = cm.row_sum(i);
    for (std::size_t j = 0; j < cm.classes; ++j) {
      if (cm.at(i, j) == 0) continue;
      const double conf = total ? static_cast<double>(cm.at(i, j)) / static_cast<double>(total) : 0.0;
      std::snprintf(buf, sizeof(buf), "%.6f", conf);
      out << label(i) << ',' << label(j) << ',' << cm.at(i, j) << ',' << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace hiertax
