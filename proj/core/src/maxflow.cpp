#include "cubecut/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cubecut {
namespace {

constexpr std::int64_t kNoParent = -1;  // free node or orphan
constexpr std::int64_t kRoot = -2;      // terminal at the root of its tree

enum class Tree : std::uint8_t { free, source, sink };

// Residual graph in compressed adjacency form. Residual arc e runs from
// tail(e) to head(e); e ^ 1 is its sister.
class ResidualGraph {
 public:
  explicit ResidualGraph(const FlowNetwork& net) : net_(net) {
    const std::size_t n = net.node_count;
    std::vector<std::uint32_t> degree(n + 1, 0);
    for (const Arc& a : net.arcs) {
      if (a.from >= n || a.to >= n) throw std::invalid_argument("arc endpoint out of range");
      if (std::isnan(a.capacity) || a.capacity < 0.0)
        throw std::invalid_argument("negative capacity");
      if (a.from == a.to) continue;
      ++degree[a.from];
      ++degree[a.to];
    }
    first_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) first_[v + 1] = first_[v] + degree[v];
    out_.resize(first_[n]);
    std::vector<std::uint32_t> fill(first_.begin(), first_.end() - 1);
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      const Arc& arc = net.arcs[a];
      if (arc.from == arc.to) continue;
      out_[fill[arc.from]++] = static_cast<std::uint32_t>(2 * a);
      out_[fill[arc.to]++] = static_cast<std::uint32_t>(2 * a + 1);
    }
  }

  std::span<const std::uint32_t> out(std::uint32_t v) const {
    return {out_.data() + first_[v], out_.data() + first_[v + 1]};
  }

  std::uint32_t head(std::size_t e) const {
    const Arc& a = net_.arcs[e >> 1];
    return (e & 1) ? a.from : a.to;
  }

 private:
  const FlowNetwork& net_;
  std::vector<std::uint32_t> first_;
  std::vector<std::uint32_t> out_;
};

class BkSolver {
 public:
  explicit BkSolver(const FlowNetwork& net)
      : net_(net),
        graph_(net),
        tree_(net.node_count, Tree::free),
        parent_(net.node_count, kNoParent),
        timestamp_(net.node_count, 0),
        dist_(net.node_count, 0),
        queued_(net.node_count, 0) {
    state_.residual.resize(2 * net.arcs.size());
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      state_.residual[2 * a] = net.arcs[a].capacity;
      state_.residual[2 * a + 1] = 0.0;
    }
  }

  FlowState run() {
    if (net_.source == net_.sink) throw std::invalid_argument("source equals sink");
    plant(net_.source, Tree::source);
    plant(net_.sink, Tree::sink);

    std::int64_t current = -1;
    while (true) {
      const std::int64_t middle = grow(current);
      if (middle < 0) break;
      ++time_;
      augment(static_cast<std::size_t>(middle));
      adopt();
    }
    return std::move(state_);
  }

 private:
  double& res(std::size_t e) { return state_.residual[e]; }

  void plant(std::uint32_t root, Tree tree) {
    tree_[root] = tree;
    parent_[root] = kRoot;
    dist_[root] = 0;
    activate(root);
  }

  void activate(std::uint32_t v) {
    if (queued_[v]) return;
    queued_[v] = 1;
    active_.push_back(v);
  }

  // Returns a residual arc from the source tree into the sink tree, or -1
  // once no augmenting path remains. `current` keeps the node being expanded
  // so that it is revisited after an augmentation.
  std::int64_t grow(std::int64_t& current) {
    while (true) {
      if (current < 0 || tree_[static_cast<std::size_t>(current)] == Tree::free) {
        current = -1;
        while (!active_.empty()) {
          const std::uint32_t v = active_.front();
          active_.pop_front();
          queued_[v] = 0;
          if (tree_[v] != Tree::free) {
            current = v;
            break;
          }
        }
        if (current < 0) return -1;
      }

      const auto p = static_cast<std::uint32_t>(current);
      const bool source_side = tree_[p] == Tree::source;
      for (const std::uint32_t e : graph_.out(p)) {
        // Capacity in the tree's growth direction: p -> q for the source
        // tree, q -> p for the sink tree.
        const double cap = source_side ? res(e) : res(e ^ 1u);
        if (cap <= kResidualEpsilon) continue;
        const std::uint32_t q = graph_.head(e);
        if (tree_[q] == Tree::free) {
          tree_[q] = tree_[p];
          parent_[q] = e ^ 1u;
          timestamp_[q] = timestamp_[p];
          dist_[q] = dist_[p] + 1;
          activate(q);
        } else if (tree_[q] != tree_[p]) {
          return source_side ? e : (e ^ 1u);
        } else if (timestamp_[q] <= timestamp_[p] && dist_[q] > dist_[p]) {
          // Shorten the tree: p is a closer parent for q.
          parent_[q] = e ^ 1u;
          timestamp_[q] = timestamp_[p];
          dist_[q] = dist_[p] + 1;
        }
      }
      current = -1;
    }
  }

  void augment(std::size_t middle) {
    double bottleneck = res(middle);
    for (auto v = graph_.head(middle ^ 1u); parent_[v] != kRoot;) {
      const auto a = static_cast<std::size_t>(parent_[v]);
      bottleneck = std::min(bottleneck, res(a ^ 1u));
      v = graph_.head(a);
    }
    for (auto v = graph_.head(middle); parent_[v] != kRoot;) {
      const auto a = static_cast<std::size_t>(parent_[v]);
      bottleneck = std::min(bottleneck, res(a));
      v = graph_.head(a);
    }

    res(middle) -= bottleneck;
    res(middle ^ 1u) += bottleneck;

    for (auto v = graph_.head(middle ^ 1u); parent_[v] != kRoot;) {
      const auto a = static_cast<std::size_t>(parent_[v]);
      const auto next = graph_.head(a);
      res(a ^ 1u) -= bottleneck;
      res(a) += bottleneck;
      if (res(a ^ 1u) <= kResidualEpsilon) orphan(v);
      v = next;
    }
    for (auto v = graph_.head(middle); parent_[v] != kRoot;) {
      const auto a = static_cast<std::size_t>(parent_[v]);
      const auto next = graph_.head(a);
      res(a) -= bottleneck;
      res(a ^ 1u) += bottleneck;
      if (res(a) <= kResidualEpsilon) orphan(v);
      v = next;
    }
    state_.flow_value += bottleneck;
  }

  void orphan(std::uint32_t v) {
    parent_[v] = kNoParent;
    orphans_.push_back(v);
  }

  // Distance from q to its tree root, or -1 when q hangs below an orphan.
  std::int64_t root_distance(std::uint32_t q) {
    std::int64_t d = 0;
    std::uint32_t j = q;
    while (true) {
      if (timestamp_[j] == time_) {
        d += dist_[j];
        break;
      }
      if (parent_[j] == kRoot) {
        timestamp_[j] = time_;
        dist_[j] = 0;
        break;
      }
      if (parent_[j] == kNoParent) return -1;
      ++d;
      j = graph_.head(static_cast<std::size_t>(parent_[j]));
    }
    std::int64_t dd = d;
    for (j = q; timestamp_[j] != time_; j = graph_.head(static_cast<std::size_t>(parent_[j]))) {
      timestamp_[j] = time_;
      dist_[j] = dd--;
    }
    return d;
  }

  void adopt() {
    while (!orphans_.empty()) {
      const std::uint32_t v = orphans_.front();
      orphans_.pop_front();
      const bool source_side = tree_[v] == Tree::source;

      std::int64_t best_arc = kNoParent;
      std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
      for (const std::uint32_t e : graph_.out(v)) {
        const std::uint32_t q = graph_.head(e);
        if (tree_[q] != tree_[v]) continue;
        const double cap = source_side ? res(e ^ 1u) : res(e);
        if (cap <= kResidualEpsilon) continue;
        const std::int64_t d = root_distance(q);
        if (d >= 0 && d < best_dist) {
          best_dist = d;
          best_arc = e;
        }
      }

      if (best_arc != kNoParent) {
        parent_[v] = best_arc;
        timestamp_[v] = time_;
        dist_[v] = best_dist + 1;
        continue;
      }

      for (const std::uint32_t e : graph_.out(v)) {
        const std::uint32_t q = graph_.head(e);
        if (tree_[q] != tree_[v]) continue;
        const double cap = source_side ? res(e ^ 1u) : res(e);
        if (cap > kResidualEpsilon) activate(q);
        if (parent_[q] >= 0 && graph_.head(static_cast<std::size_t>(parent_[q])) == v) orphan(q);
      }
      tree_[v] = Tree::free;
    }
  }

  const FlowNetwork& net_;
  ResidualGraph graph_;
  FlowState state_;
  std::vector<Tree> tree_;
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> timestamp_;
  std::vector<std::int64_t> dist_;
  std::vector<std::uint8_t> queued_;
  std::deque<std::uint32_t> active_;
  std::deque<std::uint32_t> orphans_;
  std::int64_t time_ = 0;
};

}  // namespace

FlowState bk_maxflow(const FlowNetwork& net) { return BkSolver(net).run(); }

std::vector<std::uint8_t> min_cut_partition(const FlowNetwork& net, const FlowState& state) {
  const ResidualGraph graph(net);
  std::vector<std::uint8_t> side(net.node_count, 0);
  std::vector<std::uint32_t> stack{net.source};
  side[net.source] = 1;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    for (const std::uint32_t e : graph.out(v)) {
      if (state.residual[e] <= kResidualEpsilon) continue;
      const std::uint32_t q = graph.head(e);
      if (side[q]) continue;
      side[q] = 1;
      stack.push_back(q);
    }
  }
  return side;
}

double cut_capacity(const FlowNetwork& net, std::span<const std::uint8_t> source_side) {
  double total = 0.0;
  for (const Arc& a : net.arcs) {
    if (source_side[a.from] && !source_side[a.to]) total += a.capacity;
  }
  return total;
}

}  // namespace cubecut
