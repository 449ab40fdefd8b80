#include <algorithm>
#include <deque>
#include <map>
#include <queue>

#include "disco/baselines.hpp"
#include "disco/rng.hpp"

namespace disco {

namespace {

// Shortest paths from `source` through nodes with joined[v] set.
ShortestPathTree restricted_tree(const Topology& topo, NodeId source, const std::vector<char>& joined) {
  const std::size_t n = topo.node_count();
  ShortestPathTree t;
  t.source = source;
  t.dist.assign(n, kInfinity);
  t.parent.assign(n, kNoNode);
  std::vector<char> done(n, 0);
  using Item = std::pair<Distance, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (const Neighbor& nb : topo.neighbors(v)) {
      if (!joined[nb.node] || done[nb.node]) continue;
      const Distance nd = d + nb.weight;
      if (nd < t.dist[nb.node]) {
        t.dist[nb.node] = nd;
        t.parent[nb.node] = v;
        heap.push({nd, nb.node});
      } else if (nd == t.dist[nb.node] && topo.name_rank(v) < topo.name_rank(t.parent[nb.node])) {
        t.parent[nb.node] = v;
      }
    }
  }
  return t;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

VrrState vrr_build(const Topology& topo, std::uint64_t seed, unsigned r) {
  const std::size_t n = topo.node_count();
  VrrState st;
  st.r = r;
  st.vset.resize(n);
  Rng rng(derive_seed(seed, streams::vrr));
  const auto start = static_cast<NodeId>(rng.below(n));
  {
    std::vector<char> seen(n, 0);
    std::deque<NodeId> q{start};
    seen[start] = 1;
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop_front();
      st.join_order.push_back(v);
      for (const Neighbor& nb : topo.neighbors(v)) {
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          q.push_back(nb.node);
        }
      }
    }
  }

  std::vector<char> joined(n, 0);
  std::vector<NodeId> ring;  // joined nodes by hash
  std::map<std::uint64_t, std::uint32_t> live;  // pair -> index into all_paths
  std::vector<VrrPath> all_paths;
  auto ring_less = [&](NodeId a, NodeId b) { return topo.hash(a) < topo.hash(b); };
  auto neighbors_at = [&](std::size_t p) {
    const std::size_t m = ring.size();
    std::vector<NodeId> out;
    if (m - 1 <= r) {
      for (NodeId x : ring) {
        if (x != ring[p]) out.push_back(x);
      }
    } else {
      for (unsigned i = 1; i <= r / 2; ++i) {
        out.push_back(ring[(p + i) % m]);
        out.push_back(ring[(p + m - i) % m]);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  for (NodeId x : st.join_order) {
    joined[x] = 1;
    auto pos = std::lower_bound(ring.begin(), ring.end(), x, ring_less);
    const auto p = static_cast<std::size_t>(pos - ring.begin());
    ring.insert(pos, x);
    const std::size_t m = ring.size();
    if (m == 1) continue;

    // Only nodes within r/2 ring positions of x can see their sets change.
    std::vector<NodeId> affected;
    for (std::size_t i = 1; i <= std::min<std::size_t>(r / 2, m - 1); ++i) {
      affected.push_back(ring[(p + i) % m]);
      affected.push_back(ring[(p + m - i) % m]);
    }
    if (m - 1 <= r) affected.assign(ring.begin(), ring.end());
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    std::erase(affected, x);

    st.vset[x] = neighbors_at(p);
    for (NodeId y : affected) {
      const auto py = static_cast<std::size_t>(std::lower_bound(ring.begin(), ring.end(), y, ring_less) - ring.begin());
      st.vset[y] = neighbors_at(py);
    }
    // Tear down pairs that neither side keeps any more.
    for (auto it = live.begin(); it != live.end();) {
      const NodeId a = static_cast<NodeId>(it->first >> 32);
      const NodeId b = static_cast<NodeId>(it->first & 0xffffffffu);
      const bool keep = std::binary_search(st.vset[a].begin(), st.vset[a].end(), b) ||
                        std::binary_search(st.vset[b].begin(), st.vset[b].end(), a);
      it = keep ? std::next(it) : live.erase(it);
    }
    const ShortestPathTree tree = restricted_tree(topo, x, joined);
    for (NodeId y : st.vset[x]) {
      const std::uint64_t key = pair_key(x, y);
      if (live.count(key)) continue;
      live.emplace(key, static_cast<std::uint32_t>(all_paths.size()));
      all_paths.push_back({x, y, tree_path(tree, y)});
    }
  }

  st.through.resize(n);
  for (const auto& [key, idx] : live) {
    st.paths.push_back(std::move(all_paths[idx]));
    const auto id = static_cast<std::uint32_t>(st.paths.size() - 1);
    for (NodeId v : st.paths.back().nodes) st.through[v].push_back(id);
  }
  return st;
}

RouteResult vrr_route(const Topology& topo, const VrrState& st, NodeId s, NodeId t) {
  const NameHash ht = topo.hash(t);
  auto better = [&](NodeId a, NodeId b) {
    if (b == kNoNode) return true;
    const std::uint64_t da = ring_distance(topo.hash(a), ht);
    const std::uint64_t db = ring_distance(topo.hash(b), ht);
    return da != db ? da < db : topo.hash(a) < topo.hash(b);
  };
  Path hops{s};
  RouteResult res;
  const std::size_t cap = 4 * topo.node_count() + 8;
  NodeId cur = s;
  while (cur != t) {
    if (hops.size() > cap) {
      res.delivered = false;
      break;
    }
    NodeId best = cur;
    for (const Neighbor& nb : topo.neighbors(cur)) {
      if (better(nb.node, best)) best = nb.node;
    }
    for (std::uint32_t id : st.through[cur]) {
      const VrrPath& p = st.paths[id];
      if (better(p.a, best)) best = p.a;
      if (better(p.b, best)) best = p.b;
    }
    if (best == cur) {
      res.delivered = false;
      break;
    }
    NodeId next = kNoNode;
    if (topo.edge_index(cur, best) != SIZE_MAX) {
      next = best;
    } else {
      std::size_t remaining = SIZE_MAX;
      for (std::uint32_t id : st.through[cur]) {
        const VrrPath& p = st.paths[id];
        if (p.a != best && p.b != best) continue;
        const auto at = static_cast<std::size_t>(std::find(p.nodes.begin(), p.nodes.end(), cur) - p.nodes.begin());
        const std::size_t to_end = p.b == best ? p.nodes.size() - 1 - at : at;
        if (to_end < remaining) {
          remaining = to_end;
          next = p.b == best ? p.nodes[at + 1] : p.nodes[at - 1];
        }
      }
    }
    hops.push_back(cur = next);
  }
  const bool delivered = res.delivered;
  res = make_route(topo, std::move(hops), RouteResult::Phase::first_packet, Heuristic::none);
  res.delivered = delivered && res.hops.back() == t;
  return res;
}

}  // namespace disco
