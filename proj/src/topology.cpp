#include "disco/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "disco/rng.hpp"

namespace disco {

double quantize_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_argument, "edge weight must be positive and finite");
  if (w >= 0x1.0p20) return std::round(w);
  const double q = std::ldexp(std::round(std::ldexp(w, 32)), -32);
  return q > 0.0 ? q : 0x1.0p-32;
}

namespace {

struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), NodeId{0}); }
  NodeId find(NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

bool is_connected(std::size_t n, std::span<const Edge> edges) {
  if (n <= 1) return true;
  UnionFind uf(n);
  std::size_t merges = 0;
  for (const Edge& e : edges) merges += uf.unite(e.u, e.v);
  return merges == n - 1;
}

std::string component_sizes(const std::vector<std::vector<NodeId>>& comps) {
  std::vector<std::size_t> sizes;
  for (const auto& c : comps) sizes.push_back(c.size());
  std::sort(sizes.rbegin(), sizes.rend());
  std::ostringstream os;
  for (std::size_t i = 0; i < sizes.size(); ++i) os << (i ? ", " : "") << sizes[i];
  return os.str();
}

std::vector<std::string> indexed_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "n" + std::to_string(i);
  return names;
}

}  // namespace

std::vector<std::vector<NodeId>> connected_components(std::size_t n, std::span<const Edge> edges) {
  UnionFind uf(n);
  for (const Edge& e : edges) uf.unite(e.u, e.v);
  std::vector<std::vector<NodeId>> comps;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (NodeId v = 0; v < n; ++v) {
    const NodeId r = uf.find(v);
    if (slot[r] == SIZE_MAX) {
      slot[r] = comps.size();
      comps.emplace_back();
    }
    comps[slot[r]].push_back(v);
  }
  return comps;
}

Topology::Topology(std::vector<std::string> names, std::vector<Edge> edges, std::vector<Point> coordinates)
    : names_(std::move(names)), coordinates_(std::move(coordinates)) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "topology has no nodes");
  if (n >= kNoNode) throw Error(ErrorCode::invalid_argument, "too many nodes");
  if (!coordinates_.empty() && coordinates_.size() != n) {
    throw Error(ErrorCode::invalid_argument, "coordinate count does not match node count");
  }
  hashes_.resize(n);
  index_.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    if (names_[v].empty()) throw Error(ErrorCode::invalid_argument, "empty node name");
    if (!index_.emplace(names_[v], v).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate node name '" + names_[v] + "'");
    }
    hashes_[v] = hash_name(names_[v]);
  }
  std::vector<NodeId> by_name(n);
  std::iota(by_name.begin(), by_name.end(), NodeId{0});
  std::sort(by_name.begin(), by_name.end(), [&](NodeId a, NodeId b) { return names_[a] < names_[b]; });
  name_rank_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) name_rank_[by_name[r]] = r;

  for (Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw Error(ErrorCode::unknown_node, "edge endpoint out of range");
    if (e.u == e.v) throw Error(ErrorCode::invalid_argument, "self loop at '" + names_[e.u] + "'");
    if (e.u > e.v) std::swap(e.u, e.v);
    e.weight = quantize_weight(e.weight);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v != b.v ? a.v < b.v : a.weight < b.weight;
  });
  for (const Edge& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) continue;
    edges_.push_back(e);
    if (e.weight != 1.0) unit_weights_ = false;
  }
  if (!is_connected(n, edges_)) {
    const auto comps = connected_components(n, edges_);
    throw Error(ErrorCode::disconnected, "topology is disconnected: " + std::to_string(comps.size()) +
                                             " components of sizes " + component_sizes(comps));
  }

  offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(offsets_[n]);
  by_id_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[fill[e.u]] = {e.v, e.weight};
    by_id_[fill[e.u]++] = {e.v, i};
    adjacency_[fill[e.v]] = {e.u, e.weight};
    by_id_[fill[e.v]++] = {e.u, i};
  }
  for (NodeId v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [&](const Neighbor& a, const Neighbor& b) { return hashes_[a.node] < hashes_[b.node]; });
    std::sort(by_id_.begin() + offsets_[v], by_id_.begin() + offsets_[v + 1],
              [](const IdEntry& a, const IdEntry& b) { return a.node < b.node; });
  }
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId Topology::require(std::string_view name) const {
  auto v = find(name);
  if (!v) throw Error(ErrorCode::unknown_node, "unknown node '" + std::string(name) + "'");
  return *v;
}

std::size_t Topology::edge_index(NodeId u, NodeId v) const {
  auto first = by_id_.begin() + offsets_[u];
  auto last = by_id_.begin() + offsets_[u + 1];
  auto it = std::lower_bound(first, last, v, [](const IdEntry& e, NodeId x) { return e.node < x; });
  if (it == last || it->node != v) return SIZE_MAX;
  return it->edge;
}

double Topology::edge_weight(NodeId u, NodeId v) const {
  const std::size_t i = edge_index(u, v);
  return i == SIZE_MAX ? kInfinity : edges_[i].weight;
}

std::optional<std::uint32_t> Topology::label_of(NodeId from, NodeId to) const {
  const auto nbs = neighbors(from);
  auto it = std::lower_bound(nbs.begin(), nbs.end(), hashes_[to],
                             [&](const Neighbor& nb, NameHash h) { return hashes_[nb.node] < h; });
  if (it == nbs.end() || it->node != to) return std::nullopt;
  return static_cast<std::uint32_t>(it - nbs.begin());
}

double Topology::path_length(std::span<const NodeId> path) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double w = edge_weight(path[i], path[i + 1]);
    if (w == kInfinity) {
      throw Error(ErrorCode::invalid_walk,
                  "'" + names_[path[i]] + "' and '" + names_[path[i + 1]] + "' are not adjacent");
    }
    total += w;
  }
  return total;
}

bool Topology::is_walk(std::span<const NodeId> path) const {
  if (path.empty()) return false;
  for (NodeId v : path) {
    if (v >= node_count()) return false;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (edge_index(path[i], path[i + 1]) == SIZE_MAX) return false;
  }
  return true;
}

Topology gen_gnm(std::size_t n, double avg_degree, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::infeasible, "gnm needs n >= 2");
  if (!(avg_degree > 0.0)) throw Error(ErrorCode::infeasible, "gnm needs a positive average degree");
  const double max_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double m_real = std::round(static_cast<double>(n) * avg_degree / 2.0);
  if (m_real > max_pairs) throw Error(ErrorCode::infeasible, "gnm: more edges requested than node pairs");
  const auto m = static_cast<std::size_t>(m_real);
  if (m < n - 1) throw Error(ErrorCode::infeasible, "gnm: too few edges for a connected graph");

  Rng rng(derive_seed(seed, streams::topology));
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> deg(n);
  std::vector<Edge> edges;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    chosen.clear();
    chosen.reserve(2 * m);
    while (chosen.size() < m) {
      auto u = static_cast<NodeId>(rng.below(n));
      auto v = static_cast<NodeId>(rng.below(n));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      chosen.insert((static_cast<std::uint64_t>(u) << 32) | v);
    }
    std::fill(deg.begin(), deg.end(), 0);
    for (std::uint64_t k : chosen) {
      ++deg[k >> 32];
      ++deg[k & 0xffffffffu];
    }
    if (std::find(deg.begin(), deg.end(), 0u) != deg.end()) continue;
    keys.assign(chosen.begin(), chosen.end());
    std::sort(keys.begin(), keys.end());
    edges.clear();
    for (std::uint64_t k : keys) edges.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xffffffffu), 1.0});
    if (is_connected(n, edges)) return Topology(indexed_names(n), std::move(edges));
  }
  throw Error(ErrorCode::infeasible, "gnm: no connected sample found");
}

namespace {

struct PairDistance {
  double d;
  NodeId u;
  NodeId v;
};

std::vector<PairDistance> pairs_within(const std::vector<Point>& pts, double r) {
  const std::size_t n = pts.size();
  const auto cells = static_cast<std::size_t>(std::clamp(std::floor(1.0 / r), 1.0, 4096.0));
  auto cell_of = [&](double c) { return std::min(cells - 1, static_cast<std::size_t>(c * static_cast<double>(cells))); };
  std::vector<std::vector<NodeId>> grid(cells * cells);
  for (NodeId i = 0; i < n; ++i) grid[cell_of(pts[i].y) * cells + cell_of(pts[i].x)].push_back(i);
  std::vector<PairDistance> out;
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t cx = cell_of(pts[i].x);
    const std::size_t cy = cell_of(pts[i].y);
    for (std::size_t y = cy == 0 ? 0 : cy - 1; y <= std::min(cells - 1, cy + 1); ++y) {
      for (std::size_t x = cx == 0 ? 0 : cx - 1; x <= std::min(cells - 1, cx + 1); ++x) {
        for (NodeId j : grid[y * cells + x]) {
          if (j <= i) continue;
          const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
          if (d <= r) out.push_back({d, i, j});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PairDistance& a, const PairDistance& b) {
    return a.d != b.d ? a.d < b.d : a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return out;
}

}  // namespace

Topology gen_geometric(std::size_t n, double avg_degree, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::infeasible, "geometric needs n >= 2");
  if (!(avg_degree > 0.0)) throw Error(ErrorCode::infeasible, "geometric needs a positive average degree");
  Rng rng(derive_seed(seed, streams::topology));
  std::vector<Point> pts(n);
  for (Point& p : pts) {
    p.x = rng.uniform01();
    p.y = rng.uniform01();
  }
  const double max_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const auto m = static_cast<std::size_t>(
      std::clamp(std::round(static_cast<double>(n) * avg_degree / 2.0), 1.0, max_pairs));

  double probe = std::sqrt(avg_degree / (M_PI * static_cast<double>(n))) * 1.3;
  std::vector<PairDistance> pairs = pairs_within(pts, probe);
  while (pairs.size() < m) {
    probe *= 1.5;
    pairs = pairs_within(pts, probe);
  }
  double r = pairs[m - 1].d;
  std::vector<Edge> edges;
  for (;;) {
    if (r > probe) {
      probe = r;
      pairs = pairs_within(pts, probe);
    }
    edges.clear();
    for (const PairDistance& p : pairs) {
      if (p.d > r) break;
      edges.push_back({p.u, p.v, std::max(p.d, 0x1.0p-32)});
    }
    if (is_connected(n, edges)) break;
    r *= 1.05;
  }
  return Topology(indexed_names(n), std::move(edges), std::move(pts));
}

Topology gen_s4_adversarial(std::size_t sqrt_n) {
  if (sqrt_n < 2) throw Error(ErrorCode::infeasible, "s4 tree needs sqrt_n >= 2");
  std::vector<std::string> names{"r"};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < sqrt_n; ++i) {
    const auto child = static_cast<NodeId>(names.size());
    names.push_back("c" + std::to_string(i));
    edges.push_back({0, child, 1.0});
    for (std::size_t j = 0; j < sqrt_n; ++j) {
      edges.push_back({child, static_cast<NodeId>(names.size()), 2.0});
      names.push_back("g" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return Topology(std::move(names), std::move(edges));
}

Topology parse_edgelist(std::istream& in, bool weighted, bool largest_component) {
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> ids;
  std::map<std::pair<NodeId, NodeId>, double> weights;
  auto id_of = [&](const std::string& name) {
    auto [it, fresh] = ids.emplace(name, static_cast<NodeId>(names.size()));
    if (fresh) names.push_back(name);
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + why);
    };
    if (tok.size() < 2 || tok.size() > 3) fail("expected 'u v [w]'");
    double w = 1.0;
    if (weighted && tok.size() == 3) {
      std::size_t used = 0;
      try {
        w = std::stod(tok[2], &used);
      } catch (const std::exception&) {
        fail("bad weight '" + tok[2] + "'");
      }
      if (used != tok[2].size() || !(w > 0.0) || !std::isfinite(w)) fail("bad weight '" + tok[2] + "'");
    }
    NodeId u = id_of(tok[0]);
    NodeId v = id_of(tok[1]);
    if (u == v) continue;  // self loops carry no routes
    if (u > v) std::swap(u, v);
    auto [it, fresh] = weights.emplace(std::make_pair(u, v), w);
    if (!fresh) it->second = std::min(it->second, w);
  }
  if (names.empty()) throw Error(ErrorCode::parse_error, "edge list is empty");
  std::vector<Edge> edges;
  edges.reserve(weights.size());
  for (const auto& [key, w] : weights) edges.push_back({key.first, key.second, w});

  const auto comps = connected_components(names.size(), edges);
  if (comps.size() > 1) {
    if (!largest_component) {
      throw Error(ErrorCode::disconnected, "edge list is disconnected: " + std::to_string(comps.size()) +
                                               " components of sizes " + component_sizes(comps));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < comps.size(); ++i) {
      if (comps[i].size() > comps[best].size()) best = i;
    }
    std::vector<NodeId> remap(names.size(), kNoNode);
    std::vector<std::string> kept;
    for (NodeId v : comps[best]) {
      remap[v] = static_cast<NodeId>(kept.size());
      kept.push_back(names[v]);
    }
    std::vector<Edge> kept_edges;
    for (const Edge& e : edges) {
      if (remap[e.u] != kNoNode) kept_edges.push_back({remap[e.u], remap[e.v], e.weight});
    }
    return Topology(std::move(kept), std::move(kept_edges));
  }
  return Topology(std::move(names), std::move(edges));
}

Topology load_edgelist(const std::string& path, bool weighted, bool largest_component) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  return parse_edgelist(in, weighted, largest_component);
}

void write_edgelist(const Topology& topo, std::ostream& out, bool weighted) {
  out << "# nodes " << topo.node_count() << " edges " << topo.edge_count() << "\n";
  char buf[64];
  for (const Edge& e : topo.edges()) {
    out << topo.name(e.u) << ' ' << topo.name(e.v);
    if (weighted) {
      std::snprintf(buf, sizeof buf, " %.17g", e.weight);
      out << buf;
    }
    out << '\n';
  }
}

ShortestPathTree shortest_path_tree(const Topology& topo, NodeId source) {
  const std::size_t n = topo.node_count();
  if (source >= n) throw Error(ErrorCode::unknown_node, "unknown source node");
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
      if (done[nb.node]) continue;
      const Distance nd = d + nb.weight;
      Distance& cur = t.dist[nb.node];
      if (nd < cur) {
        cur = nd;
        t.parent[nb.node] = v;
        heap.push({nd, nb.node});
      } else if (nd == cur && topo.name_rank(v) < topo.name_rank(t.parent[nb.node])) {
        t.parent[nb.node] = v;
      }
    }
  }
  return t;
}

Path tree_path(const ShortestPathTree& tree, NodeId target) {
  Path p;
  for (NodeId v = target; v != kNoNode; v = tree.parent[v]) {
    p.push_back(v);
    if (v == tree.source) break;
  }
  if (p.back() != tree.source) throw Error(ErrorCode::unknown_node, "target not reachable in tree");
  std::reverse(p.begin(), p.end());
  return p;
}

PathResult shortest_path(const Topology& topo, NodeId src, NodeId dst) {
  if (src >= topo.node_count() || dst >= topo.node_count()) throw Error(ErrorCode::unknown_node, "unknown node");
  if (src == dst) return {{src}, 0.0};
  const ShortestPathTree t = shortest_path_tree(topo, src);
  return {tree_path(t, dst), t.dist[dst]};
}

PathResult shortest_path(const Topology& topo, std::string_view src, std::string_view dst) {
  return shortest_path(topo, topo.require(src), topo.require(dst));
}

DijkstraWorkspace::DijkstraWorkspace(std::size_t n)
    : dist_(n, kInfinity), parent_(n, kNoNode), first_hop_(n, kNoNode), settled_(n, 0) {}

void DijkstraWorkspace::reset() {
  for (NodeId v : touched_) {
    dist_[v] = kInfinity;
    parent_[v] = kNoNode;
    first_hop_[v] = kNoNode;
    settled_[v] = 0;
  }
  touched_.clear();
  heap_.clear();
}

void DijkstraWorkspace::push(Item item) {
  heap_.push_back(item);
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
}

DijkstraWorkspace::Item DijkstraWorkspace::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
  const Item top = heap_.back();
  heap_.pop_back();
  return top;
}

DistanceOracle::DistanceOracle(const Topology& topo, std::size_t cache_limit)
    : topo_(topo), cache_limit_(std::max<std::size_t>(cache_limit, 1)) {}

std::shared_ptr<const ShortestPathTree> DistanceOracle::tree(NodeId source) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(source);
    if (it != cache_.end()) return it->second;
  }
  auto t = std::make_shared<const ShortestPathTree>(shortest_path_tree(topo_, source));
  std::lock_guard lock(mutex_);
  auto [it, fresh] = cache_.emplace(source, t);
  if (fresh) {
    order_.push_back(source);
    if (order_.size() > cache_limit_) {
      cache_.erase(order_.front());
      order_.erase(order_.begin());
    }
  }
  return it->second;
}

Distance DistanceOracle::distance(NodeId u, NodeId v) const {
  if (u == v) return 0.0;
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(v); it != cache_.end()) return it->second->dist[u];
  }
  return tree(u)->dist[v];
}

Path DistanceOracle::path(NodeId u, NodeId v) const {
  if (u == v) return {u};
  return tree_path(*tree(u), v);
}

}  // namespace disco
