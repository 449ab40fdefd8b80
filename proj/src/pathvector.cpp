#include <algorithm>

#include "disco/baselines.hpp"

namespace disco {

PathVectorState pathvector_converge(const Topology& topo, std::size_t table_cap) {
  PathVectorState st;
  st.nodes = topo.node_count();
  if (st.nodes > table_cap) return st;
  st.has_tables = true;
  st.next_hop.resize(st.nodes);
  st.dist.resize(st.nodes);
  for (NodeId t = 0; t < st.nodes; ++t) {
    ShortestPathTree tree = shortest_path_tree(topo, t);
    st.next_hop[t] = std::move(tree.parent);
    st.dist[t] = std::move(tree.dist);
  }
  return st;
}

RouteResult pathvector_route(const Topology& topo, const PathVectorState& state, NodeId s, NodeId t) {
  Path p;
  if (state.has_tables) {
    p.push_back(s);
    for (NodeId cur = s; cur != t;) p.push_back(cur = state.next_hop[t][cur]);
  } else {
    p = tree_path(shortest_path_tree(topo, t), s);
    std::reverse(p.begin(), p.end());
  }
  return make_route(topo, std::move(p), RouteResult::Phase::later_packet, Heuristic::none);
}

}  // namespace disco
