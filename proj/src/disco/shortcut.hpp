#pragma once

#include <optional>
#include <string_view>

#include "disco/common.hpp"
#include "disco/topology.hpp"

namespace disco {

enum class Heuristic {
  none,
  to_destination,
  shorter_of_forward_reverse,
  no_path_knowledge,
  up_down_stream,
  path_knowledge,
};

inline constexpr Heuristic kAllHeuristics[] = {
    Heuristic::none,           Heuristic::to_destination, Heuristic::shorter_of_forward_reverse,
    Heuristic::no_path_knowledge, Heuristic::up_down_stream, Heuristic::path_knowledge,
};

std::string_view to_string(Heuristic h);
Heuristic parse_heuristic(std::string_view text);

// What a node knows locally: exact shortest paths to some destinations.
class RouteKnowledge {
 public:
  virtual ~RouteKnowledge() = default;
  virtual const Topology& topology() const = 0;
  // Distance of x's stored shortest path to y, if x stores one (x == y gives 0).
  virtual std::optional<Distance> known_distance(NodeId x, NodeId y) const = 0;
  virtual Path known_path(NodeId x, NodeId y) const = 0;
};

// First node on the route that knows the destination splices its direct path.
Path to_destination(const Path& route, const RouteKnowledge& kb);

// to_destination, then repeatedly splice the first segment x_i..x_j (i ascending,
// j descending) for which x_i knows x_j or x_j knows x_i by a strictly shorter path.
Path up_down_stream(const Path& route, const RouteKnowledge& kb);

// forward: s..t. reverse: the same protocol's route t..s.
Path apply_shortcut(const Path& forward, const Path& reverse, const RouteKnowledge& kb, Heuristic mode);

}  // namespace disco
