#include "disco/shortcut.hpp"

#include <algorithm>

namespace disco {

namespace {

constexpr std::pair<Heuristic, std::string_view> kNames[] = {
    {Heuristic::none, "None"},
    {Heuristic::to_destination, "ToDestination"},
    {Heuristic::shorter_of_forward_reverse, "ShorterOfForwardReverse"},
    {Heuristic::no_path_knowledge, "NoPathKnowledge"},
    {Heuristic::up_down_stream, "UpDownStream"},
    {Heuristic::path_knowledge, "PathKnowledge"},
};

Path splice(const Path& route, std::size_t i, std::size_t j, const Path& middle) {
  Path out(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), middle.begin(), middle.end());
  out.insert(out.end(), route.begin() + static_cast<std::ptrdiff_t>(j) + 1, route.end());
  return out;
}

Path reversed(Path p) {
  std::reverse(p.begin(), p.end());
  return p;
}

Path shorter(const Topology& topo, Path a, Path b) {
  return topo.path_length(b) < topo.path_length(a) ? b : a;
}

}  // namespace

std::string_view to_string(Heuristic h) {
  for (const auto& [k, name] : kNames) {
    if (k == h) return name;
  }
  return "None";
}

Heuristic parse_heuristic(std::string_view text) {
  for (const auto& [k, name] : kNames) {
    if (name == text) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown heuristic '" + std::string(text) + "'");
}

Path to_destination(const Path& route, const RouteKnowledge& kb) {
  if (route.size() < 2) return route;
  const NodeId t = route.back();
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    if (route[i] == t) return Path(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    if (kb.known_distance(route[i], t)) return splice(route, i, route.size() - 1, kb.known_path(route[i], t));
  }
  return route;
}

Path up_down_stream(const Path& route, const RouteKnowledge& kb) {
  const Topology& topo = kb.topology();
  Path r = to_destination(route, kb);
  std::vector<Distance> prefix;
  for (bool improved = true; improved;) {
    improved = false;
    prefix.assign(r.size(), 0.0);
    for (std::size_t i = 1; i < r.size(); ++i) prefix[i] = prefix[i - 1] + topo.edge_weight(r[i - 1], r[i]);
    for (std::size_t i = 0; i + 1 < r.size() && !improved; ++i) {
      for (std::size_t j = r.size() - 1; j > i; --j) {
        const Distance segment = prefix[j] - prefix[i];
        if (r[i] == r[j]) {
          r = splice(r, i, j, {r[i]});
          improved = true;
          break;
        }
        if (auto d = kb.known_distance(r[i], r[j]); d && *d < segment) {
          r = splice(r, i, j, kb.known_path(r[i], r[j]));
          improved = true;
          break;
        }
        if (auto d = kb.known_distance(r[j], r[i]); d && *d < segment) {
          r = splice(r, i, j, reversed(kb.known_path(r[j], r[i])));
          improved = true;
          break;
        }
      }
    }
  }
  return r;
}

Path apply_shortcut(const Path& forward, const Path& reverse, const RouteKnowledge& kb, Heuristic mode) {
  const Topology& topo = kb.topology();
  switch (mode) {
    case Heuristic::none:
      return forward;
    case Heuristic::to_destination:
      return to_destination(forward, kb);
    case Heuristic::shorter_of_forward_reverse:
      return shorter(topo, forward, reversed(reverse));
    case Heuristic::no_path_knowledge:
      return shorter(topo, to_destination(forward, kb), reversed(to_destination(reverse, kb)));
    case Heuristic::up_down_stream:
      return up_down_stream(forward, kb);
    case Heuristic::path_knowledge:
      return shorter(topo, up_down_stream(forward, kb), reversed(up_down_stream(reverse, kb)));
  }
  return forward;
}

}  // namespace disco
