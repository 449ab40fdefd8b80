#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disco/hash.hpp"
#include "disco/topology.hpp"

namespace disco {

struct ErrorModel {
  enum class Kind { none, uniform_relative, synopsis };
  Kind kind = Kind::none;
  double fraction = 0.0;
  std::size_t synopsis_bytes = 256;
};

// "none", "uniform:<fraction>" or "synopsis:<bytes>".
ErrorModel parse_error_model(std::string_view text);
std::string to_string(const ErrorModel& model);

// Flajolet-Martin sketch: one 32-bit bitmap per 4 bytes of synopsis.
class FmSketch {
 public:
  explicit FmSketch(std::size_t bytes = 256);

  void add(NameHash item, std::uint64_t seed);
  bool merge(const FmSketch& other);  // true if anything changed
  double estimate() const;
  const std::vector<std::uint32_t>& bitmaps() const { return bitmaps_; }
  bool operator==(const FmSketch&) const = default;

 private:
  std::vector<std::uint32_t> bitmaps_;
};

// OR-floods every node's sketch over the edges until nothing changes.
// Nodes are relaxed in the given order (all nodes in id order if empty).
std::vector<FmSketch> diffuse_sketches(const Topology& topo, std::size_t bytes, std::uint64_t seed,
                                       std::span<const NodeId> order = {});

std::vector<double> estimate_n(const Topology& topo, const ErrorModel& model, std::uint64_t seed);

double landmark_probability(double n_est);
bool should_flip_landmark_status(double last_flip_n, double current_n);

// Per-node uniform draw in [0,1).
using LandmarkDraw = std::function<double(NodeId)>;
LandmarkDraw seeded_draw(const Topology& topo, std::uint64_t seed);

struct LandmarkSet {
  std::vector<NodeId> members;  // ascending node id
  std::vector<std::int32_t> slot;  // node -> index in members, or -1
  std::vector<double> last_flip_estimate;

  bool contains(NodeId v) const { return slot[v] >= 0; }
  std::size_t size() const { return members.size(); }
};

LandmarkSet elect_landmarks(const Topology& topo, std::span<const double> estimates, std::uint64_t seed);
LandmarkSet elect_landmarks(const Topology& topo, std::span<const double> estimates, const LandmarkDraw& draw);

// Nodes whose estimate moved by a factor of two since their last flip redraw
// their decision; everyone else keeps their status.
LandmarkSet reelect_landmarks(const LandmarkSet& previous, const Topology& topo, std::span<const double> estimates,
                              const LandmarkDraw& draw);

}  // namespace disco
