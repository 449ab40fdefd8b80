#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "disco/network.hpp"

namespace disco {

// Virtual time in milliseconds; every message takes one tick per hop.
using Tick = std::uint64_t;
inline constexpr double kSecondsPerTick = 1e-3;

// Events in (time, sequence) order.
template <class Payload>
class EventQueue {
 public:
  void push(Tick time, Payload payload) {
    heap_.push_back({time, seq_++, std::move(payload)});
    std::push_heap(heap_.begin(), heap_.end(), later);
  }
  bool empty() const { return heap_.empty(); }
  Tick next_time() const { return heap_.front().time; }
  std::size_t size() const { return heap_.size(); }

  std::pair<Tick, Payload> pop() {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    Event e = std::move(heap_.back());
    heap_.pop_back();
    return {e.time, std::move(e.payload)};
  }

 private:
  struct Event {
    Tick time;
    std::uint64_t seq;
    Payload payload;
  };
  static bool later(const Event& a, const Event& b) { return a.time != b.time ? a.time > b.time : a.seq > b.seq; }

  std::vector<Event> heap_;
  std::uint64_t seq_ = 0;
};

// Runs the protocol's actual message exchange to convergence. VRR is not
// supported (it only has a static model).
Network run_des(const Topology& topo, Protocol protocol, const ProtocolConfig& config, std::uint64_t seed);

}  // namespace disco
