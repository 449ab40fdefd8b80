#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace disco {

using NodeId = std::uint32_t;
using Distance = double;
using Path = std::vector<NodeId>;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr Distance kInfinity = std::numeric_limits<Distance>::infinity();

enum class ErrorCode {
  invalid_argument = 1,
  parse_error,
  disconnected,
  unknown_node,
  infeasible,
  invalid_walk,
  undecodable_address,
  non_convergence,
  invariant_violation,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace disco
