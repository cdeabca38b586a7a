#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dnns {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Delay in milliseconds. Missing entries are stored as NaN.
using Millis = double;

inline constexpr Millis kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(Millis d) { return d != d; }

// Input that cannot be parsed (malformed matrix, bad config value).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dnns
