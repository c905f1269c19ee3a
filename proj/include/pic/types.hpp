#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pic {

using ValueId = std::uint32_t;
using ClassId = std::uint32_t;

// Reserved id for test-time values never seen in training. It is outside
// every feature dictionary, so a predicate carrying it matches no row.
inline constexpr ValueId kUnseen = 0xffffffffu;

// Malformed input data (bad CSV, unknown tokens in rule files).
struct ParseError : std::runtime_error {
  explicit ParseError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Invalid parameters or option combinations.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

}  // namespace pic
