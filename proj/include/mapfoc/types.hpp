/*
 * Core ids, time, and error types shared by all modules.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mapfoc {

using Vertex = int32_t;  // dense vertex index
using Time = int32_t;    // discrete timestep

// "outside the network" marker for time-indexed locations
inline constexpr Vertex OUT = -1;

struct Error : std::runtime_error {
  enum class Kind {
    parse,      // malformed input file
    invariant,  // data violates a model invariant
    usage,      // bad parameters / preconditions
    limits,     // configured size/horizon limits exceeded
    internal,   // should-not-happen solver state
  };
  Kind kind;
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline Error parse_error(const std::string& msg) { return Error(Error::Kind::parse, msg); }
inline Error invariant_error(const std::string& msg) { return Error(Error::Kind::invariant, msg); }
inline Error usage_error(const std::string& msg) { return Error(Error::Kind::usage, msg); }
inline Error limits_error(const std::string& msg) { return Error(Error::Kind::limits, msg); }
inline Error internal_error(const std::string& msg) { return Error(Error::Kind::internal, msg); }

}  // namespace mapfoc
