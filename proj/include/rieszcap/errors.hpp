#pragma once

#include <stdexcept>
#include <string>

namespace rieszcap {

// Raised when a simulation cannot make progress: a rejection sampler hit its
// proposal cap, or a batch run stopped seeing hits.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rieszcap
