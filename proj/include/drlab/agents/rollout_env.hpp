#pragma once

#include "drlab/nn/network.hpp"

namespace drlab::agents {

struct RolloutStep {
  nn::Vec observation;  // next observation (empty when done)
  double reward = 0.0;
  bool done = false;
};

/// Minimal episodic interface the trainers drive. Implementations are
/// single-threaded and owned by one trainer at a time.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual nn::Vec reset() = 0;
  virtual RolloutStep step(const nn::Vec& actions) = 0;
  virtual std::size_t observation_width() const = 0;
};

}  // namespace drlab::agents
