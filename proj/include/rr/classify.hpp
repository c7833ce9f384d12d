#pragma once
#include <cstddef>
#include <cstdint>
#include <string>

#include "rr/trajectory.hpp"

namespace rr {

struct Tolerances {
  double settle = 1e-3;  // relative: a window settles within settle * max(1, |mean|)
  double blowup = 10.0;
  double gap = 0.1;
  std::size_t window = 20;  // trailing samples inspected
};

enum class VerdictKind { converges, diverges_plus, diverges_minus, oscillates, undetermined };

struct Verdict {
  VerdictKind kind = VerdictKind::undetermined;
  double value = 0.0;     // converges: limit estimate
  double residual = 0.0;  // converges: largest deviation in the window
  double witness = 0.0;   // diverges: the window extreme beyond the blowup level
  std::uint64_t index = 0;
  double liminf = 0.0, limsup = 0.0;
  std::string reason;

  std::string name() const;
  std::string str() const;
};

Verdict classify(const Trajectory& traj, const Tolerances& tol = {}, std::size_t coord = 0);

}  // namespace rr
