#pragma once
#include <cstdint>

#include "rr/terms.hpp"

namespace rr {

struct PccThresholds {
  double small = 1e-2;  // terms in the final decade must stay below this,
  double shrink = 0.1;  // or below shrink times the largest term of the first decade
  double blowup = 2.0;  // both one-signed sums must exceed this
};

struct PccReport {
  std::uint64_t horizon = 0;
  double max_tail = 0.0;  // max |a_n| over [horizon/10, horizon)
  double max_head = 0.0;  // max |a_n| over [0, horizon/10)
  double positive_sum = 0.0;
  double negative_sum = 0.0;  // sum of the negative terms (<= 0)
  std::uint64_t positive_count = 0;  // |P(a) ∩ [0,horizon)|
  std::uint64_t negative_count = 0;  // |N(a) ∩ [0,horizon)|
  bool pcc = false;
};

PccReport pcc_check(const TermSource& source, std::uint64_t horizon, const PccThresholds& th = {});

}  // namespace rr
