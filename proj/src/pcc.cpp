#include "rr/pcc.hpp"

#include <cmath>

#include "rr/errors.hpp"
#include "rr/trajectory.hpp"

namespace rr {

PccReport pcc_check(const TermSource& source, std::uint64_t horizon, const PccThresholds& th) {
  if (source.dim() != 1) throw PreconditionError("pcc_check: source must be scalar");
  if (horizon < 10) throw PreconditionError("pcc_check: horizon must be at least 10");
  PccReport r;
  r.horizon = horizon;
  Accumulator pos, neg;
  std::uint64_t decade = horizon / 10;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    double a = source.scalar(n);
    if (a > 0) {
      pos.add(a);
      ++r.positive_count;
    } else if (a < 0) {
      neg.add(a);
      ++r.negative_count;
    }
    if (n >= decade)
      r.max_tail = std::max(r.max_tail, std::abs(a));
    else
      r.max_head = std::max(r.max_head, std::abs(a));
  }
  r.positive_sum = pos.value();
  r.negative_sum = neg.value();
  bool small = r.max_tail < th.small || r.max_tail <= th.shrink * r.max_head;
  r.pcc = small && r.positive_sum > th.blowup && -r.negative_sum > th.blowup;
  return r;
}

}  // namespace rr
