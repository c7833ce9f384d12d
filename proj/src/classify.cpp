#include "rr/classify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rr {

std::string Verdict::name() const {
  switch (kind) {
    case VerdictKind::converges: return "converges-to";
    case VerdictKind::diverges_plus: return "diverges-plus";
    case VerdictKind::diverges_minus: return "diverges-minus";
    case VerdictKind::oscillates: return "oscillates";
    case VerdictKind::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string Verdict::str() const {
  std::ostringstream os;
  os.precision(10);
  os << name();
  switch (kind) {
    case VerdictKind::converges: os << "(" << value << ", residual=" << residual << ")"; break;
    case VerdictKind::diverges_plus:
    case VerdictKind::diverges_minus: os << "(M=" << witness << ", index=" << index << ")"; break;
    case VerdictKind::oscillates: os << "(" << liminf << ", " << limsup << ")"; break;
    case VerdictKind::undetermined: os << "(" << reason << ")"; break;
  }
  return os.str();
}

Verdict classify(const Trajectory& t, const Tolerances& tol, std::size_t c) {
  Verdict v;
  if (t.size() < 10 || c >= t.d) {
    v.reason = t.size() < 10 ? "fewer than 10 samples" : "coordinate out of range";
    return v;
  }
  std::size_t w = std::min<std::size_t>(std::max<std::size_t>(tol.window, 2), t.size());
  std::size_t first = t.size() - w;

  double mean = 0.0, lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = first; k < t.size(); ++k) {
    mean += t.at(k, c);
    lo = std::min(lo, t.seg_min[k * t.d + c]);
    hi = std::max(hi, t.seg_max[k * t.d + c]);
  }
  mean /= static_cast<double>(w);
  double start = t.at(first, c), last = t.at(t.size() - 1, c);

  double dev = std::max(hi - mean, mean - lo);
  if (dev <= tol.settle * std::max(1.0, std::abs(mean))) {
    v.kind = VerdictKind::converges;
    v.value = mean;
    v.residual = dev;
    return v;
  }
  if (lo > tol.blowup && last > start) {
    v.kind = VerdictKind::diverges_plus;
    v.witness = lo;
    v.index = t.index[first];
    return v;
  }
  if (hi < -tol.blowup && last < start) {
    v.kind = VerdictKind::diverges_minus;
    v.witness = hi;
    v.index = t.index[first];
    return v;
  }
  if (hi - lo > tol.gap) {
    v.kind = VerdictKind::oscillates;
    v.liminf = lo;
    v.limsup = hi;
    return v;
  }
  std::ostringstream os;
  os << "window spread " << (hi - lo) << " neither settled nor beyond the gap";
  v.reason = os.str();
  return v;
}

}  // namespace rr
