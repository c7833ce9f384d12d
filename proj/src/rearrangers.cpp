#include "rr/rearrangers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/errors.hpp"
#include "rr/pcc.hpp"

namespace rr {

namespace {
std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
}  // namespace

GreedyPermutation::GreedyPermutation(Source s, GreedyOptions opts) : source_(std::move(s)), opts_(std::move(opts)) {
  if (source_->dim() != 1) throw PreconditionError("greedy rearrangement needs a scalar source");
  check_injective(opts_.prefix, "prefix");
  if (opts_.check_pcc) {
    auto r = pcc_check(*source_, opts_.pcc_horizon);
    if (!r.pcc) throw PreconditionError("source " + source_->describe() + " fails the pcc proxy");
  }
  for (auto v : opts_.prefix) {
    if (v >= in_prefix_.size()) in_prefix_.resize(v + 1, 0);
    in_prefix_[v] = 1;
  }
}

std::uint64_t GreedyPermutation::take(bool positive) const {
  std::uint64_t& ptr = positive ? next_pos_ : next_neg_;
  std::uint64_t i = ptr, scanned = 0;
  while (true) {
    bool skip = i < in_prefix_.size() && in_prefix_[i];
    if (!skip) {
      double a = source_->scalar(i);
      if ((a > 0) == positive) break;
    }
    if (++scanned > opts_.scan_limit) throw StarvedSign(positive ? "positive" : "nonpositive", ptr);
    ++i;
  }
  ptr = i + 1;
  return i;
}

void GreedyPermutation::after_emit(std::uint64_t, bool, double) const {}

std::uint64_t GreedyPermutation::next() const {
  std::uint64_t k = count();
  std::uint64_t idx;
  bool positive;
  if (k < opts_.prefix.size()) {
    idx = opts_.prefix[k];
    positive = source_->scalar(idx) > 0;
  } else {
    positive = choose_positive(sum_.value());
    idx = take(positive);
  }
  sum_.add(source_->scalar(idx));
  if (k >= opts_.prefix.size()) after_emit(k, positive, sum_.value());
  return idx;
}

namespace {

class TargetPermutation : public GreedyPermutation {
 public:
  TargetPermutation(Source s, double target, GreedyOptions o) : GreedyPermutation(std::move(s), std::move(o)), t_(target) {}
  std::string describe() const override { return "riemann:target=" + num(t_); }

 protected:
  // A tie (sum exactly at the target) takes a positive term.
  bool choose_positive(double sum) const override { return sum <= t_; }

 private:
  double t_;
};

}  // namespace

Perm riemann_to_target(Source source, double target, GreedyOptions opts) {
  if (!std::isfinite(target)) throw PreconditionError("riemann target must be finite");
  return std::make_shared<TargetPermutation>(std::move(source), target, std::move(opts));
}

InfinityPermutation::InfinityPermutation(Source s, int sign, GreedyOptions opts)
    : GreedyPermutation(std::move(s), std::move(opts)), sign_(sign) {
  if (sign != 1 && sign != -1) throw PreconditionError("sign must be +1 or -1");
}

bool InfinityPermutation::choose_positive(double sum) const {
  double level = static_cast<double>(stage_ + 1);
  if (sign_ > 0) return !(sum > level);
  return sum < -level;
}

void InfinityPermutation::after_emit(std::uint64_t position, bool positive, double) const {
  if (positive != (sign_ > 0)) {
    stages_.push_back(position);
    ++stage_;
  }
}

std::vector<std::uint64_t> InfinityPermutation::stage_positions() const {
  auto lk = lock();
  return stages_;
}

std::string InfinityPermutation::describe() const { return sign_ > 0 ? "riemann:to=+inf" : "riemann:to=-inf"; }

std::shared_ptr<const InfinityPermutation> riemann_to_infinity(Source source, int sign, GreedyOptions opts) {
  return std::make_shared<InfinityPermutation>(std::move(source), sign, std::move(opts));
}

OscillatingPermutation::OscillatingPermutation(Source s, double lo, double hi, GreedyOptions opts)
    : GreedyPermutation(std::move(s), std::move(opts)), lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw PreconditionError("oscillation band needs lo < hi");
}

bool OscillatingPermutation::choose_positive(double) const { return up_; }

void OscillatingPermutation::after_emit(std::uint64_t position, bool, double sum) const {
  if (up_ && sum > hi_) {
    swings_.push_back({position, sum, true});
    up_ = false;
  } else if (!up_ && sum < lo_) {
    swings_.push_back({position, sum, false});
    up_ = true;
  }
}

std::vector<Swing> OscillatingPermutation::swings() const {
  auto lk = lock();
  return swings_;
}

std::string OscillatingPermutation::describe() const { return "oscillate:lo=" + num(lo_) + ",hi=" + num(hi_); }

std::shared_ptr<const OscillatingPermutation> riemann_oscillate(Source source, double lo, double hi,
                                                                GreedyOptions opts) {
  return std::make_shared<OscillatingPermutation>(std::move(source), lo, hi, std::move(opts));
}

namespace {

class Shuffle : public Permutation {
 public:
  Shuffle(Set a, Set b) : a_(std::move(a)), b_(std::move(b)) {}
  std::uint64_t forward(std::uint64_t x) const override { return map(*a_, *b_, x); }
  std::uint64_t inverse(std::uint64_t y) const override { return map(*b_, *a_, y); }
  std::uint64_t bound(std::uint64_t m) const override { return inverse(m) + 1; }
  std::string describe() const override { return "shuffle(" + a_->describe() + "," + b_->describe() + ")"; }

 private:
  static std::uint64_t map(const SetSource& from, const SetSource& to, std::uint64_t x) {
    if (from.contains(x)) return to.nth(from.rank(x));
    return to.nth_complement(from.rank_complement(x));
  }
  Set a_, b_;
};

}  // namespace

Perm shuffle(Set a, Set b) {
  if (!a->coinfinite() || !b->coinfinite()) throw PreconditionError("shuffle needs coinfinite sets");
  return std::make_shared<Shuffle>(std::move(a), std::move(b));
}

TwoExponentReport two_exponent_experiment(double alpha, double beta, double c, std::uint64_t stages) {
  if (!(alpha > 0 && alpha < beta && beta < 1)) throw PreconditionError("two-exponent experiment needs 0 < alpha < beta < 1");
  if (stages < 10) throw PreconditionError("two-exponent experiment needs at least 10 stages");
  auto a = excess_schedule_set(beta, c, stages);
  auto s = shuffle(a, evens());
  TwoExponentReport r{};
  r.alpha = alpha;
  r.beta = beta;
  r.c = c;
  r.stages = stages;
  r.terms = a->negative_position(stages) + 1;

  Sampling sm;
  std::vector<std::uint64_t> ms;
  for (double m = 10; m < static_cast<double>(stages); m *= 1.25) ms.push_back(static_cast<std::uint64_t>(m));
  ms.push_back(stages);
  for (auto m : ms) sm.extra.push_back(a->negative_position(m) + 1);
  r.traj_alpha = partial_sums(*alt_power(alpha), *s, r.terms, sm);
  r.traj_beta = partial_sums(*alt_power(beta), *s, r.terms, sm);
  r.max_alpha = r.traj_alpha.running_max();

  const auto& tb = r.traj_beta;
  std::size_t w = std::min<std::size_t>(20, tb.size());
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = tb.size() - w; k < tb.size(); ++k) {
    lo = std::min(lo, tb.seg_min[k]);
    hi = std::max(hi, tb.seg_max[k]);
  }
  r.spread_beta = hi - lo;

  // slope of log S_alpha against log m over the second half (in log scale) of the stages
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (auto m : ms) {
    if (m * m < stages) continue;
    std::uint64_t n = a->negative_position(m) + 1;
    auto it = std::lower_bound(r.traj_alpha.index.begin(), r.traj_alpha.index.end(), n);
    double v = r.traj_alpha.sum[it - r.traj_alpha.index.begin()];
    if (v <= 0) continue;
    double x = std::log(static_cast<double>(m)), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  r.growth_exponent = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : NAN;
  r.expected_exponent = beta - alpha;

  Sampling last_only;
  last_only.dense = 0;
  last_only.ratio = 0;
  auto plain = partial_sums(*alt_power(beta), *identity(), r.terms, last_only);
  r.shift_beta = tb.final_value() - plain.final_value();
  return r;
}

}  // namespace rr
