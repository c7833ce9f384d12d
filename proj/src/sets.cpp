#include "rr/sets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {

std::uint64_t SetSource::rank(std::uint64_t n) const {
  // nth(k) >= k, so the answer lies in [0, n].
  std::uint64_t lo = 0, hi = n;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (nth(mid) < n)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

std::uint64_t SetSource::nth_complement(std::uint64_t k) const {
  // least x with rank_complement(x + 1) >= k + 1
  std::uint64_t hi = k + 1;
  while (rank_complement(hi + 1) < k + 1) {
    if (hi > (std::uint64_t(1) << 62)) throw Error(describe() + ": complement too sparse");
    hi *= 2;
  }
  std::uint64_t lo = k;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (rank_complement(mid + 1) >= k + 1)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

namespace {

class Naturals : public SetSource {
 public:
  bool contains(std::uint64_t) const override { return true; }
  std::uint64_t nth(std::uint64_t k) const override { return k; }
  std::uint64_t rank(std::uint64_t n) const override { return n; }
  std::uint64_t nth_complement(std::uint64_t) const override { throw Error("N has empty complement"); }
  bool coinfinite() const override { return false; }
  std::string describe() const override { return "all"; }
};

class Arith : public SetSource {
 public:
  Arith(std::uint64_t s, std::uint64_t d) : s_(s), d_(d) {}
  bool contains(std::uint64_t n) const override { return n >= s_ && (n - s_) % d_ == 0; }
  std::uint64_t nth(std::uint64_t k) const override { return s_ + d_ * k; }
  std::uint64_t rank(std::uint64_t n) const override { return n <= s_ ? 0 : (n - s_ + d_ - 1) / d_; }
  std::uint64_t nth_complement(std::uint64_t k) const override {
    if (k < s_) return k;
    k -= s_;
    // each period [s + d*j, s + d*(j+1)) holds d-1 complement points
    std::uint64_t j = k / (d_ - 1), r = k % (d_ - 1);
    return s_ + d_ * j + 1 + r;
  }
  std::string describe() const override {
    if (s_ == 0 && d_ == 2) return "evens";
    if (s_ == 1 && d_ == 2) return "odds";
    return "arith:start=" + std::to_string(s_) + ",step=" + std::to_string(d_);
  }

 private:
  std::uint64_t s_, d_;
};

class SymDiff : public SetSource {
 public:
  SymDiff(Set b, std::set<std::uint64_t> t) : base_(std::move(b)), tog_(std::move(t)) {}
  bool contains(std::uint64_t n) const override { return base_->contains(n) != (tog_.count(n) > 0); }
  std::uint64_t rank(std::uint64_t n) const override {
    std::int64_t r = static_cast<std::int64_t>(base_->rank(n));
    for (auto t : tog_) {
      if (t >= n) break;
      r += base_->contains(t) ? -1 : 1;
    }
    return static_cast<std::uint64_t>(r);
  }
  std::uint64_t nth(std::uint64_t k) const override {
    // least x with rank(x + 1) >= k + 1; elements are within k + |toggled| of base's
    std::uint64_t lo = 0, hi = base_->nth(k + tog_.size()) + tog_.size() + 1;
    if (!tog_.empty()) hi = std::max(hi, *tog_.rbegin() + 1);
    while (lo < hi) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (rank(mid + 1) >= k + 1)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }
  bool coinfinite() const override { return base_->coinfinite(); }
  std::string describe() const override {
    std::string s = base_->describe() + "^{";
    bool first = true;
    for (auto t : tog_) {
      s += (first ? "" : ";") + std::to_string(t);
      first = false;
    }
    return s + "}";
  }

 private:
  Set base_;
  std::set<std::uint64_t> tog_;
};

class Iterated : public SetSource {
 public:
  Iterated(std::function<std::uint64_t(std::uint64_t)> g, std::string name) : g_(std::move(g)), name_(std::move(name)) {
    elems_.push_back(0);
  }
  bool contains(std::uint64_t n) const override {
    std::lock_guard<std::mutex> lk(mu_);
    grow_past(n);
    return std::binary_search(elems_.begin(), elems_.end(), n);
  }
  std::uint64_t nth(std::uint64_t k) const override {
    std::lock_guard<std::mutex> lk(mu_);
    while (elems_.size() <= k) step();
    return elems_[k];
  }
  std::uint64_t rank(std::uint64_t n) const override {
    std::lock_guard<std::mutex> lk(mu_);
    grow_past(n);
    return static_cast<std::uint64_t>(std::lower_bound(elems_.begin(), elems_.end(), n) - elems_.begin());
  }
  std::string describe() const override { return "iterate:" + name_; }

 private:
  void step() const {
    std::uint64_t a = elems_.back();
    std::uint64_t b = g_(a);
    if (b <= a) throw PreconditionError("iterated set: g(n) must exceed n");
    if (b > (std::uint64_t(1) << 62)) throw Error("iterated set: element overflow");
    elems_.push_back(b);
  }
  void grow_past(std::uint64_t n) const {
    while (elems_.back() < n) step();
  }
  std::function<std::uint64_t(std::uint64_t)> g_;
  std::string name_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> elems_;
};

}  // namespace

Set naturals() { return std::make_shared<Naturals>(); }
Set evens() { return std::make_shared<Arith>(0, 2); }
Set odds() { return std::make_shared<Arith>(1, 2); }
Set arithmetic(std::uint64_t start, std::uint64_t step) {
  if (step < 2) throw PreconditionError("arithmetic set: step must be at least 2");
  return std::make_shared<Arith>(start, step);
}
Set sym_diff(Set base, std::set<std::uint64_t> toggled) {
  return std::make_shared<SymDiff>(std::move(base), std::move(toggled));
}
Set iterated(std::function<std::uint64_t(std::uint64_t)> g, std::string name) {
  return std::make_shared<Iterated>(std::move(g), std::move(name));
}

std::uint64_t ceil_guarded(double x) {
  double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

ExcessScheduleSet::ExcessScheduleSet(double beta, double c, std::uint64_t horizon) : beta_(beta), c_(c) {
  if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("excess schedule: beta must lie in (0,1)");
  if (!(c >= 0.0)) throw PreconditionError("excess schedule: c must be nonnegative");
  std::uint64_t prev = 0;
  for (std::uint64_t m = 1; m <= horizon; ++m) {
    std::uint64_t q = negative_position(m);
    if (m > 1 && q <= prev)
      throw Infeasible("excess schedule: negative term " + std::to_string(m) + " has no free position");
    prev = q;
  }
}

std::uint64_t ExcessScheduleSet::excess(std::uint64_t m) const {
  if (c_ == 0.0) return 0;
  return ceil_guarded(c_ * std::pow(static_cast<double>(m), beta_));
}

std::uint64_t ExcessScheduleSet::negative_position(std::uint64_t m) const { return (m - 1) + m + excess(m); }

std::uint64_t ExcessScheduleSet::nth_complement(std::uint64_t k) const { return negative_position(k + 1); }

std::uint64_t ExcessScheduleSet::rank(std::uint64_t n) const {
  // negatives below n: largest m with negative_position(m) < n
  std::uint64_t lo = 0, hi = n / 2 + 1;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (negative_position(mid) < n)
      lo = mid;
    else
      hi = mid - 1;
  }
  return n - lo;
}

bool ExcessScheduleSet::contains(std::uint64_t n) const { return rank(n + 1) > rank(n); }

std::uint64_t ExcessScheduleSet::nth(std::uint64_t k) const {
  // at least half of every prefix is positive, so nth(k) <= 2k + 1
  std::uint64_t lo = k, hi = 2 * k + 1;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (rank(mid + 1) >= k + 1)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::string ExcessScheduleSet::describe() const {
  std::ostringstream os;
  os << "excess:beta=" << beta_ << ",c=" << c_;
  return os.str();
}

std::shared_ptr<const ExcessScheduleSet> excess_schedule_set(double beta, double c, std::uint64_t horizon) {
  return std::make_shared<ExcessScheduleSet>(beta, c, horizon);
}

}  // namespace rr
