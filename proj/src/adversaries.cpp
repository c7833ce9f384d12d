#include "rr/adversaries.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rr/errors.hpp"
#include "rr/hash.hpp"

namespace rr {

IntervalPartition::IntervalPartition(Step step, std::string name) : step_(std::move(step)), name_(std::move(name)) {}

void IntervalPartition::extend_to(std::uint64_t k) const {
  while (cuts_.size() <= k) {
    std::uint64_t prev = cuts_.back();
    std::uint64_t c = step_(cuts_.size() - 1, prev);
    if (c <= prev) throw PreconditionError("partition " + name_ + ": cuts must increase strictly");
    cuts_.push_back(c);
  }
}

void IntervalPartition::extend_past(std::uint64_t x) const {
  while (cuts_.back() <= x) extend_to(cuts_.size());
}

std::uint64_t IntervalPartition::cut(std::uint64_t k) const {
  std::lock_guard<std::mutex> lk(mu_);
  extend_to(k);
  return cuts_[k];
}

std::uint64_t IntervalPartition::interval_of(std::uint64_t x) const {
  std::lock_guard<std::mutex> lk(mu_);
  extend_past(x);
  return static_cast<std::uint64_t>(std::upper_bound(cuts_.begin(), cuts_.end(), x) - cuts_.begin()) - 1;
}

std::uint64_t IntervalPartition::first_cut_at_least(std::uint64_t x) const {
  std::lock_guard<std::mutex> lk(mu_);
  while (cuts_.back() < x) extend_to(cuts_.size());
  return static_cast<std::uint64_t>(std::lower_bound(cuts_.begin(), cuts_.end(), x) - cuts_.begin());
}

Partition uniform_partition(std::uint64_t width) {
  if (width < 1) throw PreconditionError("uniform partition: width must be positive");
  return std::make_shared<IntervalPartition>([width](std::uint64_t, std::uint64_t c) { return c + width; },
                                             "uniform:width=" + std::to_string(width));
}

Partition random_partition(std::uint64_t seed, std::uint64_t max_width) {
  if (max_width < 1) throw PreconditionError("random partition: max width must be positive");
  return std::make_shared<IntervalPartition>(
      [seed, max_width](std::uint64_t k, std::uint64_t c) { return c + 1 + mix2(seed, k) % max_width; },
      "random:seed=" + std::to_string(seed) + ",max=" + std::to_string(max_width));
}

Partition partition_from_cuts(std::vector<std::uint64_t> cuts, std::uint64_t tail_width) {
  if (cuts.empty() || cuts[0] != 0) throw PreconditionError("partition cuts must start at 0");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1]) throw PreconditionError("partition cuts must increase strictly");
  if (tail_width < 1) throw PreconditionError("partition tail width must be positive");
  std::ostringstream name;
  name << "cuts:";
  for (std::size_t i = 0; i < cuts.size() && i < 6; ++i) name << (i ? "," : "") << cuts[i];
  if (cuts.size() > 6) name << ",...";
  return std::make_shared<IntervalPartition>(
      [cuts = std::move(cuts), tail_width](std::uint64_t k, std::uint64_t c) {
        return k + 1 < cuts.size() ? cuts[k + 1] : c + tail_width;
      },
      name.str());
}

Partition triple_blocks(Set a) {
  std::string name = "triples(" + a->describe() + ")";
  return std::make_shared<IntervalPartition>([a](std::uint64_t k, std::uint64_t) { return a->nth(3 * (k + 1)); },
                                             name);
}

namespace {

class Flip : public Permutation {
 public:
  explicit Flip(Partition p) : p_(std::move(p)) {}
  std::uint64_t forward(std::uint64_t x) const override {
    std::uint64_t n = p_->interval_of(x);
    return p_->cut(n) + p_->cut(n + 1) - x - 1;
  }
  std::uint64_t inverse(std::uint64_t m) const override { return forward(m); }
  std::uint64_t bound(std::uint64_t m) const override { return p_->cut(p_->interval_of(m) + 1); }
  std::string describe() const override { return "flip(" + p_->describe() + ")"; }

 private:
  Partition p_;
};

struct EscapeState {
  Perm p;
  std::mutex mu;
  std::vector<std::uint64_t> f;
  std::uint64_t max_image = 0;  // max p[[0, f.size())]
  std::uint64_t scanned = 0;    // z < scanned folded into max_inverse
  std::uint64_t max_inverse = 0;
};

}  // namespace

Perm flip_permutation(Partition partition) { return std::make_shared<Flip>(std::move(partition)); }

std::function<std::uint64_t(std::uint64_t)> escape_function(Perm p) {
  auto st = std::make_shared<EscapeState>();
  st->p = std::move(p);
  return [st](std::uint64_t n) {
    std::lock_guard<std::mutex> lk(st->mu);
    while (st->f.size() <= n) {
      std::uint64_t x = st->f.size();
      st->max_image = std::max(st->max_image, st->p->forward(x));
      for (; st->scanned <= st->max_image; ++st->scanned)
        st->max_inverse = std::max(st->max_inverse, st->p->inverse(st->scanned));
      st->f.push_back(1 + std::max(x, st->max_inverse));
    }
    return st->f[n];
  };
}

Set preserved_set(std::function<std::uint64_t(std::uint64_t)> g, std::string name) {
  return iterated(std::move(g), "preserved(" + name + ")");
}

DominationReport dominates(const IntervalPartition& j, const IntervalPartition& i, std::uint64_t horizon) {
  DominationReport r;
  for (std::uint64_t k = 0; j.cut(k + 1) <= horizon; ++k) {
    ++r.checked;
    std::uint64_t n = i.first_cut_at_least(j.cut(k));
    if (i.cut(n + 1) > j.cut(k + 1)) {
      ++r.failures;
      r.failing.push_back(k);
    }
  }
  return r;
}

std::string JumbleReport::json() const {
  nlohmann::json j;
  j["horizon"] = horizon;
  j["elements"] = elements;
  j["reversals"] = reversals;
  j["max_involved"] = any_reversal ? nlohmann::json(max_involved) : nlohmann::json(nullptr);
  j["threshold"] = threshold;
  j["verdict"] = verdict();
  auto& cp = j["checkpoints"] = nlohmann::json::array();
  for (auto& c : checkpoints) cp.push_back({{"n", c.n}, {"reversals", c.reversals}});
  return j.dump(2);
}

JumbleReport jumble_test(const Permutation& p, const SetSource& a, std::uint64_t horizon) {
  JumbleReport r;
  r.horizon = horizon;
  r.threshold = horizon / 10;
  std::vector<std::uint64_t> xs, img;
  for (std::uint64_t k = 0;; ++k) {
    std::uint64_t x = a.nth(k);
    if (x >= horizon) break;
    xs.push_back(x);
    img.push_back(p.forward(x));
  }
  r.elements = xs.size();
  std::vector<std::uint64_t> sorted = img;
  std::sort(sorted.begin(), sorted.end());
  // Fenwick tree over ranks of the images seen so far
  std::vector<std::uint64_t> fen(sorted.size() + 1, 0);
  std::vector<std::uint64_t> marks;
  for (std::uint64_t n = horizon; n >= 1; n /= 4) marks.push_back(n);
  std::reverse(marks.begin(), marks.end());
  std::size_t mi = 0;
  for (std::size_t t = 0; t <= xs.size(); ++t) {
    std::uint64_t x = t < xs.size() ? xs[t] : horizon;
    while (mi < marks.size() && marks[mi] <= x) r.checkpoints.push_back({marks[mi++], r.reversals});
    if (t == xs.size()) break;
    std::size_t rk = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), img[t]) - sorted.begin());
    std::uint64_t below = 0;
    for (std::size_t q = rk; q > 0; q -= q & (~q + 1)) below += fen[q];
    std::uint64_t greater = t - below;
    if (greater > 0) {
      r.reversals += greater;
      r.any_reversal = true;
      r.max_involved = x;
    }
    for (std::size_t q = rk + 1; q < fen.size(); q += q & (~q + 1)) ++fen[q];
  }
  r.preserved = !(r.any_reversal && r.max_involved >= r.threshold);
  return r;
}

MixPermutation::MixPermutation(Perm p) : p_(std::move(p)) {}

std::string MixPermutation::describe() const { return "mix(" + p_->describe() + ")"; }

std::vector<MixCheckpoint> MixPermutation::checkpoints() const {
  auto lk = lock();
  return checkpoints_;
}

std::vector<MixCheckpoint> MixPermutation::checkpoints_through(std::uint64_t m) const {
  auto lk = lock();
  while (checkpoints_.empty() || checkpoints_.back().m < m) plan_stage();
  return checkpoints_;
}

void MixPermutation::plan_stage() const {
  const std::uint64_t n = planned_;
  const bool odd = checkpoints_.size() % 2 == 1;
  auto take = [&](std::uint64_t v) {
    if (v >= taken_.size()) taken_.resize(std::max<std::size_t>(v + 1, 2 * taken_.size()), 0);
    if (taken_[v]) return;
    taken_[v] = 1;
    queue_.push_back(v);
    range_max_ = std::max(range_max_, v);
    need_ = std::max(need_, p_->inverse(v));
    ++planned_;
  };
  auto is_taken = [&](std::uint64_t v) { return v < taken_.size() && taken_[v]; };
  std::uint64_t m;
  if (odd) {
    // least M with the planned range inside p[[0,M)]
    m = std::max(n + 1, need_ + 1);
    for (std::uint64_t j = p_scanned_; j < m; ++j) {
      std::uint64_t v = p_->forward(j);
      if (!is_taken(v)) take(v);
    }
    p_scanned_ = m;
  } else {
    m = std::max(n + 1, n == 0 ? 1 : range_max_ + 1);
    for (std::uint64_t v = id_scanned_; v < m; ++v)
      if (!is_taken(v)) take(v);
    id_scanned_ = m;
  }
  if (planned_ != m) throw std::logic_error("mix: stage fill mismatch");
  checkpoints_.push_back({m, odd});
}

std::uint64_t MixPermutation::next() const {
  if (queue_pos_ >= queue_.size()) {
    queue_.clear();
    queue_pos_ = 0;
    plan_stage();
  }
  return queue_[queue_pos_++];
}

std::shared_ptr<const MixPermutation> mix(Perm p) { return std::make_shared<MixPermutation>(std::move(p)); }

namespace {

class Spread : public TermSource {
 public:
  Spread(Source base, Set pos) : base_(std::move(base)), pos_(std::move(pos)) {}
  std::size_t dim() const override { return base_->dim(); }
  void eval(std::uint64_t n, double* out) const override {
    if (pos_->contains(n)) {
      base_->eval(pos_->rank(n), out);
      return;
    }
    for (std::size_t i = 0; i < base_->dim(); ++i) out[i] = 0.0;
  }
  std::string describe() const override { return "spread(" + base_->describe() + " @ " + pos_->describe() + ")"; }

 private:
  Source base_;
  Set pos_;
};

}  // namespace

Source spread_source(Source base, Set positions) {
  return std::make_shared<Spread>(std::move(base), std::move(positions));
}

PaddingSchedule::PaddingSchedule(std::vector<Perm> perms) : perms_(std::move(perms)), scanned_(perms_.size(), 0) {}

void PaddingSchedule::extend_to(std::uint64_t k) const {
  while (l_.size() <= k) {
    const std::uint64_t step = l_.size() - 1;  // choosing l(step + 1)
    const std::uint64_t cur = l_.back();
    std::set<std::uint64_t> fresh;
    for (std::size_t m = 0; m < perms_.size() && m <= step; ++m) {
      std::uint64_t upto = perms_[m]->inverse(cur);
      for (; scanned_[m] <= upto; ++scanned_[m]) {
        std::uint64_t v = perms_[m]->forward(scanned_[m]);
        if (v > cur) fresh.insert(v);
      }
    }
    std::vector<std::uint64_t> merged;
    std::set_union(excluded_.begin(), excluded_.end(), fresh.begin(), fresh.end(), std::back_inserter(merged));
    std::uint64_t v = cur + 1;
    std::size_t i = 0;
    while (i < merged.size() && merged[i] == v) {
      ++v;
      ++i;
    }
    l_.push_back(v);
    excluded_.assign(std::upper_bound(merged.begin(), merged.end(), v), merged.end());
  }
}

bool PaddingSchedule::contains(std::uint64_t n) const {
  std::lock_guard<std::mutex> lk(mu_);
  while (l_.back() < n) extend_to(l_.size());
  return std::binary_search(l_.begin(), l_.end(), n);
}

std::uint64_t PaddingSchedule::rank(std::uint64_t n) const {
  std::lock_guard<std::mutex> lk(mu_);
  while (l_.back() < n) extend_to(l_.size());
  return static_cast<std::uint64_t>(std::lower_bound(l_.begin(), l_.end(), n) - l_.begin());
}

std::uint64_t PaddingSchedule::nth(std::uint64_t k) const {
  std::lock_guard<std::mutex> lk(mu_);
  extend_to(k);
  return l_[k];
}

std::string PaddingSchedule::describe() const {
  std::string s = "pad-against[";
  for (std::size_t m = 0; m < perms_.size(); ++m) s += (m ? "," : "") + perms_[m]->describe();
  return s + "]";
}

std::string PaddingSchedule::csv(std::uint64_t count) const {
  std::ostringstream os;
  os << "k,l_k\n";
  for (std::uint64_t k = 0; k < count; ++k) os << k << ',' << nth(k) << '\n';
  return os.str();
}

Padding pad_against(std::vector<Perm> perms, Source base) {
  auto sched = std::make_shared<PaddingSchedule>(std::move(perms));
  auto src = spread_source(std::move(base), sched);
  return {sched, src};
}

Source pad_by_iteration(std::function<std::uint64_t(std::uint64_t)> g, Source base, std::string name) {
  return spread_source(std::move(base), iterated(std::move(g), std::move(name)));
}

}  // namespace rr
