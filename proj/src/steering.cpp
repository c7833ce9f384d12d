#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rr/errors.hpp"
#include "rr/lp.hpp"
#include "rr/pcc.hpp"
#include "rr/steinitz.hpp"
#include "rr/trajectory.hpp"

namespace rr {

namespace {

double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::size_t sign_class(const double* a, std::size_t d) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < d; ++i)
    if (a[i] > 0) c |= std::size_t(1) << i;
  return c;
}

std::vector<std::uint64_t> ladder(std::uint64_t horizon, std::uint64_t first_stage, std::uint64_t prefix_len) {
  std::uint64_t lo = std::max<std::uint64_t>(2 * prefix_len, 16);
  if (horizon < lo) return {lo};
  std::vector<std::uint64_t> e{horizon};
  while (e.back() / 2 >= std::max(lo, first_stage)) e.push_back(e.back() / 2);
  std::reverse(e.begin(), e.end());
  return e;
}

}  // namespace

SteeringPermutation::SteeringPermutation(Source source, Vec target, std::uint64_t horizon, SteerOptions opts)
    : source_(std::move(source)), target_(std::move(target)), horizon_(horizon), opts_(std::move(opts)) {
  const std::size_t d = source_->dim();
  if (target_.size() != d) throw PreconditionError("steering target dimension does not match the source");
  if (horizon_ < 1) throw PreconditionError("steering horizon must be at least 1");
  if (d > 8) throw PreconditionError("steering supports d <= 8");
  if (!(opts_.approach >= 0.0 && opts_.approach <= 1.0)) throw PreconditionError("approach must lie in [0,1]");
  if (!(opts_.reach >= 2.0) || !(opts_.bin_ratio > 1.0)) throw PreconditionError("steering reach/bin ratio out of range");
  check_injective(opts_.prefix, "prefix");
  if (opts_.check_preconditions) {
    for (std::size_t i = 0; i < d; ++i) {
      auto src = source_;
      auto coord = function_source("coord", [src, i](std::uint64_t n) { return src->term(n)[i]; });
      if (!pcc_check(*coord, opts_.check_horizon).pcc)
        throw PreconditionError("coordinate " + std::to_string(i) + " fails the pcc proxy");
    }
    auto kd = kernel_diagnostic(*source_, opts_.check_horizon, std::max<std::size_t>(2 * d, 8));
    if (kd.verdict == KernelVerdict::dependent)
      throw Refused("kernel diagnostic found a dependent direction; the target may be unreachable");
  }
  run_.assign(d, Accumulator{});
}

std::uint64_t SteeringPermutation::stage_end_after(std::uint64_t n) const {
  auto e = ladder(horizon_, opts_.first_stage, opts_.prefix.size());
  while (e.back() <= n) e.push_back(e.back() * 2);
  return *std::upper_bound(e.begin(), e.end(), n);
}

std::uint64_t SteeringPermutation::bound(std::uint64_t m) const {
  for (std::size_t i = 0; i < opts_.prefix.size(); ++i)
    if (opts_.prefix[i] == m) return i + 1;
  auto e = ladder(horizon_, opts_.first_stage, opts_.prefix.size());
  while (true) {
    for (auto x : e)
      if (m < x / 2) return x;
    e.push_back(e.back() * 2);
  }
}

std::uint64_t SteeringPermutation::search_limit(std::uint64_t m) const { return bound(m); }

std::string SteeringPermutation::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "steer:target=";
  for (std::size_t i = 0; i < target_.size(); ++i) os << (i ? ";" : "") << target_[i];
  os << ",horizon=" << horizon_;
  return os.str();
}

std::vector<StageInfo> SteeringPermutation::stages() const {
  auto lk = lock();
  return stages_;
}

std::uint64_t SteeringPermutation::next() const {
  while (queue_pos_ >= queue_.size()) plan_stage();
  return queue_[queue_pos_++];
}

Vec SteeringPermutation::natural_aim(std::uint64_t N) const {
  const std::size_t d = source_->dim();
  Vec aim = target_;
  if (N >= horizon_) return aim;
  std::vector<Accumulator> nat(d);
  Vec prev(d), a(d);
  for (std::uint64_t n = 0; n <= N; ++n) {
    if (n == N)
      for (std::size_t i = 0; i < d; ++i) prev[i] = nat[i].value();
    source_->eval(n, a.data());
    for (std::size_t i = 0; i < d; ++i) nat[i].add(a[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    double ref = 0.5 * (prev[i] + nat[i].value());
    aim[i] = ref + opts_.approach * (target_[i] - ref);
  }
  return aim;
}

SteeringPermutation::Selection SteeringPermutation::select(std::uint64_t N, const Vec& aim, const Vec& start,
                                                           const std::vector<char>& taken,
                                                           const std::vector<char>* allow) const {
  const std::size_t d = source_->dim();
  const std::uint64_t half = N / 2;
  const std::uint64_t top = static_cast<std::uint64_t>(opts_.reach * static_cast<double>(N));
  auto is_taken = [&](std::uint64_t i) { return i < taken.size() && taken[i]; };
  Selection sel;
  Vec a(d);
  std::vector<Accumulator> acc(d);
  for (std::size_t c = 0; c < d; ++c) acc[c].add(start[c]);
  std::uint64_t placed = 0;
  for (std::uint64_t i = 0; i < taken.size() && i < top; ++i) placed += taken[i] ? 1 : 0;
  for (std::uint64_t i = top; i < taken.size(); ++i) placed += taken[i] ? 1 : 0;
  for (std::uint64_t i = 0; i < half; ++i) {
    if (is_taken(i)) continue;
    sel.mandatory.push_back(i);
    source_->eval(i, a.data());
    for (std::size_t c = 0; c < d; ++c) acc[c].add(a[c]);
  }
  Vec cur(d);
  for (std::size_t c = 0; c < d; ++c) cur[c] = acc[c].value();
  placed += sel.mandatory.size();
  const std::uint64_t R = N > placed ? N - placed : 0;
  sel.reached = cur;
  if (R == 0) return sel;

  // candidates, grouped by sign class and geometric index range
  const std::size_t nclass = std::size_t(1) << d;
  std::vector<std::uint64_t> cand;
  std::vector<std::uint32_t> cls;
  for (std::uint64_t i = half; i < top; ++i) {
    if (is_taken(i) || (allow && !(i < allow->size() && (*allow)[i]))) continue;
    source_->eval(i, a.data());
    cand.push_back(i);
    cls.push_back(static_cast<std::uint32_t>(sign_class(a.data(), d)));
  }
  if (cand.size() < R) throw Error("steering: too few candidates at N=" + std::to_string(N));
  std::vector<std::uint64_t> edges{half};
  while (edges.back() < top)
    edges.push_back(std::min(top, std::max(edges.back() + 1,
                                           static_cast<std::uint64_t>(static_cast<double>(edges.back()) * opts_.bin_ratio))));
  const std::size_t nbin = edges.size() - 1;
  std::vector<std::size_t> bin_of(cand.size());
  std::vector<std::uint64_t> cnt(nbin * nclass, 0);
  std::vector<double> tot(nbin * nclass * d, 0.0);
  {
    std::size_t b = 0;
    for (std::size_t q = 0; q < cand.size(); ++q) {
      while (cand[q] >= edges[b + 1]) ++b;
      std::size_t key = b * nclass + cls[q];
      bin_of[q] = key;
      ++cnt[key];
      source_->eval(cand[q], a.data());
      for (std::size_t c = 0; c < d; ++c) tot[key * d + c] += a[c];
    }
  }
  std::vector<std::size_t> keys;
  for (std::size_t key = 0; key < cnt.size(); ++key)
    if (cnt[key] > 0) keys.push_back(key);
  const std::size_t nv = keys.size() + 2 * d;
  std::vector<std::vector<double>> A(d + 1, std::vector<double>(nv, 0.0));
  std::vector<double> rhs(d + 1), cost(nv, 0.0), upper(nv, INFINITY);
  for (std::size_t j = 0; j < keys.size(); ++j) {
    for (std::size_t c = 0; c < d; ++c) A[c][j] = tot[keys[j] * d + c] / static_cast<double>(cnt[keys[j]]);
    A[d][j] = 1.0;
    upper[j] = static_cast<double>(cnt[keys[j]]);
    // among equally good plans, prefer candidates further out
    cost[j] = -1e-9 * static_cast<double>(keys[j] / nclass + 1);
  }
  for (std::size_t c = 0; c < d; ++c) {
    A[c][keys.size() + c] = 1.0;
    A[c][keys.size() + d + c] = -1.0;
    cost[keys.size() + c] = cost[keys.size() + d + c] = 1.0;
    rhs[c] = aim[c] - cur[c];
  }
  rhs[d] = static_cast<double>(R);
  auto lp = solve_lp(A, rhs, cost, upper);
  if (!lp.feasible) throw Error("steering: stage plan infeasible at N=" + std::to_string(N));

  // rounding: floor of each bin's share, spread evenly through the bin
  std::vector<std::uint64_t> want(nbin * nclass, 0);
  for (std::size_t j = 0; j < keys.size(); ++j)
    want[keys[j]] = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(lp.x[j] + 1e-9)), cnt[keys[j]]);
  std::vector<char> chosen(cand.size(), 0);
  std::vector<std::uint64_t> seen(nbin * nclass, 0), got(nbin * nclass, 0);
  std::vector<std::size_t> picks;  // positions in cand
  for (std::size_t q = 0; q < cand.size() && picks.size() < R; ++q) {
    std::size_t key = bin_of[q];
    if (got[key] < want[key] &&
        seen[key] == static_cast<std::uint64_t>(static_cast<double>(cnt[key]) / static_cast<double>(want[key]) *
                                                static_cast<double>(got[key]))) {
      picks.push_back(q);
      chosen[q] = 1;
      ++got[key];
      source_->eval(cand[q], a.data());
      for (std::size_t c = 0; c < d; ++c) cur[c] += a[c];
    }
    ++seen[key];
  }

  std::mt19937_64 rng(opts_.seed * 0x9E3779B97F4A7C15ull + N);
  auto draw = [&]() -> std::size_t {
    for (int tries = 0; tries < 1000; ++tries) {
      std::size_t q = rng() % cand.size();
      if (!chosen[q]) return q;
    }
    for (std::size_t q = 0; q < cand.size(); ++q)
      if (!chosen[q]) return q;
    throw Error("steering: candidates exhausted at N=" + std::to_string(N));
  };
  Vec trial(d), out(d);
  while (picks.size() < R) {
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::uint64_t s = 0; s < opts_.fill_samples; ++s) {
      std::size_t q = draw();
      source_->eval(cand[q], a.data());
      for (std::size_t c = 0; c < d; ++c) trial[c] = cur[c] + a[c];
      double v = dist2(trial, aim);
      if (v < bd) {
        bd = v;
        best = q;
      }
    }
    picks.push_back(best);
    chosen[best] = 1;
    source_->eval(cand[best], a.data());
    for (std::size_t c = 0; c < d; ++c) cur[c] += a[c];
  }
  // swap repair: exchange a pick for an unused candidate when it helps
  double err = dist2(cur, aim);
  if (picks.size() < cand.size())
    for (std::uint64_t r = 0; r < opts_.swap_rounds && err > 0; ++r) {
      std::size_t p = rng() % picks.size();
      std::size_t q = draw();
      source_->eval(cand[picks[p]], out.data());
      source_->eval(cand[q], a.data());
      for (std::size_t c = 0; c < d; ++c) trial[c] = cur[c] + a[c] - out[c];
      double v = dist2(trial, aim);
      if (v < err) {
        err = v;
        cur = trial;
        chosen[picks[p]] = 0;
        chosen[q] = 1;
        picks[p] = q;
      }
    }
  for (auto q : picks) sel.picks.push_back(cand[q]);
  sel.reached = cur;
  return sel;
}

void SteeringPermutation::plan_stage() const {
  const std::size_t d = source_->dim();
  const std::size_t k = stages_.size();
  auto ends = ladder(horizon_, opts_.first_stage, opts_.prefix.size());
  while (ends.size() <= k + 1) ends.push_back(ends.back() * 2);
  const std::uint64_t N = ends[k];

  queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(queue_pos_));
  queue_pos_ = 0;
  Vec a(d);
  auto& run = run_;
  if (k == 0)
    for (auto v : opts_.prefix) {
      if (v >= emitted_.size()) emitted_.resize(v + 1, 0);
      emitted_[v] = 1;
      queue_.push_back(v);
      source_->eval(v, a.data());
      for (std::size_t c = 0; c < d; ++c) run[c].add(a[c]);
    }
  Vec start(d);
  for (std::size_t c = 0; c < d; ++c) start[c] = run[c].value();

  // Before the horizon, keep this stage's picks inside a plan for the
  // horizon itself, so that plan stays realizable.
  Vec aim = natural_aim(N);
  Selection sel;
  if (N < horizon_) {
    auto look = select(horizon_, target_, start, emitted_, nullptr);
    std::vector<char> allow(static_cast<std::size_t>(opts_.reach * static_cast<double>(horizon_)) + 1, 0);
    for (auto i : look.mandatory) allow[i] = 1;
    for (auto i : look.picks) allow[i] = 1;
    sel = select(N, aim, start, emitted_, &allow);
  } else {
    sel = select(N, aim, start, emitted_, nullptr);
  }

  std::vector<std::uint64_t> items = sel.mandatory;
  items.insert(items.end(), sel.picks.begin(), sel.picks.end());
  std::sort(items.begin(), items.end());
  for (auto i : items) {
    if (i >= emitted_.size()) emitted_.resize(i + 1, 0);
    emitted_[i] = 1;
  }

  // emission order: merge the sign classes, each in increasing index order,
  // steering the running sum toward the aim
  const std::size_t nclass = std::size_t(1) << d;
  std::vector<std::vector<std::uint64_t>> lanes(nclass);
  for (auto i : items) {
    source_->eval(i, a.data());
    lanes[sign_class(a.data(), d)].push_back(i);
  }
  std::vector<std::size_t> head(nclass, 0);
  Vec s = start, t(d), best_term(d);
  for (std::size_t step = 0; step < items.size(); ++step) {
    std::size_t pick = nclass;
    double bd = INFINITY;
    for (std::size_t l = 0; l < nclass; ++l) {
      if (head[l] >= lanes[l].size()) continue;
      source_->eval(lanes[l][head[l]], a.data());
      for (std::size_t c = 0; c < d; ++c) t[c] = s[c] + a[c];
      double v = dist2(t, aim);
      if (v < bd) {
        bd = v;
        pick = l;
        best_term = a;
      }
    }
    queue_.push_back(lanes[pick][head[pick]++]);
    for (std::size_t c = 0; c < d; ++c) {
      run[c].add(best_term[c]);
      s[c] = run[c].value();
    }
  }
  planned_ = N;
  stages_.push_back({N, aim, s});
}

std::shared_ptr<const SteeringPermutation> levy_steinitz_rearrange(Source source, Vec target, std::uint64_t horizon,
                                                                   SteerOptions opts) {
  return std::make_shared<SteeringPermutation>(std::move(source), std::move(target), horizon, std::move(opts));
}

}  // namespace rr
