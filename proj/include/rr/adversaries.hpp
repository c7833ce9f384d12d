#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "rr/permutation.hpp"
#include "rr/sets.hpp"
#include "rr/terms.hpp"

namespace rr {

// Cut points i_0 = 0 < i_1 < ..., produced on demand by step(k, i_k) = i_{k+1}.
class IntervalPartition {
 public:
  using Step = std::function<std::uint64_t(std::uint64_t k, std::uint64_t cut)>;
  IntervalPartition(Step step, std::string name);

  std::uint64_t cut(std::uint64_t k) const;
  // n with cut(n) <= x < cut(n+1).
  std::uint64_t interval_of(std::uint64_t x) const;
  // Least k with cut(k) >= x.
  std::uint64_t first_cut_at_least(std::uint64_t x) const;
  const std::string& describe() const { return name_; }

 private:
  void extend_past(std::uint64_t x) const;  // lock held
  void extend_to(std::uint64_t k) const;    // lock held
  Step step_;
  std::string name_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> cuts_{0};
};

using Partition = std::shared_ptr<const IntervalPartition>;

// Intervals of constant width.
Partition uniform_partition(std::uint64_t width);
// Widths drawn uniformly from [1, max_width], reproducible from the seed.
Partition random_partition(std::uint64_t seed, std::uint64_t max_width);
// Given cuts (must start at 0), then intervals of width tail_width.
Partition partition_from_cuts(std::vector<std::uint64_t> cuts, std::uint64_t tail_width = 1);
// J_k = [a_{3k}, a_{3k+3}) for an infinite set A = {a_0 = 0 < a_1 < ...}.
Partition triple_blocks(Set a);

// p(x) = i_n + i_{n+1} - x - 1 on each interval I_n.
Perm flip_permutation(Partition partition);

// Least admissible escape bound: f(n) = 1 + max(n, max{p^{-1}(z) : z <= max p[[0,n+1)]}).
std::function<std::uint64_t(std::uint64_t)> escape_function(Perm p);

// A = {a_0 = 0, a_{n+1} = g(a_n)}.
Set preserved_set(std::function<std::uint64_t(std::uint64_t)> g, std::string name = "g");

struct DominationReport {
  std::uint64_t checked = 0;  // J-intervals lying below the horizon
  std::uint64_t failures = 0;
  std::vector<std::uint64_t> failing;  // k with no I_n inside J_k
};

DominationReport dominates(const IntervalPartition& j, const IntervalPartition& i, std::uint64_t horizon);

struct JumbleCheckpoint {
  std::uint64_t n;          // elements of A below n were compared
  std::uint64_t reversals;  // order-reversing pairs among them
};

struct JumbleReport {
  std::uint64_t horizon = 0;
  std::uint64_t elements = 0;
  std::uint64_t reversals = 0;
  bool any_reversal = false;
  std::uint64_t max_involved = 0;  // largest element of a reversed pair
  std::uint64_t threshold = 0;     // horizon / 10
  bool preserved = true;           // no reversal involves an element >= threshold
  std::vector<JumbleCheckpoint> checkpoints;  // horizon / 4^j, increasing

  std::string verdict() const { return preserved ? "preserved-so-far" : "jumbled"; }
  std::string json() const;
};

JumbleReport jumble_test(const Permutation& p, const SetSource& a, std::uint64_t horizon);

struct MixCheckpoint {
  std::uint64_t m;  // prefix length
  bool follows_p;   // g[[0,m)] = p[[0,m)] (odd stage) or = [0,m) (even stage)
};

// Back-and-forth mixing of p with the identity. Stage 0 is an identity stage.
class MixPermutation : public SequentialPermutation {
 public:
  explicit MixPermutation(Perm p);
  std::string describe() const override;
  // Stage checkpoints planned so far.
  std::vector<MixCheckpoint> checkpoints() const;
  // Plans stages until a checkpoint at or beyond m exists.
  std::vector<MixCheckpoint> checkpoints_through(std::uint64_t m) const;

 protected:
  std::uint64_t next() const override;

 private:
  void plan_stage() const;  // lock held
  Perm p_;
  mutable std::vector<std::uint64_t> queue_;
  mutable std::size_t queue_pos_ = 0;
  mutable std::uint64_t planned_ = 0;
  mutable std::uint64_t range_max_ = 0;  // max of planned values
  mutable std::uint64_t need_ = 0;       // max p^{-1} of planned values
  mutable std::uint64_t p_scanned_ = 0;  // p[[0, p_scanned_)] all planned
  mutable std::uint64_t id_scanned_ = 0; // [0, id_scanned_) all planned
  mutable std::vector<char> taken_;
  mutable std::vector<MixCheckpoint> checkpoints_;
};

std::shared_ptr<const MixPermutation> mix(Perm p);

// a_{positions.nth(k)} = b_k, zero elsewhere.
Source spread_source(Source base, Set positions);

// Positions l(0) = 0 < l(1) < ... chosen so that each p_m keeps the order of
// l(k), l(k+1) for k >= m; the least admissible value is taken each step.
class PaddingSchedule : public SetSource {
 public:
  explicit PaddingSchedule(std::vector<Perm> perms);
  bool contains(std::uint64_t n) const override;
  std::uint64_t nth(std::uint64_t k) const override;
  std::uint64_t rank(std::uint64_t n) const override;
  std::string describe() const override;
  std::string csv(std::uint64_t count) const;

 private:
  void extend_to(std::uint64_t k) const;  // lock held
  std::vector<Perm> perms_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> l_{0};
  mutable std::vector<std::uint64_t> scanned_;  // per perm: p(j) excluded for j < scanned
  mutable std::vector<std::uint64_t> excluded_;  // sorted, all > l_.back()
};

struct Padding {
  std::shared_ptr<const PaddingSchedule> schedule;
  Source source;
};

Padding pad_against(std::vector<Perm> perms, Source base);

// a_{g^k(0)} = b_k, zero elsewhere.
Source pad_by_iteration(std::function<std::uint64_t(std::uint64_t)> g, Source base, std::string name = "g");

}  // namespace rr
