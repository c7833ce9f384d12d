#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rr/permutation.hpp"
#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

namespace rr {

struct VectorBatch {
  std::size_t d = 1;
  std::vector<Vec> v;
};

VectorBatch load_batch(const std::string& path);

struct ConfinementResult {
  std::vector<std::size_t> ordering;  // ordering[0] == 0
  double achieved = 0.0;   // max over prefixes of the prefix-sum norm
  double reference = 0.0;  // rho * C(d) + |b| with C(d) = d
  double rho = 0.0;        // max(max |v_i|, |b|)
  double b_norm = 0.0;
};

// Max Euclidean norm over the prefix sums of the batch taken in the given order.
double prefix_bound(const VectorBatch& batch, const std::vector<std::size_t>& order);

inline constexpr std::size_t kBruteForceLimit = 10;

ConfinementResult confine_bruteforce(const VectorBatch& batch, unsigned threads = 0);
ConfinementResult confine_greedy(const VectorBatch& batch);

enum class KernelVerdict { independent, dependent, undetermined };

struct DirectionScore {
  Vec s;
  double growth = 0.0;    // sum over n < horizon of |<s, a_n>|
  double increase = 0.0;  // contribution of the final decade [horizon/10, horizon)
  bool bounded = false;
};

struct KernelDiagnostic {
  std::vector<DirectionScore> directions;
  KernelVerdict verdict = KernelVerdict::undetermined;
  Vec witness;  // a bounded direction when dependent
  std::string name() const;
};

KernelDiagnostic kernel_diagnostic(const TermSource& source, std::uint64_t horizon, std::size_t directions,
                                   std::uint64_t seed = 1, double tol = 1e-3);

struct SteerOptions {
  std::vector<std::uint64_t> prefix;  // emitted first
  // Stages that end before the horizon aim this fraction of the way from the
  // unrearranged partial sum toward the target; later stages aim at the target.
  double approach = 1.0;
  std::uint64_t first_stage = 256;
  double reach = 8.0;        // candidates come from [N/2, reach * N)
  double bin_ratio = 1.08;   // geometric width of the candidate bins
  std::uint64_t fill_samples = 256;
  std::uint64_t swap_rounds = 20000;
  std::uint64_t seed = 1;
  bool check_preconditions = true;
  std::uint64_t check_horizon = 100000;
};

struct StageInfo {
  std::uint64_t end;  // stage covers emission positions [previous end, end)
  Vec aim;            // the sum the stage was planned to reach
  Vec reached;        // planned sum at the stage end
};

// Stage-planned steering. Stage ends form a doubling ladder through the
// horizon; after a stage ending at N, every index below N/2 has been emitted
// and the emitted set has been chosen (bin LP + rounding + swap repair) so its
// sum is as close as possible to the stage aim. Stages before the horizon pick
// only from a plan for the horizon, so the horizon stage can still meet it.
class SteeringPermutation : public SequentialPermutation {
 public:
  SteeringPermutation(Source source, Vec target, std::uint64_t horizon, SteerOptions opts);
  std::uint64_t bound(std::uint64_t m) const override;
  std::string describe() const override;
  std::vector<StageInfo> stages() const;
  std::uint64_t stage_end_after(std::uint64_t n) const;

 protected:
  std::uint64_t next() const override;
  std::uint64_t search_limit(std::uint64_t m) const override;

 private:
  struct Selection {
    std::vector<std::uint64_t> mandatory, picks;
    Vec reached;
  };
  Selection select(std::uint64_t N, const Vec& aim, const Vec& start, const std::vector<char>& taken,
                   const std::vector<char>* allow) const;
  Vec natural_aim(std::uint64_t N) const;
  void plan_stage() const;
  Source source_;
  Vec target_;
  std::uint64_t horizon_;
  SteerOptions opts_;
  mutable std::vector<char> emitted_;
  mutable std::vector<std::uint64_t> queue_;
  mutable std::size_t queue_pos_ = 0;
  mutable std::uint64_t planned_ = 0;  // positions covered by planned stages
  mutable std::vector<Accumulator> run_;  // running sum of planned emissions
  mutable std::vector<StageInfo> stages_;
};

std::shared_ptr<const SteeringPermutation> levy_steinitz_rearrange(Source source, Vec target, std::uint64_t horizon,
                                                                   SteerOptions opts = {});

}  // namespace rr
