#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "rr/permutation.hpp"
#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

namespace rr {

// s(n) in {0,1}: top bit of mix2(seed, n) (see hash.hpp). Version 1 of the
// sign stream; changing it changes every recorded Monte Carlo result.
inline constexpr int kSignStreamVersion = 1;
int sign_bit(std::uint64_t seed, std::uint64_t n);

// (-1)^{s(n)} c_n for a nonnegative scalar magnitude source.
class RandomSigns : public TermSource {
 public:
  RandomSigns(Source magnitudes, std::uint64_t seed);
  void eval(std::uint64_t n, double* out) const override;
  std::string describe() const override;
  int sign(std::uint64_t n) const { return sign_bit(seed_, n); }
  std::uint64_t seed() const { return seed_; }

 private:
  Source c_;
  std::uint64_t seed_;
};

std::shared_ptr<const RandomSigns> random_signs(Source magnitudes, std::uint64_t seed);

struct McTrial {
  double tail_osc;     // max - min of prefix sums over the final window
  double running_max;  // max |prefix sum|
};

struct McReport {
  std::uint64_t trials = 0, horizon = 0, window = 0, seed = 0;
  double osc_tol = 0.0, blowup = 0.0;
  std::vector<McTrial> per_trial;
  double convergence_fraction = 0.0;  // tail_osc < osc_tol
  double divergence_fraction = 0.0;   // running_max > blowup

  std::string json() const;
  std::string csv() const;  // trial,tail_osc,running_max
};

// Trial t draws its signs with seed mix2(seed, t); threads only split the
// trial range, so the report does not depend on them.
McReport rademacher_mc(Source magnitudes, std::uint64_t trials, std::uint64_t horizon, std::uint64_t window,
                       double osc_tol, double blowup, std::uint64_t seed, unsigned threads = 0);

// Partial sums of sum_n (-1)^{s(p(n))} / (p(n) + 1).
Trajectory bp_experiment(const Permutation& p, std::uint64_t seed, std::uint64_t horizon,
                         const Sampling& sampling = {});

}  // namespace rr
