#pragma once
#include <cstdint>
#include <memory>
#include <vector>

#include "rr/permutation.hpp"
#include "rr/sets.hpp"
#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

namespace rr {

struct GreedyOptions {
  std::vector<std::uint64_t> prefix;  // prefix[i] = p(i), emitted first
  bool check_pcc = true;
  std::uint64_t pcc_horizon = 10000;
  // consecutive indices scanned for the next term of one sign before giving up
  std::uint64_t scan_limit = std::uint64_t(1) << 22;
};

// Shared machinery of the Riemann-style emitters: two sign classes
// (positive, and nonpositive) consumed in increasing index order.
class GreedyPermutation : public SequentialPermutation {
 public:
  GreedyPermutation(Source s, GreedyOptions opts);

 protected:
  std::uint64_t next() const override;
  // Chooses the class for the next term: true = positive.
  virtual bool choose_positive(double sum) const = 0;
  virtual void after_emit(std::uint64_t position, bool positive, double sum) const;
  double current_sum() const { return sum_.value(); }

  Source source_;

 private:
  std::uint64_t take(bool positive) const;
  GreedyOptions opts_;
  std::vector<char> in_prefix_;
  mutable std::uint64_t next_pos_ = 0, next_neg_ = 0;
  mutable Accumulator sum_;
};

Perm riemann_to_target(Source source, double target, GreedyOptions opts = {});

class InfinityPermutation : public GreedyPermutation {
 public:
  InfinityPermutation(Source s, int sign, GreedyOptions opts);
  // Emission positions of the stage-ending opposite-sign terms (stage 1, 2, ...).
  std::vector<std::uint64_t> stage_positions() const;
  std::string describe() const override;

 protected:
  bool choose_positive(double sum) const override;
  void after_emit(std::uint64_t position, bool positive, double sum) const override;

 private:
  int sign_;
  mutable std::uint64_t stage_ = 1;
  mutable std::vector<std::uint64_t> stages_;
};

std::shared_ptr<const InfinityPermutation> riemann_to_infinity(Source source, int sign, GreedyOptions opts = {});

struct Swing {
  std::uint64_t position;  // emission position of the overshooting term
  double sum;              // running sum just after it
  bool upper;              // crossed above hi (true) or below lo
};

class OscillatingPermutation : public GreedyPermutation {
 public:
  OscillatingPermutation(Source s, double lo, double hi, GreedyOptions opts);
  std::vector<Swing> swings() const;
  std::string describe() const override;

 protected:
  bool choose_positive(double sum) const override;
  void after_emit(std::uint64_t position, bool positive, double sum) const override;

 private:
  double lo_, hi_;
  mutable bool up_ = true;
  mutable std::vector<Swing> swings_;
};

std::shared_ptr<const OscillatingPermutation> riemann_oscillate(Source source, double lo, double hi,
                                                                GreedyOptions opts = {});

// s_{A,B}: A onto B and the complement of A onto the complement of B,
// both order-preservingly.
Perm shuffle(Set a, Set b);

struct TwoExponentReport {
  double alpha, beta, c;
  std::uint64_t stages;  // negative terms covered
  std::uint64_t terms;   // prefix length reached
  Trajectory traj_alpha, traj_beta;
  double max_alpha;
  double spread_beta;  // final-window spread of the beta trajectory
  double growth_exponent;  // log-log slope of the alpha sums at negative-term positions
  double expected_exponent;  // beta - alpha
  double shift_beta;  // final beta sum minus the unshuffled beta sum at the same length
};

TwoExponentReport two_exponent_experiment(double alpha, double beta, double c, std::uint64_t stages);

}  // namespace rr
