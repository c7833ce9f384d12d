#pragma once
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

namespace rr {

struct Rational {
  std::int64_t p;
  std::uint64_t q;  // > 0, gcd(|p|, q) = 1
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  bool operator==(const Rational&) const = default;
};

// Diagonal enumeration of Q: 0 first, then for h = 2, 3, ... the reduced
// fractions a/b with a + b = h in increasing a, each followed by its negative.
std::uint64_t rational_index(const Rational& r);
Rational rational_at(std::uint64_t n);

struct AdSet {
  double r = 0.0;
  std::string name;
  std::uint64_t depth = 0;
  std::vector<Rational> rationals;  // distinct, approaching r
  std::vector<std::uint64_t> elements;  // rational_index of each

  std::string csv() const;  // element,p,q sorted by element
};

// For each real: the nearest fractions round(r k)/k, k = 1, 2, ..., with
// repeats skipped, until depth distinct rationals are collected. When
// round(r k)/k equals r exactly, (round(r k) + 1)/k is used instead.
// Reals must be pairwise separated by more than 1/sqrt(depth).
std::vector<AdSet> rational_ad_family(const std::vector<double>& reals, std::uint64_t depth,
                                      const std::vector<std::string>& names = {});

std::uint64_t intersection_size(const AdSet& a, const AdSet& b);

// Block I_i = [2^i + 1, 2^{i+1}]; returns the i containing n >= 2.
std::uint64_t block_of(std::uint64_t n);
std::uint64_t block_begin(std::uint64_t i);
std::uint64_t block_end(std::uint64_t i);  // inclusive
// Sum of 1/n over I_i.
double block_harmonic(std::uint64_t i);

using BlockSet = std::function<bool(std::uint64_t)>;
BlockSet block_set(std::set<std::uint64_t> members);
BlockSet block_set(const AdSet& a);

// a_n = -1/n on blocks in X, +1/n elsewhere, a_0 = 0.
Source signed_block_series(BlockSet x, std::string name = "X");

struct PairReport {
  Trajectory trajectory;
  double negative_total = 0.0;  // sum of the negative terms of the pair series
  std::vector<std::uint64_t> shared_blocks;  // blocks in both sets below the horizon
  std::uint64_t positive_blocks = 0;  // blocks with both signs +
  std::vector<double> block_contribution;  // pair-series sum over each complete block
  double final_value = 0.0;
  double bound = 0.0;
  bool exceeds = false;
  std::uint64_t first_exceed = 0;  // prefix length where the sum first exceeds bound
};

// sum_{n < horizon} (a^X_n + a^Y_n). Refuses when more than max_shared blocks
// below the horizon lie in both sets.
PairReport pair_divergence_check(BlockSet x, BlockSet y, std::uint64_t horizon, double bound = 5.0,
                                 std::uint64_t max_shared = 64);

struct OscillationReport {
  std::vector<double> block_sums;  // complete blocks below the horizon
  bool determined = false;          // set and complement both meet >= 2 blocks
  bool has_low = false;             // some block sum <= -1/2
  bool has_high = false;            // some block sum >= 1/2
  std::string verdict() const;
};

OscillationReport oscillation_witness(BlockSet x, std::uint64_t horizon);

}  // namespace rr
