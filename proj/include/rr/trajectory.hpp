#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rr/permutation.hpp"
#include "rr/terms.hpp"

namespace rr {

// Which prefix lengths N get recorded: 1..dense, then a geometric ladder
// with the given ratio, plus any extra indices; the horizon is always last.
struct Sampling {
  std::uint64_t dense = 100;
  double ratio = 1.1;
  std::vector<std::uint64_t> extra;

  std::vector<std::uint64_t> indices(std::uint64_t horizon) const;
};

// Running sums Σ_{n<N} a_{p(n)} recorded at sampled N.
struct Trajectory {
  std::size_t d = 1;
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> index;  // N: number of terms summed
  std::vector<double> sum;           // d values per sample
  std::vector<double> seg_min;       // extremes of the running sum since the previous sample
  std::vector<double> seg_max;
  std::vector<double> last_mag;      // |a_{p(N-1)}| (Euclidean norm for d > 1)

  std::size_t size() const { return index.size(); }
  double at(std::size_t k, std::size_t c = 0) const { return sum[k * d + c]; }
  double final_value(std::size_t c = 0) const { return at(size() - 1, c); }
  Vec final_vec() const;
  // Extremes over every recorded segment.
  double running_min(std::size_t c = 0) const;
  double running_max(std::size_t c = 0) const;
};

// Neumaier compensated accumulator.
class Accumulator {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

Trajectory partial_sums(const TermSource& source, const Permutation& perm, std::uint64_t horizon,
                        const Sampling& sampling = {});

std::string trajectory_csv(const Trajectory& t);
std::string trajectory_json(const Trajectory& t);
Trajectory trajectory_from_json(const std::string& text);

}  // namespace rr
