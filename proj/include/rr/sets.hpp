#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace rr {

// An infinite subset of N with membership and increasing enumeration.
class SetSource {
 public:
  virtual ~SetSource() = default;
  virtual bool contains(std::uint64_t n) const = 0;
  // k-th element in increasing order (k = 0, 1, ...).
  virtual std::uint64_t nth(std::uint64_t k) const = 0;
  // Number of elements below n.
  virtual std::uint64_t rank(std::uint64_t n) const;
  virtual std::uint64_t nth_complement(std::uint64_t k) const;
  std::uint64_t rank_complement(std::uint64_t n) const { return n - rank(n); }
  virtual bool coinfinite() const { return true; }
  virtual std::string describe() const = 0;
};

using Set = std::shared_ptr<const SetSource>;

Set naturals();
Set evens();
Set odds();
// {start + step*k}; step >= 2.
Set arithmetic(std::uint64_t start, std::uint64_t step);
// base with the membership of finitely many points toggled.
Set sym_diff(Set base, std::set<std::uint64_t> toggled);
// {a_0 = 0, a_{k+1} = g(a_k)} for strictly increasing g with g(n) > n.
Set iterated(std::function<std::uint64_t(std::uint64_t)> g, std::string name);

// Positions of the positive terms for an alternating layout in which the
// prefix ending at the m-th negative term (m >= 1) holds m + E(m) positive
// terms, E(m) = ceil(c * m^beta).
class ExcessScheduleSet : public SetSource {
 public:
  ExcessScheduleSet(double beta, double c, std::uint64_t horizon);
  bool contains(std::uint64_t n) const override;
  std::uint64_t nth(std::uint64_t k) const override;
  std::uint64_t rank(std::uint64_t n) const override;
  std::uint64_t nth_complement(std::uint64_t k) const override;
  std::string describe() const override;
  std::uint64_t excess(std::uint64_t m) const;
  // Position of the m-th negative term (m >= 1).
  std::uint64_t negative_position(std::uint64_t m) const;

 private:
  double beta_, c_;
};

std::shared_ptr<const ExcessScheduleSet> excess_schedule_set(double beta, double c, std::uint64_t horizon = 1000000);

// ceil(x) that treats values within rounding noise of an integer as that integer.
std::uint64_t ceil_guarded(double x);

}  // namespace rr
