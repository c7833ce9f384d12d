#pragma once
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace rr {

// A bijection of N given lazily in both directions.
class Permutation {
 public:
  virtual ~Permutation() = default;
  virtual std::uint64_t forward(std::uint64_t n) const = 0;
  virtual std::uint64_t inverse(std::uint64_t m) const = 0;
  // N(m): a bound with m in forward[[0, N(m))].
  virtual std::uint64_t bound(std::uint64_t m) const = 0;
  virtual std::string describe() const = 0;

  std::vector<std::uint64_t> prefix(std::uint64_t n) const;
};

using Perm = std::shared_ptr<const Permutation>;

inline constexpr std::uint64_t kUnknown = std::numeric_limits<std::uint64_t>::max();

// Base for generators that emit forward(0), forward(1), ... in order.
// Both directions are memoized; extension is serialized by a mutex, so
// concurrent readers see the same tables.
class SequentialPermutation : public Permutation {
 public:
  std::uint64_t forward(std::uint64_t n) const override;
  std::uint64_t inverse(std::uint64_t m) const override;
  std::uint64_t bound(std::uint64_t m) const override;
  std::uint64_t emitted() const;

 protected:
  // Produces forward(k) where k is the number of values emitted so far.
  // Called with the memo lock held.
  virtual std::uint64_t next() const = 0;
  // Emission position by which m must have appeared; exceeding it is a bug.
  virtual std::uint64_t search_limit(std::uint64_t m) const;
  bool used(std::uint64_t m) const;  // lock must be held
  std::unique_lock<std::mutex> lock() const { return std::unique_lock<std::mutex>(mu_); }
  std::uint64_t count() const { return fwd_.size(); }

 private:
  void push() const;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> fwd_;
  mutable std::vector<std::uint64_t> inv_;
};

Perm identity();
// Finite injection args -> values, completed by the order-preserving
// bijection between the unused arguments and the unused values.
Perm finite_table(const std::map<std::uint64_t, std::uint64_t>& pairs);
// Table on [0, n) given as values[i] = p(i), identity-style completion.
Perm finite_table(const std::vector<std::uint64_t>& values);
// n -> outer(inner(n)).
Perm compose(Perm outer, Perm inner);
Perm inverse_of(Perm p);

// Throws PreconditionError unless values are pairwise distinct.
void check_injective(const std::vector<std::uint64_t>& values, const char* what);

}  // namespace rr
