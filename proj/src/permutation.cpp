#include "rr/permutation.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "rr/errors.hpp"

namespace rr {

std::vector<std::uint64_t> Permutation::prefix(std::uint64_t n) const {
  std::vector<std::uint64_t> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = forward(i);
  return out;
}

std::uint64_t SequentialPermutation::search_limit(std::uint64_t m) const {
  return std::max<std::uint64_t>(1u << 20, 64 * (m + 1));
}

bool SequentialPermutation::used(std::uint64_t m) const { return m < inv_.size() && inv_[m] != kUnknown; }

void SequentialPermutation::push() const {
  std::uint64_t v = next();
  if (used(v))
    throw std::logic_error(describe() + ": value " + std::to_string(v) + " emitted twice");
  if (v >= inv_.size()) inv_.resize(std::max<std::size_t>(v + 1, inv_.size() * 3 / 2 + 16), kUnknown);
  inv_[v] = fwd_.size();
  fwd_.push_back(v);
}

std::uint64_t SequentialPermutation::forward(std::uint64_t n) const {
  std::lock_guard<std::mutex> lk(mu_);
  while (fwd_.size() <= n) push();
  return fwd_[n];
}

std::uint64_t SequentialPermutation::inverse(std::uint64_t m) const {
  std::lock_guard<std::mutex> lk(mu_);
  std::uint64_t limit = search_limit(m);
  while (!used(m)) {
    if (fwd_.size() >= limit)
      throw Error(describe() + ": value " + std::to_string(m) + " not reached within " + std::to_string(limit) +
                  " emissions (beyond desk scale)");
    push();
  }
  return inv_[m];
}

std::uint64_t SequentialPermutation::bound(std::uint64_t m) const { return inverse(m) + 1; }

std::uint64_t SequentialPermutation::emitted() const {
  std::lock_guard<std::mutex> lk(mu_);
  return fwd_.size();
}

namespace {

class Identity : public Permutation {
 public:
  std::uint64_t forward(std::uint64_t n) const override { return n; }
  std::uint64_t inverse(std::uint64_t m) const override { return m; }
  std::uint64_t bound(std::uint64_t m) const override { return m + 1; }
  std::string describe() const override { return "identity"; }
};

// r-th element (0-based) of N minus the sorted finite set s.
std::uint64_t nth_outside(const std::vector<std::uint64_t>& s, std::uint64_t r) {
  std::uint64_t v = r;
  for (std::uint64_t e : s) {
    if (e <= v)
      ++v;
    else
      break;
  }
  return v;
}

// Number of elements of N minus s below x, for x outside s.
std::uint64_t rank_outside(const std::vector<std::uint64_t>& s, std::uint64_t x) {
  return x - static_cast<std::uint64_t>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

class Table : public Permutation {
 public:
  explicit Table(const std::map<std::uint64_t, std::uint64_t>& pairs) : fwd_(pairs) {
    for (auto [a, b] : pairs) {
      if (!inv_.emplace(b, a).second) throw PreconditionError("finite table is not injective");
      dom_.push_back(a);
      ran_.push_back(b);
    }
    std::sort(ran_.begin(), ran_.end());
  }
  std::uint64_t forward(std::uint64_t n) const override {
    if (auto it = fwd_.find(n); it != fwd_.end()) return it->second;
    return nth_outside(ran_, rank_outside(dom_, n));
  }
  std::uint64_t inverse(std::uint64_t m) const override {
    if (auto it = inv_.find(m); it != inv_.end()) return it->second;
    return nth_outside(dom_, rank_outside(ran_, m));
  }
  std::uint64_t bound(std::uint64_t m) const override { return inverse(m) + 1; }
  std::string describe() const override { return "table:pairs=" + std::to_string(fwd_.size()); }

 private:
  std::map<std::uint64_t, std::uint64_t> fwd_, inv_;
  std::vector<std::uint64_t> dom_, ran_;
};

class Composed : public Permutation {
 public:
  Composed(Perm o, Perm i) : outer_(std::move(o)), inner_(std::move(i)) {}
  std::uint64_t forward(std::uint64_t n) const override { return outer_->forward(inner_->forward(n)); }
  std::uint64_t inverse(std::uint64_t m) const override { return inner_->inverse(outer_->inverse(m)); }
  std::uint64_t bound(std::uint64_t m) const override {
    // m = outer(k) with k < outer.bound(m); each such k is reached before inner.bound(k).
    std::uint64_t k = outer_->inverse(m);
    return inner_->bound(k);
  }
  std::string describe() const override { return "compose(" + outer_->describe() + "," + inner_->describe() + ")"; }

 private:
  Perm outer_, inner_;
};

class Inverted : public Permutation {
 public:
  explicit Inverted(Perm p) : p_(std::move(p)) {}
  std::uint64_t forward(std::uint64_t n) const override { return p_->inverse(n); }
  std::uint64_t inverse(std::uint64_t m) const override { return p_->forward(m); }
  std::uint64_t bound(std::uint64_t m) const override { return p_->forward(m) + 1; }
  std::string describe() const override { return "inverse(" + p_->describe() + ")"; }

 private:
  Perm p_;
};

}  // namespace

Perm identity() { return std::make_shared<Identity>(); }

Perm finite_table(const std::map<std::uint64_t, std::uint64_t>& pairs) { return std::make_shared<Table>(pairs); }

Perm finite_table(const std::vector<std::uint64_t>& values) {
  std::map<std::uint64_t, std::uint64_t> pairs;
  for (std::uint64_t i = 0; i < values.size(); ++i) pairs[i] = values[i];
  return finite_table(pairs);
}

Perm compose(Perm outer, Perm inner) { return std::make_shared<Composed>(std::move(outer), std::move(inner)); }

Perm inverse_of(Perm p) { return std::make_shared<Inverted>(std::move(p)); }

void check_injective(const std::vector<std::uint64_t>& values, const char* what) {
  std::unordered_set<std::uint64_t> seen;
  for (auto v : values)
    if (!seen.insert(v).second)
      throw PreconditionError(std::string(what) + ": value " + std::to_string(v) + " repeats");
}

}  // namespace rr
