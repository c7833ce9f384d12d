#include "rr/coding.hpp"

#include <map>
#include <set>

namespace rr {

namespace {

// Tracks a growing finite set of used naturals.
struct Used {
  std::set<std::uint64_t> s;
  std::uint64_t least = 0;

  void add(std::uint64_t x) {
    s.insert(x);
    while (s.count(least)) ++least;
  }
  // Position of an unused x among the unused naturals.
  std::uint64_t position(std::uint64_t x) const {
    return x - static_cast<std::uint64_t>(std::distance(s.begin(), s.lower_bound(x)));
  }
  // The r-th unused natural.
  std::uint64_t nth(std::uint64_t r) const {
    std::uint64_t v = r;
    for (auto e : s) {
      if (e <= v)
        ++v;
      else
        break;
    }
    return v;
  }
};

}  // namespace

std::vector<std::uint64_t> encode_permutation(const Permutation& p, std::uint64_t k) {
  Used args, vals;
  std::vector<std::uint64_t> code;
  code.reserve(k);
  for (std::uint64_t r = 0; r < k; ++r) {
    if (r % 2 == 0) {
      std::uint64_t a = args.least, b = p.forward(a);
      code.push_back(vals.position(b));
      args.add(a);
      vals.add(b);
    } else {
      std::uint64_t b = vals.least, a = p.inverse(b);
      code.push_back(args.position(a));
      args.add(a);
      vals.add(b);
    }
  }
  return code;
}

Perm decode_permutation(const std::vector<std::uint64_t>& code) {
  Used args, vals;
  std::map<std::uint64_t, std::uint64_t> pairs;
  for (std::size_t r = 0; r < code.size(); ++r) {
    std::uint64_t a, b;
    if (r % 2 == 0) {
      a = args.least;
      b = vals.nth(code[r]);
    } else {
      b = vals.least;
      a = args.nth(code[r]);
    }
    pairs[a] = b;
    args.add(a);
    vals.add(b);
  }
  return finite_table(pairs);
}

}  // namespace rr
