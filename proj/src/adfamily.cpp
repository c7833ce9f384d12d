#include "rr/adfamily.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "rr/errors.hpp"
#include "rr/permutation.hpp"

namespace rr {

namespace {

// prefix[h] = number of reduced positive fractions a/b with 2 <= a + b < h
struct Totients {
  std::mutex mu;
  std::vector<std::uint64_t> phi{0, 1}, prefix{0, 0, 0};

  void grow(std::uint64_t h) {
    if (prefix.size() > h) return;
    std::uint64_t n = std::max<std::uint64_t>(h + 1, 2 * prefix.size());
    phi.resize(n);
    std::iota(phi.begin(), phi.end(), 0);
    for (std::uint64_t i = 2; i < n; ++i)
      if (phi[i] == i)
        for (std::uint64_t j = i; j < n; j += i) phi[j] -= phi[j] / i;
    prefix.assign(n + 1, 0);
    for (std::uint64_t i = 2; i < n; ++i) prefix[i + 1] = prefix[i] + phi[i];
  }
};

Totients& totients() {
  static Totients t;
  return t;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      f.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) f.push_back(n);
  return f;
}

// #{1 <= a <= m : gcd(a, n) = 1}
std::uint64_t coprime_upto(std::uint64_t m, const std::vector<std::uint64_t>& primes) {
  std::int64_t total = 0;
  const std::size_t k = primes.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    std::uint64_t d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) {
        d *= primes[i];
        ++bits;
      }
    std::int64_t c = static_cast<std::int64_t>(m / d);
    total += bits % 2 ? -c : c;
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace

std::uint64_t rational_index(const Rational& r) {
  if (r.q == 0) throw PreconditionError("rational with zero denominator");
  if (r.p == 0) return 0;
  std::uint64_t a = static_cast<std::uint64_t>(r.p < 0 ? -r.p : r.p);
  if (std::gcd(a, r.q) != 1) throw PreconditionError("rational not in lowest terms");
  std::uint64_t h = a + r.q;
  auto& t = totients();
  std::uint64_t before;
  {
    std::lock_guard<std::mutex> lk(t.mu);
    t.grow(h);
    before = t.prefix[h];
  }
  // gcd(b, h - b) = gcd(b, h)
  std::uint64_t along = coprime_upto(a - 1, prime_factors(h));
  return 1 + 2 * (before + along) + (r.p < 0 ? 1 : 0);
}

Rational rational_at(std::uint64_t n) {
  if (n == 0) return {0, 1};
  std::uint64_t k = (n - 1) / 2;  // index among positive fractions
  bool neg = (n - 1) % 2 == 1;
  auto& t = totients();
  std::uint64_t h;
  {
    std::lock_guard<std::mutex> lk(t.mu);
    // about 3h^2/pi^2 positive fractions have a + b < h
    while (t.prefix.back() <= k) t.grow(2 * t.prefix.size());
    h = static_cast<std::uint64_t>(std::upper_bound(t.prefix.begin(), t.prefix.end(), k) - t.prefix.begin()) - 1;
    k -= t.prefix[h];
  }
  for (std::uint64_t a = 1; a < h; ++a)
    if (std::gcd(a, h) == 1) {
      if (k == 0) return {neg ? -static_cast<std::int64_t>(a) : static_cast<std::int64_t>(a), h - a};
      --k;
    }
  throw std::logic_error("rational_at: enumeration mismatch");
}

std::string AdSet::csv() const {
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return elements[x] < elements[y]; });
  std::ostringstream os;
  os << "element,p,q\n";
  for (auto i : order) os << elements[i] << ',' << rationals[i].p << ',' << rationals[i].q << '\n';
  return os.str();
}

std::vector<AdSet> rational_ad_family(const std::vector<double>& reals, std::uint64_t depth,
                                      const std::vector<std::string>& names) {
  if (depth < 1) throw PreconditionError("ad family: depth must be at least 1");
  const double sep = 1.0 / std::sqrt(static_cast<double>(depth));
  auto label = [&](std::size_t i) {
    if (i < names.size()) return names[i];
    std::ostringstream os;
    os.precision(17);
    os << reals[i];
    return os.str();
  };
  for (std::size_t i = 0; i < reals.size(); ++i) {
    if (!std::isfinite(reals[i])) throw PreconditionError("ad family: real " + label(i) + " is not finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (reals[i] == reals[j]) throw PreconditionError("ad family: duplicate real " + label(i));
      if (std::abs(reals[i] - reals[j]) <= sep)
        throw PreconditionError("ad family: reals " + label(j) + " and " + label(i) +
                                " are closer than the resolution 1/sqrt(depth)");
    }
  }
  std::vector<AdSet> out;
  for (std::size_t i = 0; i < reals.size(); ++i) {
    AdSet s;
    s.r = reals[i];
    s.name = label(i);
    s.depth = depth;
    std::set<std::pair<std::int64_t, std::uint64_t>> seen;
    auto reduced = [](std::int64_t p, std::uint64_t k) {
      if (p == 0) return Rational{0, 1};
      std::uint64_t g = std::gcd(static_cast<std::uint64_t>(p < 0 ? -p : p), k);
      return Rational{p / static_cast<std::int64_t>(g), k / g};
    };
    for (std::uint64_t k = 1; s.rationals.size() < depth; ++k) {
      auto p = static_cast<std::int64_t>(std::llround(s.r * static_cast<double>(k)));
      // r = p/k exactly: approach from above instead
      if (static_cast<double>(p) == s.r * static_cast<double>(k)) ++p;
      Rational q = reduced(p, k);
      if (!seen.insert({q.p, q.q}).second) continue;
      s.rationals.push_back(q);
      s.elements.push_back(rational_index(q));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::uint64_t intersection_size(const AdSet& a, const AdSet& b) {
  std::vector<std::uint64_t> x = a.elements, y = b.elements, both;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
  return both.size();
}

std::uint64_t block_of(std::uint64_t n) {
  if (n < 2) throw PreconditionError("block_of: indices 0 and 1 lie in no block");
  std::uint64_t i = 0;
  while ((n - 1) >> (i + 1)) ++i;
  return i;
}

std::uint64_t block_begin(std::uint64_t i) { return (std::uint64_t(1) << i) + 1; }
std::uint64_t block_end(std::uint64_t i) { return std::uint64_t(1) << (i + 1); }

double block_harmonic(std::uint64_t i) {
  Accumulator s;
  for (std::uint64_t n = block_begin(i); n <= block_end(i); ++n) s.add(1.0 / static_cast<double>(n));
  return s.value();
}

BlockSet block_set(std::set<std::uint64_t> members) {
  return [m = std::move(members)](std::uint64_t i) { return m.count(i) > 0; };
}

BlockSet block_set(const AdSet& a) {
  std::set<std::uint64_t> m(a.elements.begin(), a.elements.end());
  return block_set(std::move(m));
}

namespace {

class SignedBlocks : public TermSource {
 public:
  SignedBlocks(BlockSet x, std::string name) : x_(std::move(x)), name_(std::move(name)) {}
  void eval(std::uint64_t n, double* out) const override {
    if (n == 0) {
      *out = 0.0;
      return;
    }
    double v = 1.0 / static_cast<double>(n);
    *out = (n >= 2 && x_(block_of(n))) ? -v : v;
  }
  std::string describe() const override { return "signed-blocks(" + name_ + ")"; }

 private:
  BlockSet x_;
  std::string name_;
};

}  // namespace

Source signed_block_series(BlockSet x, std::string name) {
  return std::make_shared<SignedBlocks>(std::move(x), std::move(name));
}

PairReport pair_divergence_check(BlockSet x, BlockSet y, std::uint64_t horizon, double bound,
                                 std::uint64_t max_shared) {
  if (horizon < 2) throw PreconditionError("pair check: horizon must be at least 2");
  PairReport r;
  r.bound = bound;
  for (std::uint64_t i = 0; block_begin(i) < horizon; ++i)
    if (x(i) && y(i)) r.shared_blocks.push_back(i);
  if (r.shared_blocks.size() > max_shared) {
    std::ostringstream os;
    os << "pair check: " << r.shared_blocks.size() << " shared blocks below the horizon (limit " << max_shared
       << "), first:";
    for (std::size_t k = 0; k < r.shared_blocks.size() && k < 8; ++k) os << ' ' << r.shared_blocks[k];
    throw Refused(os.str());
  }
  auto sx = signed_block_series(x, "X"), sy = signed_block_series(y, "Y");
  auto pair = sum_source(sx, sy);
  r.trajectory = partial_sums(*pair, *identity(), horizon);
  Accumulator s, neg, blk;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    double a = pair->scalar(n);
    s.add(a);
    if (a < 0) neg.add(a);
    if (n >= 2) {
      blk.add(a);
      std::uint64_t i = block_of(n);
      if (n == block_end(i)) {
        r.block_contribution.push_back(blk.value());
        if (!x(i) && !y(i)) ++r.positive_blocks;
        blk = Accumulator{};
      }
    }
    if (!r.exceeds && s.value() > bound) {
      r.exceeds = true;
      r.first_exceed = n + 1;
    }
  }
  r.negative_total = neg.value();
  r.final_value = s.value();
  return r;
}

std::string OscillationReport::verdict() const {
  if (!determined) return "undetermined";
  return has_low && has_high ? "oscillates" : "undetermined";
}

OscillationReport oscillation_witness(BlockSet x, std::uint64_t horizon) {
  OscillationReport r;
  std::uint64_t in = 0, out = 0;
  auto src = signed_block_series(x, "X");
  for (std::uint64_t i = 0; block_end(i) < horizon; ++i) {
    Accumulator s;
    for (std::uint64_t n = block_begin(i); n <= block_end(i); ++n) s.add(src->scalar(n));
    double v = s.value();
    r.block_sums.push_back(v);
    (x(i) ? in : out) += 1;
    r.has_low = r.has_low || v <= -0.5;
    r.has_high = r.has_high || v >= 0.5;
  }
  r.determined = in >= 2 && out >= 2;
  return r;
}

}  // namespace rr
