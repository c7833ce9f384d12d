#pragma once
// Independent reference computations for the test suites. Nothing here calls
// the library's summation or coding code.
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

// Frozen values; each is re-derived by a test in test_series_core.cpp.
// ln 2 from the average of consecutive alternating-harmonic partial sums at 10^7.
inline constexpr double kLn2 = 0.6931471805599453;
// sum (-1)^n/(n+1)^0.6 from repeated averaging of partial sums near 2*10^5
// (agrees with an mpmath altzeta(0.6) evaluation to 1e-16).
inline constexpr double kEta06 = 0.6238907797688245;

// Average of S_N and S_{N+1} for sum (-1)^n/(n+1), summed in long double.
inline long double ln2_by_averaging(std::uint64_t n) {
  long double s = 0;
  for (std::uint64_t k = 0; k < n; ++k) s += ((k & 1) ? -1.0L : 1.0L) / static_cast<long double>(k + 1);
  long double next = s + ((n & 1) ? -1.0L : 1.0L) / static_cast<long double>(n + 1);
  return (s + next) / 2;
}

// Partial sums S_N..S_{N+depth} of sum (-1)^n/(n+1)^alpha averaged pairwise depth times.
inline long double eta_by_repeated_averaging(long double alpha, std::uint64_t n, int depth) {
  long double s = 0;
  for (std::uint64_t k = 0; k < n; ++k) s += ((k & 1) ? -1.0L : 1.0L) / std::pow(static_cast<long double>(k + 1), alpha);
  std::vector<long double> row;
  for (int j = 0; j <= depth; ++j) {
    row.push_back(s);
    std::uint64_t k = n + j;
    s += ((k & 1) ? -1.0L : 1.0L) / std::pow(static_cast<long double>(k + 1), alpha);
  }
  for (int d = 0; d < depth; ++d)
    for (std::size_t i = 0; i + 1 < row.size() - d; ++i) row[i] = (row[i] + row[i + 1]) / 2;
  return row[0];
}

// Back-and-forth code of a finite permutation of [0, n) (identity beyond),
// traced with explicit candidate lists.
inline std::vector<std::uint64_t> encode_by_trace(const std::vector<std::uint64_t>& p, std::uint64_t k) {
  std::uint64_t n = p.size();
  auto fwd = [&](std::uint64_t x) { return x < n ? p[x] : x; };
  std::map<std::uint64_t, std::uint64_t> inv;
  for (std::uint64_t x = 0; x < n; ++x) inv[p[x]] = x;
  auto bwd = [&](std::uint64_t y) { return inv.count(y) ? inv[y] : y; };
  std::set<std::uint64_t> args, vals;  // paired so far
  std::vector<std::uint64_t> code;
  for (std::uint64_t r = 0; r < k; ++r) {
    std::set<std::uint64_t>& own = (r % 2 == 0) ? args : vals;
    std::set<std::uint64_t>& other = (r % 2 == 0) ? vals : args;
    std::uint64_t a = 0;
    while (own.count(a)) ++a;
    std::uint64_t b = (r % 2 == 0) ? fwd(a) : bwd(a);
    std::uint64_t pos = 0;
    for (std::uint64_t c = 0; c < b; ++c)
      if (!other.count(c)) ++pos;
    code.push_back(pos);
    own.insert(a);
    other.insert(b);
  }
  return code;
}

}  // namespace oracle
