#include "rr/steinitz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "rr/errors.hpp"

namespace rr {

VectorBatch load_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  VectorBatch b;
  b.d = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Vec v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(lineno) + ": not a decimal literal: '" + cell + "'");
      }
    }
    if (b.d == 0) b.d = v.size();
    if (v.size() != b.d) throw Error(path + ":" + std::to_string(lineno) + ": dimension mismatch");
    b.v.push_back(std::move(v));
  }
  if (b.v.empty()) throw Error(path + ": empty batch");
  return b;
}

namespace {

double norm(const double* x, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

void check_batch(const VectorBatch& b) {
  if (b.v.empty()) throw PreconditionError("empty vector batch");
  for (auto& v : b.v)
    if (v.size() != b.d) throw PreconditionError("vector batch has mixed dimensions");
}

void fill_reference(const VectorBatch& b, ConfinementResult& r) {
  Vec sum(b.d, 0.0);
  double vmax = 0.0;
  for (auto& v : b.v) {
    for (std::size_t i = 0; i < b.d; ++i) sum[i] += v[i];
    vmax = std::max(vmax, norm(v.data(), b.d));
  }
  r.b_norm = norm(sum.data(), b.d);
  r.rho = std::max(vmax, r.b_norm);
  r.reference = r.rho * static_cast<double>(b.d) + r.b_norm;
}

struct Search {
  const VectorBatch& b;
  std::vector<std::size_t> order, best_order;
  std::vector<char> used;
  std::vector<Vec> partial;  // partial[k] = sum of the first k+1 ordered vectors
  double best = INFINITY;

  explicit Search(const VectorBatch& batch) : b(batch), used(batch.v.size(), 0), partial(batch.v.size(), Vec(batch.d)) {}

  void dfs(std::size_t k, double cur) {
    const std::size_t n = b.v.size();
    if (k == n) {
      if (cur < best) {
        best = cur;
        best_order = order;
      }
      return;
    }
    for (std::size_t j = 1; j < n; ++j) {
      if (used[j]) continue;
      for (std::size_t i = 0; i < b.d; ++i) partial[k][i] = partial[k - 1][i] + b.v[j][i];
      double m = std::max(cur, norm(partial[k].data(), b.d));
      if (m >= best) continue;
      used[j] = 1;
      order.push_back(j);
      dfs(k + 1, m);
      order.pop_back();
      used[j] = 0;
    }
  }

  // Explores orderings whose second element is `first` (all of them if n == 1).
  void run(std::size_t first) {
    order = {0};
    partial[0] = b.v[0];
    double cur = norm(partial[0].data(), b.d);
    if (b.v.size() == 1) {
      best = cur;
      best_order = order;
      return;
    }
    for (std::size_t i = 0; i < b.d; ++i) partial[1][i] = partial[0][i] + b.v[first][i];
    cur = std::max(cur, norm(partial[1].data(), b.d));
    used[first] = 1;
    order.push_back(first);
    dfs(2, cur);
  }
};

}  // namespace

double prefix_bound(const VectorBatch& b, const std::vector<std::size_t>& order) {
  Vec s(b.d, 0.0);
  double m = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t i = 0; i < b.d; ++i) s[i] += b.v[order[k]][i];
    m = std::max(m, norm(s.data(), b.d));
  }
  return m;
}

ConfinementResult confine_bruteforce(const VectorBatch& b, unsigned threads) {
  check_batch(b);
  const std::size_t n = b.v.size();
  if (n > kBruteForceLimit)
    throw Refused("brute-force confinement is limited to n <= " + std::to_string(kBruteForceLimit) + " vectors");
  ConfinementResult r;
  fill_reference(b, r);
  if (n <= 2) {
    Search s(b);
    s.run(n == 1 ? 0 : 1);
    r.ordering = s.best_order;
    r.achieved = prefix_bound(b, r.ordering);
    return r;
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Search> branches;
  branches.reserve(n - 1);
  for (std::size_t j = 1; j < n; ++j) branches.emplace_back(b);
  if (threads > 1) {
    std::vector<std::future<void>> fs;
    for (std::size_t j = 1; j < n; ++j) fs.push_back(std::async(std::launch::async, [&, j] { branches[j - 1].run(j); }));
    for (auto& f : fs) f.get();
  } else {
    for (std::size_t j = 1; j < n; ++j) branches[j - 1].run(j);
  }
  // earliest branch wins ties, which keeps the lexicographically first optimum
  std::size_t win = 0;
  for (std::size_t j = 1; j < branches.size(); ++j)
    if (branches[j].best < branches[win].best) win = j;
  r.ordering = branches[win].best_order;
  r.achieved = prefix_bound(b, r.ordering);
  return r;
}

ConfinementResult confine_greedy(const VectorBatch& b) {
  check_batch(b);
  const std::size_t n = b.v.size(), d = b.d;
  ConfinementResult r;
  fill_reference(b, r);
  std::vector<char> used(n, 0);
  r.ordering = {0};
  used[0] = 1;
  Vec s = b.v[0], t(d);
  for (std::size_t k = 1; k < n; ++k) {
    std::size_t pick = n;
    double best = INFINITY;
    for (std::size_t j = 1; j < n; ++j) {
      if (used[j]) continue;
      for (std::size_t i = 0; i < d; ++i) t[i] = s[i] + b.v[j][i];
      double v = norm(t.data(), d);
      if (v < best) {
        best = v;
        pick = j;
      }
    }
    used[pick] = 1;
    r.ordering.push_back(pick);
    for (std::size_t i = 0; i < d; ++i) s[i] += b.v[pick][i];
  }
  r.achieved = prefix_bound(b, r.ordering);
  return r;
}

std::string KernelDiagnostic::name() const {
  switch (verdict) {
    case KernelVerdict::independent: return "independent";
    case KernelVerdict::dependent: return "dependent-direction-found";
    case KernelVerdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

KernelDiagnostic kernel_diagnostic(const TermSource& source, std::uint64_t horizon, std::size_t directions,
                                   std::uint64_t seed, double tol) {
  const std::size_t d = source.dim();
  if (directions < 2 * d) throw PreconditionError("kernel diagnostic needs at least 2d directions");
  if (horizon < 10) throw PreconditionError("kernel diagnostic needs horizon >= 10");
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back({1.0});
  } else if (d == 2) {
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k < directions; ++k) {
      double th = pi * static_cast<double>(k) / static_cast<double>(directions);
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    const double h = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < d; ++i) {
      Vec e(d, 0.0);
      e[i] = 1.0;
      dirs.push_back(e);
    }
    for (std::size_t i = 0; i < d && dirs.size() < directions; ++i)
      for (std::size_t j = i + 1; j < d && dirs.size() < directions; ++j)
        for (double sg : {1.0, -1.0}) {
          Vec e(d, 0.0);
          e[i] = h;
          e[j] = sg * h;
          dirs.push_back(e);
        }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    while (dirs.size() < directions) {
      Vec e(d);
      for (auto& x : e) x = g(rng);
      double nn = norm(e.data(), d);
      if (nn < 1e-12) continue;
      for (auto& x : e) x /= nn;
      dirs.push_back(e);
    }
  }
  KernelDiagnostic out;
  std::vector<double> total(dirs.size(), 0.0), before(dirs.size(), 0.0);
  Vec a(d);
  const std::uint64_t decade = horizon / 10;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    if (n == decade) before = total;
    source.eval(n, a.data());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += dirs[k][i] * a[i];
      total[k] += std::abs(dot);
    }
  }
  std::size_t nbounded = 0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    DirectionScore s{dirs[k], total[k], total[k] - before[k], total[k] - before[k] < tol};
    if (s.bounded) {
      if (nbounded == 0) out.witness = s.s;
      ++nbounded;
    }
    out.directions.push_back(std::move(s));
  }
  if (nbounded == 0)
    out.verdict = KernelVerdict::independent;
  else if (nbounded < dirs.size())
    out.verdict = KernelVerdict::dependent;
  else
    out.verdict = KernelVerdict::undetermined;
  return out;
}

}  // namespace rr
