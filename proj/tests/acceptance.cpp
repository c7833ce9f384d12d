// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "checks.hpp"
#include "oracles.hpp"
#include "rr/adfamily.hpp"
#include "rr/adversaries.hpp"
#include "rr/classify.hpp"
#include "rr/coding.hpp"
#include "rr/rearrangers.hpp"
#include "rr/sets.hpp"
#include "rr/steinitz.hpp"
#include "rr/stochastic.hpp"
#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

using namespace rr;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1: greedy to 0.25; after the first crossing the distance to the target never
// exceeds the magnitude of the term that made the latest crossing.
void riemann_target(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto src = alt_harmonic();
  auto p = riemann_to_target(src, 0.25);
  auto t = partial_sums(*src, *p, 100000);
  double err = std::abs(t.final_value() - 0.25);
  Accumulator s;
  bool crossed = false, above = false;
  double band = 0, worst = 0;
  for (std::uint64_t n = 0; n < 100000; ++n) {
    double a = src->scalar(p->forward(n));
    s.add(a);
    bool now = s.value() > 0.25;
    if (n > 0 && now != above) {
      crossed = true;
      band = std::abs(a);
    }
    above = now;
    if (crossed) worst = std::max(worst, std::abs(s.value() - 0.25) - band);
  }
  double secs = seconds_since(t0);
  o.detail << "final error " << err << ", band excess " << worst << ", " << secs << " s";
  o.require(err <= 2e-4, "final error");
  o.require(crossed && worst <= 0.0, "band contract");
  o.require(secs < 2.0, "runtime");
}

// 2: identity at 10^6 against the frozen ln 2 oracle
void identity_limit(Outcome& o) {
  auto t = partial_sums(*alt_harmonic(), *identity(), 1000000);
  double err = std::abs(t.final_value() - oracle::kLn2);
  o.detail << "error " << err;
  o.require(err <= 1e-5, "distance to ln 2");
}

// 3: mixing p = greedy-to-0 with the identity
void mixing(Outcome& o) {
  const std::uint64_t H = 100000;
  auto src = alt_harmonic();
  auto p = riemann_to_target(src, 0.0);
  auto g = mix(p);
  auto cps = g->checkpoints_through(H);
  Sampling sm;
  for (const auto& c : cps)
    if (c.m <= H) sm.extra.push_back(c.m);
  auto t = partial_sums(*src, *g, H, sm);
  double d0 = INFINITY, d1 = INFINITY;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t.index[k] <= 1000) continue;
    d0 = std::min(d0, std::abs(t.at(k)));
    d1 = std::min(d1, std::abs(t.at(k) - oracle::kLn2));
  }
  auto v = classify(t);
  // exact set equalities via running multiset differences
  std::map<std::uint64_t, int> dp, di;
  auto bump = [](std::map<std::uint64_t, int>& d, std::uint64_t x, int s) {
    if ((d[x] += s) == 0) d.erase(x);
  };
  std::uint64_t n = 0, bad = 0;
  for (const auto& c : cps) {
    for (; n < c.m; ++n) {
      std::uint64_t x = g->forward(n);
      bump(dp, x, 1);
      bump(dp, p->forward(n), -1);
      bump(di, x, 1);
      bump(di, n, -1);
    }
    if (!(c.follows_p ? dp.empty() : di.empty())) ++bad;
  }
  o.detail << "closest to 0: " << d0 << ", to ln 2: " << d1 << ", verdict " << v.name() << ", " << cps.size()
           << " checkpoints, " << bad << " unequal";
  o.require(d0 <= 1e-2 && d1 <= 1e-2, "both limits visited");
  o.require(v.kind == VerdictKind::oscillates, "classify");
  o.require(bad == 0, "checkpoint set equalities");
}

// 4: brute-force optimum vs greedy on random zero-sum batches
void confinement(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> dd(1, 3), nn(2, 8);
  std::normal_distribution<double> gauss(0, 1);
  int dominated = 0, within = 0;
  const int total = 200;
  for (int t = 0; t < total; ++t) {
    VectorBatch b;
    b.d = static_cast<std::size_t>(dd(rng));
    int n = nn(rng);
    Vec sum(b.d, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
      Vec v(b.d);
      for (auto& x : v) x = gauss(rng);
      for (std::size_t c = 0; c < b.d; ++c) sum[c] -= v[c];
      b.v.push_back(v);
    }
    b.v.push_back(sum);
    double mx = 0;
    for (auto& v : b.v) {
      double q = 0;
      for (double x : v) q += x * x;
      mx = std::max(mx, std::sqrt(q));
    }
    for (auto& v : b.v)
      for (auto& x : v) x /= mx;  // all norms <= 1, still zero-sum
    auto bf = confine_bruteforce(b);
    auto gr = confine_greedy(b);
    if (bf.achieved <= gr.achieved + 1e-12) ++dominated;
    if (gr.achieved <= static_cast<double>(b.d) + gr.b_norm) ++within;
  }
  double secs = seconds_since(t0);
  o.detail << dominated << "/" << total << " dominated, " << within << "/" << total << " within d + |b|, " << secs
           << " s";
  o.require(dominated == total, "brute force <= greedy");
  o.require(within * 100 >= 95 * total, "greedy reference bound");
  o.require(secs < 30.0, "runtime");
}

// 5: steering in the plane to the unrearranged sums shifted by (+0.1, -0.1)
void steering(Outcome& o) {
  const std::uint64_t H = 100000;
  auto src = stack_sources({alt_harmonic(), alt_power(0.6)});
  Vec target{oracle::kLn2 + 0.1, oracle::kEta06 - 0.1};
  auto p = levy_steinitz_rearrange(src, target, H);
  auto t = partial_sums(*src, *p, H);
  Vec f = t.final_vec();
  double err = std::hypot(f[0] - target[0], f[1] - target[1]);
  std::string bad = checks::permutation_violation(*p, H);
  std::vector<char> seen(H / 2, 0);
  for (std::uint64_t n = 0; n < H; ++n) {
    auto m = p->forward(n);
    if (m < seen.size()) seen[m] = 1;
  }
  bool covered = std::find(seen.begin(), seen.end(), 0) == seen.end();
  o.detail << "error " << err;
  o.require(err <= 1e-2, "vector error");
  o.require(bad.empty(), "permutation invariants: " + bad);
  o.require(covered, "indices below horizon/2 emitted");
}

// 6: padding against ten random flips
void padding(Outcome& o) {
  const std::uint64_t H = 1000000;
  std::vector<Perm> fam;
  for (std::uint64_t s = 1; s <= 10; ++s) fam.push_back(flip_permutation(random_partition(s, 16)));
  auto pad = pad_against(fam, alt_harmonic());
  auto base = partial_sums(*pad.source, *identity(), H);
  double worst = 0;
  bool order = true, settled = true;
  for (std::size_t m = 0; m < fam.size(); ++m) {
    auto t = partial_sums(*pad.source, *fam[m], H);
    worst = std::max(worst, std::abs(t.final_value() - base.final_value()));
    settled = settled && classify(t).kind == VerdictKind::converges;
    for (std::uint64_t k = m; k < 1000; ++k)
      order = order && fam[m]->inverse(pad.schedule->nth(k)) < fam[m]->inverse(pad.schedule->nth(k + 1));
  }
  o.detail << "largest difference from the identity value " << worst;
  o.require(worst <= 1e-4, "matched value");
  o.require(settled, "each rearrangement settles");
  o.require(order, "order condition");
}

// 7: flip over the triple blocks of {0, 2, 6, 14, ...}
void jumbling(Outcome& o) {
  auto a = preserved_set([](std::uint64_t n) { return 2 * n + 2; }, "2n+2");
  auto p = flip_permutation(triple_blocks(a));
  auto r = jumble_test(*p, *a, 100000);
  bool increasing = r.checkpoints.size() >= 2;
  for (std::size_t k = 1; k < r.checkpoints.size(); ++k)
    increasing = increasing && r.checkpoints[k].reversals > r.checkpoints[k - 1].reversals;
  o.detail << "reversals at checkpoints:";
  for (const auto& c : r.checkpoints) o.detail << " " << c.n << ":" << c.reversals;
  o.require(increasing, "strictly increasing");
}

// 8: Rademacher Monte Carlo with the pilot-frozen thresholds
void monte_carlo(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t trials = 500, H = 100000, window = H / 10, seed = 2024;
  const double osc_tol = 0.05, blowup = 1.5;
  auto conv = rademacher_mc(power_magnitudes(1.0), trials, H, window, osc_tol, blowup, seed);
  auto div = rademacher_mc(power_magnitudes(0.5), trials, H, window, osc_tol, blowup, seed);
  auto again = rademacher_mc(power_magnitudes(1.0), trials, H, window, osc_tol, blowup, seed, 1);
  double secs = seconds_since(t0);
  o.detail << "convergence proxy " << conv.convergence_fraction << ", divergence proxy " << div.divergence_fraction
           << ", " << secs << " s";
  o.require(conv.convergence_fraction >= 0.95, "convergence proxy");
  o.require(div.divergence_fraction >= 0.95, "divergence proxy");
  o.require(again.csv() == conv.csv(), "determinism");
  o.require(secs < 60.0, "runtime");
}

// 9: almost-disjoint family
void ad_family(Outcome& o) {
  std::vector<double> reals;
  for (std::uint64_t p = 2; reals.size() < 20; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
    if (prime) reals.push_back(std::sqrt(static_cast<double>(p)));
  }
  auto fam = rational_ad_family(reals, 10000);
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i + 1; j < fam.size(); ++j) worst = std::max(worst, intersection_size(fam[i], fam[j]));
  std::mt19937_64 rng(9);
  int exceeded = 0;
  double lowest = INFINITY;
  for (int t = 0; t < 5; ++t) {
    std::size_t i = rng() % fam.size(), j = rng() % (fam.size() - 1);
    if (j >= i) ++j;
    auto r = pair_divergence_check(block_set(fam[i]), block_set(fam[j]), std::uint64_t(1) << 22);
    lowest = std::min(lowest, r.final_value);
    if (r.exceeds) ++exceeded;
  }
  bool halves = true;
  for (std::uint64_t i = 0; i <= 20; ++i) halves = halves && block_harmonic(i) >= 0.5;
  o.detail << "largest intersection " << worst << " (bound 3), " << exceeded << "/5 pairs exceed 5 (lowest final "
           << lowest << ")";
  o.require(worst <= 3, "intersection bound");
  o.require(exceeded == 5, "pair divergence");
  o.require(halves, "block sums >= 1/2");
}

// 10: two-exponent shuffle experiment
void two_exponent(Outcome& o) {
  auto r = two_exponent_experiment(0.4, 0.8, 1.0, 20000);
  o.detail << "max S_alpha " << r.max_alpha << " (threshold 10), S_beta final spread " << r.spread_beta;
  o.require(r.max_alpha >= 10.0, "S_alpha growth");
  o.require(r.spread_beta < 0.1, "S_beta spread");
}

// 11: coding round trip
void coding(Outcome& o) {
  std::mt19937_64 rng(11);
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint64_t> v(32);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), rng);
    auto p = finite_table(v);
    auto q = decode_permutation(encode_permutation(*p, 64));
    bool same = true;
    for (std::uint64_t i = 0; i < 32; ++i) same = same && q->forward(i) == v[i];
    if (same) ++agree;
  }
  auto zero = encode_permutation(*identity(), 64);
  bool all_zero = std::all_of(zero.begin(), zero.end(), [](std::uint64_t c) { return c == 0; });
  o.detail << agree << "/1000 round trips";
  o.require(agree == 1000, "round trip");
  o.require(all_zero, "identity code");
}

int shell(const std::string& cmd) {
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 12: invariants across generators plus CLI determinism
void invariants(Outcome& o) {
  const std::uint64_t N = 100000;
  auto src = alt_harmonic();
  std::vector<std::pair<std::string, Perm>> gens{
      {"identity", identity()},
      {"riemann", riemann_to_target(src, 0.25)},
      {"oscillate", riemann_oscillate(src, 0.0, 1.0)},
      {"shuffle", shuffle(excess_schedule_set(0.8, 1.0, N), evens())},
      {"flip", flip_permutation(random_partition(3, 16))},
      {"mix", mix(riemann_to_target(src, 0.0))},
      {"table", finite_table(std::vector<std::uint64_t>{5, 3, 0, 1})},
      {"steer", levy_steinitz_rearrange(stack_sources({alt_harmonic(), alt_power(0.6)}), {0.7, 0.6}, N)},
  };
  int bad = 0;
  for (auto& [name, p] : gens) {
    auto v = checks::permutation_violation(*p, N);
    if (!v.empty()) {
      ++bad;
      o.detail << " " << name << ": " << v << ";";
    }
  }
  // +infinity uses negatives exponentially rarely, so only a short inverse range is reachable
  auto inf = riemann_to_infinity(src, +1);
  if (!checks::permutation_violation(*inf, N, 8).empty()) ++bad;

  bool involution = true;
  for (auto part : {uniform_partition(5), random_partition(7, 40), triple_blocks(evens())}) {
    auto f = flip_permutation(part);
    for (std::uint64_t x = 0; x < 10000; ++x) involution = involution && f->forward(f->forward(x)) == x;
  }
  bool composition = true;
  std::vector<Set> sets{evens(), odds(), arithmetic(1, 3), sym_diff(evens(), {0, 5}), excess_schedule_set(0.5, 1, N)};
  for (auto& a : sets)
    for (auto& b : sets)
      for (auto& c : sets) {
        auto ab = shuffle(a, b), bc = shuffle(b, c), ac = shuffle(a, c);
        for (std::uint64_t n = 0; n < 10000; n += 7) composition = composition && bc->forward(ab->forward(n)) == ac->forward(n);
      }

  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / ("rr-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string bin = RRX_PATH;
  const std::vector<std::string> cmds{
      "rearrange --target 0.25 --horizon 50000",
      "steer --series alt-harmonic --series alt-power:alpha=0.6 --target 0.8/0.5 --horizon 20000",
      "signs-mc --trials 50 --horizon 5000 --format json",
      "pad --flips 3 --horizon 20000",
      "adfam --reals sqrt2/sqrt3/sqrt5 --depth 300",
  };
  bool cli_same = true;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    std::string out[2];
    for (int r = 0; r < 2; ++r) {
      auto path = dir / ("run" + std::to_string(i) + "-" + std::to_string(r));
      int code = shell(bin + " " + cmds[i] + " --out " + path.string() + " > /dev/null 2>&1");
      out[r] = code == 0 ? slurp(path) : "";
    }
    cli_same = cli_same && !out[0].empty() && out[0] == out[1];
  }
  fs::remove_all(dir);
  o.detail << " permutation failures " << bad << ", flip involution " << (involution ? "ok" : "broken")
           << ", shuffle composition " << (composition ? "ok" : "broken") << ", CLI outputs "
           << (cli_same ? "byte-identical" : "differ");
  o.require(bad == 0, "bijectivity");
  o.require(involution, "involution");
  o.require(composition, "composition");
  o.require(cli_same, "CLI determinism");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"riemann target 0.25", riemann_target},
      {"identity limit ln 2", identity_limit},
      {"mixing oscillation", mixing},
      {"confinement dominance", confinement},
      {"plane steering", steering},
      {"padding invariance", padding},
      {"jumbling witness", jumbling},
      {"random-sign Monte Carlo", monte_carlo},
      {"almost-disjoint family", ad_family},
      {"two-exponent shuffle", two_exponent},
      {"coding round trip", coding},
      {"invariant suite", invariants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
