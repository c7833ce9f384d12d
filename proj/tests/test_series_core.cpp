#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rr/adfamily.hpp"
#include "rr/classify.hpp"
#include "rr/coding.hpp"
#include "rr/errors.hpp"
#include "rr/pcc.hpp"
#include "rr/permutation.hpp"
#include "rr/sets.hpp"
#include "rr/terms.hpp"
#include "rr/trajectory.hpp"

using namespace rr;

TEST_CASE("frozen ln 2 matches the averaging oracle") {
  long double v = oracle::ln2_by_averaging(10000000);
  CHECK(std::abs(static_cast<double>(v) - oracle::kLn2) < 1e-12);
  CHECK(std::abs(oracle::kLn2 - std::log(2.0)) < 1e-15);
}

TEST_CASE("frozen eta(0.6) matches repeated averaging") {
  long double v = oracle::eta_by_repeated_averaging(0.6L, 200000, 30);
  CHECK(std::abs(static_cast<double>(v) - oracle::kEta06) < 1e-12);
}

TEST_CASE("catalog terms") {
  auto a = alt_harmonic();
  CHECK(a->scalar(0) == 1.0);
  CHECK(a->scalar(1) == -0.5);
  CHECK(a->scalar(2) == doctest::Approx(1.0 / 3));
  auto s = alt_power(0.5);
  CHECK(s->scalar(3) == doctest::Approx(-0.5));
  CHECK(harmonic()->scalar(9) == doctest::Approx(0.1));
  CHECK(zero_source(3)->term(17) == Vec{0, 0, 0});
  auto st = stack_sources({alt_harmonic(), alt_power(0.6)});
  CHECK(st->dim() == 2);
  CHECK(st->term(1)[1] == doctest::Approx(-std::pow(2.0, -0.6)));
  // determinism
  CHECK(s->scalar(12345) == s->scalar(12345));
}

TEST_CASE("partial sums examples") {
  auto t = partial_sums(*alt_harmonic(), *identity(), 2);
  REQUIRE(t.size() == 2);
  CHECK(t.at(0) == 1.0);
  CHECK(t.at(1) == 0.5);
  auto t4 = partial_sums(*alt_power(0.5), *identity(), 4);
  CHECK(t4.final_value() == doctest::Approx(1 - std::pow(2, -0.5) + std::pow(3, -0.5) - 0.5).epsilon(1e-15));
  auto big = partial_sums(*alt_harmonic(), *identity(), 1000000);
  CHECK(std::abs(big.final_value() - oracle::kLn2) < 1e-5);
  CHECK(big.index.back() == 1000000);
  CHECK(big.last_mag.back() == doctest::Approx(1e-6));
  CHECK_THROWS_AS(partial_sums(*alt_harmonic(), *identity(), 0), PreconditionError);
}

TEST_CASE("identity partial sums equal direct compensated prefix summation") {
  auto src = alt_power(0.7);
  auto t = partial_sums(*src, *identity(), 5000);
  Accumulator acc;
  std::size_t k = 0;
  for (std::uint64_t n = 0; n < 5000; ++n) {
    acc.add(src->scalar(n));
    if (k < t.size() && t.index[k] == n + 1) CHECK(t.at(k++) == acc.value());
  }
  CHECK(k == t.size());
}

TEST_CASE("sample increments equal the intervening terms") {
  auto src = alt_harmonic();
  auto p = finite_table(std::vector<std::uint64_t>{5, 3, 0, 1, 2, 4, 9, 7, 8, 6});
  auto t = partial_sums(*src, *p, 3000);
  for (std::size_t k = 1; k < t.size(); k += 7) {
    long double s = 0;
    for (std::uint64_t n = t.index[k - 1]; n < t.index[k]; ++n) s += src->scalar(p->forward(n));
    CHECK(std::abs(static_cast<double>(s) - (t.at(k) - t.at(k - 1))) < 1e-12);
  }
}

TEST_CASE("sampling schedule") {
  Sampling s;
  s.extra = {12345, 777};
  auto idx = s.indices(100000);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
  CHECK(idx.back() == 100000);
  CHECK(std::count(idx.begin(), idx.end(), 12345) == 1);
  for (std::uint64_t n = 1; n <= 100; ++n) CHECK(std::count(idx.begin(), idx.end(), n) == 1);
}

TEST_CASE("file-backed source") {
  std::string path = "series_core_file_source.txt";
  {
    std::ofstream o(path);
    o << "1\n-0.5\n0.25\n";
  }
  auto f = load_file_source(path, Tail::none);
  CHECK(f->length() == 3);
  CHECK(f->scalar(2) == 0.25);
  try {
    partial_sums(*f, *identity(), 5);
    FAIL("expected a missing term");
  } catch (const MissingTerm& e) {
    CHECK(e.index == 3);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  auto z = load_file_source(path, Tail::zero);
  CHECK(partial_sums(*z, *identity(), 10).final_value() == 0.75);
  std::remove(path.c_str());
}

TEST_CASE("trajectory csv and json") {
  auto t = partial_sums(*alt_harmonic(), *identity(), 3);
  auto csv = trajectory_csv(t);
  CHECK(csv.rfind("index,sum_0,last_term_mag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  auto back = trajectory_from_json(trajectory_json(t));
  CHECK(back.index == t.index);
  CHECK(back.sum == t.sum);
  CHECK(back.seg_min == t.seg_min);
  CHECK(back.last_mag == t.last_mag);
  auto t2 = partial_sums(*stack_sources({alt_harmonic(), alt_power(0.6)}), *identity(), 50);
  CHECK(trajectory_csv(t2).rfind("index,sum_0,sum_1,last_term_mag\n", 0) == 0);
}

TEST_CASE("classify examples") {
  auto conv = classify(partial_sums(*alt_harmonic(), *identity(), 1000000));
  CHECK(conv.kind == VerdictKind::converges);
  CHECK(conv.value == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(conv.name() == "converges-to");

  auto div = classify(partial_sums(*harmonic(), *identity(), 100000));
  CHECK(div.kind == VerdictKind::diverges_plus);

  auto blocks = signed_block_series([](std::uint64_t i) { return i % 2 == 1; }, "odd");
  auto osc = classify(partial_sums(*blocks, *identity(), 1 << 20));
  CHECK(osc.kind == VerdictKind::oscillates);
  CHECK(osc.limsup - osc.liminf > Tolerances{}.gap);

  auto short_t = partial_sums(*alt_harmonic(), *identity(), 5);
  CHECK(classify(short_t).kind == VerdictKind::undetermined);
  CHECK(!classify(short_t).reason.empty());
}

TEST_CASE("classify is a pure function of the samples") {
  auto t = partial_sums(*alt_power(0.3), *identity(), 20000);
  auto a = classify(t), b = classify(t);
  CHECK(a.kind == b.kind);
  CHECK(a.str() == b.str());
  Tolerances wide;
  wide.gap = 1e9;
  wide.settle = 1e-12;
  auto c = classify(t, wide);
  CHECK(c.kind != VerdictKind::oscillates);
}

TEST_CASE("oscillates only beyond the gap") {
  auto blocks = signed_block_series([](std::uint64_t i) { return i % 2 == 1; }, "odd");
  auto t = partial_sums(*blocks, *identity(), 1 << 20);
  Tolerances tol;
  tol.gap = 5.0;
  auto v = classify(t, tol);
  CHECK(v.kind != VerdictKind::oscillates);
}

TEST_CASE("permutation invariants for the basic generators") {
  std::mt19937_64 rng(7);
  std::vector<std::uint64_t> table(200);
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = i;
  std::shuffle(table.begin(), table.end(), rng);
  std::vector<Perm> perms = {identity(), finite_table(table), finite_table(std::map<std::uint64_t, std::uint64_t>{{0, 5}, {3, 1}}),
                             compose(finite_table(table), finite_table(std::map<std::uint64_t, std::uint64_t>{{1, 7}})),
                             inverse_of(finite_table(table))};
  const std::uint64_t N = 100000;
  for (auto& p : perms) {
    CAPTURE(p->describe());
    std::vector<char> seen(4 * N, 0);
    bool ok = true;
    for (std::uint64_t n = 0; n < N; ++n) {
      std::uint64_t v = p->forward(n);
      if (v >= seen.size() || seen[v]) ok = false;
      else seen[v] = 1;
      if (p->inverse(v) != n) ok = false;
    }
    CHECK(ok);
    for (std::uint64_t m = 0; m < 1000; m += 37) {
      std::uint64_t b = p->bound(m);
      bool found = false;
      for (std::uint64_t n = 0; n < b; ++n) found = found || p->forward(n) == m;
      CHECK(found);
    }
  }
}

TEST_CASE("finite table validation and completion") {
  CHECK_THROWS_AS(finite_table(std::vector<std::uint64_t>{0, 0}), PreconditionError);
  auto p = finite_table(std::map<std::uint64_t, std::uint64_t>{{0, 2}});
  // unused arguments 1,2,... go to unused values 0,1,3,... in order
  CHECK(p->forward(0) == 2);
  CHECK(p->forward(1) == 0);
  CHECK(p->forward(2) == 1);
  CHECK(p->forward(3) == 3);
}

TEST_CASE("coding examples") {
  CHECK(encode_permutation(*identity(), 4) == std::vector<std::uint64_t>{0, 0, 0, 0});
  CHECK(oracle::encode_by_trace({0, 1, 2, 3}, 4) == std::vector<std::uint64_t>{0, 0, 0, 0});
  auto swap01 = finite_table(std::vector<std::uint64_t>{1, 0});
  CHECK(encode_permutation(*swap01, 1) == std::vector<std::uint64_t>{1});
  auto empty = decode_permutation({});
  for (std::uint64_t n = 0; n < 100; ++n) CHECK(empty->forward(n) == n);
  auto zeros = decode_permutation(std::vector<std::uint64_t>(20, 0));
  for (std::uint64_t n = 0; n < 100; ++n) CHECK(zeros->forward(n) == n);
}

TEST_CASE("encode agrees with the traced oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> v(1 + rng() % 24);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(encode_permutation(*finite_table(v), 40) == oracle::encode_by_trace(v, 40));
  }
}

TEST_CASE("random codes round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> code(50);
    for (auto& c : code) c = rng() % 6;
    CHECK(encode_permutation(*decode_permutation(code), 50) == code);
  }
}

TEST_CASE("pcc proxy examples") {
  CHECK(pcc_check(*alt_harmonic(), 100000).pcc);
  auto sq = function_source("alt-square", [](std::uint64_t n) { return (n % 2 ? -1.0 : 1.0) / double((n + 1) * (n + 1)); });
  auto r = pcc_check(*sq, 100000);
  CHECK_FALSE(r.pcc);
  CHECK(r.positive_sum < 1.65);
  CHECK_FALSE(pcc_check(*zero_source(), 100000).pcc);
  auto h = pcc_check(*alt_harmonic(), 1000);
  CHECK(h.positive_count == 500);
  CHECK(h.negative_count == 500);
}

TEST_CASE("catalog sets") {
  CHECK(evens()->nth(5) == 10);
  CHECK(odds()->contains(7));
  CHECK(odds()->rank(7) == 3);
  CHECK(arithmetic(1, 3)->nth(2) == 7);
  CHECK_THROWS_AS(arithmetic(0, 1), PreconditionError);
  auto it = iterated([](std::uint64_t n) { return 2 * n + 2; }, "2n+2");
  CHECK(it->nth(4) == 30);
  CHECK(it->contains(14));
  CHECK_FALSE(it->contains(15));
  for (auto s : {evens(), odds(), arithmetic(2, 5), sym_diff(evens(), {1, 4}), it}) {
    CAPTURE(s->describe());
    const std::uint64_t count = s == it ? 40 : 200;  // 2n+2 overflows 64 bits near k = 62
    for (std::uint64_t k = 0; k < count; ++k) {
      std::uint64_t x = s->nth(k);
      CHECK(s->contains(x));
      CHECK(s->rank(x) == k);
      if (k) CHECK(x > s->nth(k - 1));
    }
    for (std::uint64_t k = 0; k < 100; ++k) CHECK_FALSE(s->contains(s->nth_complement(k)));
  }
}

TEST_CASE("excess schedule examples") {
  auto z = excess_schedule_set(0.5, 0.0);
  for (std::uint64_t k = 0; k < 100; ++k) CHECK(z->nth(k) == 2 * k);
  auto a = excess_schedule_set(0.5, 1.0, 1000);
  // positives before the 4th negative term
  CHECK(a->rank(a->negative_position(4)) == 4 + 2);
  auto b = excess_schedule_set(0.8, 1.0, 1000);
  std::uint64_t count = 0;
  for (std::uint64_t n = 0; n < b->negative_position(100); ++n) count += b->contains(n);
  CHECK(count == 140);
  CHECK_THROWS_AS(excess_schedule_set(1.0, 1.0), PreconditionError);
  CHECK(ceil_guarded(2.0000000000001) == 2);
  CHECK(ceil_guarded(2.1) == 3);
}
