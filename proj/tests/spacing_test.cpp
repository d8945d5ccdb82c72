#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "lsieve/spacing.hpp"
#include "test_support.hpp"

using namespace lsieve;

namespace {

// Largest number of other points strictly within 1/inv, from the rational
// oracle in test_support.
std::uint64_t oracle_max(const std::vector<testing::Frac>& pts, lsieve::int128 inv) {
  std::uint64_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j && testing::torus_distance_oracle(pts[i], pts[j]) < testing::Frac{1, inv}) ++c;
    }
    best = std::max(best, c);
  }
  return best;
}

std::vector<TorusPoint> random_points(testing::Gen& gen, std::int64_t den, std::size_t n) {
  std::set<std::int64_t> nums;
  while (nums.size() < n) nums.insert(gen.uniform(0, den - 1));
  std::vector<TorusPoint> pts;
  for (std::int64_t a : nums) pts.push_back(TorusPoint::make(a, den));
  std::sort(pts.begin(), pts.end(), value_less);
  return pts;
}

}  // namespace

TEST_CASE("spacing counts at the boundary cases") {
  CHECK(spacing_count_bruteforce({1, 2, 1}).count == 0);
  CHECK(spacing_count_fast({1, 2, 1}).count == 0);
  CHECK(spacing_count_bruteforce({2, 2, 1000}).count == 0);
  CHECK(spacing_count_fast({2, 2, 1000}).count == 0);
  // 4/9 and 7/16 are 1/144 apart: neighbours for N = 71, not for N = 72.
  CHECK(spacing_count_fast({2, 2, 71}).count == 1);
  CHECK(spacing_count_fast({2, 2, 72}).count == 0);
}

TEST_CASE("spacing_count_fast equals the rational oracle on small sets") {
  for (int k : {2, 3}) {
    for (std::int64_t Q = 1; Q <= 4; ++Q) {
      const auto pts = testing::enumerate_oracle(Q, k);
      const std::int64_t Qk1 = checked_power(Q, k + 1);
      for (std::int64_t N : {std::int64_t{1}, std::int64_t{10}, Q * Q * Q, Qk1, 2 * Qk1}) {
        CAPTURE(Q);
        CAPTURE(k);
        CAPTURE(N);
        CHECK(spacing_count_fast({Q, k, N}).count == oracle_max(pts, 2 * N));
      }
    }
  }
}

TEST_CASE("fast and brute-force spacing agree") {
  for (int k : {2, 3}) {
    const std::int64_t q_max = k == 2 ? 12 : 7;
    for (std::int64_t Q = 1; Q <= q_max; ++Q) {
      const std::int64_t Qk1 = checked_power(Q, k + 1);
      for (std::int64_t N : {std::int64_t{10}, Q * Q * Q, Qk1, 2 * Qk1}) {
        CAPTURE(Q);
        CAPTURE(k);
        CAPTURE(N);
        const auto fast = spacing_count_fast({Q, k, N});
        const auto brute = spacing_count_bruteforce({Q, k, N});
        REQUIRE(fast.count == brute.count);
        REQUIRE(fast.witness == brute.witness);
        REQUIRE(fast.neighbor_histogram.size() == brute.neighbor_histogram.size());
        for (std::size_t i = 0; i < fast.neighbor_histogram.size(); ++i) {
          REQUIRE(fast.neighbor_histogram[i].x == brute.neighbor_histogram[i].x);
          REQUIRE(fast.neighbor_histogram[i].count == brute.neighbor_histogram[i].count);
        }
      }
    }
  }
}

TEST_CASE("sweep and pairwise engines agree on synthetic point sets") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t den = gen.uniform(2, 400);
    const auto n = static_cast<std::size_t>(gen.uniform(1, std::min<std::int64_t>(den, 60)));
    const auto pts = random_points(gen, den, n);
    const lsieve::int128 inv = gen.uniform(1, 3 * den);
    CAPTURE(trial);
    REQUIRE(neighbor_counts_sweep(pts, inv) == neighbor_counts_pairwise(pts, inv));
  }
}

TEST_CASE("counts are invariant under rotation by one half") {
  testing::Gen gen(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t den = 2 * gen.uniform(1, 500);
    const auto pts = random_points(gen, den, static_cast<std::size_t>(std::min<std::int64_t>(gen.uniform(2, 80), den)));
    std::vector<TorusPoint> turned;
    for (const auto& p : pts) turned.push_back(TorusPoint::make(p.num * (den / p.den) + den / 2, den));
    std::sort(turned.begin(), turned.end(), value_less);
    const lsieve::int128 inv = gen.uniform(2, den);

    std::map<std::pair<std::int64_t, std::int64_t>, std::uint32_t> before, after;
    const auto c0 = neighbor_counts_sweep(pts, inv);
    const auto c1 = neighbor_counts_sweep(turned, inv);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const TorusPoint back = TorusPoint::make(turned[i].num * (den / turned[i].den) + den / 2, den);
      before[{pts[i].num, pts[i].den}] = c0[i];
      after[{back.num, back.den}] = c1[i];
    }
    REQUIRE(before == after);
  }
}

TEST_CASE("spacing count is non-increasing in N") {
  for (int k : {2, 3}) {
    for (std::int64_t Q : {2, 5, 9}) {
      const FractionSet set = enumerate_set(Q, k);
      std::uint64_t previous = set.size();
      for (std::int64_t N = 1; N <= 4 * checked_power(Q, k + 1); N = N * 3 / 2 + 1) {
        const auto m = spacing_count_fast(set, N).count;
        REQUIRE(m <= previous);
        previous = m;
      }
    }
  }
}

TEST_CASE("self-exclusion") {
  CHECK(table1_statistic(1) == 0);
  SpacingQuery q{1, 2, 1, false};
  CHECK(spacing_count_fast(q).count == 1);
  q.exclude_self = true;
  CHECK(spacing_count_fast(q).count == 0);
  // Radius above 1/2 would reach the other point of S_{1,2}.
  CHECK(spacing_count_threshold(enumerate_set(1, 2), 1).count == 1);
}

TEST_CASE("witness attains the maximum and the histogram is complete") {
  const SpacingResult r = spacing_count_fast({6, 2, 6 * 6 * 6});
  const FractionSet set = enumerate_set(6, 2);
  const auto counts = neighbor_counts_pairwise(set.points(), 2 * 216);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (set.elements()[i] == r.witness) CHECK(counts[i] == r.count);
    CHECK(counts[i] <= r.count);
    nonzero += counts[i] > 0;
  }
  CHECK(r.neighbor_histogram.size() == nonzero);
}

TEST_CASE("brute force refuses large sets") {
  CHECK(expected_cardinality(40, 2) > kBruteForceLimit);
  CHECK_THROWS_AS(spacing_count_bruteforce({40, 2, 10}), GuardError);
  CHECK_THROWS_AS(spacing_count_fast({1, 2, 0}), std::invalid_argument);
}

TEST_CASE("table1_statistic values from the O(n^2) oracle") {
  // Frozen from spacing_count_bruteforce with N = Q^3.
  const std::uint64_t expected[] = {0, 1, 2, 3, 3, 4, 4, 4, 4, 5};
  for (std::int64_t Q = 1; Q <= 10; ++Q) {
    CAPTURE(Q);
    CHECK(table1_statistic(Q) == expected[Q - 1]);
    CHECK(spacing_count_bruteforce({Q, 2, Q * Q * Q}).count == expected[Q - 1]);
  }
}

TEST_CASE("reference table matches the checked-in fixture") {
  std::ifstream in(std::string(LSIEVE_TEST_DATA_DIR) + "/table1.csv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  CHECK(line == "Q,M");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const int Q = std::stoi(line.substr(0, comma));
    const int M = std::stoi(line.substr(comma + 1));
    CHECK(Q == rows + 1);
    CHECK(table1_reference()[static_cast<std::size_t>(rows)] == M);
    ++rows;
  }
  CHECK(rows == 100);
}

TEST_CASE("spacing majorant and ratio report") {
  // k = 2: Q^3/N + (sqrt Q + Q^2/sqrt N) N^eps.
  const double direct = 1000.0 / 1000.0 + (std::sqrt(10.0) + 100.0 / std::sqrt(1000.0));
  CHECK(spacing_majorant(10, 1000, 2, 0.0) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(lemma4_ratio_report(1, 1, 0.0) == 0.0);
  const auto m = spacing_count_bruteforce({10, 2, 1000}).count;
  CHECK(lemma4_ratio_report(10, 1000, 0.0) ==
        doctest::Approx(static_cast<double>(m) / direct).epsilon(1e-14));
  CHECK(lemma4_ratio_report(10, 1000, 0.0) > 0.0);
  // k = 3, kappa = 4: Q^4/N + (Q^{3/4} + Q^{7/4} / N^{1/4}) N^eps.
  const double k3 = 16.0 / 50.0 + (std::pow(2.0, 0.75) + std::pow(2.0, 1.75) / std::pow(50.0, 0.25)) *
                                      std::pow(50.0, 0.1);
  CHECK(spacing_majorant(2, 50, 3, 0.1) == doctest::Approx(k3).epsilon(1e-14));
}

TEST_CASE("conjecture scan") {
  SUBCASE("rows follow table1_statistic for k = 2") {
    ScanOptions opts;
    opts.threads = 3;
    const ScanReport r = conjecture_scan(1, 10, 2, opts);
    REQUIRE(r.rows.size() == 10);
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const ScanRow& row = r.rows[i];
      CHECK(row.Q == static_cast<std::int64_t>(i) + 1);
      CHECK(row.M == table1_statistic(row.Q));
      CHECK(row.M_unhalved >= row.M);
      running = std::max(running, row.M);
      CHECK(row.running_max == running);
      CHECK(std::gcd(row.witness_a, row.witness_q) == 1);
    }
    CHECK(r.rows.back().running_max == 5);
    CHECK(r.fit_slope > 0.0);
  }
  SUBCASE("singleton window for k = 3") {
    // S_{1,3} = {1/8, 3/8, 5/8, 7/8} with radius 1/2: both points at 1/4
    // count, the antipode does not. The unhalved radius 1 reaches all three.
    const ScanReport r = conjecture_scan(1, 1, 3);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].M == oracle_max(testing::enumerate_oracle(1, 3), 2));
    CHECK(r.rows[0].M == 2);
    CHECK(r.rows[0].M_unhalved == 3);
  }
  SUBCASE("thread count does not change the report") {
    ScanOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const ScanReport a = conjecture_scan(3, 9, 3, one);
    const ScanReport b = conjecture_scan(3, 9, 3, many);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].M == b.rows[i].M);
      CHECK(a.rows[i].M_unhalved == b.rows[i].M_unhalved);
      CHECK(a.rows[i].witness_a == b.rows[i].witness_a);
      CHECK(a.rows[i].ratio == b.rows[i].ratio);
    }
  }
  SUBCASE("custom provider is used") {
    int calls = 0;
    ScanOptions opts;
    opts.threads = 1;
    opts.provider = [&](std::int64_t Q, int k) {
      ++calls;
      return enumerate_set(Q, k);
    };
    conjecture_scan(2, 5, 2, opts);
    CHECK(calls == 4);
  }
  CHECK_THROWS(conjecture_scan(5, 4, 2));
  CHECK_THROWS(conjecture_scan(1, 3, 1));
}
