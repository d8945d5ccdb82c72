#pragma once

// Spacing statistics of S_{Q,k}: the largest number of other points of the
// set inside a torus ball of radius 1/(2N) around a point of the set.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lsieve/power_fraction.hpp"

namespace lsieve {

struct SpacingQuery {
  std::int64_t Q = 1;
  int k = 2;
  std::int64_t N = 1;  // radius 1/(2N), strict
  bool exclude_self = true;
};

struct NeighborCount {
  PowerFraction x;
  std::uint32_t count;
};

struct SpacingResult {
  std::uint64_t count = 0;
  PowerFraction witness;
  // Points with at least one neighbour, in ascending order. Empty when the
  // audit was not requested.
  std::vector<NeighborCount> neighbor_histogram;
};

enum class Audit { kNone, kNonzero };

// Low-level engines over sorted, distinct torus points. Each returns, for every
// point, the number of other points y with ||x - y|| < 1/inverse_threshold.

/// O(n) two-pointer sweep around the circle. `sorted` must be strictly
/// increasing.
std::vector<std::uint32_t> neighbor_counts_sweep(std::span<const TorusPoint> sorted,
                                                 int128 inverse_threshold);

/// O(n^2) reference comparing the exact distance of every pair.
std::vector<std::uint32_t> neighbor_counts_pairwise(std::span<const TorusPoint> points,
                                                    int128 inverse_threshold);

inline constexpr std::size_t kBruteForceLimit = 50'000;

SpacingResult spacing_count_bruteforce(const SpacingQuery& query, Audit audit = Audit::kNonzero);
SpacingResult spacing_count_fast(const SpacingQuery& query, Audit audit = Audit::kNonzero);

/// Same as spacing_count_fast on an already enumerated set.
SpacingResult spacing_count_fast(const FractionSet& set, std::int64_t N, bool exclude_self = true,
                                 Audit audit = Audit::kNone);

/// Largest count with an arbitrary threshold ||.|| < 1/inverse_threshold.
SpacingResult spacing_count_threshold(const FractionSet& set, int128 inverse_threshold,
                                      Audit audit = Audit::kNone);

/// max_x #{x' != x in S_{Q,2} : 2||x - x'|| < Q^-3}, i.e. N = Q^3.
std::uint64_t table1_statistic(std::int64_t Q);

/// The hundred published M(Q), Q = 1..100, used as the regression fixture.
const std::array<int, 100>& table1_reference();

/// Q^{k+1}/N + (Q^{(kappa-1)/kappa} + Q^{(kappa+k)/kappa} / N^{1/kappa}) N^eps
/// with kappa = 2^{k-1}; for k = 2 this is Q^3/N + (sqrt Q + Q^2/sqrt N) N^eps.
double spacing_majorant(std::int64_t Q, std::int64_t N, int k, double epsilon);

/// M(Q,N) divided by the k = 2 majorant. Diagnostic only.
double lemma4_ratio_report(std::int64_t Q, std::int64_t N, double epsilon);

using SetProvider = std::function<FractionSet(std::int64_t Q, int k)>;

struct ScanRow {
  std::int64_t Q;
  std::uint64_t M;              // 2||x - x'|| < Q^{-(k+1)}
  std::uint64_t M_unhalved;     // ||x - x'|| < Q^{-(k+1)}
  std::int64_t witness_a;
  std::int64_t witness_q;
  double ratio;                 // M / spacing_majorant(Q, Q^{k+1}, k, eps)
  std::uint64_t running_max;
};

struct ScanReport {
  int k = 2;
  double epsilon = 0.0;
  std::vector<ScanRow> rows;
  // Least squares M ~ intercept + slope * log Q.
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
};

struct ScanOptions {
  double epsilon = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency
  SetProvider provider;  // defaults to enumerate_set
};

ScanReport conjecture_scan(std::int64_t Q_min, std::int64_t Q_max, int k,
                           const ScanOptions& options = {});

}  // namespace lsieve
