#include "lsieve/spacing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace lsieve {
namespace {

// Forward arc length from x to y, with one extra turn when `wrapped`, is
// below 1/inv. Requires y >= x as representatives unless wrapped.
bool forward_below(const TorusPoint& x, const TorusPoint& y, bool wrapped, int128 inv) {
  const int128 den = static_cast<int128>(x.den) * y.den;
  int128 num = static_cast<int128>(y.num) * x.den - static_cast<int128>(x.num) * y.den;
  if (wrapped) num += den;
  return num <= (den - 1) / inv;
}

SpacingResult summarize(const FractionSet& set, const std::vector<std::uint32_t>& counts,
                        bool exclude_self, Audit audit) {
  const auto& elements = set.elements();
  const std::uint32_t self = exclude_self ? 0 : 1;
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  SpacingResult result{counts[best] + self, elements[best], {}};
  if (audit == Audit::kNonzero) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] + self > 0) result.neighbor_histogram.push_back({elements[i], counts[i] + self});
    }
  }
  return result;
}

void check_query(const SpacingQuery& query) {
  if (query.Q < 1) throw std::invalid_argument("spacing: Q must be >= 1");
  if (query.k < 2) throw std::invalid_argument("spacing: k must be >= 2");
  if (query.N < 1) throw std::invalid_argument("spacing: N must be >= 1");
}

}  // namespace

std::vector<std::uint32_t> neighbor_counts_sweep(std::span<const TorusPoint> sorted,
                                                 int128 inverse_threshold) {
  if (inverse_threshold < 1) throw std::invalid_argument("neighbor_counts: threshold must be >= 1");
  const std::size_t n = sorted.size();
  std::vector<std::uint32_t> counts(n, 0);
  if (n < 2) return counts;
  if (inverse_threshold < 2) {
    // Radius >= 1/2 covers the whole circle.
    std::fill(counts.begin(), counts.end(), static_cast<std::uint32_t>(n - 1));
    return counts;
  }

  // forward[i] counts successors within the radius; the same windows, read
  // backwards, give every point its predecessors via a circular difference
  // array. With radius <= 1/2 the two sides never share a point.
  std::vector<std::int64_t> diff(n + 1, 0);
  std::size_t end = 1;  // exclusive end of the window of i, unrolled index
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < i + n && forward_below(sorted[i], sorted[end % n], end >= n, inverse_threshold)) {
      ++end;
    }
    counts[i] = static_cast<std::uint32_t>(end - i - 1);
    if (end - i - 1 == 0) continue;
    const std::size_t first = i + 1;
    const std::size_t last = end - 1;
    if (last < n) {
      ++diff[first];
      --diff[last + 1];
    } else if (first >= n) {
      ++diff[first - n];
      --diff[last - n + 1];
    } else {
      ++diff[first];
      --diff[n];
      ++diff[0];
      --diff[last - n + 1];
    }
  }
  std::int64_t running = 0;
  for (std::size_t i = 0; i < n; ++i) {
    running += diff[i];
    counts[i] += static_cast<std::uint32_t>(running);
  }
  return counts;
}

std::vector<std::uint32_t> neighbor_counts_pairwise(std::span<const TorusPoint> points,
                                                    int128 inverse_threshold) {
  if (inverse_threshold < 1) throw std::invalid_argument("neighbor_counts: threshold must be >= 1");
  std::vector<std::uint32_t> counts(points.size(), 0);
  std::int64_t max_den = 1;
  for (const auto& p : points) max_den = std::max(max_den, p.den);
  // d * inv < D cannot overflow when D and inv both stay below 2^62.
  const bool multiply = max_den < (std::int64_t{1} << 31) && inverse_threshold < (int128{1} << 62);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      // Unreduced ||x - y|| = min(|d|, D - |d|) / D.
      const int128 D = static_cast<int128>(points[i].den) * points[j].den;
      int128 d = static_cast<int128>(points[i].num) * points[j].den -
                 static_cast<int128>(points[j].num) * points[i].den;
      if (d < 0) d = -d;
      if (2 * d > D) d = D - d;
      if (multiply ? d * inverse_threshold < D : d <= (D - 1) / inverse_threshold) {
        ++counts[i];
        ++counts[j];
      }
    }
  }
  return counts;
}

SpacingResult spacing_count_bruteforce(const SpacingQuery& query, Audit audit) {
  check_query(query);
  if (expected_cardinality(query.Q, query.k) > kBruteForceLimit) {
    throw GuardError("spacing_count_bruteforce: |S_{Q,k}| exceeds " +
                     std::to_string(kBruteForceLimit) + "; use spacing_count_fast");
  }
  const FractionSet set = enumerate_set(query.Q, query.k);
  const auto points = set.points();
  return summarize(set, neighbor_counts_pairwise(points, 2 * static_cast<int128>(query.N)),
                   query.exclude_self, audit);
}

SpacingResult spacing_count_fast(const SpacingQuery& query, Audit audit) {
  check_query(query);
  return spacing_count_fast(enumerate_set(query.Q, query.k), query.N, query.exclude_self, audit);
}

SpacingResult spacing_count_fast(const FractionSet& set, std::int64_t N, bool exclude_self,
                                 Audit audit) {
  if (N < 1) throw std::invalid_argument("spacing: N must be >= 1");
  const auto points = set.points();
  return summarize(set, neighbor_counts_sweep(points, 2 * static_cast<int128>(N)), exclude_self,
                   audit);
}

SpacingResult spacing_count_threshold(const FractionSet& set, int128 inverse_threshold,
                                      Audit audit) {
  const auto points = set.points();
  return summarize(set, neighbor_counts_sweep(points, inverse_threshold), true, audit);
}

std::uint64_t table1_statistic(std::int64_t Q) {
  if (Q < 1) throw std::invalid_argument("table1_statistic: Q must be >= 1");
  return spacing_count_fast(enumerate_set(Q, 2), checked_power(Q, 3)).count;
}

const std::array<int, 100>& table1_reference() {
  static const std::array<int, 100> kValues = {
      0, 0, 1, 1, 2, 1, 1, 2, 2, 2,  //   1..10
      2, 2, 2, 2, 2, 2, 2, 2, 2, 2,  //  11..20
      2, 2, 2, 3, 2, 2, 3, 2, 2, 2,  //  21..30
      2, 2, 2, 2, 2, 2, 3, 3, 3, 3,  //  31..40
      3, 3, 3, 3, 2, 3, 3, 3, 3, 3,  //  41..50
      3, 3, 4, 3, 3, 3, 3, 3, 3, 3,  //  51..60
      3, 3, 3, 3, 3, 3, 3, 3, 3, 3,  //  61..70
      3, 3, 3, 3, 3, 3, 3, 3, 3, 3,  //  71..80
      3, 3, 4, 4, 3, 3, 3, 3, 4, 4,  //  81..90
      4, 4, 4, 3, 3, 3, 4, 4, 4, 4,  //  91..100
  };
  return kValues;
}

double spacing_majorant(std::int64_t Q, std::int64_t N, int k, double epsilon) {
  if (Q < 1 || N < 1 || k < 2) throw std::invalid_argument("spacing_majorant: bad parameters");
  const double q = static_cast<double>(Q);
  const double n = static_cast<double>(N);
  const double kappa = std::ldexp(1.0, k - 1);
  return std::pow(q, k + 1) / n +
         (std::pow(q, (kappa - 1) / kappa) + std::pow(q, (kappa + k) / kappa) / std::pow(n, 1 / kappa)) *
             std::pow(n, epsilon);
}

double lemma4_ratio_report(std::int64_t Q, std::int64_t N, double epsilon) {
  if (Q < 1 || N < 1) throw std::invalid_argument("lemma4_ratio_report: Q, N must be >= 1");
  const auto m = spacing_count_fast(enumerate_set(Q, 2), N).count;
  return static_cast<double>(m) / spacing_majorant(Q, N, 2, epsilon);
}

ScanReport conjecture_scan(std::int64_t Q_min, std::int64_t Q_max, int k,
                           const ScanOptions& options) {
  if (Q_min < 1 || Q_max < Q_min) throw std::invalid_argument("conjecture_scan: need 1 <= Q_min <= Q_max");
  if (k < 2) throw std::invalid_argument("conjecture_scan: k must be >= 2");
  checked_power(2 * Q_max, k);
  checked_power(Q_max, k + 1);

  const SetProvider provider = options.provider ? options.provider : SetProvider(enumerate_set);
  const std::size_t count = static_cast<std::size_t>(Q_max - Q_min + 1);
  std::vector<ScanRow> rows(count);

  auto work = [&](std::size_t index) {
    const std::int64_t Q = Q_min + static_cast<std::int64_t>(index);
    const FractionSet set = provider(Q, k);
    const std::int64_t N = checked_power(Q, k + 1);
    const auto halved = spacing_count_threshold(set, 2 * static_cast<int128>(N));
    const auto unhalved = spacing_count_threshold(set, N);
    rows[index] = ScanRow{Q,
                          halved.count,
                          unhalved.count,
                          halved.witness.a(),
                          halved.witness.q(),
                          static_cast<double>(halved.count) / spacing_majorant(Q, N, k, options.epsilon),
                          0};
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
  } else {
    // Largest Q first; rows are stored by index.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j; (j = next.fetch_add(1)) < count && !failed;) {
          try {
            work(count - 1 - j);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ScanReport report;
  report.k = k;
  report.epsilon = options.epsilon;
  std::uint64_t running = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& row : rows) {
    running = std::max(running, row.M);
    row.running_max = running;
    const double x = std::log(static_cast<double>(row.Q));
    const double y = static_cast<double>(row.M);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double det = n * sxx - sx * sx;
  if (det > 0) {
    report.fit_slope = (n * sxy - sx * sy) / det;
    report.fit_intercept = (sy - report.fit_slope * sx) / n;
  } else {
    report.fit_intercept = sy / n;
  }
  report.rows = std::move(rows);
  return report;
}

}  // namespace lsieve
