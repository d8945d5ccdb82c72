#include "lsieve/power_fraction.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace lsieve {

std::int64_t checked_power(std::int64_t base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("checked_power: negative exponent");
  std::int64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (__builtin_mul_overflow(result, base, &result)) {
      throw RangeError("q^k overflows 64-bit integers: q=" + std::to_string(base) +
                       ", k=" + std::to_string(exponent));
    }
  }
  return result;
}

std::int64_t euler_phi(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("euler_phi: n must be positive");
  std::int64_t result = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::string to_string(int128 v) {
  if (v == 0) return "0";
  bool negative = v < 0;
  // Work with negative remainders so INT128_MIN is representable.
  std::string digits;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    digits.push_back(static_cast<char>('0' + (negative ? -d : d)));
    v /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

TorusPoint TorusPoint::make(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("TorusPoint: denominator must be positive");
  num %= den;
  if (num < 0) num += den;
  std::int64_t g = std::gcd(num, den);
  return TorusPoint{num / g, den / g};
}

PowerFraction::PowerFraction(std::int64_t a, std::int64_t q, int k) : a_(a), q_(q), k_(k) {
  if (k < 2) throw std::invalid_argument("PowerFraction: exponent k must be >= 2");
  if (q < 1) throw std::invalid_argument("PowerFraction: base q must be >= 1");
  den_ = checked_power(q, k);
  if (a < 1 || a >= den_) {
    throw std::invalid_argument("PowerFraction: numerator must satisfy 1 <= a < q^k");
  }
  if (std::gcd(a, q) != 1) throw std::invalid_argument("PowerFraction: gcd(a, q) != 1");
}

std::strong_ordering operator<=>(const TorusDistance& x, const TorusDistance& y) {
  int128 lhs;
  int128 rhs;
  if (__builtin_mul_overflow(x.num, y.den, &lhs) || __builtin_mul_overflow(y.num, x.den, &rhs)) {
    throw RangeError("TorusDistance comparison overflows 128-bit integers");
  }
  return lhs <=> rhs;
}

TorusDistance torus_distance(const TorusPoint& x, const TorusPoint& y) {
  int128 den = static_cast<int128>(x.den) * y.den;
  int128 num = static_cast<int128>(x.num) * y.den - static_cast<int128>(y.num) * x.den;
  if (num < 0) num = -num;
  // Both representatives lie in [0, 1), so |x - y| < 1 and the nearest
  // integer is 0 or +-1.
  if (2 * num > den) num = den - num;
  int128 g = gcd128(num, den);
  return TorusDistance{num / g, den / g};
}

bool distance_below(const TorusDistance& d, int128 inverse_threshold) {
  if (inverse_threshold < 1) throw std::invalid_argument("distance_below: threshold must be >= 1");
  // inv * num < den  <=>  num <= (den - 1) / inv, free of overflow.
  return d.num <= (d.den - 1) / inverse_threshold;
}

bool compare_distance_to_threshold(const TorusDistance& d, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("compare_distance_to_threshold: N must be >= 1");
  return distance_below(d, 2 * static_cast<int128>(N));
}

FractionSet::FractionSet(std::int64_t Q, int k, std::vector<PowerFraction> elements)
    : Q_(Q), k_(k), elements_(std::move(elements)) {
  if (Q < 1 || k < 2) throw std::invalid_argument("FractionSet: need Q >= 1 and k >= 2");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    if (e.k() != k || e.q() <= Q || e.q() > 2 * Q) {
      throw std::invalid_argument("FractionSet: element outside the window Q < q <= 2Q");
    }
    if (i > 0 && !(elements_[i - 1] < e)) {
      throw std::invalid_argument("FractionSet: elements not strictly increasing");
    }
  }
}

std::vector<TorusPoint> FractionSet::points() const {
  std::vector<TorusPoint> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(e.point());
  return out;
}

FractionSet FractionSet::from_records(
    std::int64_t Q, int k, std::span<const std::pair<std::int64_t, std::int64_t>> records) {
  if (records.size() != expected_cardinality(Q, k)) {
    throw std::invalid_argument("FractionSet: record count does not match |S_{Q,k}|");
  }
  std::vector<PowerFraction> elements;
  elements.reserve(records.size());
  for (const auto& [a, q] : records) elements.emplace_back(a, q, k);
  return FractionSet(Q, k, std::move(elements));
}

std::uint64_t expected_cardinality(std::int64_t Q, int k) {
  if (Q < 1 || k < 2) throw std::invalid_argument("expected_cardinality: need Q >= 1, k >= 2");
  std::uint64_t total = 0;
  for (std::int64_t q = Q + 1; q <= 2 * Q; ++q) {
    total += static_cast<std::uint64_t>(checked_power(q, k - 1)) *
             static_cast<std::uint64_t>(euler_phi(q));
  }
  return total;
}

FractionSet enumerate_set(std::int64_t Q, int k) {
  if (Q < 1) throw std::invalid_argument("enumerate_set: Q must be >= 1");
  if (k < 2) throw std::invalid_argument("enumerate_set: k must be >= 2");
  checked_power(2 * Q, k);

  std::vector<PowerFraction> elements;
  elements.reserve(expected_cardinality(Q, k));
  for (std::int64_t q = Q + 1; q <= 2 * Q; ++q) {
    const std::int64_t den = checked_power(q, k);
    for (std::int64_t a = 1; a < den; ++a) {
      if (std::gcd(a, q) == 1) {
        elements.push_back(PowerFraction(PowerFraction::Unchecked{}, a, q, k, den));
      }
    }
  }
  std::sort(elements.begin(), elements.end());
  return FractionSet(Q, k, std::move(elements));
}

std::string decimal_string(std::int64_t num, std::int64_t den, int digits) {
  if (den <= 0 || num < 0) throw std::invalid_argument("decimal_string: need num >= 0, den > 0");
  std::string out = std::to_string(num / den) + ".";
  int128 rem = num % den;
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    out.push_back(static_cast<char>('0' + static_cast<int>(rem / den)));
    rem %= den;
  }
  return out;
}

}  // namespace lsieve
