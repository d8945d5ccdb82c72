#pragma once

// Exact fractions with power denominators, torus distance, and enumeration
// of the sets S_{Q,k} = { a/q^k : gcd(a,q) = 1, 1 <= a < q^k, Q < q <= 2Q }.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsieve {

using int128 = __int128;

/// Raised when an exact integer quantity would not fit its storage width.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Raised when a problem size exceeds a desk-scale guard.
class GuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

std::int64_t checked_power(std::int64_t base, int exponent);
std::int64_t euler_phi(std::int64_t n);
int128 gcd128(int128 a, int128 b);
std::string to_string(int128 v);

// A point of R/Z stored exactly as num/den with 0 <= num < den and
// gcd(num, den) = 1.
struct TorusPoint {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Reduces num/den modulo 1 and to lowest terms. den must be positive.
  static TorusPoint make(std::int64_t num, std::int64_t den);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Exact ordering of the representatives in [0, 1).
inline bool value_less(const TorusPoint& x, const TorusPoint& y) {
  return static_cast<int128>(x.num) * y.den < static_cast<int128>(y.num) * x.den;
}

class FractionSet;
FractionSet enumerate_set(std::int64_t Q, int k);

/// a/q^k with k >= 2, gcd(a, q) = 1 and 1 <= a < q^k.
class PowerFraction {
 public:
  /// Validates the invariants; throws std::invalid_argument or RangeError.
  PowerFraction(std::int64_t a, std::int64_t q, int k);

  std::int64_t a() const { return a_; }
  std::int64_t q() const { return q_; }
  int k() const { return k_; }
  std::int64_t denominator() const { return den_; }

  TorusPoint point() const { return TorusPoint{a_, den_}; }
  double to_double() const { return static_cast<double>(a_) / static_cast<double>(den_); }

  friend bool operator==(const PowerFraction& x, const PowerFraction& y) {
    return x.a_ == y.a_ && x.q_ == y.q_ && x.k_ == y.k_;
  }
  friend bool operator<(const PowerFraction& x, const PowerFraction& y) {
    return value_less(x.point(), y.point());
  }

 private:
  struct Unchecked {};
  PowerFraction(Unchecked, std::int64_t a, std::int64_t q, int k, std::int64_t den)
      : a_(a), q_(q), den_(den), k_(k) {}
  friend class FractionSet;
  friend FractionSet enumerate_set(std::int64_t Q, int k);

  std::int64_t a_;
  std::int64_t q_;
  std::int64_t den_;
  int k_;
};

/// ||x - y|| as an exact reduced fraction num/den in [0, 1/2].
struct TorusDistance {
  int128 num = 0;
  int128 den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const TorusDistance&, const TorusDistance&) = default;
  /// Exact comparison; throws RangeError if the cross products overflow.
  friend std::strong_ordering operator<=>(const TorusDistance& x, const TorusDistance& y);
};

TorusDistance torus_distance(const TorusPoint& x, const TorusPoint& y);
inline TorusDistance torus_distance(const PowerFraction& x, const PowerFraction& y) {
  return torus_distance(x.point(), y.point());
}

/// True iff ||.|| < 1/inverse_threshold, exact. inverse_threshold >= 1.
bool distance_below(const TorusDistance& d, int128 inverse_threshold);

/// True iff d < 1/(2N) strictly. N >= 1.
bool compare_distance_to_threshold(const TorusDistance& d, std::int64_t N);

// S_{Q,k} for the dyadic window Q < q <= 2Q, sorted ascending by value.
class FractionSet {
 public:
  FractionSet(std::int64_t Q, int k, std::vector<PowerFraction> elements);

  std::int64_t Q() const { return Q_; }
  int k() const { return k_; }
  const std::vector<PowerFraction>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  std::vector<TorusPoint> points() const;

  /// Reads a set from untrusted storage, checking every record.
  static FractionSet from_records(std::int64_t Q, int k,
                                  std::span<const std::pair<std::int64_t, std::int64_t>> records);

 private:
  std::int64_t Q_;
  int k_;
  std::vector<PowerFraction> elements_;
};

/// Sum over Q < q <= 2Q of q^{k-1} phi(q).
std::uint64_t expected_cardinality(std::int64_t Q, int k);

/// Enumerates S_{Q,k}. Throws RangeError when (2Q)^k exceeds 64 bits.
FractionSet enumerate_set(std::int64_t Q, int k);

/// Truncated decimal expansion "0.ddd..." of num/den with the given digits.
std::string decimal_string(std::int64_t num, std::int64_t den, int digits = 18);

// Columns a,q,k,value.
void write_csv(std::ostream& out, const FractionSet& set);

// Little-endian: u64 Q, u64 k, u64 count, then (u64 a, u64 q) per record.
void write_binary(std::ostream& out, const FractionSet& set);
FractionSet read_binary(std::istream& in);

}  // namespace lsieve
