#pragma once

// Dirichlet characters modulo m = q^k built from the cyclic decomposition of
// (Z/mZ)^*, with primitivity flags and Gauss sums.
//
// A character is stored as its exponent vector against the generators; its
// values are exact indices into the group of L-th roots of unity, where L is
// the exponent of the unit group. Value vectors are produced on demand.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace lsieve {

inline constexpr std::int64_t kCharacterModulusLimit = 1'000'000;

class CharacterTable {
 public:
  std::int64_t modulus() const { return modulus_; }
  std::int64_t q() const { return q_; }
  int k() const { return k_; }
  std::size_t size() const { return exponents_.size(); }
  bool primitive(std::size_t chi) const { return primitive_.at(chi); }
  std::size_t primitive_count() const;

  /// Exponent e with chi(a) = e(e / L), or -1 when gcd(a, m) > 1.
  std::int64_t root_index(std::size_t chi, std::int64_t a) const;
  std::int64_t root_order() const { return root_order_; }

  std::complex<double> value(std::size_t chi, std::int64_t a) const;
  std::vector<std::complex<double>> values(std::size_t chi) const;

  /// Index of the complex conjugate character.
  std::size_t conjugate(std::size_t chi) const;

  /// Order of chi in the character group.
  std::int64_t order(std::size_t chi) const;

 private:
  friend CharacterTable build_character_table(std::int64_t q, int k);

  struct Component {
    std::int64_t prime_power;  // modulus of the CRT component
    std::int64_t order;        // order of its generator
    std::vector<std::int32_t> log;  // discrete log of a mod m, -1 if not a unit
  };

  std::int64_t modulus_ = 1;
  std::int64_t q_ = 1;
  int k_ = 2;
  std::int64_t root_order_ = 1;
  std::vector<Component> components_;
  std::vector<std::vector<std::int64_t>> exponents_;
  std::vector<bool> primitive_;
  std::vector<std::complex<double>> roots_;
  std::vector<std::size_t> radix_;  // mixed-radix weights for indexing
};

/// All phi(q^k) characters mod q^k. Requires q^k <= kCharacterModulusLimit.
CharacterTable build_character_table(std::int64_t q, int k);

/// True iff chi is not induced from a proper divisor of the modulus: for every
/// prime p | m, chi is nonconstant on the units a == 1 mod m/p. The modulus 1
/// has no primitive characters here, matching the range 1 <= a < q^k of the
/// additive sums.
bool is_primitive(const CharacterTable& table, std::size_t chi);

struct GaussSum {
  std::size_t chi;
  std::complex<double> value;
};

/// sum_{a mod m} chi(a) e(a/m), compensated.
GaussSum gauss_sum(const CharacterTable& table, std::size_t chi);

/// G(conj chi)^{-1} sum_a conj(chi)(a) e(a n / m); equals chi(n) when chi is
/// primitive. Throws std::invalid_argument for imprimitive chi.
std::complex<double> character_from_additive(const CharacterTable& table, std::size_t chi,
                                             std::int64_t n);

struct TransferCheck {
  double lhs;     // sum over primitive chi of |sum a_n chi(n)|^2
  double middle;  // m^-1 sum over all chi of |sum_a conj(chi)(a) S(a/m)|^2
  double rhs;     // phi(m)/m sum_{a coprime} |S(a/m)|^2
};

/// a holds a_{M+1}, ..., a_{M+N}; S(x) = sum_n a_n e(n x).
TransferCheck mult_transfer_check(const CharacterTable& table,
                                  std::span<const std::complex<double>> a, std::int64_t M = 0);

/// sum_{q=1}^{Q} q/phi(q) sum over primitive chi mod q^k of |sum a_n chi(n)|^2.
double corollary_lhs(std::int64_t Q, int k, std::span<const std::complex<double>> a,
                     std::int64_t M = 0);

}  // namespace lsieve
