#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "lsieve/characters.hpp"
#include "lsieve/power_fraction.hpp"
#include "lsieve/sieve_lab.hpp"
#include "test_support.hpp"

using namespace lsieve;
using cplx = std::complex<double>;

namespace {

int mobius(std::int64_t n) {
  int mu = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

std::vector<std::int64_t> divisors(std::int64_t m) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= m; ++d) {
    if (m % d == 0) out.push_back(d);
  }
  return out;
}

// chi is induced from d iff chi(a) = 1 for every unit a == 1 mod d.
bool primitive_oracle(const CharacterTable& t, std::size_t chi) {
  const std::int64_t m = t.modulus();
  if (m == 1) return false;
  for (std::int64_t d : divisors(m)) {
    if (d == m) continue;
    bool induced = true;
    for (std::int64_t a = 1; a < m && induced; a += d) {
      if (std::gcd(a, m) == 1 && t.root_index(chi, a) != 0) induced = false;
    }
    if (induced) return false;
  }
  return true;
}

// sum over primitive chi of |sum_n a_n chi(n)|^2 through
// sum* chi(x) conj chi(y) = sum_{d | m, d | x - y} phi(d) mu(m/d).
double primitive_sum_oracle(std::int64_t m, const std::vector<cplx>& a) {
  cplx total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = static_cast<std::int64_t>(i) + 1;
    if (std::gcd(x, m) != 1) continue;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const auto y = static_cast<std::int64_t>(j) + 1;
      if (std::gcd(y, m) != 1) continue;
      std::int64_t kernel = 0;
      for (std::int64_t d : divisors(m)) {
        if ((x - y) % d == 0) kernel += euler_phi(d) * mobius(m / d);
      }
      total += a[i] * std::conj(a[j]) * static_cast<double>(kernel);
    }
  }
  return total.real();
}

std::vector<std::pair<std::int64_t, int>> small_moduli(std::int64_t limit) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (int k = 2; k <= 8; ++k) {
    for (std::int64_t q = 1; checked_power(q, k) <= limit; ++q) out.emplace_back(q, k);
  }
  return out;
}

}  // namespace

TEST_CASE("character counts") {
  const auto t9 = build_character_table(3, 2);
  CHECK(t9.modulus() == 9);
  CHECK(t9.size() == 6);
  CHECK(t9.primitive_count() == 4);
  const auto t4 = build_character_table(2, 2);
  CHECK(t4.size() == 2);
  CHECK(t4.primitive_count() == 1);
  const auto t1 = build_character_table(1, 2);
  CHECK(t1.size() == 1);
  CHECK(t1.primitive_count() == 0);

  for (std::int64_t q = 1; q <= 30; ++q) {
    for (int k : {2, 3}) {
      const std::int64_t m = checked_power(q, k);
      if (m > 30000) continue;
      const auto t = build_character_table(q, k);
      REQUIRE(t.size() == static_cast<std::size_t>(checked_power(q, k - 1) * euler_phi(q)));
      // Primitive characters mod m number sum_{d | m} mu(m/d) phi(d).
      std::int64_t expected = 0;
      for (std::int64_t d : divisors(m)) expected += mobius(m / d) * euler_phi(d);
      if (m == 1) expected = 0;
      REQUIRE(t.primitive_count() == static_cast<std::size_t>(expected));
    }
  }
  CHECK_THROWS_AS(build_character_table(1001, 2), GuardError);
  CHECK_THROWS(build_character_table(3, 1));
}

TEST_CASE("primitivity matches the induction oracle") {
  for (const auto& [q, k] : small_moduli(256)) {
    const auto t = build_character_table(q, k);
    for (std::size_t chi = 0; chi < t.size(); ++chi) {
      CAPTURE(t.modulus());
      CAPTURE(chi);
      REQUIRE(t.primitive(chi) == primitive_oracle(t, chi));
      REQUIRE(is_primitive(t, chi) == t.primitive(chi));
    }
  }
  const auto t9 = build_character_table(3, 2);
  CHECK_FALSE(t9.primitive(0));
  bool found_order6 = false;
  for (std::size_t chi = 0; chi < t9.size(); ++chi) {
    if (t9.order(chi) == 6) {
      found_order6 = true;
      CHECK(t9.primitive(chi));
    }
  }
  CHECK(found_order6);
  CHECK(build_character_table(2, 2).primitive(1));
}

TEST_CASE("characters are multiplicative, periodic and unimodular on units") {
  testing::Gen gen(51);
  for (const auto& [q, k] : small_moduli(2000)) {
    const auto t = build_character_table(q, k);
    const std::int64_t m = t.modulus();
    CHECK(t.root_index(0, 1) == 0);
    for (int trial = 0; trial < 200; ++trial) {
      const auto chi = static_cast<std::size_t>(gen.uniform(0, static_cast<std::int64_t>(t.size()) - 1));
      const std::int64_t a = gen.uniform(-3 * m, 3 * m), b = gen.uniform(-3 * m, 3 * m);
      const std::int64_t ab = ((a % m) * (b % m) % m + m) % m;
      REQUIRE(std::abs(t.value(chi, ab) - t.value(chi, a) * t.value(chi, b)) < 1e-12);
      REQUIRE(t.root_index(chi, a) == t.root_index(chi, a + m));
      if (std::gcd(a, m) == 1) {
        REQUIRE(std::abs(std::abs(t.value(chi, a)) - 1.0) < 1e-14);
        // chi(a)^order = 1.
        REQUIRE(t.root_index(chi, a) * t.order(chi) % t.root_order() == 0);
      } else {
        REQUIRE(t.value(chi, a) == cplx(0.0));
      }
      const std::size_t bar = t.conjugate(chi);
      REQUIRE(std::abs(t.value(bar, a) - std::conj(t.value(chi, a))) < 1e-12);
    }
  }
}

TEST_CASE("orthogonality relations") {
  for (const auto& [q, k] : small_moduli(200)) {
    const auto t = build_character_table(q, k);
    const std::int64_t m = t.modulus();
    const double phi = static_cast<double>(t.size());
    std::vector<std::vector<cplx>> vals;
    for (std::size_t chi = 0; chi < t.size(); ++chi) vals.push_back(t.values(chi));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      for (std::size_t j = 0; j < vals.size(); ++j) {
        cplx s = 0.0;
        for (std::int64_t a = 0; a < m; ++a) s += vals[i][static_cast<std::size_t>(a)] * std::conj(vals[j][static_cast<std::size_t>(a)]);
        REQUIRE(std::abs(s - (i == j ? phi : 0.0)) < 1e-9);
      }
    }
    // Dual relation: sum_chi chi(a) = phi(m) [a == 1].
    for (std::int64_t a = 0; a < m; ++a) {
      cplx s = 0.0;
      for (const auto& v : vals) s += v[static_cast<std::size_t>(a)];
      REQUIRE(std::abs(s - (a % m == 1 % m ? phi : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("Gauss sums") {
  const auto t4 = build_character_table(2, 2);
  const cplx g = gauss_sum(t4, 1).value;
  CHECK(std::abs(g - cplx(0, 2)) < 1e-15);
  CHECK(std::abs(gauss_sum(t4, 0).value) < 1e-15);  // i + (-i)

  for (std::int64_t q = 2; q <= 20; ++q) {
    const auto t = build_character_table(q, 2);
    for (std::size_t chi = 0; chi < t.size(); ++chi) {
      if (!t.primitive(chi)) continue;
      CAPTURE(q);
      CAPTURE(chi);
      REQUIRE(std::abs(std::abs(gauss_sum(t, chi).value) - static_cast<double>(q)) < 1e-9);
    }
  }
  // Principal character mod 9: Ramanujan sum c_9(1) = mu(9) = 0.
  CHECK(std::abs(gauss_sum(build_character_table(3, 2), 0).value) < 1e-12);
  // Against a direct polar-form sum.
  const auto t25 = build_character_table(5, 2);
  for (std::size_t chi = 0; chi < t25.size(); ++chi) {
    cplx direct = 0.0;
    for (std::int64_t a = 0; a < 25; ++a) direct += t25.value(chi, a) * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(a) / 25.0);
    CHECK(std::abs(gauss_sum(t25, chi).value - direct) < 1e-12);
  }
}

TEST_CASE("characters are recovered from additive characters") {
  for (const auto& [q, k] : small_moduli(150)) {
    const auto t = build_character_table(q, k);
    for (std::size_t chi = 0; chi < t.size(); ++chi) {
      if (!t.primitive(chi)) {
        CHECK_THROWS_AS(character_from_additive(t, chi, 1), std::invalid_argument);
        continue;
      }
      for (std::int64_t n = 0; n < t.modulus(); ++n) {
        REQUIRE(std::abs(character_from_additive(t, chi, n) - t.value(chi, n)) < 1e-9);
      }
    }
  }
}

TEST_CASE("transfer from additive to multiplicative sums") {
  testing::Gen gen(52);
  const auto t9 = build_character_table(3, 2);
  const std::vector<cplx> zero(10, cplx(0.0));
  const TransferCheck z = mult_transfer_check(t9, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  std::vector<cplx> indicator(5, cplx(0.0));
  indicator[1] = 1.0;  // a_2 = 1
  const TransferCheck ind = mult_transfer_check(t9, indicator);
  CHECK(ind.lhs == doctest::Approx(4.0).epsilon(1e-12));  // |chi(2)|^2 over 4 primitive characters
  CHECK(ind.lhs <= ind.rhs * (1 + 1e-12));
  CHECK(ind.rhs == doctest::Approx(6.0 / 9.0 * 6.0).epsilon(1e-12));  // phi(9)/9 * sum_b |e(2b/9)|^2

  for (int i = 0; i < 20; ++i) {
    const std::int64_t q = gen.uniform(2, 7);
    const int k = static_cast<int>(gen.uniform(2, 3));
    const auto t = build_character_table(q, k);
    const auto a = gen.sequence(static_cast<std::size_t>(gen.uniform(1, 30)));
    const TransferCheck c = mult_transfer_check(t, a);
    CAPTURE(q);
    CAPTURE(k);
    REQUIRE(c.lhs <= c.middle * (1 + 1e-9));
    REQUIRE(std::abs(c.middle - c.rhs) <= 1e-9 * c.rhs);
    REQUIRE(c.lhs == doctest::Approx(primitive_sum_oracle(t.modulus(), a)).epsilon(1e-9));
  }
}

TEST_CASE("offset sequences") {
  testing::Gen gen(53);
  const auto t = build_character_table(5, 2);
  const auto a = gen.sequence(12);
  // Shifting by a multiple of the modulus changes nothing.
  const TransferCheck base = mult_transfer_check(t, a, 0);
  const TransferCheck shifted = mult_transfer_check(t, a, 25);
  CHECK(shifted.lhs == doctest::Approx(base.lhs).epsilon(1e-12));
  CHECK(shifted.rhs == doctest::Approx(base.rhs).epsilon(1e-12));
}

TEST_CASE("aggregate multiplicative side") {
  const std::vector<cplx> ones(10, cplx(1.0));
  CHECK(corollary_lhs(1, 2, ones) == 0.0);

  // Q = 3, k = 2 from the Mobius oracle with weights q/phi(q).
  const double expected = 2.0 / 1.0 * primitive_sum_oracle(4, ones) + 3.0 / 2.0 * primitive_sum_oracle(9, ones);
  CHECK(corollary_lhs(3, 2, ones) == doctest::Approx(expected).epsilon(1e-12));

  testing::Gen gen(54);
  for (int i = 0; i < 10; ++i) {
    const auto a = gen.sequence(static_cast<std::size_t>(gen.uniform(1, 30)));
    for (int k : {2, 3}) {
      CHECK(corollary_lhs(4, k, a) <= additive_lhs(4, k, a) * (1 + 1e-9));
    }
  }
}
