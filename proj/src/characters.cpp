#include "lsieve/characters.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "compensated_sum.hpp"
#include "lsieve/expsum.hpp"
#include "lsieve/power_fraction.hpp"

namespace lsieve {
namespace {

using cplx = std::complex<double>;

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t m) {
  std::int64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = static_cast<std::int64_t>(static_cast<int128>(result) * base % m);
    base = static_cast<std::int64_t>(static_cast<int128>(base) * base % m);
    exp >>= 1;
  }
  return result;
}

std::int64_t primitive_root_mod_prime(std::int64_t p) {
  if (p == 2) return 1;
  const auto factors = factorize(p - 1);
  for (std::int64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [r, e] : factors) {
      if (pow_mod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

// log[a] = j with g^j == a (mod pp), -1 for non-units.
std::vector<std::int32_t> cyclic_log(std::int64_t g, std::int64_t order, std::int64_t pp) {
  std::vector<std::int32_t> log(static_cast<std::size_t>(pp), -1);
  std::int64_t x = 1 % pp;
  for (std::int64_t j = 0; j < order; ++j) {
    log[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(j);
    x = x * g % pp;
  }
  return log;
}

}  // namespace

std::size_t CharacterTable::primitive_count() const {
  std::size_t count = 0;
  for (bool p : primitive_) count += p ? 1 : 0;
  return count;
}

std::int64_t CharacterTable::root_index(std::size_t chi, std::int64_t a) const {
  const auto& c = exponents_.at(chi);
  a %= modulus_;
  if (a < 0) a += modulus_;
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& comp = components_[i];
    const std::int32_t l = comp.log[static_cast<std::size_t>(a % comp.prime_power)];
    if (l < 0) return -1;
    acc = (acc + c[i] * l % comp.order * (root_order_ / comp.order)) % root_order_;
  }
  return acc;
}

cplx CharacterTable::value(std::size_t chi, std::int64_t a) const {
  const std::int64_t idx = root_index(chi, a);
  return idx < 0 ? cplx(0.0) : roots_[static_cast<std::size_t>(idx)];
}

std::vector<cplx> CharacterTable::values(std::size_t chi) const {
  std::vector<cplx> out(static_cast<std::size_t>(modulus_));
  for (std::int64_t a = 0; a < modulus_; ++a) out[static_cast<std::size_t>(a)] = value(chi, a);
  return out;
}

std::size_t CharacterTable::conjugate(std::size_t chi) const {
  const auto& c = exponents_.at(chi);
  std::size_t index = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const std::int64_t h = components_[i].order;
    index += static_cast<std::size_t>((h - c[i]) % h) * radix_[i];
  }
  return index;
}

std::int64_t CharacterTable::order(std::size_t chi) const {
  const auto& c = exponents_.at(chi);
  std::int64_t result = 1;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const std::int64_t h = components_[i].order;
    result = std::lcm(result, h / std::gcd(c[i], h));
  }
  return result;
}

CharacterTable build_character_table(std::int64_t q, int k) {
  if (q < 1 || k < 2) throw std::invalid_argument("build_character_table: need q >= 1, k >= 2");
  const std::int64_t m = checked_power(q, k);
  if (m > kCharacterModulusLimit) {
    throw GuardError("build_character_table: q^k = " + std::to_string(m) + " exceeds " +
                     std::to_string(kCharacterModulusLimit));
  }

  CharacterTable table;
  table.modulus_ = m;
  table.q_ = q;
  table.k_ = k;

  for (const auto& [p, e] : factorize(m)) {
    const std::int64_t pp = checked_power(p, e);
    if (p != 2) {
      std::int64_t g = primitive_root_mod_prime(p);
      if (e >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
      const std::int64_t order = pp / p * (p - 1);
      table.components_.push_back({pp, order, cyclic_log(g, order, pp)});
    } else if (e == 1) {
      table.components_.push_back({2, 1, {-1, 0}});
    } else if (e == 2) {
      table.components_.push_back({4, 2, {-1, 0, -1, 1}});
    } else {
      // (Z/2^e)^* = <-1> x <5>.
      const std::int64_t order5 = pp / 4;
      std::vector<std::int32_t> sign(static_cast<std::size_t>(pp), -1);
      std::vector<std::int32_t> log5(static_cast<std::size_t>(pp), -1);
      std::int64_t x = 1;
      for (std::int64_t j = 0; j < order5; ++j) {
        sign[static_cast<std::size_t>(x)] = 0;
        sign[static_cast<std::size_t>(pp - x)] = 1;
        log5[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(j);
        log5[static_cast<std::size_t>(pp - x)] = static_cast<std::int32_t>(j);
        x = x * 5 % pp;
      }
      table.components_.push_back({pp, 2, std::move(sign)});
      table.components_.push_back({pp, order5, std::move(log5)});
    }
  }
  if (table.components_.empty()) table.components_.push_back({1, 1, {0}});

  table.root_order_ = 1;
  std::size_t count = 1;
  table.radix_.clear();
  for (const auto& comp : table.components_) {
    table.root_order_ = std::lcm(table.root_order_, comp.order);
    table.radix_.push_back(count);
    count *= static_cast<std::size_t>(comp.order);
  }
  table.roots_.resize(static_cast<std::size_t>(table.root_order_));
  for (std::int64_t j = 0; j < table.root_order_; ++j) {
    table.roots_[static_cast<std::size_t>(j)] = unit_root(j, table.root_order_);
  }

  table.exponents_.reserve(count);
  for (std::size_t index = 0; index < count; ++index) {
    std::vector<std::int64_t> c(table.components_.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = static_cast<std::int64_t>(index / table.radix_[i] %
                                       static_cast<std::size_t>(table.components_[i].order));
    }
    table.exponents_.push_back(std::move(c));
  }

  table.primitive_.assign(count, false);
  for (std::size_t chi = 0; chi < count; ++chi) table.primitive_[chi] = is_primitive(table, chi);
  return table;
}

bool is_primitive(const CharacterTable& table, std::size_t chi) {
  const std::int64_t m = table.modulus();
  if (m == 1) return false;
  for (const auto& [p, e] : factorize(m)) {
    const std::int64_t step = m / p;
    bool nonconstant = false;
    for (std::int64_t j = 0; j < p && !nonconstant; ++j) {
      const std::int64_t idx = table.root_index(chi, (1 + j * step) % m);
      nonconstant = idx > 0;
    }
    if (!nonconstant) return false;
  }
  return true;
}

GaussSum gauss_sum(const CharacterTable& table, std::size_t chi) {
  const std::int64_t m = table.modulus();
  const std::int64_t L = table.root_order();
  // chi(a) e(a/m) = e((idx m + a L) / (L m)), summed with exact phases.
  const std::int64_t den = L * m;
  detail::ComplexSum sum;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int64_t idx = table.root_index(chi, a);
    if (idx < 0) continue;
    sum.add(unit_root(idx * m + a * L, den));
  }
  return GaussSum{chi, sum.value()};
}

cplx character_from_additive(const CharacterTable& table, std::size_t chi, std::int64_t n) {
  if (!table.primitive(chi)) {
    throw std::invalid_argument("character_from_additive: character is not primitive");
  }
  const std::size_t bar = table.conjugate(chi);
  const std::int64_t m = table.modulus();
  const std::int64_t L = table.root_order();
  const std::int64_t den = L * m;
  const std::int64_t nm = ((n % m) + m) % m;
  detail::ComplexSum sum;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int64_t idx = table.root_index(bar, a);
    if (idx < 0) continue;
    sum.add(unit_root(idx * m + (a * nm % m) * L, den));
  }
  return sum.value() / gauss_sum(table, bar).value;
}

TransferCheck mult_transfer_check(const CharacterTable& table, std::span<const cplx> a,
                                  std::int64_t M) {
  const std::int64_t m = table.modulus();
  // S(b/m) for every residue b.
  std::vector<cplx> S(static_cast<std::size_t>(m));
  for (std::int64_t b = 0; b < m; ++b) {
    detail::ComplexSum s;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const std::int64_t n = M + 1 + static_cast<std::int64_t>(j);
      s.add(a[j] * unit_root(static_cast<std::int64_t>(static_cast<int128>(b) * n % m), m));
    }
    S[static_cast<std::size_t>(b)] = s.value();
  }

  TransferCheck check{0.0, 0.0, 0.0};
  detail::CompensatedSum lhs, middle, rhs;
  for (std::size_t chi = 0; chi < table.size(); ++chi) {
    const std::size_t bar = table.conjugate(chi);
    detail::ComplexSum fourier;
    for (std::int64_t b = 0; b < m; ++b) fourier.add(table.value(bar, b) * S[static_cast<std::size_t>(b)]);
    middle.add(std::norm(fourier.value()) / static_cast<double>(m));
    if (!table.primitive(chi)) continue;
    detail::ComplexSum direct;
    for (std::size_t j = 0; j < a.size(); ++j) {
      direct.add(a[j] * table.value(chi, M + 1 + static_cast<std::int64_t>(j)));
    }
    lhs.add(std::norm(direct.value()));
  }
  std::int64_t units = 0;
  for (std::int64_t b = 0; b < m; ++b) {
    if (std::gcd(b, m) != 1) continue;
    ++units;
    rhs.add(std::norm(S[static_cast<std::size_t>(b)]));
  }
  check.lhs = lhs.value();
  check.middle = middle.value();
  check.rhs = static_cast<double>(units) / static_cast<double>(m) * rhs.value();
  return check;
}

double corollary_lhs(std::int64_t Q, int k, std::span<const cplx> a, std::int64_t M) {
  if (Q < 1 || k < 2) throw std::invalid_argument("corollary_lhs: need Q >= 1, k >= 2");
  checked_power(Q, k);
  detail::CompensatedSum total;
  for (std::int64_t q = 2; q <= Q; ++q) {
    const CharacterTable table = build_character_table(q, k);
    detail::CompensatedSum inner;
    for (std::size_t chi = 0; chi < table.size(); ++chi) {
      if (!table.primitive(chi)) continue;
      detail::ComplexSum s;
      for (std::size_t j = 0; j < a.size(); ++j) {
        s.add(a[j] * table.value(chi, M + 1 + static_cast<std::int64_t>(j)));
      }
      inner.add(std::norm(s.value()));
    }
    total.add(static_cast<double>(q) / static_cast<double>(euler_phi(q)) * inner.value());
  }
  return total.value();
}

}  // namespace lsieve
