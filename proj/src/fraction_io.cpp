#include <array>
#include <istream>
#include <ostream>

#include "lsieve/power_fraction.hpp"

namespace lsieve {
namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("fraction cache: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const FractionSet& set) {
  out << "a,q,k,value\n";
  for (const auto& e : set.elements()) {
    out << e.a() << ',' << e.q() << ',' << e.k() << ',' << decimal_string(e.a(), e.denominator())
        << '\n';
  }
}

void write_binary(std::ostream& out, const FractionSet& set) {
  put_u64(out, static_cast<std::uint64_t>(set.Q()));
  put_u64(out, static_cast<std::uint64_t>(set.k()));
  put_u64(out, set.size());
  for (const auto& e : set.elements()) {
    put_u64(out, static_cast<std::uint64_t>(e.a()));
    put_u64(out, static_cast<std::uint64_t>(e.q()));
  }
  if (!out) throw std::runtime_error("fraction cache: write failed");
}

FractionSet read_binary(std::istream& in) {
  const std::uint64_t Q = get_u64(in);
  const std::uint64_t k = get_u64(in);
  const std::uint64_t count = get_u64(in);
  if (Q < 1 || Q > (1ULL << 40) || k < 2 || k > 64) {
    throw std::runtime_error("fraction cache: corrupt header");
  }
  if (count != expected_cardinality(static_cast<std::int64_t>(Q), static_cast<int>(k))) {
    throw std::runtime_error("fraction cache: record count does not match |S_{Q,k}|");
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto a = static_cast<std::int64_t>(get_u64(in));
    const auto q = static_cast<std::int64_t>(get_u64(in));
    records.emplace_back(a, q);
  }
  return FractionSet::from_records(static_cast<std::int64_t>(Q), static_cast<int>(k), records);
}

}  // namespace lsieve
