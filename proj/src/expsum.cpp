#include "lsieve/expsum.hpp"

#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "compensated_sum.hpp"

namespace lsieve {
namespace {

constexpr double kPi = std::numbers::pi;

using detail::CompensatedSum;
using detail::ComplexSum;

std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>((static_cast<int128>(a) * b) % m);
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

std::int64_t factorial_mod(int k, std::int64_t m) {
  std::int64_t f = 1 % m;
  for (int i = 2; i <= k; ++i) f = mod_mul(f, i, m);
  return f;
}

void check_interval(Interval interval) {
  if (interval.length < 1) throw std::invalid_argument("interval length must be >= 1");
}

}  // namespace

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

Rational Rational::parse(const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const std::int64_t v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return make(v, 1);
    }
    const std::string head = text.substr(0, slash);
    const std::string tail = text.substr(slash + 1);
    const std::int64_t p = std::stoll(head, &used);
    if (used != head.size()) throw std::invalid_argument(text);
    const std::int64_t d = std::stoll(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
    return make(p, d);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
}

PolynomialPhase::PolynomialPhase(std::vector<Rational> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.size() < 3) throw std::invalid_argument("PolynomialPhase: degree must be >= 2");
  if (coefficients_.back().num == 0) {
    throw std::invalid_argument("PolynomialPhase: leading coefficient must be nonzero");
  }
  common_den_ = 1;
  for (auto& c : coefficients_) {
    c = Rational::make(c.num, c.den);
    const std::int64_t g = std::gcd(common_den_, c.den);
    if (__builtin_mul_overflow(common_den_ / g, c.den, &common_den_)) {
      throw RangeError("PolynomialPhase: common denominator overflows 64 bits");
    }
  }
  for (const auto& c : coefficients_) {
    scaled_num_.push_back(floor_mod(mod_mul(floor_mod(c.num, common_den_), common_den_ / c.den, common_den_),
                                    common_den_));
  }
}

TorusPoint PolynomialPhase::reduced(std::int64_t n) const {
  const std::int64_t m = common_den_;
  const std::int64_t base = floor_mod(n, m);
  std::int64_t power = 1 % m;
  std::int64_t acc = 0;
  for (const std::int64_t c : scaled_num_) {
    acc = (acc + mod_mul(c, power, m)) % m;
    power = mod_mul(power, base, m);
  }
  return TorusPoint::make(acc, m);
}

WeylParams weyl_params(int k, Interval interval) {
  if (k < 2 || k > 62) throw std::invalid_argument("weyl_params: need 2 <= k <= 62");
  check_interval(interval);
  return WeylParams{std::int64_t{1} << (k - 1), interval};
}

std::complex<double> unit_root(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("unit_root: denominator must be positive");
  std::int64_t r = floor_mod(num, den);
  // Map to (-den/2, den/2] so the angle stays small.
  if (2 * static_cast<int128>(r) > den) r -= den;
  const double angle = 2.0 * kPi * (static_cast<double>(r) / static_cast<double>(den));
  if (4 * static_cast<int128>(r) == den) return {0.0, 1.0};
  if (4 * static_cast<int128>(r) == -den) return {0.0, -1.0};
  if (2 * static_cast<int128>(r) == den) return {-1.0, 0.0};
  return {std::cos(angle), std::sin(angle)};
}

std::complex<double> exp_sum(const PolynomialPhase& phase, Interval interval) {
  check_interval(interval);
  ComplexSum sum;
  for (std::int64_t i = 0; i < interval.length; ++i) {
    const TorusPoint t = phase.reduced(interval.start + i);
    sum.add(unit_root(t.num, t.den));
  }
  return sum.value();
}

std::complex<double> exp_sum(std::span<const double> coefficients, Interval interval) {
  check_interval(interval);
  ComplexSum sum;
  for (std::int64_t i = 0; i < interval.length; ++i) {
    const double n = static_cast<double>(interval.start + i);
    // Horner with the integer part dropped at each step.
    double t = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      t = t * n + *it;
      t -= std::floor(t);
    }
    sum.add(std::polar(1.0, 2.0 * kPi * t));
  }
  return sum.value();
}

double weyl_bound(const PolynomialPhase& phase, Interval interval) {
  const int k = phase.degree();
  const WeylParams params = weyl_params(k, interval);
  const std::int64_t N = interval.length;
  const double kappa = static_cast<double>(params.kappa);
  const double n = static_cast<double>(N);
  const double head = std::pow(2.0, 2 * kappa) * std::pow(n, kappa - 1);
  if (N == 1) return head;

  // alpha = p/d; ||alpha k! r_1...r_{k-1}|| = min(t, d - t)/d with
  // t = p k! r_1...r_{k-1} mod d.
  const std::int64_t d = phase.leading().den;
  const std::int64_t base = mod_mul(floor_mod(phase.leading().num, d), factorial_mod(k, d), d);
  CompensatedSum sum;
  auto visit = [&](auto&& self, int depth, std::int64_t residue) -> void {
    if (depth == k - 1) {
      const std::int64_t t = std::min(residue, d - residue);
      sum.add(t == 0 ? n : std::min(n, static_cast<double>(d) / static_cast<double>(t)));
      return;
    }
    for (std::int64_t r = 1; r < N; ++r) self(self, depth + 1, mod_mul(residue, r, d));
  };
  visit(visit, 0, base);
  return head + std::pow(2.0, kappa) * std::pow(n, kappa - k) * sum.value();
}

double weyl_bound_real(double alpha, int k, std::int64_t N) {
  const WeylParams params = weyl_params(k, Interval{1, N});
  const double kappa = static_cast<double>(params.kappa);
  const double n = static_cast<double>(N);
  const double head = std::pow(2.0, 2 * kappa) * std::pow(n, kappa - 1);
  if (N == 1) return head;
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  CompensatedSum sum;
  auto visit = [&](auto&& self, int depth, double product) -> void {
    if (depth == k - 1) {
      const double x = alpha * kfact * product;
      const double dist = std::abs(x - std::nearbyint(x));
      sum.add(dist < kRealDistanceGuard ? n : std::min(n, 1.0 / dist));
      return;
    }
    for (std::int64_t r = 1; r < N; ++r) self(self, depth + 1, product * static_cast<double>(r));
  };
  visit(visit, 0, 1.0);
  return head + std::pow(2.0, kappa) * std::pow(n, kappa - k) * sum.value();
}

double sin_pi(double x) {
  // Reduce to r in [-1, 1] with sin(pi x) = sin(pi r), then to [-1/2, 1/2].
  double r = x - 2.0 * std::nearbyint(x / 2.0);
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  if (r == 0.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  return std::sin(kPi * r);
}

double fejer_phi(double x) {
  if (x == 0.0) return kPi * kPi / 4.0;
  const double s = sin_pi(x) / (2.0 * x);
  return s * s;
}

double fejer_phi_hat(double s) { return kPi * kPi / 4.0 * std::max(1.0 - std::abs(s), 0.0); }

PoissonCheck poisson_identity_check(std::int64_t N, std::int64_t tail) {
  if (N < 1) throw std::invalid_argument("poisson_identity_check: N must be >= 1");
  if (tail < 1000) throw std::invalid_argument("poisson_identity_check: tail must be >= 1000");
  const std::int64_t T = std::max(tail, 100 * N);
  const double two_n = 2.0 * static_cast<double>(N);
  // Smallest terms first.
  CompensatedSum sum;
  for (std::int64_t n = T; n >= 1; --n) sum.add(2.0 * fejer_phi(static_cast<double>(n) / two_n));
  sum.add(fejer_phi(0.0));
  PoissonCheck check;
  check.lhs = sum.value();
  check.rhs = two_n * fejer_phi_hat(0.0);
  check.gap = check.rhs - check.lhs;
  check.tail_bound = two_n * two_n / static_cast<double>(T);
  check.terms = T;
  return check;
}

double v_kernel(double y, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("v_kernel: N must be >= 1");
  const double n = static_cast<double>(N);
  const double dist = std::abs(y - std::nearbyint(y));
  if (2.0 * n * dist >= 1.0) return 0.0;
  return kPi * kPi * n / 2.0 * (1.0 - 2.0 * n * dist);
}

double v_kernel_fourier(const TorusPoint& y, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("v_kernel_fourier: N must be >= 1");
  // phi(n/2N) = N^2 sin^2(pi n / 2N) / n^2, and g(n) = sin^2(pi n/2N) cos(2 pi n y)
  // has period P = lcm(2N, den y). Then
  //   sum_{n>=1} g(n)/n^2 = P^-2 sum_{r=1}^P g(r) trigamma(r/P).
  const std::int64_t two_n = 2 * N;
  const std::int64_t period = std::lcm(two_n, y.den);
  if (period > 50'000'000) throw GuardError("v_kernel_fourier: period too large");
  CompensatedSum sum;
  for (std::int64_t r = period; r >= 1; --r) {
    const double s = sin_pi(static_cast<double>(r % two_n) / static_cast<double>(two_n));
    const double c = unit_root(mod_mul(r, y.num, y.den), y.den).real();
    const double g = s * s * c;
    if (g == 0.0) continue;
    sum.add(g * boost::math::trigamma(static_cast<double>(r) / static_cast<double>(period)));
  }
  const double n = static_cast<double>(N);
  const double p = static_cast<double>(period);
  return fejer_phi(0.0) + 2.0 * n * n / (p * p) * sum.value();
}

std::complex<double> v_kernel_partial(double y, std::int64_t N, std::int64_t terms) {
  if (N < 1 || terms < 0) throw std::invalid_argument("v_kernel_partial: bad parameters");
  const double two_n = 2.0 * static_cast<double>(N);
  ComplexSum sum;
  for (std::int64_t n = terms; n >= 1; --n) {
    const double w = fejer_phi(static_cast<double>(n) / two_n);
    const double t = y * static_cast<double>(n);
    const double frac = t - std::floor(t);
    sum.add(w * std::polar(1.0, 2.0 * kPi * frac));
    sum.add(w * std::polar(1.0, -2.0 * kPi * frac));
  }
  sum.add(fejer_phi(0.0));
  return sum.value();
}

}  // namespace lsieve
