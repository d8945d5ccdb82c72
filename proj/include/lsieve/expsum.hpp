#pragma once

// Exponential sums with polynomial phases, the Weyl-shift majorant, and the
// Fejer-kernel test function used for the spacing argument.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsieve/power_fraction.hpp"

namespace lsieve {

// Exact rational num/den, den > 0, lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  /// Parses "p/d" or "p".
  static Rational parse(const std::string& text);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

// f(x) = sum_j c_j x^j with exact rational coefficients and degree >= 2.
class PolynomialPhase {
 public:
  /// coefficients[j] multiplies x^j; the last one is the leading coefficient.
  explicit PolynomialPhase(std::vector<Rational> coefficients);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const Rational& leading() const { return coefficients_.back(); }
  const std::vector<Rational>& coefficients() const { return coefficients_; }

  /// f(n) mod 1, exactly.
  TorusPoint reduced(std::int64_t n) const;

 private:
  std::vector<Rational> coefficients_;
  std::int64_t common_den_;               // lcm of coefficient denominators
  std::vector<std::int64_t> scaled_num_;  // c_j * common_den_ mod common_den_
};

// n = start, ..., start + length - 1.
struct Interval {
  std::int64_t start = 1;
  std::int64_t length = 1;
};

struct WeylParams {
  std::int64_t kappa;  // 2^{k-1}
  Interval interval;
};

WeylParams weyl_params(int k, Interval interval);

/// e(t) = exp(2 pi i t) for t = num/den taken modulo 1.
std::complex<double> unit_root(std::int64_t num, std::int64_t den);

/// sum_{n in I} e(f(n)) with the phase reduced exactly before evaluation.
std::complex<double> exp_sum(const PolynomialPhase& phase, Interval interval);

/// Real-coefficient variant, coefficients[j] multiplies n^j.
std::complex<double> exp_sum(std::span<const double> coefficients, Interval interval);

/// 2^{2 kappa} N^{kappa-1} + 2^kappa N^{kappa-k} sum_{r_1..r_{k-1}=1}^{N-1}
///   min(N, 1/||alpha k! r_1 ... r_{k-1}||),
/// where a zero distance contributes N. Compare against |S|^kappa.
double weyl_bound(const PolynomialPhase& phase, Interval interval);

/// Same majorant for real alpha; distances below 1e-9 count as zero.
double weyl_bound_real(double alpha, int k, std::int64_t N);

inline constexpr double kRealDistanceGuard = 1e-9;

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// phi(x) = (sin(pi x) / (2x))^2, phi(0) = pi^2/4.
double fejer_phi(double x);

/// Fourier transform of phi: pi^2/4 * max(1 - |s|, 0).
double fejer_phi_hat(double s);

struct PoissonCheck {
  double lhs;         // sum_{|n| <= T} phi(n / 2N)
  double rhs;         // 2N phi_hat(0) = pi^2 N / 2
  double gap;         // rhs - lhs
  double tail_bound;  // (2N)^2 / T majorizes both omitted tails
  std::int64_t terms; // T
};

/// Truncation uses T = max(tail, 100 N). tail must be at least 1000.
PoissonCheck poisson_identity_check(std::int64_t N, std::int64_t tail);

/// pi^2 N / 2 * (1 - 2N ||y||) for ||y|| < 1/(2N), else 0.
double v_kernel(double y, std::int64_t N);

/// sum_n phi(n/2N) e(n y) for rational y, summed as a Fourier series: terms
/// are grouped by residue modulo the period of the numerators and each
/// residue class is summed to infinity with the trigamma function.
double v_kernel_fourier(const TorusPoint& y, std::int64_t N);

/// Symmetric partial sum over |n| <= terms, keeping the imaginary part.
std::complex<double> v_kernel_partial(double y, std::int64_t N, std::int64_t terms);

}  // namespace lsieve
