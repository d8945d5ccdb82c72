#pragma once

// The large-sieve quadratic form
//
//   sum_k | sum_{n=M+1}^{M+N} a_n e(x_k n) |^2 <= D sum_n |a_n|^2
//
// for a finite point set {x_k}. The best D is the largest eigenvalue of T*T
// (equivalently TT*) where T = [e(x_k n)], computed here by power iteration.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsieve/power_fraction.hpp"

namespace lsieve {

struct SieveInstance {
  std::vector<TorusPoint> points;
  std::int64_t M = 0;
  std::int64_t N = 1;

  /// Checks N >= 1 and that the points are pairwise distinct.
  static SieveInstance make(std::vector<TorusPoint> points, std::int64_t N, std::int64_t M = 0);
};

enum class GramSide {
  kPoints,       // TT*, size K x K
  kFrequencies,  // T*T, size N x N
};

// Block power iteration: a block of vectors is multiplied by the Gram matrix
// and re-orthonormalized each step, and lambda_max is the top Ritz value of
// the block. Near-ties among the top eigenvalues then cost no extra steps.
struct PowerIterationOptions {
  double tol = 1e-10;  // on ||A u - lambda u|| / max(lambda, 1), u the unit Ritz vector
  std::int64_t max_iterations = 100'000;
  std::uint64_t seed = 0;
  std::size_t block = 4;  // clamped to the matrix dimension
};

struct GramSpectrum {
  double lambda_max = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, std::int64_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  std::int64_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::int64_t iterations_;
};

inline constexpr std::int64_t kGramEntryLimit = 10'000'000;

GramSpectrum gram_lambda_max(const SieveInstance& instance, GramSide side,
                             const PowerIterationOptions& options = {});

struct DualityCheck {
  double lhs;  // lambda_max(T*T)
  double rhs;  // lambda_max(TT*)
  GramSpectrum frequencies;
  GramSpectrum points;
};

DualityCheck duality_check(const SieveInstance& instance, const PowerIterationOptions& options = {});

/// Smallest pairwise torus distance, exact. Requires at least two points.
TorusDistance min_spacing(std::span<const TorusPoint> points);

/// delta^-1 - 1 + N for the exact minimal spacing delta; N for a single point.
double cohen_selberg_ceiling(const SieveInstance& instance);

/// sum_k |sum_{n=M+1}^{M+N} a_n e(x_k n)|^2 with N = a.size().
double additive_form(std::span<const TorusPoint> points, std::span<const std::complex<double>> a,
                     std::int64_t M = 0);

/// sum_{q=1}^{Q} sum_{1 <= b < q^k, gcd(b,q)=1} |sum_n a_n e(b n / q^k)|^2.
double additive_lhs(std::int64_t Q, int k, std::span<const std::complex<double>> a,
                    std::int64_t M = 0);

struct BoundParams {
  std::int64_t Q;
  std::int64_t N;
  int k;
  double epsilon;
};

// A closed-form majorant Delta(Q, N, k, eps). Only forms with explicit
// constants are assertable; the rest carry unspecified implied constants.
struct BoundFormula {
  const char* name;
  bool assertable;
  bool square_moduli_only;  // stated for k = 2 only
  double (*evaluate)(const BoundParams&);
};

std::span<const BoundFormula> bound_formulas();

struct BoundValue {
  std::string name;
  double value;
  bool assertable;
};

std::vector<BoundValue> bound_catalog(std::int64_t Q, std::int64_t N, int k, double epsilon);

struct ExperimentBound {
  std::string name;
  double value;
  double ratio;  // lambda_max / value
  bool assertable;
};

struct ExperimentRecord {
  std::int64_t Q;
  std::int64_t N;
  int k;
  std::size_t points;
  double lambda_max;
  std::int64_t iterations;
  double residual;
  std::vector<ExperimentBound> bounds;
  bool assertions_hold;  // lambda_max <= every assertable bound
};

ExperimentRecord sieve_ratio_experiment(std::int64_t Q, std::int64_t N, int k,
                                        const PowerIterationOptions& options = {},
                                        double epsilon = 0.0);

}  // namespace lsieve
