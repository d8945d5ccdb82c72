#include "lsieve/sieve_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lsieve/expsum.hpp"

namespace lsieve {
namespace {

using cplx = std::complex<double>;

constexpr std::int64_t kMaterializeLimit = 4'000'000;

std::int64_t phase_index(const TorusPoint& x, std::int64_t n) {
  std::int64_t r = static_cast<std::int64_t>((static_cast<int128>(x.num) * n) % x.den);
  return r < 0 ? r + x.den : r;
}

using Block = std::vector<std::vector<cplx>>;

// T = [e(x_k n)], k over points, n = M+1..M+N. Rows are kept when the matrix
// is small enough; otherwise each row is regenerated by the recurrence
// e(x(n+1)) = e(x) e(xn), resynchronized from exact phases every kResync terms.
class FourierMatrix {
 public:
  static constexpr std::int64_t kResync = 64;

  explicit FourierMatrix(const SieveInstance& instance)
      : points_(instance.points), M_(instance.M), N_(instance.N) {
    const auto K = static_cast<std::int64_t>(points_.size());
    if (K * N_ <= kMaterializeLimit) {
      entries_.resize(static_cast<std::size_t>(K * N_));
      for (std::size_t k = 0; k < rows(); ++k) fill_row(k, entries_.data() + k * cols());
    }
  }

  std::size_t rows() const { return points_.size(); }
  std::size_t cols() const { return static_cast<std::size_t>(N_); }

  // out[c] = T v[c]
  void apply(const Block& v, Block& out) const {
    std::vector<cplx> scratch(entries_.empty() ? cols() : 0);
    for (std::size_t k = 0; k < rows(); ++k) {
      const cplx* row = row_data(k, scratch);
      for (std::size_t c = 0; c < v.size(); ++c) {
        const cplx* x = v[c].data();
        double re = 0.0, im = 0.0;
#pragma omp simd reduction(+ : re, im)
        for (std::size_t j = 0; j < cols(); ++j) {
          re += row[j].real() * x[j].real() - row[j].imag() * x[j].imag();
          im += row[j].real() * x[j].imag() + row[j].imag() * x[j].real();
        }
        out[c][k] = cplx(re, im);
      }
    }
  }

  // out[c] = T* u[c]
  void apply_adjoint(const Block& u, Block& out) const {
    std::vector<cplx> scratch(entries_.empty() ? cols() : 0);
    for (auto& o : out) std::fill(o.begin(), o.end(), cplx(0.0));
    for (std::size_t k = 0; k < rows(); ++k) {
      const cplx* row = row_data(k, scratch);
      for (std::size_t c = 0; c < u.size(); ++c) {
        const double ur = u[c][k].real(), ui = u[c][k].imag();
        cplx* y = out[c].data();
        for (std::size_t j = 0; j < cols(); ++j) {
          y[j] = cplx(y[j].real() + row[j].real() * ur + row[j].imag() * ui,
                      y[j].imag() + row[j].real() * ui - row[j].imag() * ur);
        }
      }
    }
  }

 private:
  void fill_row(std::size_t k, cplx* row) const {
    const TorusPoint& x = points_[k];
    const cplx step = unit_root(x.num, x.den);
    for (std::int64_t j = 0; j < N_; ++j) {
      if (j % kResync == 0) {
        row[j] = unit_root(phase_index(x, M_ + 1 + j), x.den);
      } else {
        const cplx p = row[j - 1];
        row[j] = cplx(p.real() * step.real() - p.imag() * step.imag(),
                      p.real() * step.imag() + p.imag() * step.real());
      }
    }
  }

  const cplx* row_data(std::size_t k, std::vector<cplx>& scratch) const {
    if (!entries_.empty()) return entries_.data() + k * cols();
    fill_row(k, scratch.data());
    return scratch.data();
  }

  const std::vector<TorusPoint>& points_;
  std::int64_t M_;
  std::int64_t N_;
  std::vector<cplx> entries_;
};

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

// Modified Gram-Schmidt, two passes. A column that collapses is replaced by a
// fresh random vector.
template <class Refill>
void orthonormalize(Block& V, Refill&& refill) {
  for (std::size_t c = 0; c < V.size(); ++c) {
    for (;;) {
      const double before = norm(V[c]);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          const cplx h = dot(V[p], V[c]);
          for (std::size_t i = 0; i < V[c].size(); ++i) V[c][i] -= h * V[p][i];
        }
      }
      const double after = norm(V[c]);
      if (after > 1e-10 * before) {
        for (auto& z : V[c]) z /= after;
        break;
      }
      refill(V[c]);
    }
  }
}

// Largest eigenvalue of the b x b Hermitian matrix H (row-major) and a unit
// eigenvector. Cyclic Jacobi on the real form [[Re H, -Im H], [Im H, Re H]],
// whose spectrum is that of H with every eigenvalue doubled.
double top_hermitian_eigenpair(const std::vector<cplx>& H, std::size_t b, std::vector<cplx>& y) {
  const std::size_t n = 2 * b;
  std::vector<double> A(n * n), E(n * n, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      // Hermitian part only; V* A V is Hermitian up to rounding.
      const cplx h = 0.5 * (H[i * b + j] + std::conj(H[j * b + i]));
      A[i * n + j] = A[(i + b) * n + (j + b)] = h.real();
      A[(i + b) * n + j] = h.imag();
      A[i * n + (j + b)] = -h.imag();
    }
  }
  for (std::size_t i = 0; i < n; ++i) E[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += A[i * n + j] * A[i * n + j];
        if (i != j) off += A[i * n + j] * A[i * n + j];
      }
    }
    if (off <= 1e-30 * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (A[q * n + q] - A[p * n + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A[k * n + p], akq = A[k * n + q];
          A[k * n + p] = c * akp - s * akq;
          A[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A[p * n + k], aqk = A[q * n + k];
          A[p * n + k] = c * apk - s * aqk;
          A[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double ekp = E[k * n + p], ekq = E[k * n + q];
          E[k * n + p] = c * ekp - s * ekq;
          E[k * n + q] = s * ekp + c * ekq;
        }
      }
    }
  }
  std::size_t top = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (A[i * n + i] > A[top * n + top]) top = i;
  }
  // [x; z] maps to x + i z, a nonzero eigenvector of H.
  double s = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    y[i] = cplx(E[i * n + top], E[(i + b) * n + top]);
    s += std::norm(y[i]);
  }
  for (auto& z : y) z /= std::sqrt(s);
  return A[top * n + top];
}

void check_guard(std::size_t K, std::int64_t N) {
  if (static_cast<int128>(K) * N > kGramEntryLimit) {
    throw GuardError("gram: K*N = " + std::to_string(static_cast<long long>(K) * N) +
                     " exceeds " + std::to_string(kGramEntryLimit) + "; use a smaller Q or N");
  }
}

}  // namespace

SieveInstance SieveInstance::make(std::vector<TorusPoint> points, std::int64_t N, std::int64_t M) {
  if (N < 1) throw std::invalid_argument("SieveInstance: N must be >= 1");
  if (points.empty()) throw std::invalid_argument("SieveInstance: need at least one point");
  for (auto& p : points) p = TorusPoint::make(p.num, p.den);
  std::vector<TorusPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), value_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("SieveInstance: points must be pairwise distinct modulo 1");
  }
  return SieveInstance{std::move(points), M, N};
}

GramSpectrum gram_lambda_max(const SieveInstance& instance, GramSide side,
                             const PowerIterationOptions& options) {
  if (!(options.tol > 0)) throw std::invalid_argument("gram_lambda_max: tol must be positive");
  if (options.block < 1) throw std::invalid_argument("gram_lambda_max: block must be >= 1");
  check_guard(instance.points.size(), instance.N);
  const FourierMatrix T(instance);
  const std::size_t dim = side == GramSide::kPoints ? T.rows() : T.cols();
  const std::size_t inner = side == GramSide::kPoints ? T.cols() : T.rows();
  const std::size_t b = std::min(options.block, dim);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  auto random_vector = [&](std::span<cplx> v) {
    for (auto& z : v) z = cplx(gauss(rng), gauss(rng));
  };
  Block V(b, std::vector<cplx>(dim)), W(b, std::vector<cplx>(dim)), tmp(b, std::vector<cplx>(inner));
  for (auto& v : V) random_vector(v);
  orthonormalize(V, random_vector);

  std::vector<cplx> y(b), u(dim), r(dim);
  GramSpectrum spectrum;
  for (std::int64_t it = 1; it <= options.max_iterations; ++it) {
    if (side == GramSide::kPoints) {
      T.apply_adjoint(V, tmp);
      T.apply(tmp, W);
    } else {
      T.apply(V, tmp);
      T.apply_adjoint(tmp, W);
    }
    // Ritz pair of H = V* A V.
    std::vector<cplx> H(b * b);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = 0; j < b; ++j) H[i * b + j] = dot(V[i], W[j]);
    }
    const double lambda = top_hermitian_eigenpair(H, b, y);
    std::fill(u.begin(), u.end(), cplx(0.0));
    std::fill(r.begin(), r.end(), cplx(0.0));
    for (std::size_t c = 0; c < b; ++c) {
      for (std::size_t i = 0; i < dim; ++i) {
        u[i] += V[c][i] * y[c];
        r[i] += W[c][i] * y[c];
      }
    }
    for (std::size_t i = 0; i < dim; ++i) r[i] -= lambda * u[i];
    spectrum = GramSpectrum{lambda, it, norm(r) / norm(u)};
    if (spectrum.residual <= options.tol * std::max(lambda, 1.0)) return spectrum;
    std::swap(V, W);
    orthonormalize(V, random_vector);
  }
  throw ConvergenceError("gram_lambda_max: no convergence after " +
                             std::to_string(options.max_iterations) + " iterations (residual " +
                             std::to_string(spectrum.residual) + ")",
                         spectrum.residual, spectrum.iterations);
}

DualityCheck duality_check(const SieveInstance& instance, const PowerIterationOptions& options) {
  DualityCheck check;
  check.frequencies = gram_lambda_max(instance, GramSide::kFrequencies, options);
  check.points = gram_lambda_max(instance, GramSide::kPoints, options);
  check.lhs = check.frequencies.lambda_max;
  check.rhs = check.points.lambda_max;
  return check;
}

TorusDistance min_spacing(std::span<const TorusPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("min_spacing: need at least two points");
  std::vector<TorusPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), value_less);
  TorusDistance best = torus_distance(sorted.back(), sorted.front());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const TorusDistance d = torus_distance(sorted[i - 1], sorted[i]);
    if (d < best) best = d;
  }
  return best;
}

double cohen_selberg_ceiling(const SieveInstance& instance) {
  const double n = static_cast<double>(instance.N);
  if (instance.points.size() == 1) return n;
  const TorusDistance delta = min_spacing(instance.points);
  if (delta.num == 0) throw std::invalid_argument("cohen_selberg_ceiling: coincident points");
  return static_cast<double>(delta.den) / static_cast<double>(delta.num) - 1.0 + n;
}

double additive_form(std::span<const TorusPoint> points, std::span<const std::complex<double>> a,
                     std::int64_t M) {
  double total = 0.0;
  for (const auto& x : points) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      s += a[j] * unit_root(phase_index(x, M + 1 + static_cast<std::int64_t>(j)), x.den);
    }
    total += std::norm(s);
  }
  return total;
}

double additive_lhs(std::int64_t Q, int k, std::span<const std::complex<double>> a, std::int64_t M) {
  if (Q < 1 || k < 2) throw std::invalid_argument("additive_lhs: need Q >= 1, k >= 2");
  double total = 0.0;
  std::vector<TorusPoint> points;
  for (std::int64_t q = 2; q <= Q; ++q) {
    const std::int64_t den = checked_power(q, k);
    points.clear();
    for (std::int64_t b = 1; b < den; ++b) {
      if (std::gcd(b, q) == 1) points.push_back(TorusPoint{b, den});
    }
    total += additive_form(points, a, M);
  }
  return total;
}

std::span<const BoundFormula> bound_formulas() {
  static const BoundFormula kFormulas[] = {
      {"trivial_height", false, false,
       [](const BoundParams& p) {
         return std::pow(static_cast<double>(p.Q), 2 * p.k) + static_cast<double>(p.N);
       }},
      {"trivial_per_modulus", false, false,
       [](const BoundParams& p) {
         const double q = static_cast<double>(p.Q);
         return q * (std::pow(q, p.k) + static_cast<double>(p.N));
       }},
      {"cohen_selberg_per_modulus", true, false,
       [](const BoundParams& p) {
         double total = 0.0;
         for (std::int64_t q = p.Q + 1; q <= 2 * p.Q; ++q) {
           total += std::pow(static_cast<double>(q), p.k) - 1.0 + static_cast<double>(p.N);
         }
         return total;
       }},
      {"weyl_square", false, true,
       [](const BoundParams& p) {
         const double q = static_cast<double>(p.Q);
         const double n = static_cast<double>(p.N);
         return std::log(2.0 * q) *
                (q * q * q + (n * std::sqrt(q) + std::sqrt(n) * q * q) * std::pow(n, p.epsilon));
       }},
      {"weyl_power", false, false,
       [](const BoundParams& p) {
         const double q = static_cast<double>(p.Q);
         const double n = static_cast<double>(p.N);
         const double kappa = std::ldexp(1.0, p.k - 1);
         return std::log(2.0 * q) *
                (std::pow(q, p.k + 1) +
                 std::pow(n, p.epsilon) * (n * std::pow(q, (kappa - 1) / kappa) +
                                           std::pow(n, 1 - 1 / kappa) * std::pow(q, (kappa + p.k) / kappa)));
       }},
      {"spacing_square", false, true,
       [](const BoundParams& p) {
         const double q = static_cast<double>(p.Q);
         return std::pow(q, 0.5 + p.epsilon) * (q * q * q + static_cast<double>(p.N));
       }},
      {"conjectural", false, false,
       [](const BoundParams& p) {
         const double q = static_cast<double>(p.Q);
         return std::pow(q, p.epsilon) * (std::pow(q, p.k + 1) + static_cast<double>(p.N));
       }},
  };
  return kFormulas;
}

std::vector<BoundValue> bound_catalog(std::int64_t Q, std::int64_t N, int k, double epsilon) {
  if (Q < 1 || N < 1 || k < 2 || epsilon < 0) {
    throw std::invalid_argument("bound_catalog: need Q, N >= 1, k >= 2, epsilon >= 0");
  }
  const BoundParams params{Q, N, k, epsilon};
  std::vector<BoundValue> out;
  for (const auto& f : bound_formulas()) {
    if (f.square_moduli_only && k != 2) continue;
    out.push_back(BoundValue{f.name, f.evaluate(params), f.assertable});
  }
  return out;
}

ExperimentRecord sieve_ratio_experiment(std::int64_t Q, std::int64_t N, int k,
                                        const PowerIterationOptions& options, double epsilon) {
  if (N < 1) throw std::invalid_argument("sieve_ratio_experiment: N must be >= 1");
  if (static_cast<int128>(expected_cardinality(Q, k)) * N > kGramEntryLimit) {
    throw GuardError("sieve_ratio_experiment: |S_{Q,k}| * N exceeds " +
                     std::to_string(kGramEntryLimit) + "; use a smaller Q or N");
  }
  const FractionSet set = enumerate_set(Q, k);
  const SieveInstance instance = SieveInstance::make(set.points(), N);
  const GramSide side =
      static_cast<std::int64_t>(set.size()) <= N ? GramSide::kPoints : GramSide::kFrequencies;
  const GramSpectrum spectrum = gram_lambda_max(instance, side, options);

  ExperimentRecord record{Q, N, k, set.size(), spectrum.lambda_max, spectrum.iterations,
                          spectrum.residual, {}, true};
  auto add = [&](const std::string& name, double value, bool assertable) {
    record.bounds.push_back({name, value, spectrum.lambda_max / value, assertable});
    if (assertable && spectrum.lambda_max > value * (1.0 + 1e-12) + 1e-6) {
      record.assertions_hold = false;
    }
  };
  add("cohen_selberg_instance", cohen_selberg_ceiling(instance), true);
  for (const auto& b : bound_catalog(Q, N, k, epsilon)) add(b.name, b.value, b.assertable);
  return record;
}

}  // namespace lsieve
