#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace axe {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Density of the unit normal distribution.
inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

/// Cumulative distribution of the unit normal, accurate in both tails.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// E[(X - a)_+] for X ~ N(mean, sd^2). sd must be >= 0; sd == 0 degenerates
/// to the deterministic positive part.
inline double normal_mean_excess(double mean, double sd, double a) {
  if (sd <= 0.0) return std::max(mean - a, 0.0);
  const double d = (mean - a) / sd;
  return sd * (normal_pdf(d) + d * normal_cdf(d));
}

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nodes/weights of an n-point Gauss-Legendre rule on [-1, 1], computed at
/// first use by Newton iteration on the Legendre recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);

  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

/// Adaptive panel-bisection quadrature. Each panel is integrated with a
/// fixed Gauss rule; the error estimate is the difference between the whole
/// panel and the sum of its halves. Throws QuadratureError when the
/// subdivision budget is exhausted before the tolerance is met.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-8,
                          double abs_tol = 1e-14, int max_depth = 48);

/// Brent root bracketing solver on [a, b]; requires f(a) and f(b) of
/// opposite sign. Tolerance is on the argument.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double x_tol = 1e-13, int max_iter = 200);

/// splitmix64: cheap stateless mixer used to derive independent RNG streams
/// from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic unit-normal generator (xoshiro-free: mt19937_64 state with
/// an explicit Box-Muller transform so draws do not depend on the standard
/// library's unspecified normal_distribution algorithm).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : state_(splitmix64(seed)) {
    // warm up the LCG-seeded state
    for (int i = 0; i < 4; ++i) next_u64();
  }

  double uniform() {  // in (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t next_u64() {
    // xorshift64* keeps the sampler self-contained and platform-stable
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace axe
