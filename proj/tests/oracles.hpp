#pragma once

// Independent reference computations for the tests. Nothing here calls into the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Zeta by direct summation plus an Euler-Maclaurin remainder; |error| well below 1e-13 for s > 1.
inline double zeta(double s) {
  const int n0 = 1000;
  long double acc = 0.0L;
  for (int n = n0 - 1; n >= 1; --n) acc += std::pow(static_cast<long double>(n), -static_cast<long double>(s));
  const long double N = n0, S = s;
  acc += std::pow(N, 1.0L - S) / (S - 1.0L) + 0.5L * std::pow(N, -S) + S * std::pow(N, -S - 1.0L) / 12.0L -
         S * (S + 1.0L) * (S + 2.0L) * std::pow(N, -S - 3.0L) / 720.0L;
  return static_cast<double>(acc);
}

inline std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t l = 1; l <= n; ++l) {
    if (n % l == 0) out.push_back(l);
  }
  return out;
}

inline int mobius(std::int64_t n) {
  int k = 0;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    ++k;
  }
  if (n > 1) ++k;
  return k % 2 ? -1 : 1;
}

inline std::int64_t gcd_all(const std::vector<std::int64_t>& v) {
  std::int64_t g = 0;
  for (auto c : v) g = std::gcd(g, c < 0 ? -c : c);
  return g;
}

// |q * alpha - p| with alpha = (sqrt5 - 1)/2, from the integer 5q^2 - (2p+q)^2.
inline double golden_gap(std::int64_t q, std::int64_t p) {
  const long double num = std::fabs(static_cast<long double>(5 * q * q - (2 * p + q) * (2 * p + q)));
  return static_cast<double>(num / (2.0L * (q * std::sqrt(5.0L) + 2 * p + q)));
}

// |q * alpha - p| with alpha = sqrt2 - 1, from the integer 2q^2 - (p+q)^2.
inline double silver_gap(std::int64_t q, std::int64_t p) {
  const long double num = std::fabs(static_cast<long double>(2 * q * q - (p + q) * (p + q)));
  return static_cast<double>(num / (q * std::sqrt(2.0L) + p + q));
}

// Centered sawtooth written from the definition.
inline double saw(long double t) {
  const long double f = std::floor(t);
  if (t == f) return 0.0;
  return static_cast<double>(t - f - 0.5L);
}

// Gauss-Legendre on [lo, hi] with 8 nodes.
inline double gauss8(const std::function<double(double)>& g, double lo, double hi) {
  static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
  static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  long double s = 0.0L;
  for (int i = 0; i < 4; ++i) s += w[static_cast<std::size_t>(i)] * (g(c - h * x[static_cast<std::size_t>(i)]) + g(c + h * x[static_cast<std::size_t>(i)]));
  return static_cast<double>(h * s);
}

// Integral over [0,1) of g, where g is smooth between the given sorted breakpoints.
inline double piecewise(const std::function<double(double)>& g, std::vector<double> cuts, int sub = 1) {
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  long double s = 0.0L;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= lo || lo < 0.0 || hi > 1.0) continue;
    for (int k = 0; k < sub; ++k) s += gauss8(g, lo + (hi - lo) * k / sub, lo + (hi - lo) * (k + 1) / sub);
  }
  return static_cast<double>(s);
}

// Term list (n, a_n) over representatives; the sum runs over every listed term once.
using Terms = std::vector<std::pair<std::vector<std::int64_t>, double>>;

inline double series(const Terms& t, const std::vector<double>& x) {
  long double s = 0.0L;
  for (const auto& [n, a] : t) {
    long double dot = 0.0L;
    for (std::size_t k = 0; k < x.size(); ++k) dot += static_cast<long double>(n[k]) * x[k];
    s += a * saw(dot);
  }
  return static_cast<double>(s);
}

// Integral over [0,1)^d, d <= 2, of series(t, x) * sin(2 pi m.x); pieces split at the sawtooth
// breakpoints so Gauss-Legendre sees smooth integrands.
inline double fourier_quadrature(const Terms& t, const std::vector<std::int64_t>& m) {
  const double tau = 2.0 * M_PI;
  if (m.size() == 1) {
    std::vector<double> cuts;
    for (const auto& [n, a] : t) {
      const std::int64_t k = std::abs(n[0]);
      for (std::int64_t j = 1; j < k; ++j) cuts.push_back(static_cast<double>(j) / k);
    }
    return piecewise([&](double x) { return series(t, {x}) * std::sin(tau * m[0] * x); }, cuts, 2);
  }
  // Outer integral over x2: the inner integral jumps (n1 = 0) or kinks (cut lines meeting the
  // square's sides) only where n2 x2 is an integer.
  std::vector<double> outer;
  for (const auto& [n, a] : t) {
    const std::int64_t k = std::abs(n[1]);
    for (std::int64_t j = 1; j < k; ++j) outer.push_back(static_cast<double>(j) / k);
  }
  auto inner = [&](double x2) {
    std::vector<double> cuts;
    for (const auto& [n, a] : t) {
      if (n[0] == 0) continue;
      const double n1 = static_cast<double>(n[0]);
      const double off = static_cast<double>(n[1]) * x2;
      // n1 x1 + off = k for integers k in range.
      const double lo = std::min(off, n1 + off), hi = std::max(off, n1 + off);
      for (auto k = static_cast<std::int64_t>(std::ceil(lo)); k <= static_cast<std::int64_t>(std::floor(hi)); ++k) {
        const double x1 = (static_cast<double>(k) - off) / n1;
        if (x1 > 0.0 && x1 < 1.0) cuts.push_back(x1);
      }
    }
    return piecewise([&](double x1) { return series(t, {x1, x2}) * std::sin(tau * (m[0] * x1 + m[1] * x2)); }, cuts);
  };
  return piecewise(inner, outer, 8);
}

}  // namespace oracle
