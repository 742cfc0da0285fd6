#include "davenport/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "davenport/errors.hpp"

namespace davenport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Norm ceiling for support scans feeding the ray sums.
constexpr double kScanCeiling = 4.0e18;

void check_args(const CoefficientFamily& a, double Q, Int L, const char* op) {
  a.require_summable(op);
  if (!(Q > 0.0) || !std::isfinite(Q)) throw InvalidInput(std::string(op) + ": radius must be positive");
  if (L < 1) throw InvalidInput(std::string(op) + ": L_max must be >= 1");
}

// Largest l <= L with l*|q| inside the scan ceiling.
Int effective_L(double q_norm, Int L, double ceiling) {
  const double cap = std::floor(ceiling / q_norm);
  return cap < static_cast<double>(L) ? std::max<Int>(0, static_cast<Int>(cap)) : L;
}

// Walk (l, q) with l*q = n over the sparse support; q within the radius and l <= L.
template <class Fn>
void for_each_ray_pair(const CoefficientFamily& a, double Q, Int L, double ceiling, Fn&& fn) {
  const TermBlock t = a.terms(NormInterval{0.0, false, ceiling, false});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const LatticeVector n = t.vector(i);
    for (Int l : divisors(gcd_vec(n))) {
      if (l > L) break;
      if (t.norms[i] / static_cast<double>(l) >= Q) continue;
      fn(n.divided(l), l, t.values[i]);
    }
  }
}

double scan_ceiling(double Q, Int L) {
  return std::min(Q * static_cast<double>(L), kScanCeiling);
}

}  // namespace

LatticeMap jump_operator(const CoefficientFamily& a, double Q, Int L) {
  check_args(a, Q, L, "jump_operator");
  LatticeMap A(a.dimension(), Parity::odd, Q);
  const double ceiling = scan_ceiling(Q, L);
  if (a.dense_1d()) {
    const Int qmax = static_cast<Int>(std::ceil(Q)) - 1;
    for (Int q = 1; q <= qmax; ++q) {
      const Int Lq = effective_L(static_cast<double>(q), L, kScanCeiling);
      double s = 0.0;
      for (Int l = Lq; l >= 1; --l) s += a.value_1d(l * q);
      A.set(LatticeVector{q}, 2.0 * s, 2.0 * a.ray_tail(static_cast<double>(q), Lq));
    }
  } else {
    for_each_ray_pair(a, Q, L, ceiling, [&](const LatticeVector& q, Int, double v) { A.add(q, 2.0 * v); });
    std::map<LatticeVector, LatticeMap::Entry> fixed;
    for (const auto& [q, e] : A.entries()) {
      const double qn = q.norm();
      fixed[q] = {e.value, 2.0 * a.ray_tail(qn, effective_L(qn, L, ceiling))};
    }
    for (const auto& [q, e] : fixed) A.set(q, e.value, e.tail);
  }
  A.set_tail_bound(a.is_zero() ? 0.0 : 2.0 * a.ray_tail(1.0, effective_L(1.0, L, ceiling)));
  return A;
}

LatticeMap maximal_operator(const CoefficientFamily& a, double Q, Int L) {
  check_args(a, Q, L, "maximal_operator");
  LatticeMap M(a.dimension(), Parity::even, Q);
  const double ceiling = scan_ceiling(Q, L);
  if (a.dense_1d()) {
    const Int qmax = static_cast<Int>(std::ceil(Q)) - 1;
    for (Int q = 1; q <= qmax; ++q) {
      const Int Lq = effective_L(static_cast<double>(q), L, kScanCeiling);
      double m = 0.0;
      for (Int l = 1; l <= Lq; ++l) m = std::max(m, std::fabs(a.value_1d(l * q)));
      M.set(LatticeVector{q}, m, a.envelope_beyond(static_cast<double>(Lq * q)));
    }
  } else {
    std::map<LatticeVector, double> best;
    for_each_ray_pair(a, Q, L, ceiling, [&](const LatticeVector& q, Int, double v) {
      double& b = best[q];
      b = std::max(b, std::fabs(v));
    });
    for (const auto& [q, m] : best) {
      const double qn = q.norm();
      M.set(q, m, a.envelope_beyond(static_cast<double>(effective_L(qn, L, ceiling)) * qn));
    }
  }
  M.set_tail_bound(a.is_zero() ? 0.0 : a.envelope_beyond(static_cast<double>(effective_L(1.0, L, ceiling))));
  return M;
}

double invert_jump(const LatticeMap& A, const LatticeVector& n, Int L) {
  if (A.parity() != Parity::odd) throw InvalidInput("invert_jump: jump maps are odd");
  if (n.dim() != A.dimension()) throw InvalidInput("invert_jump: dimension mismatch");
  if (n.is_zero()) throw InvalidInput("invert_jump: zero frequency");
  if (L < 1) throw InvalidInput("invert_jump: L_max must be >= 1");
  const double nn = n.norm();
  double s = 0.0;
  for (Int l = 1; l <= L && static_cast<double>(l) * nn <= A.truncation_radius(); ++l) {
    const int mu = mobius(l);
    if (mu != 0) s += mu * A.value(n.scaled(l));
  }
  return 0.5 * s;
}

std::vector<double> subsample(const CoefficientFamily& a, const LatticeVector& m, Int L) {
  if (m.dim() != a.dimension()) throw InvalidInput("subsample: dimension mismatch");
  if (!is_irreducible(m) || !m.is_positive()) {
    throw InvalidInput("subsample: step must be irreducible with first nonzero coordinate positive");
  }
  if (L < 1) throw InvalidInput("subsample: L_max must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(L));
  for (Int l = 1; l <= L; ++l) out.push_back(a.value_at(m.scaled(l)));
  return out;
}

double davenport_to_fourier(const CoefficientFamily& a, const LatticeVector& m, Int trunc) {
  if (m.dim() != a.dimension()) throw InvalidInput("davenport_to_fourier: dimension mismatch");
  const Int g = gcd_vec(m);
  double s = 0.0;
  for (Int l : divisors(g)) {
    if (l > trunc) break;
    s += a.value_at(m.divided(l)) / static_cast<double>(l);
  }
  return -s / std::numbers::pi;
}

LatticeMap fourier_map(const CoefficientFamily& a, double M, Int trunc) {
  a.require_summable("fourier_map");
  if (!(M >= 1.0) || !std::isfinite(M)) throw InvalidInput("fourier_map: M must be >= 1");
  if (trunc < 1) throw InvalidInput("fourier_map: trunc must be >= 1");
  LatticeMap c(a.dimension(), Parity::odd, M);
  const double pi = std::numbers::pi;
  if (a.dense_1d()) {
    const Int mmax = static_cast<Int>(std::floor(M));
    std::vector<double> acc(static_cast<std::size_t>(mmax) + 1, 0.0);
    for (Int n = 1; n <= mmax; ++n) {
      const double v = a.value_1d(n);
      for (Int l = 1; l <= trunc && l * n <= mmax; ++l) acc[static_cast<std::size_t>(l * n)] += v / static_cast<double>(l);
    }
    for (Int m = 1; m <= mmax; ++m) c.set(LatticeVector{m}, -acc[static_cast<std::size_t>(m)] / pi);
  } else {
    const TermBlock t = a.terms(NormInterval::closed_ball(M));
    std::map<LatticeVector, double> acc;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const LatticeVector n = t.vector(i);
      for (Int l = 1; l <= trunc && static_cast<double>(l) * t.norms[i] <= M; ++l) {
        acc[n.scaled(l)] += t.values[i] / static_cast<double>(l);
      }
    }
    for (const auto& [m, v] : acc) c.set(m, -v / pi);
  }
  // Divisors l > trunc are dropped; bound their total by sup|a| times the harmonic tail.
  if (static_cast<double>(trunc) < M) {
    c.set_tail_bound(a.envelope_beyond(0.0) / pi * (std::log(M / static_cast<double>(trunc)) + 1.0));
  }
  return c;
}

double fourier_to_davenport(const LatticeMap& c, const LatticeVector& n, Int L) {
  if (c.parity() != Parity::odd) throw InvalidInput("fourier_to_davenport: Fourier maps are odd");
  if (n.dim() != c.dimension()) throw InvalidInput("fourier_to_davenport: dimension mismatch");
  if (L < 1) throw InvalidInput("fourier_to_davenport: L_max must be >= 1");
  const Int g = gcd_vec(n);
  double s = 0.0;
  for (Int l : divisors(g)) {
    if (l > L) break;
    const int mu = mobius(l);
    if (mu != 0) s += mu * c.value(n.divided(l)) / static_cast<double>(l);
  }
  return -std::numbers::pi * s;
}

ThetaEstimate theta_a_estimate(const LatticeMap& J, const LatticeMap& M, double inner) {
  if (J.parity() != Parity::odd || M.parity() != Parity::even) {
    throw InvalidInput("theta_a_estimate: expected an odd jump map and an even maximal map");
  }
  ThetaEstimate out;
  out.inner = inner;
  out.outer = J.truncation_radius();
  for (const auto& [q, e] : M.entries()) {
    const double qn = q.norm();
    if (qn < inner || qn >= out.outer) continue;
    if (e.value <= 0.0 || e.value >= 1.0) continue;
    const auto je = J.entry(q);
    const double A = je ? std::fabs(je->value) : 0.0;
    const double tail = je ? je->tail : J.tail_bound();
    if (tail > 0.0 && A <= tail) continue;
    const double ratio = A == 0.0 ? kInf : std::log(A) / std::log(e.value);
    out.rows.push_back({q, J.value(q), e.value, ratio});
    out.value = std::max(out.value, ratio);
    out.indeterminate = false;
  }
  out.jump_canceling = !out.indeterminate && out.value > 1.0;
  return out;
}

ThetaEstimate theta_a_estimate(const CoefficientFamily& a, double Q, Int L, double inner) {
  const LatticeMap J = jump_operator(a, Q, L);
  const LatticeMap M = maximal_operator(a, Q, L);
  return theta_a_estimate(J, M, inner < 0.0 ? std::sqrt(Q) : inner);
}

RegularityProfile regularity_profile(const CoefficientFamily& a, double R, Int L, double epsilon) {
  if (!(R >= 4.0)) throw InvalidInput("regularity_profile: R must be >= 4");
  RegularityProfile p;
  p.truncation_radius = R;
  const GammaEstimate g = gamma_a_estimate(a, std::sqrt(R), R);
  p.gamma_a = g.value;
  p.gamma_empty = g.empty;
  const ThetaEstimate t = theta_a_estimate(a, R, L);
  p.theta_a = t.value;
  p.theta_indeterminate = t.indeterminate;
  const SparsityReport s = sparsity_exponent(a, R);
  p.sparsity_exponent = s.value;
  p.sparse = s.sparse;
  p.slow_decay = !g.empty && g.value < epsilon;
  return p;
}

namespace exact {

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw NumericError("to_rational: non-finite value");
  int e = 0;
  const double m = std::frexp(v, &e);
  // m * 2^53 is an exact integer.
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  e -= 53;
  boost::multiprecision::cpp_int p = 1;
  p <<= std::abs(e);
  if (e >= 0) return r * Rational(p);
  return r / Rational(p);
}

RationalMap coefficients(const CoefficientFamily& a) {
  if (!std::holds_alternative<CoefficientFamily::Finite>(a.kind())) {
    throw InvalidInput("exact arithmetic requires a finite family");
  }
  RationalMap out;
  for (const auto& [n, v] : std::get<CoefficientFamily::Finite>(a.kind()).entries) {
    out[n] = to_rational(v);
  }
  return out;
}

Rational value(const RationalMap& m, const LatticeVector& q) {
  const int o = q.orientation();
  const auto it = m.find(o < 0 ? -q : q);
  if (it == m.end()) return Rational(0);
  return o < 0 ? Rational(-it->second) : it->second;
}

RationalMap jump(const RationalMap& a) {
  RationalMap A;
  for (const auto& [n, v] : a) {
    for (Int l : divisors(gcd_vec(n))) A[n.divided(l)] += 2 * v;
  }
  for (auto it = A.begin(); it != A.end();) {
    it = it->second == 0 ? A.erase(it) : std::next(it);
  }
  return A;
}

Rational invert_jump(const RationalMap& A, const LatticeVector& n) {
  // Squared norms are exact integers here, so l n on the boundary is never dropped.
  double reach2 = 0.0;
  for (const auto& [q, v] : A) reach2 = std::max(reach2, q.norm2());
  Rational s(0);
  const double n2 = n.norm2();
  for (Int l = 1; static_cast<double>(l) * static_cast<double>(l) * n2 <= reach2; ++l) {
    const int mu = mobius(l);
    if (mu != 0) s += mu * value(A, n.scaled(l));
  }
  return s / 2;
}

}  // namespace exact

}  // namespace davenport
