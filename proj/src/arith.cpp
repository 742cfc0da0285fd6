#include "davenport/arith.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "davenport/errors.hpp"

namespace davenport {

namespace {

std::atomic<std::uint32_t> g_shared_bound{10'000'000};

void require_nonzero(const LatticeVector& m, const char* op) {
  if (m.dim() == 0 || m.is_zero()) {
    throw InvalidInput(std::string(op) + ": zero lattice vector");
  }
}

Int abs_checked(Int v) {
  if (v == INT64_MIN) throw InvalidInput("lattice coordinate out of range");
  return v < 0 ? -v : v;
}

}  // namespace

LatticeVector::LatticeVector(std::vector<Int> coords) : c_(std::move(coords)) {
  for (Int v : c_) {
    if (v > kMaxCoordinate || v < -kMaxCoordinate) {
      throw InvalidInput("lattice coordinate exceeds 2^62");
    }
  }
}

LatticeVector::LatticeVector(std::initializer_list<Int> coords)
    : LatticeVector(std::vector<Int>(coords)) {}

LatticeVector LatticeVector::unit(int d, int axis, Int value) {
  std::vector<Int> c(static_cast<std::size_t>(d), 0);
  c[static_cast<std::size_t>(axis)] = value;
  return LatticeVector(std::move(c));
}

bool LatticeVector::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](Int v) { return v == 0; });
}

double LatticeVector::norm2() const {
  long double s = 0;
  for (Int v : c_) s += static_cast<long double>(v) * static_cast<long double>(v);
  return static_cast<double>(s);
}

double LatticeVector::norm() const {
  if (c_.size() == 1) return static_cast<double>(abs_checked(c_[0]));
  long double s = 0;
  for (Int v : c_) s += static_cast<long double>(v) * static_cast<long double>(v);
  return static_cast<double>(std::sqrt(s));
}

Int LatticeVector::max_abs() const {
  Int m = 0;
  for (Int v : c_) m = std::max(m, abs_checked(v));
  return m;
}

int LatticeVector::orientation() const {
  for (Int v : c_) {
    if (v > 0) return 1;
    if (v < 0) return -1;
  }
  return 0;
}

bool LatticeVector::is_positive() const { return orientation() > 0; }

LatticeVector LatticeVector::positive_representative() const {
  return orientation() < 0 ? -*this : *this;
}

LatticeVector LatticeVector::operator-() const {
  LatticeVector r = *this;
  for (Int& v : r.c_) v = -v;
  return r;
}

LatticeVector LatticeVector::scaled(Int l) const {
  LatticeVector r = *this;
  for (Int& v : r.c_) {
    Int out = 0;
    if (__builtin_mul_overflow(v, l, &out) || out > kMaxCoordinate || out < -kMaxCoordinate) {
      throw ResourceLimit("lattice coordinate exceeds 2^62");
    }
    v = out;
  }
  return r;
}

LatticeVector LatticeVector::divided(Int l) const {
  LatticeVector r = *this;
  for (Int& v : r.c_) v /= l;
  return r;
}

double LatticeVector::dot(const double* x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += static_cast<double>(c_[i]) * x[i];
  return s;
}

std::string LatticeVector::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c_[i]);
  }
  return s + ")";
}

Int gcd_int(Int a, Int b) { return std::gcd(abs_checked(a), abs_checked(b)); }

Int gcd_vec(const LatticeVector& m) {
  require_nonzero(m, "gcd_vec");
  Int g = 0;
  for (Int v : m.coords()) g = std::gcd(g, abs_checked(v));
  return g;
}

bool is_irreducible(const LatticeVector& n) { return gcd_vec(n) == 1; }

FactorSieve::FactorSieve(std::uint32_t bound) : bound_(std::max<std::uint32_t>(bound, 2)) {
  spf_.assign(static_cast<std::size_t>(bound_) + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i <= bound_; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = i;
      primes.push_back(i);
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t ip = static_cast<std::uint64_t>(i) * p;
      if (p > spf_[i] || ip > bound_) break;
      spf_[ip] = p;
    }
  }
}

const FactorSieve& FactorSieve::shared() {
  static const FactorSieve sieve(g_shared_bound.load());
  return sieve;
}

void FactorSieve::configure_shared_bound(std::uint32_t bound) { g_shared_bound.store(bound); }

std::vector<Int> FactorSieve::factor(Int n) const {
  if (n < 1) throw InvalidInput("factor: argument must be positive");
  std::vector<Int> out;
  // Trial division down to the sieve range.
  for (Int p = 2; n > static_cast<Int>(bound_) && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > static_cast<Int>(bound_)) {
    out.push_back(n);
    return out;
  }
  while (n > 1) {
    const Int p = spf_[static_cast<std::size_t>(n)];
    out.push_back(p);
    n /= p;
  }
  std::sort(out.begin(), out.end());
  return out;
}

int mobius(Int n) {
  if (n < 1) throw InvalidInput("mobius: argument must be >= 1");
  const auto f = FactorSieve::shared().factor(n);
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] == f[i - 1]) return 0;
  }
  return (f.size() % 2 == 0) ? 1 : -1;
}

std::vector<Int> divisors(Int n) {
  if (n < 1) throw InvalidInput("divisors: argument must be >= 1");
  const auto f = FactorSieve::shared().factor(n);
  std::vector<Int> out{1};
  std::size_t i = 0;
  while (i < f.size()) {
    const Int p = f[i];
    std::size_t e = 0;
    while (i < f.size() && f[i] == p) {
      ++i;
      ++e;
    }
    const std::size_t base = out.size();
    Int pk = 1;
    for (std::size_t k = 0; k < e; ++k) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int mobius_sum_check(Int n) {
  Int s = 0;
  for (Int l : divisors(n)) s += mobius(l);
  return s;
}

Int tau_multi(const LatticeVector& m) {
  return static_cast<Int>(divisors(gcd_vec(m)).size());
}

double sigma_power(const LatticeVector& m, double z, DivisorVariant variant) {
  require_nonzero(m, "sigma_power");
  if (!std::isfinite(z)) throw InvalidInput("sigma_power: exponent must be finite");
  const Int g = gcd_vec(m);
  const auto divs = divisors(g);
  if (variant == DivisorVariant::integer) {
    if (z >= 0 && z == std::floor(z) && z <= 64) {
      boost::multiprecision::cpp_int acc = 0;
      for (Int l : divs) acc += boost::multiprecision::pow(boost::multiprecision::cpp_int(l), static_cast<unsigned>(z));
      return acc.convert_to<double>();
    }
    double s = 0.0;
    for (Int l : divs) s += std::pow(static_cast<double>(l), z);
    return s;
  }
  // Vector divisors are m/l for l | gcd(m).
  const double mn = m.norm();
  double s = 0.0;
  for (auto it = divs.rbegin(); it != divs.rend(); ++it) {
    s += std::pow(mn / static_cast<double>(*it), z);
  }
  return s;
}

HyperplaneIndex canonical_hyperplane(Int k, const LatticeVector& n) {
  require_nonzero(n, "canonical_hyperplane");
  LatticeVector q = n;
  if (q.orientation() < 0) {
    q = -q;
    k = -k;
  }
  const Int g = gcd_int(k, gcd_vec(q));
  return HyperplaneIndex{k / g, q.divided(g)};
}

}  // namespace davenport
