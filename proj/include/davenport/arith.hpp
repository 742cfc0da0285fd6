#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace davenport {

using Int = std::int64_t;

// Largest coordinate magnitude accepted anywhere; keeps l*n and n.x products in range.
inline constexpr Int kMaxCoordinate = Int{1} << 62;

class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::vector<Int> coords);
  LatticeVector(std::initializer_list<Int> coords);

  static LatticeVector unit(int d, int axis, Int value = 1);

  int dim() const { return static_cast<int>(c_.size()); }
  Int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<Int>& coords() const { return c_; }

  bool is_zero() const;
  double norm() const;
  double norm2() const;
  Int max_abs() const;

  // Member of Z^d_+: first nonvanishing coordinate positive.
  bool is_positive() const;
  LatticeVector positive_representative() const;
  // +1 if is_positive(), -1 otherwise. Zero vector gives 0.
  int orientation() const;

  LatticeVector operator-() const;
  // Throws ResourceLimit when a coordinate would leave [-kMaxCoordinate, kMaxCoordinate].
  LatticeVector scaled(Int l) const;
  // Exact division; caller guarantees divisibility.
  LatticeVector divided(Int l) const;
  double dot(const double* x) const;

  std::string to_string() const;

  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
  friend std::strong_ordering operator<=>(const LatticeVector& a, const LatticeVector& b) {
    return a.c_ <=> b.c_;
  }

 private:
  std::vector<Int> c_;
};

struct HyperplaneIndex {
  Int p = 0;
  LatticeVector q;
  friend bool operator==(const HyperplaneIndex&, const HyperplaneIndex&) = default;
};

enum class DivisorVariant { vector, integer };

Int gcd_int(Int a, Int b);
Int gcd_vec(const LatticeVector& m);
bool is_irreducible(const LatticeVector& n);

// Smallest-prime-factor table shared by every thread; built on first use.
class FactorSieve {
 public:
  explicit FactorSieve(std::uint32_t bound);
  static const FactorSieve& shared();
  // Bound of the shared sieve; must be called before the first shared() use to take effect.
  static void configure_shared_bound(std::uint32_t bound);

  std::uint32_t bound() const { return bound_; }
  // Prime factors with multiplicity, ascending. Falls back to trial division above bound().
  std::vector<Int> factor(Int n) const;

 private:
  std::uint32_t bound_;
  std::vector<std::uint32_t> spf_;
};

int mobius(Int n);
Int mobius_sum_check(Int n);
std::vector<Int> divisors(Int n);
Int tau_multi(const LatticeVector& m);
double sigma_power(const LatticeVector& m, double z, DivisorVariant variant);
HyperplaneIndex canonical_hyperplane(Int k, const LatticeVector& n);

}  // namespace davenport
