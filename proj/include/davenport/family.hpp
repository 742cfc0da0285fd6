#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "davenport/arith.hpp"

namespace davenport {

inline constexpr std::size_t kDefaultSupportCap = 10'000'000;

// Norm window with independently open or closed ends.
struct NormInterval {
  double lo = 0.0;
  bool lo_closed = false;
  double hi = 0.0;
  bool hi_closed = true;

  bool contains(double r) const {
    return (lo_closed ? r >= lo : r > lo) && (hi_closed ? r <= hi : r < hi);
  }
  static NormInterval ball(double R) { return {0.0, false, R, false}; }
  static NormInterval closed_ball(double N) { return {0.0, false, N, true}; }
  static NormInterval shell(double r0, double r) { return {r0, true, r, false}; }
};

// Flat list of Z^d_+ representatives, sorted by norm then lexicographically.
struct TermBlock {
  int d = 1;
  std::vector<Int> coords;
  std::vector<double> values;
  std::vector<double> norms;

  std::size_t size() const { return values.size(); }
  const Int* at(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(d); }
  LatticeVector vector(std::size_t i) const {
    return LatticeVector(std::vector<Int>(at(i), at(i) + d));
  }
};

// Odd coefficient sequence a_n over Z^d_*, stored on Z^d_+ and extended by a_{-n} = -a_n.
class CoefficientFamily {
 public:
  struct Finite {
    std::vector<std::pair<LatticeVector, double>> entries;  // Z^d_+ keys, sorted by (norm, lex)
  };
  // a_n = 1/2 sign(n) |n|^-beta.
  struct Hecke {
    double beta;
  };
  // a_{l^k} = 1/2 k^-alpha for k >= 1; zero elsewhere on N.
  struct LAdic {
    Int l;
    double alpha;
  };
  // a_n = 1/2 |n|^-gamma at n = base^k direction, k >= 0.
  struct PowerLacunary {
    Int base;
    LatticeVector direction;
    double gamma;
  };
  // b_1 = 1 - zeta(beta), b_n = n^-beta for n >= 2; a_n = 1/2 sign(n) b_|n|.
  struct FBeta {
    double beta;
  };
  using Kind = std::variant<Finite, Hecke, LAdic, PowerLacunary, FBeta>;

  static CoefficientFamily zero(int d);
  static CoefficientFamily finite(int d, std::vector<std::pair<LatticeVector, double>> entries);
  static CoefficientFamily hecke(double beta);
  static CoefficientFamily l_adic(Int l, double alpha);
  static CoefficientFamily power_lacunary(Int base, LatticeVector direction, double gamma);
  static CoefficientFamily f_beta(double beta);

  static CoefficientFamily from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int dimension() const { return d_; }
  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  double value_at(const LatticeVector& n) const;
  // Fast path for d = 1.
  double value_1d(Int n) const;

  // Full support on Z^1_* (hecke, f_beta).
  bool dense_1d() const;
  bool is_zero() const;
  bool summable() const;
  void require_summable(const char* op) const;
  double max_support_norm() const;  // +inf unless finite

  // Support representatives in Z^d_+ whose norm lies in the window. Throws ResourceLimit past cap.
  TermBlock terms(const NormInterval& window, std::size_t cap = kDefaultSupportCap) const;
  std::vector<LatticeVector> support_in_ball(double R, std::size_t cap = kDefaultSupportCap) const;

  // Upper bound on the sum of |a_n| over n in Z^d_+ with |n| > N.
  double positive_tail(double N) const;
  // Upper bound on sup |a_n| over |n| > N.
  double envelope_beyond(double N) const;
  // Upper bound on the sum over l > L of |a_{lq}| for q in Z^d_+ with |q| = q_norm.
  double ray_tail(double q_norm, Int L) const;

 private:
  CoefficientFamily(int d, Kind k) : d_(d), kind_(std::move(k)) {}
  int d_;
  Kind kind_;
};

struct GammaEstimate {
  double value = 0.0;  // +inf when the shell holds no support
  bool empty = false;
  double r0 = 0.0;
  double r = 0.0;
};

struct SparsityReport {
  double value = 0.0;  // log #(supp in B(0,R)) / log R, counting both members of each pair
  bool empty_support = false;
  bool sparse = false;
  double growth_slope = 0.0;  // d log # / d log R across the dyadic window
  std::vector<double> radii;
  std::vector<double> values;
};

enum class Tristate { no, yes, indeterminate };

struct SlowDecayResult {
  Tristate status = Tristate::indeterminate;
  double ratio = 0.0;
  std::optional<LatticeVector> witness;
};

double f_gamma_norm(const CoefficientFamily& a, double gamma, double R);
GammaEstimate gamma_a_estimate(const CoefficientFamily& a, double r0, double r);
SparsityReport sparsity_exponent(const CoefficientFamily& a, double R, int scales = 5,
                                 double sparse_slope = 0.25);
SlowDecayResult slow_decay_test(const CoefficientFamily& a, const std::vector<LatticeVector>& Q,
                                double R, double epsilon = 0.05);

}  // namespace davenport
