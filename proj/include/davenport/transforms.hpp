#pragma once

#include <cmath>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "davenport/family.hpp"
#include "davenport/lattice_map.hpp"

namespace davenport {

// A_q = 2 sum_{l<=L} a_{lq} for |q| < Q_radius. Entries whose magnitude does not
// exceed their tail are kept and report uncertain_zero().
LatticeMap jump_operator(const CoefficientFamily& a, double Q_radius, Int L_max);

// abar_q = max_{l<=L} |a_{lq}| for |q| < Q_radius.
LatticeMap maximal_operator(const CoefficientFamily& a, double Q_radius, Int L_max);

// (1/2) sum_{l<=L} mu(l) A_{ln}; keys past the map radius read as 0.
double invert_jump(const LatticeMap& A, const LatticeVector& n, Int L_max);

// (a_{lm})_{1<=l<=L} for irreducible m in Z^d_+.
std::vector<double> subsample(const CoefficientFamily& a, const LatticeVector& m, Int L_max);

// Fourier coefficient c_m of the series; positive divisors l <= trunc of gcd(m), the
// (-l,-n) partner folded in.
double davenport_to_fourier(const CoefficientFamily& a, const LatticeVector& m, Int trunc);

// All c_m with |m| <= M as an odd map of radius M.
LatticeMap fourier_map(const CoefficientFamily& a, double M, Int trunc);

// a_n = -pi sum_{l | gcd(n), l <= L} mu(l) c_{n/l} / l.
double fourier_to_davenport(const LatticeMap& c, const LatticeVector& n, Int L_max);

struct ThetaRow {
  LatticeVector q;
  double jump = 0.0;
  double maximal = 0.0;
  double ratio = 0.0;
};

struct ThetaEstimate {
  double value = -std::numeric_limits<double>::infinity();
  bool indeterminate = true;
  bool jump_canceling = false;
  double inner = 0.0;
  double outer = 0.0;
  std::vector<ThetaRow> rows;
};

// sup of log|A_q| / log abar_q over inner <= |q| < Q_radius. inner < 0 selects sqrt(Q_radius).
ThetaEstimate theta_a_estimate(const CoefficientFamily& a, double Q_radius, Int L_max,
                               double inner = -1.0);
ThetaEstimate theta_a_estimate(const LatticeMap& jumps, const LatticeMap& maximal, double inner);

struct RegularityProfile {
  double gamma_a = 0.0;
  bool gamma_empty = false;
  double theta_a = 0.0;
  bool theta_indeterminate = true;
  double sparsity_exponent = 0.0;
  bool sparse = false;
  bool slow_decay = false;
  double truncation_radius = 0.0;
};

// Shell [sqrt(R), R) for gamma_a and theta_a; slow decay declared when gamma_a < epsilon.
RegularityProfile regularity_profile(const CoefficientFamily& a, double R, Int L_max,
                                     double epsilon = 0.05);

namespace exact {

using Rational = boost::multiprecision::cpp_rational;
using RationalMap = std::map<LatticeVector, Rational>;  // Z^d_+ keys, odd extension implied

Rational to_rational(double v);
RationalMap coefficients(const CoefficientFamily& finite_family);
RationalMap jump(const RationalMap& a);
Rational invert_jump(const RationalMap& A, const LatticeVector& n);
Rational value(const RationalMap& m, const LatticeVector& q);

}  // namespace exact

}  // namespace davenport
