#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davenport/eval.hpp"
#include "davenport/family.hpp"
#include "davenport/lattice_map.hpp"
#include "davenport/transforms.hpp"

namespace davenport {

// Absolute tolerance on |q.x0 - p| for "x0 lies on H_{p,q}".
inline constexpr double kHyperplaneTolerance = 1e-12;

// dist(n.x0, Z) / |n|.
double delta_n(const std::vector<double>& x0, const LatticeVector& n);
// min over p coprime to gcd(q) of |q.x0 - p|, without the 1/|q| factor.
double coprime_distance(const std::vector<double>& x0, const LatticeVector& q, Int K = 1);
// coprime_distance / |q|.
double delta_P_q(const std::vector<double>& x0, const LatticeVector& q, Int K = 1);

struct DiscontinuityHit {
  HyperplaneIndex plane;
  double distance = 0.0;
  double jump = 0.0;
};

// Hyperplanes H_{p,q} with q a certain nonzero entry of A and distance to x0 <= radius,
// sorted by distance, then |q|, then p.
std::vector<DiscontinuityHit> discontinuity_query(const LatticeMap& A, const std::vector<double>& x0,
                                                  double radius);

struct UpperBound {
  double value = 0.0;  // +inf when the shell holds no certain entry
  bool empty = true;
  std::optional<HyperplaneIndex> on_discontinuity;
  std::optional<LatticeVector> witness;
};

UpperBound holder_upper_bound(const LatticeMap& A, const std::vector<double>& x0, double r0, double r);

enum class Detrend { none, linear };

struct EmpiricalFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  bool low_confidence = false;
  OscillationReport report;
};

// Least-squares slope of log osc against log r. Needs at least 5 radii.
EmpiricalFit empirical_exponent(const CoefficientFamily& a, const std::vector<double>& x0,
                                const std::vector<double>& radii, Detrend detrend,
                                const OscillationOptions& opts = {});

// 2^-first, ..., 2^-last.
std::vector<double> dyadic_radii(int first, int last);

enum class Validity { formula, upper_bound_only };

struct ShellTrace {
  double lo = 0.0;
  double hi = 0.0;
  double shell_inf = 0.0;
  double running_inf = 0.0;
};

struct ExponentEstimate {
  std::vector<double> point;
  double formula_value = 0.0;
  double upper_bound_value = 0.0;
  std::optional<double> empirical_value;
  std::optional<EmpiricalFit> empirical_fit;
  double r0 = 0.0;
  double r = 0.0;
  std::optional<HyperplaneIndex> on_discontinuity;
  Validity validity = Validity::formula;
  // x0 meets a support hyperplane whose jump vanishes at this truncation; the formula skips it.
  bool undetermined = false;
  bool gamma_capped = false;
  std::vector<ShellTrace> trace;
  std::vector<std::string> notes;
  std::string family_hash;

  nlohmann::json to_json() const;
};

struct ExponentOptions {
  Int L_max = 1024;
  double tolerance = kHyperplaneTolerance;
  bool with_empirical = false;
  std::vector<double> empirical_radii = dyadic_radii(3, 12);
  Detrend detrend = Detrend::none;
  OscillationOptions oscillation;
  double sparse_slope = 0.25;
};

// Per-family state shared by many exponent queries: the jump map, sparsity and theta
// diagnostics and the support in the shell.
class ExponentAnalyzer {
 public:
  ExponentAnalyzer(const CoefficientFamily& a, double r0, double r, ExponentOptions opts = {});

  ExponentEstimate estimate(const std::vector<double>& x0) const;

  bool formula_valid() const { return valid_; }
  const LatticeMap& jumps() const { return jumps_; }
  const ThetaEstimate& theta() const { return theta_; }
  const SparsityReport& sparsity() const { return sparsity_; }
  const GammaEstimate& gamma() const { return gamma_; }
  // Certain nonzero jump entries with |q| below the given radius. With scale_by_norm the
  // tolerance bounds the Euclidean distance to the hyperplane instead of |q.x0 - p|.
  std::optional<HyperplaneIndex> nearby_discontinuity(const std::vector<double>& x0, double tol,
                                                      double q_radius, bool scale_by_norm = false) const;

 private:
  const CoefficientFamily* a_;
  double r0_, r_;
  ExponentOptions opts_;
  LatticeMap jumps_;
  ThetaEstimate theta_;
  SparsityReport sparsity_;
  GammaEstimate gamma_;
  TermBlock shell_;
  std::vector<std::pair<LatticeVector, double>> certain_;  // (q, |A_q|), ascending |q|
  bool valid_ = false;
  std::string hash_;
};

ExponentEstimate holder_exponent(const CoefficientFamily& a, const std::vector<double>& x0, double r0,
                                 double r, bool with_empirical, const ExponentOptions& opts = {});

struct KappaEstimate {
  double value = 0.0;
  bool indeterminate = true;
  bool distance_zero = false;
  std::optional<LatticeVector> witness;
};

KappaEstimate kappa_estimate(const std::vector<double>& x0, const std::vector<LatticeVector>& Q, double r0,
                             double r);

struct RegularityVerdict {
  bool regular = true;
  bool finite_set = false;  // every shell empty; the verdict is vacuous
  bool suspect = false;     // some point has kappa above the suspect threshold
  std::vector<double> worst_point;
  double worst_kappa = -std::numeric_limits<double>::infinity();
};

RegularityVerdict is_regular_set(const std::vector<LatticeVector>& Q,
                                 const std::vector<std::vector<double>>& points, double r0, double r,
                                 double margin = 0.05, double suspect_threshold = 0.1);

// FNV-1a over the canonical family JSON.
std::string family_hash(const CoefficientFamily& a);

}  // namespace davenport
