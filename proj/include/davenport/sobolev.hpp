#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davenport/arith.hpp"
#include "davenport/family.hpp"
#include "davenport/lattice_map.hpp"

namespace davenport {

enum class SobolevModifier {
  plain,       // H^s
  delta_plus,  // H^s_{delta,+}
  minus        // H^{s,-}
};

struct SobolevLabel {
  double s = 0.0;
  SobolevModifier modifier = SobolevModifier::plain;
  double delta = 0.0;  // meaningful for delta_plus only
  int row = 0;         // 1..6, position in the classification table

  // Canonical form, e.g. "H^{-0.5,-}", "H^{1/2}_{1,+}", "H^{0.25}_{1,+}".
  std::string str() const;
  nlohmann::json to_json() const;
  bool operator==(const SobolevLabel&) const = default;
};

// Space in which the partial sums converge for a in F^gamma. Requires d >= 2.
SobolevLabel classify_sobolev(double gamma, int d);

// Truncated |f|^2 in H^s_delta: sum over |m| <= M of |c_m|^2 |m|^{2s} / (1 + log|m|)^delta,
// both signs of m counted. c must be odd with M inside its truncation.
double sobolev_norm_estimate(const LatticeMap& c, double s, double delta, double M);

struct DivergenceTest {
  double half_sum = 0.0;  // truncation at M/2
  double full_sum = 0.0;  // truncation at M
  double ratio = 0.0;
  double threshold = 0.0;  // 1 + 1/(2 log M)
  bool diverges = false;
};

DivergenceTest norm_divergence_test(const LatticeMap& c, double s, double delta, double M);

struct FourierBoundReport {
  double gamma = 0.0;
  double M = 0.0;
  double f_gamma_norm = 0.0;  // sup over |n| <= M, which is all the bound uses
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // |c_m| / bound
  std::optional<LatticeVector> witness;
  bool passed = true;

  nlohmann::json to_json() const;
};

// |c_m| <= |a|_{F^gamma} sigma_{1-gamma}(m) / (pi |m|) for every |m| <= M.
FourierBoundReport fourier_bound_check(const CoefficientFamily& a, double gamma, double M);

enum class SigmaRegime { bounded, eps_growth, z_plus_eps_growth, z_growth };

std::string sigma_regime_tag(SigmaRegime r);

struct SigmaRegimeReport {
  double z = 0.0;
  SigmaRegime regime = SigmaRegime::bounded;
  double fitted_exponent = 0.0;  // slope of log sigma_z(m) against log|m|
  double decades = 0.0;
  bool insufficient_range = false;  // samples span under 3 decades of |m|
  std::size_t samples = 0;

  nlohmann::json to_json() const;
};

SigmaRegimeReport sigma_regime(double z, const std::vector<LatticeVector>& m_samples);

// (h, 0, ..., 0) for the highly composite h <= max_value: the worst case for divisor sums.
std::vector<LatticeVector> highly_composite_samples(int d, Int max_value);

}  // namespace davenport
