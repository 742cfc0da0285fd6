#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davenport/eval.hpp"
#include "davenport/family.hpp"
#include "davenport/regularity.hpp"

namespace davenport {

enum class SpectrumRegime {
  slow_decay,   // gamma_a = 0: exponent 0 everywhere
  modeled,      // 0 < gamma_a < inf
  out_of_scope  // gamma_a = inf
};

SpectrumRegime spectrum_regime(double gamma_a);

struct SpectrumValue {
  bool empty = false;  // E_f(h) is empty
  double value = 0.0;
  // At h = 0 the iso-Holder set contains the discontinuity hyperplanes.
  bool contains_discontinuities = false;
};

// d - 1 + h / gamma_a on [0, gamma_a]; empty elsewhere. Requires 0 < gamma_a < inf.
SpectrumValue theoretical_spectrum(double gamma_a, int d, double h);

enum class ExponentMethod { formula, oscillation };

struct SpectrumOptions {
  double bin_width = 0.0;  // 0 selects 0.1 * gamma_a estimate
  double r0 = 0.0;         // 0 selects sqrt(r)
  double r = 0x1p20;
  ExponentMethod method = ExponentMethod::formula;
  std::vector<int> eps_levels;  // box side 2^-k; empty selects 1..log2(min count)
  double snap_tolerance = 1e-6;
  // Hyperplanes with |q| below this radius drive snapping; 0 picks the largest radius whose
  // tolerance slabs cover at most snap_budget of the region.
  double snap_q_radius = 0.0;
  double snap_budget = 0.01;
  ExponentOptions exponent;
};

struct SpectrumBin {
  double center = 0.0;
  std::size_t count = 0;
  double dimension = 0.0;
  std::vector<std::size_t> box_counts;  // one per eps level
};

struct EmpiricalSpectrum {
  GridSpec grid;
  std::string method;
  double bin_width = 0.0;
  double r0 = 0.0;
  double r = 0.0;
  double gamma_estimate = 0.0;
  double snap_q_radius = 0.0;
  bool advisory = false;  // formula preconditions failed
  std::vector<int> eps_levels;
  std::vector<SpectrumBin> bins;  // ascending centers, nonempty only
  std::size_t infinite_count = 0;
  std::size_t snapped_count = 0;
  std::vector<double> node_exponents;  // row-major grid order

  // Bin whose center is nearest to h, or nullptr.
  const SpectrumBin* bin_near(double h) const;
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json(const CoefficientFamily& a) const;
};

EmpiricalSpectrum empirical_spectrum(const CoefficientFamily& a, const GridSpec& region,
                                     const SpectrumOptions& opts = {});

struct RegionDimension {
  bool present = false;
  std::size_t count = 0;
  double dimension = 0.0;
};

struct HomogeneityReport {
  double h = 0.0;
  double bin_width = 0.0;
  std::vector<RegionDimension> regions;
  double spread = 0.0;         // max - min over regions where the bin is present
  bool presence_differs = false;  // some regions have points at h and others none
};

HomogeneityReport homogeneity_report(const CoefficientFamily& a, const std::vector<GridSpec>& regions, double h,
                                     const SpectrumOptions& opts = {});

}  // namespace davenport
