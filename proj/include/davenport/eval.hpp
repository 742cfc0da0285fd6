#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "davenport/family.hpp"

namespace davenport {

namespace detail {
double sawtooth_large(double t);
}

// {t} = t - floor(t) - 1/2 off the integers, 0 on them. Exactly odd in floating point.
inline double sawtooth(double t) {
  if (std::fabs(t) < 0x1p51) {
    const double r = t - ((t + 0x1.8p52) - 0x1.8p52);
    return r > 0.0 ? r - 0.5 : (r < 0.0 ? r + 0.5 : 0.0);
  }
  return detail::sawtooth_large(t);
}

inline constexpr std::size_t kDefaultMaxTerms = std::size_t{1} << 24;
inline constexpr std::size_t kDefaultGridCap = 100'000'000;

// Partial sums f^N(x) = 2 sum over Z^d_+ with |n| <= N of a_n {n.x}, grown in place.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(const CoefficientFamily& a, std::size_t max_terms = kDefaultMaxTerms);

  // Adds the terms with current N < |n| <= N. Throws ResourceLimit past max_terms.
  void extend(double N);
  // False when doubling N would pass the term cap or the coordinate ceiling.
  bool can_extend(double N) const;

  double N() const { return N_; }
  // Bound on |f(x) - f^N(x)|, valid for every x.
  double tail() const { return tail_; }
  std::size_t term_count() const { return w_.size(); }
  int dimension() const { return d_; }

  double evaluate(const double* x) const { return evaluate_range(x, 0, w_.size()); }
  double evaluate_range(const double* x, std::size_t begin, std::size_t end) const;

 private:
  const CoefficientFamily* a_;
  std::size_t max_terms_;
  int d_;
  double N_ = 0.0;
  double tail_ = 0.0;
  std::vector<double> n_;  // flat coordinates, d per term
  std::vector<double> w_;  // 2 a_n
};

struct PartialSum {
  double value = 0.0;
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

PartialSum partial_sum(const CoefficientFamily& a, double N, const std::vector<double>& x,
                       std::size_t max_terms = kDefaultMaxTerms);

struct GridSpec {
  int d = 1;
  std::vector<double> origin;
  std::vector<double> extent;
  std::vector<int> counts;
  // Closed grids place nodes at origin + i*extent/(count-1); half-open ones use i*extent/count.
  bool closed = false;

  void validate(std::size_t cap = kDefaultGridCap) const;
  std::size_t total() const;
  double coordinate(int axis, int i) const;
  // Node coordinates for a row-major flat index (last axis fastest).
  std::vector<double> node(std::size_t flat) const;
  std::vector<int> index(std::size_t flat) const;

  nlohmann::json to_json() const;
  static GridSpec from_json(const nlohmann::json& j);
};

struct GridValues {
  GridSpec grid;
  double N = 0.0;
  double tail_bound = 0.0;
  std::vector<double> values;
};

GridValues grid_eval(const CoefficientFamily& a, double N, const GridSpec& g,
                     std::size_t max_terms = kDefaultMaxTerms);
// Header "x1,...,xd,value,tail_bound"; shortest round-trip decimal form.
void write_grid_csv(std::ostream& os, const GridValues& v);
nlohmann::json grid_sidecar(const GridValues& v, const CoefficientFamily& a);

// Deterministic points of the closed unit ball: the center first, then a Kronecker
// sequence filtered by rejection. The seed shifts the sequence start.
std::vector<std::vector<double>> ball_samples(int d, int count, std::uint64_t seed);

struct OscillationOptions {
  int samples_per_ball = 64;
  double n_start = 1024.0;
  std::size_t max_terms = kDefaultMaxTerms;
  double max_norm = 0x1p62;
  double rel_tail_tolerance = 0.01;  // stop when 2 * tail <= tol * osc
  std::uint64_t seed = 0;
  // Subtracted as gradient . (x - x0) before taking sup - inf; empty means no detrending.
  std::vector<double> gradient;
};

struct OscillationReport {
  std::vector<double> center;
  std::vector<double> radii;
  std::vector<double> osc;
  std::vector<double> N;
  std::vector<double> tail;
  std::vector<bool> low_confidence;

  bool any_low_confidence() const;
  nlohmann::json to_json() const;
};

OscillationReport oscillation(const CoefficientFamily& a, const std::vector<double>& x0,
                              const std::vector<double>& radii,
                              const OscillationOptions& opts = {});

// Least-squares affine fit of f^N over samples of B(x0, radius); returns the gradient.
std::vector<double> affine_trend(const CoefficientFamily& a, const std::vector<double>& x0,
                                 double radius, const OscillationOptions& opts = {});

struct JumpEstimate {
  double value = 0.0;       // oscillation at the smallest radius
  double last_change = 0.0;  // osc(second smallest) - osc(smallest)
  bool low_confidence = false;
  OscillationReport report;
};

JumpEstimate jump_magnitude_estimate(const CoefficientFamily& a, const std::vector<double>& x0,
                                     const std::vector<double>& radii,
                                     const OscillationOptions& opts = {});

}  // namespace davenport
