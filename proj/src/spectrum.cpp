#include "davenport/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "davenport/errors.hpp"
#include "davenport/json_io.hpp"

namespace davenport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void put_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

// Slope of log2 N(2^-k) against k.
double box_dimension(const std::vector<int>& levels, const std::vector<std::size_t>& counts) {
  const double n = static_cast<double>(levels.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    mx += levels[i];
    my += std::log2(static_cast<double>(counts[i]));
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double dx = levels[i] - mx;
    sxx += dx * dx;
    sxy += dx * (std::log2(static_cast<double>(counts[i])) - my);
  }
  return sxy / sxx;
}

std::vector<int> default_levels(const GridSpec& g) {
  const int m = *std::min_element(g.counts.begin(), g.counts.end());
  const int top = std::max(3, static_cast<int>(std::floor(std::log2(static_cast<double>(m)))));
  std::vector<int> out;
  for (int k = 1; k <= top; ++k) out.push_back(k);
  return out;
}

// Smallest |q| at which the tolerance slabs of certain jumps with smaller |q| exceed the budget.
double budget_snap_radius(const LatticeMap& J, double tol, double budget) {
  std::vector<double> norms;
  for (const auto& [q, e] : J.entries()) {
    if (e.value != 0.0 && std::fabs(e.value) > e.tail) norms.push_back(q.norm());
  }
  std::sort(norms.begin(), norms.end());
  double covered = 0.0;
  for (double qn : norms) {
    covered += 2.0 * tol * qn;
    if (covered > budget) return qn;
  }
  return J.truncation_radius();
}

}  // namespace

SpectrumRegime spectrum_regime(double gamma_a) {
  if (std::isnan(gamma_a) || gamma_a < 0.0) throw InvalidInput("gamma_a must be >= 0");
  if (gamma_a == 0.0) return SpectrumRegime::slow_decay;
  if (std::isinf(gamma_a)) return SpectrumRegime::out_of_scope;
  return SpectrumRegime::modeled;
}

SpectrumValue theoretical_spectrum(double gamma_a, int d, double h) {
  if (!(gamma_a > 0.0) || !std::isfinite(gamma_a)) {
    throw InvalidInput("theoretical_spectrum: gamma_a must lie in (0, inf)");
  }
  if (d < 1) throw InvalidInput("theoretical_spectrum: d must be >= 1");
  if (!std::isfinite(h)) throw InvalidInput("theoretical_spectrum: h must be finite");
  SpectrumValue v;
  if (h < 0.0 || h > gamma_a) {
    v.empty = true;
    return v;
  }
  v.value = d - 1.0 + h / gamma_a;
  v.contains_discontinuities = h == 0.0;
  return v;
}

const SpectrumBin* EmpiricalSpectrum::bin_near(double h) const {
  const SpectrumBin* best = nullptr;
  for (const auto& b : bins) {
    if (!best || std::fabs(b.center - h) < std::fabs(best->center - h)) best = &b;
  }
  return best;
}

void EmpiricalSpectrum::write_csv(std::ostream& os) const {
  os << "h_bin_center,dimension,node_count";
  for (int k : eps_levels) os << ",box_count_k" << k;
  os << '\n';
  for (const auto& b : bins) {
    put_number(os, b.center);
    os << ',';
    put_number(os, b.dimension);
    os << ',' << b.count;
    for (std::size_t c : b.box_counts) os << ',' << c;
    os << '\n';
  }
}

nlohmann::json EmpiricalSpectrum::to_json(const CoefficientFamily& a) const {
  nlohmann::json bj = nlohmann::json::array();
  for (const auto& b : bins) {
    bj.push_back({{"center", b.center}, {"count", b.count}, {"dimension", b.dimension}, {"box_counts", b.box_counts}});
  }
  nlohmann::json predicted = nlohmann::json::array();
  if (std::isfinite(gamma_estimate) && gamma_estimate > 0.0) {
    for (int i = 0; i <= 20; ++i) {
      const double h = gamma_estimate * i / 20.0;
      predicted.push_back({h, theoretical_spectrum(gamma_estimate, grid.d, h).value});
    }
  }
  return {{"family", a.to_json()},
          {"family_hash", family_hash(a)},
          {"grid", grid.to_json()},
          {"method", method},
          {"shells_used", {r0, r}},
          {"bin_width", bin_width},
          {"gamma_estimate", json_number(gamma_estimate)},
          {"snap_q_radius", snap_q_radius},
          {"advisory", advisory},
          {"eps_levels", eps_levels},
          {"infinite_count", infinite_count},
          {"snapped_count", snapped_count},
          {"bins", bj},
          {"predicted", predicted},
          {"note", "box-counting over dyadic grid boxes stands in for Hausdorff dimension"}};
}

EmpiricalSpectrum empirical_spectrum(const CoefficientFamily& a, const GridSpec& region, const SpectrumOptions& opts) {
  region.validate();
  if (region.d != a.dimension()) throw InvalidInput("empirical_spectrum: region and family dimensions differ");
  EmpiricalSpectrum out;
  out.grid = region;
  out.r = opts.r;
  out.r0 = opts.r0 > 0.0 ? opts.r0 : std::sqrt(opts.r);
  out.method = opts.method == ExponentMethod::formula ? "formula" : "oscillation";
  out.eps_levels = opts.eps_levels.empty() ? default_levels(region) : opts.eps_levels;
  if (out.eps_levels.size() < 3) throw InvalidInput("empirical_spectrum: need at least 3 box scales");
  for (int k : out.eps_levels) {
    if (k < 0 || k > 20) throw InvalidInput("empirical_spectrum: box levels must lie in [0, 20]");
  }

  ExponentOptions eo = opts.exponent;
  eo.with_empirical = opts.method == ExponentMethod::oscillation;
  const ExponentAnalyzer an(a, out.r0, out.r, eo);
  out.gamma_estimate = an.gamma().value;
  out.advisory = opts.method == ExponentMethod::formula && !an.formula_valid();
  out.bin_width = opts.bin_width > 0.0 ? opts.bin_width
                  : (std::isfinite(out.gamma_estimate) && out.gamma_estimate > 0.0 ? 0.1 * out.gamma_estimate : 0.1);
  out.snap_q_radius = opts.snap_q_radius > 0.0 ? opts.snap_q_radius
                                               : budget_snap_radius(an.jumps(), opts.snap_tolerance, opts.snap_budget);

  const auto total = static_cast<std::int64_t>(region.total());
  out.node_exponents.assign(region.total(), 0.0);
  std::vector<char> snapped(region.total(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto x = region.node(k);
    if (an.nearby_discontinuity(x, opts.snap_tolerance, out.snap_q_radius, true)) {
      snapped[k] = 1;
      out.node_exponents[k] = 0.0;
      continue;
    }
    const ExponentEstimate est = an.estimate(x);
    double h = est.formula_value;
    if (opts.method == ExponentMethod::oscillation) {
      h = est.on_discontinuity ? 0.0 : est.empirical_value.value_or(kInf);
      if (std::isnan(h)) h = kInf;
    }
    out.node_exponents[k] = h;
  }

  std::map<long long, std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < region.total(); ++k) {
    out.snapped_count += snapped[k] ? 1 : 0;
    const double h = out.node_exponents[k];
    if (!std::isfinite(h)) {
      ++out.infinite_count;
      continue;
    }
    members[std::llround(std::floor(h / out.bin_width + 0.5))].push_back(k);
  }
  for (const auto& [bin, nodes] : members) {
    SpectrumBin b;
    b.center = static_cast<double>(bin) * out.bin_width;
    b.count = nodes.size();
    for (int lev : out.eps_levels) {
      const std::int64_t side = std::int64_t{1} << lev;
      std::vector<std::uint64_t> keys;
      keys.reserve(nodes.size());
      for (std::size_t k : nodes) {
        const auto idx = region.index(k);
        std::uint64_t key = 0;
        for (int ax = 0; ax < region.d; ++ax) {
          const auto c = static_cast<std::int64_t>(region.counts[static_cast<std::size_t>(ax)]);
          const std::int64_t denom = region.closed ? c - 1 : c;
          const std::int64_t box = std::min<std::int64_t>(idx[static_cast<std::size_t>(ax)] * side / denom, side - 1);
          key = key * static_cast<std::uint64_t>(side) + static_cast<std::uint64_t>(box);
        }
        keys.push_back(key);
      }
      std::sort(keys.begin(), keys.end());
      b.box_counts.push_back(static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin()));
    }
    b.dimension = std::clamp(box_dimension(out.eps_levels, b.box_counts), 0.0, static_cast<double>(region.d));
    out.bins.push_back(std::move(b));
  }
  return out;
}

HomogeneityReport homogeneity_report(const CoefficientFamily& a, const std::vector<GridSpec>& regions, double h,
                                     const SpectrumOptions& opts) {
  if (regions.size() < 2) throw InvalidInput("homogeneity_report: need at least two regions");
  HomogeneityReport rep;
  rep.h = h;
  SpectrumOptions o = opts;
  if (!(o.bin_width > 0.0)) {
    const double r0 = o.r0 > 0.0 ? o.r0 : std::sqrt(o.r);
    const GammaEstimate g = gamma_a_estimate(a, r0, o.r);
    o.bin_width = (!g.empty && g.value > 0.0) ? 0.1 * g.value : 0.1;
  }
  rep.bin_width = o.bin_width;
  const double center = std::floor(h / o.bin_width + 0.5) * o.bin_width;
  double lo = kInf, hi = -kInf;
  bool any_present = false, any_absent = false;
  for (const auto& g : regions) {
    const EmpiricalSpectrum s = empirical_spectrum(a, g, o);
    RegionDimension rd;
    for (const auto& b : s.bins) {
      if (std::fabs(b.center - center) < 1e-9 * std::max(1.0, std::fabs(center))) {
        rd.present = true;
        rd.count = b.count;
        rd.dimension = b.dimension;
      }
    }
    if (rd.present) {
      any_present = true;
      lo = std::min(lo, rd.dimension);
      hi = std::max(hi, rd.dimension);
    } else {
      any_absent = true;
    }
    rep.regions.push_back(rd);
  }
  rep.spread = any_present ? hi - lo : 0.0;
  rep.presence_differs = any_present && any_absent;
  return rep;
}

}  // namespace davenport
