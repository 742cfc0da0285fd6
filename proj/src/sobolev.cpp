#include "davenport/sobolev.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "davenport/errors.hpp"
#include "davenport/json_io.hpp"
#include "davenport/transforms.hpp"

namespace davenport {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string SobolevLabel::str() const {
  switch (modifier) {
    case SobolevModifier::plain:
      return "H^{" + shortest(s) + "}";
    case SobolevModifier::minus:
      return "H^{" + shortest(s) + ",-}";
    case SobolevModifier::delta_plus:
      return "H^{" + (s == 0.5 ? std::string("1/2") : shortest(s)) + "}_{" + shortest(delta) + ",+}";
  }
  return {};
}

nlohmann::json SobolevLabel::to_json() const {
  const char* mod = modifier == SobolevModifier::plain ? "plain"
                    : modifier == SobolevModifier::minus ? "minus"
                                                          : "delta_plus";
  nlohmann::json j{{"s", s}, {"modifier", mod}, {"row", row}, {"label", str()}};
  if (modifier == SobolevModifier::delta_plus) j["delta"] = delta;
  return j;
}

SobolevLabel classify_sobolev(double gamma, int d) {
  if (d == 1) throw InvalidInput("classify_sobolev: unsupported dimension d=1");
  if (d < 1) throw InvalidInput("classify_sobolev: d must be >= 2");
  if (!std::isfinite(gamma)) throw InvalidInput("classify_sobolev: gamma must be finite");
  const double dd = d;
  if (gamma <= 0.0) return {gamma - dd / 2.0, SobolevModifier::delta_plus, 1.0, 1};
  if (gamma <= 1.0) return {gamma - dd / 2.0, SobolevModifier::minus, 0.0, 2};
  if (gamma <= 2.0) return {(1.0 + gamma - dd) / 2.0, SobolevModifier::minus, 0.0, 3};
  if (gamma < dd) return {(1.0 + gamma - dd) / 2.0, SobolevModifier::delta_plus, 1.0, 4};
  if (gamma == dd) return {0.5, SobolevModifier::delta_plus, 2.0, 5};
  return {0.5, SobolevModifier::delta_plus, 1.0, 6};
}

double sobolev_norm_estimate(const LatticeMap& c, double s, double delta, double M) {
  if (c.parity() != Parity::odd) throw InvalidInput("sobolev_norm_estimate: coefficients must be odd");
  if (!(M >= 0.0) || M > c.truncation_radius()) {
    throw InvalidInput("sobolev_norm_estimate: M must lie within the map truncation");
  }
  if (!std::isfinite(s) || !std::isfinite(delta)) throw InvalidInput("sobolev_norm_estimate: s and delta must be finite");
  long double acc = 0.0L;
  for (const auto& [m, e] : c.entries()) {
    const double mn = m.norm();
    if (mn > M) continue;
    const long double v = e.value;
    acc += v * v * std::pow(static_cast<long double>(mn), 2.0L * s) / std::pow(1.0L + std::log(static_cast<long double>(mn)), static_cast<long double>(delta));
  }
  return static_cast<double>(2.0L * acc);
}

DivergenceTest norm_divergence_test(const LatticeMap& c, double s, double delta, double M) {
  if (!(M >= 4.0)) throw InvalidInput("norm_divergence_test: M must be >= 4");
  DivergenceTest t;
  t.half_sum = sobolev_norm_estimate(c, s, delta, M / 2.0);
  t.full_sum = sobolev_norm_estimate(c, s, delta, M);
  t.threshold = 1.0 + 1.0 / (2.0 * std::log(M));
  t.ratio = t.half_sum > 0.0 ? t.full_sum / t.half_sum : (t.full_sum > 0.0 ? INFINITY : 1.0);
  t.diverges = t.ratio > t.threshold;
  return t;
}

nlohmann::json FourierBoundReport::to_json() const {
  nlohmann::json j{{"gamma", gamma}, {"M", M}, {"f_gamma_norm", f_gamma_norm}, {"checked", checked},
                   {"violations", violations}, {"max_ratio", max_ratio}, {"passed", passed}};
  j["witness"] = witness ? nlohmann::json(witness->coords()) : nlohmann::json(nullptr);
  return j;
}

FourierBoundReport fourier_bound_check(const CoefficientFamily& a, double gamma, double M) {
  if (!std::isfinite(gamma)) throw InvalidInput("fourier_bound_check: gamma must be finite");
  if (!(M >= 1.0)) throw InvalidInput("fourier_bound_check: M must be >= 1");
  FourierBoundReport rep;
  rep.gamma = gamma;
  rep.M = M;
  // c_m only involves a_n with n | m, so |n| <= M.
  rep.f_gamma_norm = f_gamma_norm(a, gamma, M + 0.5);
  const Int trunc = static_cast<Int>(std::ceil(M));
  const LatticeMap c = fourier_map(a, M, trunc);
  for (const auto& [m, e] : c.entries()) {
    const double mn = m.norm();
    if (mn > M) continue;
    ++rep.checked;
    const double bound = rep.f_gamma_norm * sigma_power(m, 1.0 - gamma, DivisorVariant::vector) / (std::numbers::pi * mn);
    double ratio;
    if (e.value == 0.0) {
      ratio = 0.0;
    } else if (bound == 0.0) {
      ratio = INFINITY;
    } else {
      ratio = std::fabs(e.value) / bound;
    }
    if (!rep.witness || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.witness = m;
    }
    // Relative slack covers the rounding in both sides.
    if (ratio > 1.0 + 1e-12) ++rep.violations;
  }
  rep.passed = rep.violations == 0;
  return rep;
}

std::string sigma_regime_tag(SigmaRegime r) {
  switch (r) {
    case SigmaRegime::bounded: return "O(1)";
    case SigmaRegime::eps_growth: return "O(|m|^eps)";
    case SigmaRegime::z_plus_eps_growth: return "O(|m|^{z+eps})";
    case SigmaRegime::z_growth: return "O(|m|^z)";
  }
  return {};
}

nlohmann::json SigmaRegimeReport::to_json() const {
  return {{"z", z},
          {"regime", sigma_regime_tag(regime)},
          {"fitted_exponent", fitted_exponent},
          {"decades", decades},
          {"insufficient_range", insufficient_range},
          {"samples", samples}};
}

SigmaRegimeReport sigma_regime(double z, const std::vector<LatticeVector>& m_samples) {
  if (!std::isfinite(z)) throw InvalidInput("sigma_regime: z must be finite");
  if (m_samples.size() < 2) throw InvalidInput("sigma_regime: need at least two samples");
  SigmaRegimeReport rep;
  rep.z = z;
  rep.regime = z < -1.0  ? SigmaRegime::bounded
               : z < 0.0 ? SigmaRegime::eps_growth
               : z <= 1.0 ? SigmaRegime::z_plus_eps_growth
                          : SigmaRegime::z_growth;
  rep.samples = m_samples.size();
  std::vector<double> xs, ys;
  double lo = INFINITY, hi = 0.0;
  for (const auto& m : m_samples) {
    const double mn = m.norm();
    lo = std::min(lo, mn);
    hi = std::max(hi, mn);
    xs.push_back(std::log(mn));
    ys.push_back(std::log(sigma_power(m, z, DivisorVariant::vector)));
  }
  rep.decades = std::log10(hi / lo);
  rep.insufficient_range = rep.decades < 3.0;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("sigma_regime: samples must have distinct norms");
  rep.fitted_exponent = sxy / sxx;
  return rep;
}

std::vector<LatticeVector> highly_composite_samples(int d, Int max_value) {
  if (d < 1) throw InvalidInput("highly_composite_samples: d must be >= 1");
  if (max_value < 1 || max_value > 10'000'000) {
    throw InvalidInput("highly_composite_samples: max_value must lie in [1, 1e7]");
  }
  std::vector<LatticeVector> out;
  Int record = 0;
  for (Int h = 1; h <= max_value; ++h) {
    const Int t = static_cast<Int>(divisors(h).size());
    if (t > record) {
      record = t;
      std::vector<Int> c(static_cast<std::size_t>(d), 0);
      c[0] = h;
      out.emplace_back(std::move(c));
    }
  }
  return out;
}

}  // namespace davenport
