#include "davenport/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "davenport/errors.hpp"
#include "davenport/json_io.hpp"

namespace davenport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_point(const std::vector<double>& x0, int d, const char* op) {
  if (static_cast<int>(x0.size()) != d) throw InvalidInput(std::string(op) + ": point dimension mismatch");
  for (double v : x0) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(op) + ": point must be finite");
  }
}

// q.x0 in extended precision.
long double dot_ld(const Int* q, const std::vector<double>& x0) {
  long double t = 0.0L;
  for (std::size_t i = 0; i < x0.size(); ++i) t += static_cast<long double>(q[i]) * static_cast<long double>(x0[i]);
  return t;
}

long double dot_ld(const LatticeVector& q, const std::vector<double>& x0) {
  return dot_ld(q.coords().data(), x0);
}

long double dist_to_integer(long double t) {
  const long double f = t - std::floor(t);
  return std::min(f, 1.0L - f);
}

Int floor_int(long double t) {
  if (!(std::fabs(t) < 0x1p62L)) throw NumericError("dot product exceeds the integer range");
  return static_cast<Int>(std::floor(t));
}

double coprime_distance_impl(long double t, Int g, Int K) {
  if (g == 1) return static_cast<double>(dist_to_integer(t));
  const Int fl = floor_int(t);
  for (Int k = std::max<Int>(K, 1);; k *= 2) {
    long double best = -1.0L;
    for (Int p = fl - k + 1; p <= fl + k; ++p) {
      if (gcd_int(p, g) != 1) continue;
      const long double dd = std::fabs(t - static_cast<long double>(p));
      if (best < 0.0L || dd < best) best = dd;
    }
    if (best >= 0.0L) return static_cast<double>(best);
  }
}

}  // namespace

double delta_n(const std::vector<double>& x0, const LatticeVector& n) {
  if (n.is_zero()) throw InvalidInput("delta_n: zero frequency");
  check_point(x0, n.dim(), "delta_n");
  return static_cast<double>(dist_to_integer(dot_ld(n, x0))) / n.norm();
}

double coprime_distance(const std::vector<double>& x0, const LatticeVector& q, Int K) {
  const Int g = gcd_vec(q);
  check_point(x0, q.dim(), "delta_P_q");
  return coprime_distance_impl(dot_ld(q, x0), g, K);
}

double delta_P_q(const std::vector<double>& x0, const LatticeVector& q, Int K) {
  return coprime_distance(x0, q, K) / q.norm();
}

namespace {

bool certain_nonzero(const LatticeMap::Entry& e) {
  return e.value != 0.0 && std::fabs(e.value) > e.tail;
}

}  // namespace

std::vector<DiscontinuityHit> discontinuity_query(const LatticeMap& A, const std::vector<double>& x0,
                                                  double radius) {
  if (A.parity() != Parity::odd) throw InvalidInput("discontinuity_query: jump maps are odd");
  check_point(x0, A.dimension(), "discontinuity_query");
  if (!(radius >= 0.0)) throw InvalidInput("discontinuity_query: radius must be >= 0");
  std::vector<DiscontinuityHit> hits;
  for (const auto& [q, e] : A.entries()) {
    if (!certain_nonzero(e)) continue;
    const long double t = dot_ld(q, x0);
    const double qn = q.norm();
    const Int g = gcd_vec(q);
    const long double reach = static_cast<long double>(radius) * qn + kHyperplaneTolerance;
    for (Int p = floor_int(std::ceil(t - reach)); static_cast<long double>(p) <= t + reach; ++p) {
      if (gcd_int(p, g) != 1) continue;
      const long double raw = std::fabs(t - static_cast<long double>(p));
      const double dist = raw <= kHyperplaneTolerance ? 0.0 : static_cast<double>(raw) / qn;
      if (dist <= radius) hits.push_back({HyperplaneIndex{p, q}, dist, std::fabs(e.value)});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const DiscontinuityHit& x, const DiscontinuityHit& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    const double nx = x.plane.q.norm(), ny = y.plane.q.norm();
    if (nx != ny) return nx < ny;
    if (x.plane.q != y.plane.q) return x.plane.q < y.plane.q;
    return x.plane.p < y.plane.p;
  });
  return hits;
}

UpperBound holder_upper_bound(const LatticeMap& A, const std::vector<double>& x0, double r0, double r) {
  if (A.parity() != Parity::odd) throw InvalidInput("holder_upper_bound: jump maps are odd");
  check_point(x0, A.dimension(), "holder_upper_bound");
  if (!(r0 < r)) throw InvalidInput("holder_upper_bound: need R0 < R");
  UpperBound out;
  out.value = kInf;
  for (const auto& [q, e] : A.entries()) {
    const double qn = q.norm();
    if (qn >= r || !certain_nonzero(e)) continue;
    const long double t = dot_ld(q, x0);
    const double D = coprime_distance_impl(t, gcd_vec(q), 1);
    if (D <= kHyperplaneTolerance) {
      out.value = 0.0;
      out.empty = false;
      out.on_discontinuity = HyperplaneIndex{static_cast<Int>(std::llround(static_cast<double>(t))), q};
      out.witness = q;
      return out;
    }
    if (qn < r0) continue;
    const double ratio = std::log(std::fabs(e.value)) / std::log(D / qn);
    out.empty = false;
    if (ratio < out.value) {
      out.value = ratio;
      out.witness = q;
    }
  }
  if (!out.empty) out.value = std::max(0.0, out.value);
  return out;
}

std::vector<double> dyadic_radii(int first, int last) {
  if (last < first) throw InvalidInput("dyadic_radii: last must be >= first");
  std::vector<double> r;
  for (int j = first; j <= last; ++j) r.push_back(std::ldexp(1.0, -j));
  return r;
}

EmpiricalFit empirical_exponent(const CoefficientFamily& a, const std::vector<double>& x0,
                                const std::vector<double>& radii, Detrend detrend,
                                const OscillationOptions& opts) {
  if (radii.size() < 5) throw InvalidInput("empirical_exponent: need at least 5 scales");
  check_point(x0, a.dimension(), "empirical_exponent");
  OscillationOptions o = opts;
  o.gradient.clear();
  if (detrend == Detrend::linear) o.gradient = affine_trend(a, x0, radii.front(), o);
  EmpiricalFit fit;
  fit.report = oscillation(a, x0, radii, o);
  fit.low_confidence = fit.report.any_low_confidence();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (fit.report.osc[i] > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(fit.report.osc[i]));
    }
  }
  if (lx.size() < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.low_confidence = true;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::string family_hash(const CoefficientFamily& a) {
  const std::string s = a.to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json ExponentEstimate::to_json() const {
  nlohmann::json j;
  j["point"] = point;
  j["formula_value"] = json_number(formula_value);
  j["upper_bound_value"] = json_number(upper_bound_value);
  j["empirical_value"] = empirical_value ? json_number(*empirical_value) : nlohmann::json(nullptr);
  if (empirical_fit) {
    j["empirical_fit"] = {{"slope", json_number(empirical_fit->slope)},
                          {"residual", json_number(empirical_fit->residual)},
                          {"low_confidence", empirical_fit->low_confidence},
                          {"oscillation", empirical_fit->report.to_json()}};
  }
  j["shells_used"] = {r0, r};
  j["on_discontinuity"] = on_discontinuity
                              ? nlohmann::json{{"p", on_discontinuity->p}, {"q", on_discontinuity->q.coords()}}
                              : nlohmann::json(nullptr);
  j["validity"] = validity == Validity::formula ? "formula" : "upper-bound-only";
  j["undetermined"] = undetermined;
  j["gamma_capped"] = gamma_capped;
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& s : trace) {
    tr.push_back({{"shell", {s.lo, s.hi}}, {"shell_inf", json_number(s.shell_inf)}, {"running_inf", json_number(s.running_inf)}});
  }
  j["trace"] = tr;
  j["notes"] = notes;
  j["family_hash"] = family_hash;
  return j;
}

ExponentAnalyzer::ExponentAnalyzer(const CoefficientFamily& a, double r0, double r, ExponentOptions opts)
    : a_(&a),
      r0_(r0),
      r_(r),
      opts_(std::move(opts)),
      jumps_(jump_operator(a, r, opts_.L_max)) {
  if (!(r0 >= 1.0 && r0 < r)) throw InvalidInput("holder_exponent: need 1 <= R0 < R");
  const LatticeMap maximal = maximal_operator(a, r, opts_.L_max);
  theta_ = theta_a_estimate(jumps_, maximal, std::sqrt(r));
  sparsity_ = sparsity_exponent(a, std::max(r, 2.0), 5, opts_.sparse_slope);
  gamma_ = gamma_a_estimate(a, r0, r);
  shell_ = a.terms(NormInterval::shell(r0, r));
  for (const auto& [q, e] : jumps_.entries()) {
    if (certain_nonzero(e)) certain_.emplace_back(q, std::fabs(e.value));
  }
  std::stable_sort(certain_.begin(), certain_.end(),
                   [](const auto& x, const auto& y) { return x.first.norm() < y.first.norm(); });
  valid_ = sparsity_.sparse && !theta_.jump_canceling;
  hash_ = family_hash(a);
}

std::optional<HyperplaneIndex> ExponentAnalyzer::nearby_discontinuity(const std::vector<double>& x0, double tol,
                                                                      double q_radius, bool scale_by_norm) const {
  for (const auto& [q, mag] : certain_) {
    const double qn = q.norm();
    if (qn >= q_radius) break;
    const long double t = dot_ld(q, x0);
    const long double k = std::nearbyint(t);
    if (std::fabs(t - k) <= (scale_by_norm ? tol * qn : tol) && gcd_int(floor_int(k), gcd_vec(q)) == 1) {
      return HyperplaneIndex{floor_int(k), q};
    }
  }
  return std::nullopt;
}

ExponentEstimate ExponentAnalyzer::estimate(const std::vector<double>& x0) const {
  check_point(x0, a_->dimension(), "holder_exponent");
  ExponentEstimate est;
  est.point = x0;
  est.r0 = r0_;
  est.r = r_;
  est.family_hash = hash_;
  est.validity = valid_ ? Validity::formula : Validity::upper_bound_only;
  if (!sparsity_.sparse) est.notes.push_back("support not sparse over the dyadic window");
  if (theta_.jump_canceling) est.notes.push_back("asymptotically jump canceling at this truncation");

  if (opts_.with_empirical) {
    EmpiricalFit fit = empirical_exponent(*a_, x0, opts_.empirical_radii, opts_.detrend, opts_.oscillation);
    est.empirical_value = fit.slope;
    if (fit.low_confidence) est.notes.push_back("empirical oscillation flagged low-confidence");
    est.empirical_fit = std::move(fit);
  }

  if (auto h = nearby_discontinuity(x0, opts_.tolerance, r_)) {
    est.on_discontinuity = h;
    est.formula_value = 0.0;
    est.upper_bound_value = 0.0;
    est.notes.push_back("point lies on a discontinuity hyperplane");
    return est;
  }

  double best = kInf;
  double running = kInf;
  double lo = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(r0_))));
  ShellTrace cur{lo, 2.0 * lo, kInf, kInf};
  for (std::size_t i = 0; i < shell_.size(); ++i) {
    const double nn = shell_.norms[i];
    while (nn >= cur.hi) {
      running = std::min(running, cur.shell_inf);
      cur.running_inf = running;
      est.trace.push_back(cur);
      cur = ShellTrace{cur.hi, 2.0 * cur.hi, kInf, kInf};
    }
    const long double t = dot_ld(shell_.at(i), x0);
    const double dist = static_cast<double>(dist_to_integer(t));
    if (dist <= opts_.tolerance) {
      est.undetermined = true;
      continue;
    }
    const double ratio = std::log(std::fabs(shell_.values[i])) / std::log(dist / nn);
    best = std::min(best, ratio);
    cur.shell_inf = std::min(cur.shell_inf, ratio);
  }
  running = std::min(running, cur.shell_inf);
  cur.running_inf = running;
  est.trace.push_back(cur);
  if (est.undetermined) est.notes.push_back("point meets a support hyperplane without a certain jump");

  est.formula_value = std::isfinite(best) ? std::max(0.0, best) : kInf;
  if (valid_ && !gamma_.empty && est.formula_value > gamma_.value) {
    est.formula_value = gamma_.value;
    est.gamma_capped = true;
  }
  est.upper_bound_value = holder_upper_bound(jumps_, x0, r0_, r_).value;
  return est;
}

ExponentEstimate holder_exponent(const CoefficientFamily& a, const std::vector<double>& x0, double r0, double r,
                                 bool with_empirical, const ExponentOptions& opts) {
  ExponentOptions o = opts;
  o.with_empirical = with_empirical;
  return ExponentAnalyzer(a, r0, r, std::move(o)).estimate(x0);
}

KappaEstimate kappa_estimate(const std::vector<double>& x0, const std::vector<LatticeVector>& Q, double r0,
                             double r) {
  KappaEstimate out;
  out.value = -kInf;
  for (const auto& q : Q) {
    const double qn = q.norm();
    if (qn < r0 || qn >= r || qn <= 1.0) continue;
    const double D = coprime_distance(x0, q);
    if (D <= kHyperplaneTolerance) {
      out.distance_zero = true;
      out.indeterminate = false;
      continue;
    }
    const double v = std::log(D) / std::log(qn);
    out.indeterminate = false;
    if (v > out.value) {
      out.value = v;
      out.witness = q;
    }
  }
  return out;
}

RegularityVerdict is_regular_set(const std::vector<LatticeVector>& Q,
                                 const std::vector<std::vector<double>>& points, double r0, double r,
                                 double margin, double suspect_threshold) {
  RegularityVerdict v;
  bool any = false;
  for (const auto& x : points) {
    const KappaEstimate k = kappa_estimate(x, Q, r0, r);
    if (k.indeterminate) continue;
    any = true;
    if (v.worst_point.empty() || k.value > v.worst_kappa) {
      v.worst_kappa = k.value;
      v.worst_point = x;
    }
    if (!(k.value < 1.0 - margin)) v.regular = false;
  }
  if (!any) {
    v.finite_set = true;
    v.regular = true;
    return v;
  }
  v.suspect = v.worst_kappa > suspect_threshold;
  return v;
}

}  // namespace davenport
