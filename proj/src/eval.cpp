#include "davenport/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#include "davenport/errors.hpp"

namespace davenport {

namespace detail {

double sawtooth_large(double t) {
  if (!std::isfinite(t)) throw NumericError("sawtooth: non-finite argument");
  // Doubles at or above 2^52 are integers; between 2^51 and 2^52 the spacing is 1/2.
  if (std::fabs(t) >= 0x1p52) return 0.0;
  const double r = t - std::nearbyint(t);
  return r > 0.0 ? r - 0.5 : (r < 0.0 ? r + 0.5 : 0.0);
}

}  // namespace detail

SeriesEvaluator::SeriesEvaluator(const CoefficientFamily& a, std::size_t max_terms)
    : a_(&a), max_terms_(max_terms), d_(a.dimension()) {
  a.require_summable("partial_sum");
  tail_ = a.positive_tail(0.0);
}

bool SeriesEvaluator::can_extend(double N) const {
  if (N > 0x1p62) return false;
  if (a_->dense_1d()) return std::floor(N) <= static_cast<double>(max_terms_);
  return true;
}

void SeriesEvaluator::extend(double N) {
  if (!(N >= 0.0) || !std::isfinite(N)) throw InvalidInput("partial_sum: N must be finite and >= 0");
  if (N <= N_) return;
  const TermBlock t = a_->terms(NormInterval{N_, false, N, true}, max_terms_ - w_.size());
  n_.reserve(n_.size() + t.coords.size());
  w_.reserve(w_.size() + t.size());
  for (Int c : t.coords) n_.push_back(static_cast<double>(c));
  for (double v : t.values) w_.push_back(2.0 * v);
  N_ = N;
  tail_ = a_->positive_tail(N);
}

double SeriesEvaluator::evaluate_range(const double* x, std::size_t begin, std::size_t end) const {
  double s = 0.0;
  if (d_ == 1) {
    const double x0 = x[0];
    for (std::size_t i = begin; i < end; ++i) s += w_[i] * sawtooth(n_[i] * x0);
    return s;
  }
  const auto d = static_cast<std::size_t>(d_);
  for (std::size_t i = begin; i < end; ++i) {
    const double* n = n_.data() + i * d;
    double t = 0.0;
    for (std::size_t k = 0; k < d; ++k) t += n[k] * x[k];
    s += w_[i] * sawtooth(t);
  }
  return s;
}

PartialSum partial_sum(const CoefficientFamily& a, double N, const std::vector<double>& x,
                       std::size_t max_terms) {
  if (static_cast<int>(x.size()) != a.dimension()) throw InvalidInput("partial_sum: dimension mismatch");
  SeriesEvaluator ev(a, max_terms);
  ev.extend(N);
  const double v = ev.evaluate(x.data());
  if (!std::isfinite(v)) throw NumericError("partial_sum: non-finite value");
  return {v, ev.tail(), ev.term_count()};
}

void GridSpec::validate(std::size_t cap) const {
  const auto ud = static_cast<std::size_t>(d);
  if (d < 1) throw InvalidInput("grid: dimension must be >= 1");
  if (origin.size() != ud || extent.size() != ud || counts.size() != ud) {
    throw InvalidInput("grid: origin, extent and counts must have one entry per axis");
  }
  double total = 1.0;
  for (std::size_t i = 0; i < ud; ++i) {
    if (!std::isfinite(origin[i])) throw InvalidInput("grid: origin must be finite");
    if (!(extent[i] > 0.0) || !std::isfinite(extent[i])) throw InvalidInput("grid: extent must be positive");
    if (counts[i] < 2) throw InvalidInput("grid: counts must be >= 2 per axis");
    total *= counts[i];
  }
  if (total > static_cast<double>(cap)) {
    throw ResourceLimit("grid node count exceeds the cap of " + std::to_string(cap));
  }
}

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (int c : counts) t *= static_cast<std::size_t>(c);
  return t;
}

double GridSpec::coordinate(int axis, int i) const {
  const auto a = static_cast<std::size_t>(axis);
  const double denom = closed ? counts[a] - 1 : counts[a];
  return origin[a] + extent[a] * (static_cast<double>(i) / denom);
}

std::vector<int> GridSpec::index(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    const auto c = static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
    idx[static_cast<std::size_t>(k)] = static_cast<int>(flat % c);
    flat /= c;
  }
  return idx;
}

std::vector<double> GridSpec::node(std::size_t flat) const {
  const auto idx = index(flat);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = coordinate(k, idx[static_cast<std::size_t>(k)]);
  return x;
}

nlohmann::json GridSpec::to_json() const {
  return {{"d", d}, {"origin", origin}, {"extent", extent}, {"counts", counts}, {"closed", closed}};
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  try {
    GridSpec g;
    g.origin = j.at("origin").get<std::vector<double>>();
    g.d = j.value("d", static_cast<int>(g.origin.size()));
    g.extent = j.at("extent").get<std::vector<double>>();
    g.counts = j.at("counts").get<std::vector<int>>();
    g.closed = j.value("closed", false);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed grid: ") + e.what());
  }
}

GridValues grid_eval(const CoefficientFamily& a, double N, const GridSpec& g, std::size_t max_terms) {
  g.validate();
  if (g.d != a.dimension()) throw InvalidInput("grid_eval: grid and family dimensions differ");
  SeriesEvaluator ev(a, max_terms);
  ev.extend(N);
  GridValues out{g, N, ev.tail(), std::vector<double>(g.total())};
  const auto total = static_cast<std::int64_t>(g.total());
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto x = g.node(static_cast<std::size_t>(i));
    const double v = ev.evaluate(x.data());
    out.values[static_cast<std::size_t>(i)] = v;
    bad = bad || !std::isfinite(v);
  }
  if (bad) throw NumericError("grid_eval: non-finite value");
  return out;
}

namespace {

void put_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

void write_grid_csv(std::ostream& os, const GridValues& v) {
  for (int k = 0; k < v.grid.d; ++k) os << 'x' << (k + 1) << ',';
  os << "value,tail_bound\n";
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    for (double c : v.grid.node(i)) {
      put_number(os, c);
      os << ',';
    }
    put_number(os, v.values[i]);
    os << ',';
    put_number(os, v.tail_bound);
    os << '\n';
  }
}

nlohmann::json grid_sidecar(const GridValues& v, const CoefficientFamily& a) {
  return {{"grid", v.grid.to_json()}, {"family", a.to_json()}, {"N", v.N}, {"tail_bound", v.tail_bound}};
}

std::vector<std::vector<double>> ball_samples(int d, int count, std::uint64_t seed) {
  if (d < 1 || count < 1) throw InvalidInput("ball_samples: need d >= 1 and count >= 1");
  // Generalized golden ratio: the positive root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::vector<double> alpha(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) alpha[static_cast<std::size_t>(k)] = std::fmod(std::pow(1.0 / phi, k + 1), 1.0);
  std::vector<std::vector<double>> out;
  out.emplace_back(static_cast<std::size_t>(d), 0.0);
  for (std::uint64_t i = seed + 1; static_cast<int>(out.size()) < count; ++i) {
    std::vector<double> p(static_cast<std::size_t>(d));
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      double u = std::fmod(0.5 + alpha[static_cast<std::size_t>(k)] * static_cast<double>(i), 1.0);
      const double c = 2.0 * u - 1.0;
      p[static_cast<std::size_t>(k)] = c;
      r2 += c * c;
    }
    if (r2 <= 1.0) out.push_back(std::move(p));
  }
  return out;
}

bool OscillationReport::any_low_confidence() const {
  return std::any_of(low_confidence.begin(), low_confidence.end(), [](bool b) { return b; });
}

nlohmann::json OscillationReport::to_json() const {
  std::vector<bool> lc(low_confidence.begin(), low_confidence.end());
  return {{"center", center}, {"radii", radii}, {"osc", osc}, {"N", N}, {"tail", tail}, {"low_confidence", lc}};
}

namespace {

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw InvalidInput("oscillation: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw InvalidInput("oscillation: radii must be positive");
    if (i && !(radii[i] < radii[i - 1])) throw InvalidInput("oscillation: radii must decrease");
  }
}

void add_range(const SeriesEvaluator& ev, const std::vector<double>& pts, int d,
               std::size_t begin, std::size_t end, std::vector<double>& vals) {
  const auto n = static_cast<std::int64_t>(vals.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    vals[k] += ev.evaluate_range(pts.data() + k * static_cast<std::size_t>(d), begin, end);
  }
}

}  // namespace

OscillationReport oscillation(const CoefficientFamily& a, const std::vector<double>& x0,
                              const std::vector<double>& radii, const OscillationOptions& opts) {
  const int d = a.dimension();
  if (static_cast<int>(x0.size()) != d) throw InvalidInput("oscillation: center dimension mismatch");
  check_radii(radii);
  if (opts.samples_per_ball < 64) throw InvalidInput("oscillation: samples_per_ball must be >= 64");
  if (!opts.gradient.empty() && static_cast<int>(opts.gradient.size()) != d) {
    throw InvalidInput("oscillation: gradient dimension mismatch");
  }
  SeriesEvaluator ev(a, opts.max_terms);
  ev.extend(std::min(opts.n_start, opts.max_norm));
  const auto unit = ball_samples(d, opts.samples_per_ball, opts.seed);
  const std::size_t S = unit.size();

  OscillationReport rep;
  rep.center = x0;
  for (double r : radii) {
    std::vector<double> pts(S * static_cast<std::size_t>(d));
    std::vector<double> trend(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      for (int k = 0; k < d; ++k) {
        const double off = r * unit[s][static_cast<std::size_t>(k)];
        pts[s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = x0[static_cast<std::size_t>(k)] + off;
        if (!opts.gradient.empty()) trend[s] += opts.gradient[static_cast<std::size_t>(k)] * off;
      }
    }
    std::vector<double> vals(S, 0.0);
    add_range(ev, pts, d, 0, ev.term_count(), vals);
    bool low = false;
    double osc = 0.0;
    for (;;) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t s = 0; s < S; ++s) {
        const double v = vals[s] - trend[s];
        if (!std::isfinite(v)) throw NumericError("oscillation: non-finite partial sum");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      osc = hi - lo;
      if (2.0 * ev.tail() <= opts.rel_tail_tolerance * osc || ev.tail() == 0.0) break;
      const double next = 2.0 * ev.N();
      if (next > opts.max_norm || !ev.can_extend(next)) {
        low = true;
        break;
      }
      const std::size_t old = ev.term_count();
      try {
        ev.extend(next);
      } catch (const ResourceLimit&) {
        low = true;
        break;
      }
      add_range(ev, pts, d, old, ev.term_count(), vals);
    }
    rep.radii.push_back(r);
    rep.osc.push_back(osc);
    rep.N.push_back(ev.N());
    rep.tail.push_back(ev.tail());
    rep.low_confidence.push_back(low);
  }
  return rep;
}

std::vector<double> affine_trend(const CoefficientFamily& a, const std::vector<double>& x0,
                                 double radius, const OscillationOptions& opts) {
  const int d = a.dimension();
  OscillationOptions o = opts;
  o.gradient.clear();
  const OscillationReport rep = oscillation(a, x0, {radius}, o);
  SeriesEvaluator ev(a, opts.max_terms);
  ev.extend(rep.N.front());
  const auto unit = ball_samples(d, 4 * opts.samples_per_ball, opts.seed);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(unit.size()), d + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(unit.size()));
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < unit.size(); ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    X(row, 0) = 1.0;
    for (int k = 0; k < d; ++k) {
      const double off = radius * unit[s][static_cast<std::size_t>(k)];
      p[static_cast<std::size_t>(k)] = x0[static_cast<std::size_t>(k)] + off;
      X(row, k + 1) = off;
    }
    y(row) = ev.evaluate(p.data());
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  std::vector<double> g(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) g[static_cast<std::size_t>(k)] = beta(k + 1);
  return g;
}

JumpEstimate jump_magnitude_estimate(const CoefficientFamily& a, const std::vector<double>& x0,
                                     const std::vector<double>& radii, const OscillationOptions& opts) {
  JumpEstimate est;
  est.report = oscillation(a, x0, radii, opts);
  est.value = est.report.osc.back();
  if (est.report.osc.size() >= 2) {
    est.last_change = est.report.osc[est.report.osc.size() - 2] - est.value;
  }
  est.low_confidence = est.report.any_low_confidence();
  return est;
}

}  // namespace davenport
