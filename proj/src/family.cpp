#include "davenport/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "davenport/errors.hpp"

namespace davenport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidInput(std::string(what) + " must be finite");
}

// b^k for k >= 0 while b^k * scale stays within kMaxCoordinate; returns false on overflow.
bool checked_pow(Int b, int k, Int& out) {
  Int r = 1;
  for (int i = 0; i < k; ++i) {
    if (__builtin_mul_overflow(r, b, &r) || r > kMaxCoordinate) return false;
  }
  out = r;
  return true;
}

void push_term(TermBlock& block, const LatticeVector& n, double value, double norm,
               std::size_t cap) {
  if (block.size() >= cap) {
    throw ResourceLimit("support enumeration exceeds the element cap of " + std::to_string(cap));
  }
  block.coords.insert(block.coords.end(), n.coords().begin(), n.coords().end());
  block.values.push_back(value);
  block.norms.push_back(norm);
}

void push_term_1d(TermBlock& block, Int n, double value, std::size_t cap) {
  if (block.size() >= cap) {
    throw ResourceLimit("support enumeration exceeds the element cap of " + std::to_string(cap));
  }
  block.coords.push_back(n);
  block.values.push_back(value);
  block.norms.push_back(static_cast<double>(n));
}

// Integers n >= 1 with n in the window, as a half-open range [first, last].
std::pair<Int, Int> integer_range(const NormInterval& w) {
  double lo = w.lo_closed ? std::ceil(w.lo) : std::floor(w.lo) + 1.0;
  double hi = w.hi_closed ? std::floor(w.hi) : std::ceil(w.hi) - 1.0;
  lo = std::max(lo, 1.0);
  hi = std::min(hi, static_cast<double>(kMaxCoordinate));
  if (hi < lo) return {1, 0};
  return {static_cast<Int>(lo), static_cast<Int>(hi)};
}

// Sum of n^-beta over n > M for integer M >= 1.
double zeta_tail_bound(double M, double beta) {
  if (beta <= 1.0) return kInf;
  return std::pow(M, 1.0 - beta) / (beta - 1.0);
}

double zeta(double beta) { return std::riemann_zeta(beta); }

bool norm_less(const std::pair<LatticeVector, double>& x, const std::pair<LatticeVector, double>& y) {
  const double nx = x.first.norm(), ny = y.first.norm();
  if (nx != ny) return nx < ny;
  return x.first < y.first;
}

}  // namespace

CoefficientFamily CoefficientFamily::zero(int d) {
  if (d < 1) throw InvalidInput("dimension must be >= 1");
  return CoefficientFamily(d, Finite{});
}

CoefficientFamily CoefficientFamily::finite(int d,
                                            std::vector<std::pair<LatticeVector, double>> entries) {
  if (d < 1) throw InvalidInput("dimension must be >= 1");
  // A pair listed on both sides must agree with oddness.
  std::map<LatticeVector, double> seen;
  for (auto& [n, v] : entries) {
    if (n.dim() != d) throw InvalidInput("finite entry dimension mismatch: " + n.to_string());
    if (n.is_zero()) throw InvalidInput("finite entry at the zero frequency");
    require_finite(v, "finite entry value");
    const double pv = n.orientation() > 0 ? v : -v;
    const auto [it, inserted] = seen.emplace(n.positive_representative(), pv);
    if (!inserted && it->second != pv) {
      throw InvalidInput("finite family violates oddness at " + n.to_string());
    }
  }
  std::vector<std::pair<LatticeVector, double>> norm;
  for (auto& [k, v] : seen) {
    if (v != 0.0) norm.emplace_back(k, v);
  }
  std::sort(norm.begin(), norm.end(), norm_less);
  return CoefficientFamily(d, Finite{std::move(norm)});
}

CoefficientFamily CoefficientFamily::hecke(double beta) {
  require_finite(beta, "beta");
  if (beta <= 0.0) throw InvalidInput("hecke requires beta > 0");
  return CoefficientFamily(1, Hecke{beta});
}

CoefficientFamily CoefficientFamily::l_adic(Int l, double alpha) {
  require_finite(alpha, "alpha");
  if (!is_prime(l)) throw InvalidInput("l_adic requires a prime base");
  if (alpha <= 0.0) throw InvalidInput("l_adic requires alpha > 0");
  return CoefficientFamily(1, LAdic{l, alpha});
}

CoefficientFamily CoefficientFamily::power_lacunary(Int base, LatticeVector direction,
                                                    double gamma) {
  require_finite(gamma, "gamma");
  if (base < 2) throw InvalidInput("power_lacunary requires base >= 2");
  if (direction.dim() < 1 || direction.is_zero()) {
    throw InvalidInput("power_lacunary requires a nonzero direction");
  }
  const int d = direction.dim();
  return CoefficientFamily(d, PowerLacunary{base, std::move(direction), gamma});
}

CoefficientFamily CoefficientFamily::f_beta(double beta) {
  require_finite(beta, "beta");
  if (beta <= 1.0) throw InvalidInput("f_beta requires beta > 1");
  return CoefficientFamily(1, FBeta{beta});
}

std::string CoefficientFamily::kind_name() const {
  return std::visit(Overloaded{[](const Finite&) { return std::string("finite"); },
                               [](const Hecke&) { return std::string("hecke"); },
                               [](const LAdic&) { return std::string("l_adic"); },
                               [](const PowerLacunary&) { return std::string("power_lacunary"); },
                               [](const FBeta&) { return std::string("f_beta"); }},
                    kind_);
}

double CoefficientFamily::value_1d(Int n) const {
  if (n == 0) throw InvalidInput("value_at: zero frequency");
  if (d_ != 1) return value_at(LatticeVector{n});
  const double s = n > 0 ? 0.5 : -0.5;
  const Int m = n > 0 ? n : -n;
  return std::visit(
      Overloaded{
          [&](const Hecke& h) { return s * std::pow(static_cast<double>(m), -h.beta); },
          [&](const FBeta& f) {
            return m == 1 ? s * (1.0 - zeta(f.beta)) : s * std::pow(static_cast<double>(m), -f.beta);
          },
          [&](const LAdic& la) {
            int k = 0;
            Int r = m;
            while (r % la.l == 0) {
              r /= la.l;
              ++k;
            }
            return (r == 1 && k >= 1) ? s * std::pow(static_cast<double>(k), -la.alpha) : 0.0;
          },
          [&](const auto&) { return value_at(LatticeVector{n}); }},
      kind_);
}

double CoefficientFamily::value_at(const LatticeVector& n) const {
  if (n.dim() != d_) throw InvalidInput("value_at: dimension mismatch");
  if (n.is_zero()) throw InvalidInput("value_at: zero frequency");
  return std::visit(
      Overloaded{
          [&](const Finite& f) {
            const double s = n.orientation() > 0 ? 1.0 : -1.0;
            const LatticeVector p = n.positive_representative();
            for (const auto& [k, v] : f.entries) {
              if (k == p) return s * v;
            }
            return 0.0;
          },
          [&](const PowerLacunary& pl) {
            // n = +-base^k * direction for some k >= 0, checked componentwise.
            Int ratio = 0;
            for (int i = 0; i < d_; ++i) {
              const Int di = pl.direction[i];
              const Int ni = n[i];
              if (di == 0) {
                if (ni != 0) return 0.0;
                continue;
              }
              if (ni % di != 0) return 0.0;
              const Int r = ni / di;
              if (r == 0 || (ratio != 0 && r != ratio)) return 0.0;
              ratio = r;
            }
            Int r = ratio < 0 ? -ratio : ratio;
            while (r % pl.base == 0) r /= pl.base;
            if (r != 1) return 0.0;
            return (ratio > 0 ? 0.5 : -0.5) * std::pow(n.norm(), -pl.gamma);
          },
          [&](const auto&) { return value_1d(n[0]); }},
      kind_);
}

bool CoefficientFamily::dense_1d() const {
  return std::holds_alternative<Hecke>(kind_) || std::holds_alternative<FBeta>(kind_);
}

bool CoefficientFamily::is_zero() const {
  const auto* f = std::get_if<Finite>(&kind_);
  return f && f->entries.empty();
}

bool CoefficientFamily::summable() const {
  return std::visit(Overloaded{[](const Finite&) { return true; },
                               [](const Hecke& h) { return h.beta > 1.0; },
                               [](const LAdic& la) { return la.alpha > 1.0; },
                               [](const PowerLacunary& pl) { return pl.gamma > 0.0; },
                               [](const FBeta& f) { return f.beta > 1.0; }},
                    kind_);
}

void CoefficientFamily::require_summable(const char* op) const {
  if (!summable()) {
    throw InvalidInput(std::string(op) + ": family coefficients are not absolutely summable");
  }
}

double CoefficientFamily::max_support_norm() const {
  if (const auto* f = std::get_if<Finite>(&kind_)) {
    return f->entries.empty() ? 0.0 : f->entries.back().first.norm();
  }
  return kInf;
}

TermBlock CoefficientFamily::terms(const NormInterval& w, std::size_t cap) const {
  TermBlock block;
  block.d = d_;
  std::visit(
      Overloaded{
          [&](const Finite& f) {
            for (const auto& [n, v] : f.entries) {
              const double r = n.norm();
              if (w.contains(r)) push_term(block, n, v, r, cap);
            }
          },
          [&](const Hecke& h) {
            const auto [first, last] = integer_range(w);
            if (last >= first && static_cast<std::size_t>(last - first + 1) > cap) {
              throw ResourceLimit("support enumeration exceeds the element cap of " +
                                  std::to_string(cap));
            }
            if (last >= first) {
              const auto count = static_cast<std::size_t>(last - first + 1);
              block.coords.reserve(count);
              block.values.reserve(count);
              block.norms.reserve(count);
            }
            for (Int n = first; n <= last; ++n) {
              push_term_1d(block, n, 0.5 * std::pow(static_cast<double>(n), -h.beta), cap);
            }
          },
          [&](const FBeta& fb) {
            const auto [first, last] = integer_range(w);
            if (last >= first && static_cast<std::size_t>(last - first + 1) > cap) {
              throw ResourceLimit("support enumeration exceeds the element cap of " +
                                  std::to_string(cap));
            }
            const double b1 = 1.0 - zeta(fb.beta);
            for (Int n = first; n <= last; ++n) {
              const double b = n == 1 ? b1 : std::pow(static_cast<double>(n), -fb.beta);
              push_term_1d(block, n, 0.5 * b, cap);
            }
          },
          [&](const LAdic& la) {
            Int n = la.l;
            for (int k = 1;; ++k) {
              const double r = static_cast<double>(n);
              if (w.contains(r)) {
                push_term_1d(block, n, 0.5 * std::pow(static_cast<double>(k), -la.alpha), cap);
              } else if (!(w.hi_closed ? r <= w.hi : r < w.hi)) {
                break;
              }
              if (__builtin_mul_overflow(n, la.l, &n) || n > kMaxCoordinate) break;
            }
          },
          [&](const PowerLacunary& pl) {
            const int s = pl.direction.orientation();
            const double dn = pl.direction.norm();
            for (int k = 0;; ++k) {
              Int bk = 0;
              if (!checked_pow(pl.base, k, bk) || bk > kMaxCoordinate / std::max<Int>(1, pl.direction.max_abs())) {
                break;
              }
              const double r = static_cast<double>(bk) * dn;
              if (w.contains(r)) {
                LatticeVector n = pl.direction.scaled(bk);
                if (s < 0) n = -n;
                push_term(block, n, s * 0.5 * std::pow(r, -pl.gamma), r, cap);
              } else if (!(w.hi_closed ? r <= w.hi : r < w.hi)) {
                break;
              }
            }
          }},
      kind_);
  return block;
}

std::vector<LatticeVector> CoefficientFamily::support_in_ball(double R, std::size_t cap) const {
  if (!(R > 0.0)) throw InvalidInput("support_in_ball: R must be positive");
  const TermBlock block = terms(NormInterval::ball(R), cap);
  std::vector<LatticeVector> out;
  out.reserve(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) out.push_back(block.vector(i));
  return out;
}

double CoefficientFamily::positive_tail(double N) const {
  return std::visit(
      Overloaded{
          [&](const Finite& f) {
            double s = 0.0;
            for (auto it = f.entries.rbegin(); it != f.entries.rend(); ++it) {
              if (it->first.norm() > N) s += std::fabs(it->second);
            }
            return s;
          },
          [&](const Hecke& h) {
            if (h.beta <= 1.0) return kInf;
            if (N < 1.0) return 0.5 * zeta(h.beta);
            return 0.5 * zeta_tail_bound(std::floor(N), h.beta);
          },
          [&](const FBeta& f) {
            if (N < 1.0) return 0.5 * (std::fabs(1.0 - zeta(f.beta)) + zeta(f.beta) - 1.0);
            return 0.5 * zeta_tail_bound(std::floor(N), f.beta);
          },
          [&](const LAdic& la) {
            if (la.alpha <= 1.0) return kInf;
            // First k with l^k > N.
            double K = 1.0;
            for (double p = static_cast<double>(la.l); p <= N; p *= static_cast<double>(la.l)) K += 1.0;
            return 0.5 * (std::pow(K, -la.alpha) + std::pow(K, 1.0 - la.alpha) / (la.alpha - 1.0));
          },
          [&](const PowerLacunary& pl) {
            if (pl.gamma <= 0.0) return kInf;
            double r = pl.direction.norm();
            while (r <= N) r *= static_cast<double>(pl.base);
            return 0.5 * std::pow(r, -pl.gamma) /
                   (1.0 - std::pow(static_cast<double>(pl.base), -pl.gamma));
          }},
      kind_);
}

double CoefficientFamily::envelope_beyond(double N) const {
  return std::visit(
      Overloaded{
          [&](const Finite& f) {
            double m = 0.0;
            for (const auto& [n, v] : f.entries) {
              if (n.norm() > N) m = std::max(m, std::fabs(v));
            }
            return m;
          },
          [&](const Hecke& h) {
            return 0.5 * std::pow(std::max(1.0, std::floor(N) + 1.0), -h.beta);
          },
          [&](const FBeta& f) {
            if (N < 1.0) return 0.5 * std::max(std::fabs(1.0 - zeta(f.beta)), std::pow(2.0, -f.beta));
            return 0.5 * std::pow(std::floor(N) + 1.0, -f.beta);
          },
          [&](const LAdic& la) {
            double K = 1.0;
            for (double p = static_cast<double>(la.l); p <= N; p *= static_cast<double>(la.l)) K += 1.0;
            return 0.5 * std::pow(K, -la.alpha);
          },
          [&](const PowerLacunary& pl) {
            double r = pl.direction.norm();
            while (r <= N) r *= static_cast<double>(pl.base);
            return pl.gamma >= 0.0 ? 0.5 * std::pow(r, -pl.gamma) : kInf;
          }},
      kind_);
}

double CoefficientFamily::ray_tail(double q_norm, Int L) const {
  if (L < 1) return positive_tail(0.0);
  const double Ld = static_cast<double>(L);
  if (const auto* h = std::get_if<Hecke>(&kind_)) {
    if (h->beta <= 1.0) return kInf;
    return 0.5 * std::pow(q_norm, -h->beta) * zeta_tail_bound(Ld, h->beta);
  }
  if (const auto* f = std::get_if<FBeta>(&kind_)) {
    return 0.5 * std::pow(q_norm, -f->beta) * zeta_tail_bound(Ld, f->beta);
  }
  return positive_tail(Ld * q_norm);
}

nlohmann::json CoefficientFamily::to_json() const {
  nlohmann::json j;
  j["d"] = d_;
  j["kind"] = kind_name();
  std::visit(Overloaded{[&](const Finite& f) {
                          nlohmann::json e = nlohmann::json::array();
                          for (const auto& [n, v] : f.entries) e.push_back({n.coords(), v});
                          j["entries"] = e;
                        },
                        [&](const Hecke& h) { j["beta"] = h.beta; },
                        [&](const FBeta& fb) { j["beta"] = fb.beta; },
                        [&](const LAdic& la) {
                          j["l"] = la.l;
                          j["alpha"] = la.alpha;
                        },
                        [&](const PowerLacunary& pl) {
                          j["base"] = pl.base;
                          j["direction"] = pl.direction.coords();
                          j["gamma"] = pl.gamma;
                        }},
             kind_);
  return j;
}

CoefficientFamily CoefficientFamily::from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw InvalidInput("family config must be a JSON object");
    const std::string kind = j.at("kind").get<std::string>();
    const int d = j.value("d", 1);
    if (d < 1) throw InvalidInput("family dimension must be >= 1");
    auto one_dim = [&](const char* k) {
      if (d != 1) throw InvalidInput(std::string(k) + " families are one-dimensional");
    };
    if (kind == "zero") return zero(d);
    if (kind == "finite" || kind == "finite_support") {
      std::vector<std::pair<LatticeVector, double>> entries;
      for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 2) throw InvalidInput("finite entry must be [[coords], value]");
        entries.emplace_back(LatticeVector(e[0].get<std::vector<Int>>()), e[1].get<double>());
      }
      return finite(d, std::move(entries));
    }
    if (kind == "hecke") {
      one_dim("hecke");
      return hecke(j.at("beta").get<double>());
    }
    if (kind == "f_beta") {
      one_dim("f_beta");
      return f_beta(j.at("beta").get<double>());
    }
    if (kind == "l_adic") {
      one_dim("l_adic");
      return l_adic(j.at("l").get<Int>(), j.at("alpha").get<double>());
    }
    if (kind == "power_lacunary") {
      LatticeVector dir(j.at("direction").get<std::vector<Int>>());
      if (dir.dim() != d) throw InvalidInput("power_lacunary direction dimension mismatch");
      return power_lacunary(j.at("base").get<Int>(), std::move(dir), j.at("gamma").get<double>());
    }
    throw InvalidInput("unknown family kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed family config: ") + e.what());
  }
}

double f_gamma_norm(const CoefficientFamily& a, double gamma, double R) {
  if (!(R > 0.0)) throw InvalidInput("f_gamma_norm: R must be positive");
  const TermBlock t = a.terms(NormInterval::ball(R));
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    m = std::max(m, std::pow(t.norms[i], gamma) * std::fabs(t.values[i]));
  }
  return m;
}

GammaEstimate gamma_a_estimate(const CoefficientFamily& a, double r0, double r) {
  if (!(r0 >= 1.0 && r0 < r)) throw InvalidInput("gamma_a_estimate: need 1 <= R0 < R");
  GammaEstimate out{kInf, true, r0, r};
  const TermBlock t = a.terms(NormInterval::shell(r0, r));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.norms[i] <= 1.0 || t.values[i] == 0.0) continue;
    out.empty = false;
    out.value = std::min(out.value, -std::log(std::fabs(t.values[i])) / std::log(t.norms[i]));
  }
  return out;
}

namespace {

double support_count(const CoefficientFamily& a, double R) {
  if (a.dense_1d()) return std::max(0.0, std::ceil(R) - 1.0);
  return static_cast<double>(a.terms(NormInterval::ball(R)).size());
}

}  // namespace

SparsityReport sparsity_exponent(const CoefficientFamily& a, double R, int scales,
                                 double sparse_slope) {
  if (!(R >= 2.0)) throw InvalidInput("sparsity_exponent: R must be >= 2");
  if (scales < 2) throw InvalidInput("sparsity_exponent: need at least two scales");
  SparsityReport rep;
  std::vector<double> counts;
  for (int k = scales - 1; k >= 0; --k) {
    const double Rk = std::max(2.0, R / std::ldexp(1.0, k));
    const double c = 2.0 * support_count(a, Rk);
    rep.radii.push_back(Rk);
    counts.push_back(c);
    rep.values.push_back(c > 0.0 ? std::log(c) / std::log(Rk) : 0.0);
  }
  rep.value = rep.values.back();
  rep.empty_support = counts.back() == 0.0;
  if (rep.empty_support) {
    rep.sparse = true;
    return rep;
  }
  const double c0 = std::max(counts.front(), 1.0);
  const double dr = std::log(rep.radii.back()) - std::log(rep.radii.front());
  rep.growth_slope = dr > 0.0 ? (std::log(counts.back()) - std::log(c0)) / dr : 0.0;
  bool nonincreasing = true;
  for (std::size_t i = 1; i < rep.values.size(); ++i) {
    if (rep.values[i] > rep.values[i - 1] + 1e-12) nonincreasing = false;
  }
  rep.sparse = nonincreasing && rep.growth_slope < sparse_slope;
  return rep;
}

SlowDecayResult slow_decay_test(const CoefficientFamily& a, const std::vector<LatticeVector>& Q,
                                double R, double epsilon) {
  if (!(R >= 2.0)) throw InvalidInput("slow_decay_test: R must be >= 2");
  SlowDecayResult out;
  out.ratio = kInf;
  const double r0 = std::sqrt(R);
  for (const auto& q : Q) {
    const double qn = q.norm();
    if (qn < r0 || qn <= 1.0) continue;
    const double v = std::fabs(a.value_at(q));
    if (v == 0.0) continue;
    const double ratio = -std::log(v) / std::log(qn);
    if (ratio < out.ratio) {
      out.ratio = ratio;
      out.witness = q;
    }
  }
  if (!out.witness) return out;
  out.status = out.ratio < epsilon ? Tristate::yes : Tristate::no;
  return out;
}

}  // namespace davenport
