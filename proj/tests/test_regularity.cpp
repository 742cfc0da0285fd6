#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "davenport/errors.hpp"
#include "davenport/regularity.hpp"
#include "oracles.hpp"

using namespace davenport;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const double kSilver = std::sqrt(2.0) - 1.0;

CoefficientFamily lacunary2() { return CoefficientFamily::power_lacunary(2, {1, 0}, 0.5); }

// Powers of two with a_n = (1/2)(1 + log n)^-2.
CoefficientFamily slow_family(int kmax) {
  std::vector<std::pair<LatticeVector, double>> e;
  for (int k = 0; k <= kmax; ++k) {
    const Int n = Int{1} << k;
    e.push_back({{n}, 0.5 / std::pow(1.0 + std::log(static_cast<double>(n)), 2.0)});
  }
  return CoefficientFamily::finite(1, e);
}

}  // namespace

TEST_CASE("delta_n") {
  CHECK(delta_n({0.3, 0.7}, {1, 0}) == doctest::Approx(0.3));
  CHECK(delta_n({0.3, 0.7}, {1, 1}) <= 1e-15);
  CHECK(delta_n({0.25, 0.1}, {2, 1}) == doctest::Approx(0.4 / std::sqrt(5.0)));
  CHECK_THROWS_AS(delta_n({0.1, 0.2}, {0, 0}), InvalidInput);
}

TEST_CASE("delta_P_q") {
  CHECK(delta_P_q({0.37, 0.2}, {1, 0}) == doctest::Approx(delta_n({0.37, 0.2}, {1, 0})));
  CHECK(delta_P_q({0.1, 0.5}, {2, 0}) == doctest::Approx(0.4));
  CHECK(delta_P_q({0.5, 0.25}, {2, 4}) == doctest::Approx(1.0 / std::sqrt(20.0)));
  // Primorial 30030 around an integer with a coprime gap.
  const double x = 0.5 - 1.0 / (2.0 * 30030.0);
  CHECK(coprime_distance({x}, {30030}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(delta_P_q({0.1}, {0}), InvalidInput);
}

TEST_CASE("distance invariants") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<Int> ui(-40, 40);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    const LatticeVector n{ui(rng), ui(rng)};
    if (n.is_zero()) continue;
    const double dn = delta_n(x, n);
    CHECK(dn <= 0.5 / n.norm() + 1e-15);
    // Periodicity: shifting by an integer vector keeps n.x mod 1 up to rounding.
    CHECK(delta_n({x[0] + 3.0, x[1] - 1.0}, n) == doctest::Approx(dn).scale(1e-12));
    const double dp = delta_P_q(x, n);
    CHECK(dp >= dn - 1e-15);
    if (gcd_vec(n) == 1) CHECK(dp == doctest::Approx(dn).scale(1e-15));
  }
}

TEST_CASE("discontinuity_query") {
  const LatticeMap A = jump_operator(CoefficientFamily::hecke(2.0), 64, 100000);
  auto hits = discontinuity_query(A, {0.5}, 0.01);
  REQUIRE_FALSE(hits.empty());
  CHECK(hits[0].plane.p == 1);
  CHECK(hits[0].plane.q == LatticeVector{2});
  CHECK(hits[0].distance == 0.0);
  CHECK(hits[0].jump == doctest::Approx(oracle::zeta(2.0) / 4.0).epsilon(1e-5));
  CHECK(discontinuity_query(jump_operator(CoefficientFamily::zero(1), 64, 10), {0.5}, 0.1).empty());
  const LatticeMap B = jump_operator(CoefficientFamily::finite(2, {{{1, 0}, 0.5}}), 8, 8);
  hits = discontinuity_query(B, {0.98, 0.3}, 0.05);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].plane.p == 1);
  CHECK(hits[0].plane.q == LatticeVector{1, 0});
  CHECK(hits[0].distance == doctest::Approx(0.02));
  CHECK(hits[0].jump == 1.0);
}

TEST_CASE("holder_upper_bound") {
  const LatticeMap B = jump_operator(CoefficientFamily::finite(2, {{{1, 0}, 0.5}, {{3, 1}, 0.2}}), 8, 8);
  auto ub = holder_upper_bound(B, {1.0 / 3.0, 0.0}, 2, 8);
  CHECK(ub.value == 0.0);
  CHECK(ub.on_discontinuity);
  ub = holder_upper_bound(jump_operator(CoefficientFamily::zero(1), 64, 10), {0.3}, 2, 64);
  CHECK(std::isinf(ub.value));
  CHECK(ub.empty);
}

TEST_CASE("holder_upper_bound for hecke at the golden mean against a brute-force oracle") {
  const double r0 = 100, R = 1e4;
  const Int L = 1000;
  const LatticeMap A = jump_operator(CoefficientFamily::hecke(2.0), R, L);
  const UpperBound ub = holder_upper_bound(A, {kGolden}, r0, R);
  // A_q = 2 sum_{l <= L} a_{lq} = q^-2 sum_{l <= L} l^-2.
  long double h2 = 0.0L;
  for (Int l = L; l >= 1; --l) h2 += 1.0L / (static_cast<long double>(l) * l);
  double want = INFINITY;
  for (Int q = 100; q < 10000; ++q) {
    const auto c = static_cast<Int>(std::llround(q * kGolden));
    double gap = INFINITY;
    for (Int p = c - 30; p <= c + 30; ++p) {
      if (std::gcd(p, q) == 1) gap = std::min(gap, oracle::golden_gap(q, p));
    }
    const double Aq = static_cast<double>(h2 / (static_cast<long double>(q) * q));
    want = std::min(want, std::log(Aq) / std::log(gap / static_cast<double>(q)));
  }
  CHECK(ub.value == doctest::Approx(want).epsilon(1e-9));
  // Badly approximable: distances ~ 1/q^2, so the ratio tends to beta/2 = 1.
  CHECK(ub.value > 0.85);
  CHECK(ub.value <= 1.0);
}

TEST_CASE("formula value for the lacunary family at a badly approximable point") {
  const double r0 = 0x1p10, R = 0x1p20;
  const ExponentEstimate e = holder_exponent(lacunary2(), {kSilver, 0.3}, r0, R, false);
  double want = INFINITY;
  for (int k = 10; k < 20; ++k) {
    const Int q = Int{1} << k;
    const auto c = static_cast<Int>(std::llround(q * kSilver));
    double gap = INFINITY;
    for (Int p = c - 2; p <= c + 2; ++p) gap = std::min(gap, oracle::silver_gap(q, p));
    want = std::min(want, std::log(0.5 * std::pow(2.0, -0.5 * k)) / std::log(gap / static_cast<double>(q)));
  }
  CHECK(e.formula_value == doctest::Approx(want).epsilon(1e-9));
  CHECK(e.validity == Validity::formula);
  CHECK(std::fabs(e.formula_value - 0.5) < 0.1);
  CHECK_FALSE(e.trace.empty());
}

TEST_CASE("points on a certain discontinuity get exponent zero") {
  const ExponentEstimate e = holder_exponent(lacunary2(), {0.375, 0.3}, 32, 4096, false);
  CHECK(e.formula_value == 0.0);
  CHECK(e.upper_bound_value == 0.0);
  REQUIRE(e.on_discontinuity);
  CHECK(e.on_discontinuity->q == LatticeVector{8, 0});
}

TEST_CASE("f_beta at zero is upper-bound-only") {
  const ExponentEstimate e = holder_exponent(CoefficientFamily::f_beta(1.7), {0.0}, 100, 1e4, false);
  CHECK(e.validity == Validity::upper_bound_only);
  const auto j = e.to_json();
  CHECK(j["validity"] == "upper-bound-only");
}

TEST_CASE("empirical exponent of the sawtooth at a continuity point") {
  const auto saw = CoefficientFamily::finite(1, {{{1}, 0.5}});
  const EmpiricalFit fit = empirical_exponent(saw, {0.5}, dyadic_radii(3, 10), Detrend::none);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fit.residual < 0.01);
  CHECK_THROWS_AS(empirical_exponent(saw, {0.5}, dyadic_radii(3, 5), Detrend::none), InvalidInput);
}

TEST_CASE("formula values respect the gamma_a bound on sparse families") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CoefficientFamily fams[] = {lacunary2(), CoefficientFamily::power_lacunary(3, {1, 2}, 0.8),
                                    CoefficientFamily::l_adic(3, 2.0)};
  for (const auto& a : fams) {
    const double R = 0x1p20, r0 = std::sqrt(R);
    const ExponentAnalyzer an(a, r0, R);
    REQUIRE(an.formula_valid());
    const double gam = an.gamma().value;
    for (int i = 0; i < 30; ++i) {
      std::vector<double> x(static_cast<std::size_t>(a.dimension()));
      for (auto& c : x) c = u(rng);
      CHECK(an.estimate(x).formula_value <= gam + 0.05);
    }
  }
}

TEST_CASE("slow decay drives the formula toward zero") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto a = slow_family(61);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    double prev = INFINITY;
    for (int k : {20, 40, 60}) {
      const double R = std::ldexp(1.0, k), r0 = std::ldexp(1.0, k / 2);
      const double h = holder_exponent(a, {x}, r0, R, false).formula_value;
      // delta_n <= 1/(2|n|) bounds the formula by the slow-decay ratio at the shell's last term.
      const double n = std::ldexp(1.0, k - 1);
      const double ratio = -std::log(0.5 / std::pow(1.0 + std::log(n), 2.0)) / std::log(2.0 * n);
      CHECK(h <= ratio + 1e-12);
      CHECK(ratio < prev);
      prev = ratio;
    }
  }
}

TEST_CASE("kappa") {
  std::vector<LatticeVector> pow2;
  for (int k = 0; k < 40; ++k) pow2.push_back({Int{1} << k});
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto k = kappa_estimate({u(rng)}, pow2, 0x1p10, 0x1p20);
    CHECK_FALSE(k.indeterminate);
    CHECK(k.value < 0.2);
  }
  auto k = kappa_estimate({1.0 / 3.0}, {LatticeVector{3}}, 2, 10);
  CHECK(k.distance_zero);
  std::vector<LatticeVector> primorials{{2}, {6}, {30}, {210}, {2310}, {30030}};
  k = kappa_estimate({0.5 - 1.0 / (2.0 * 30030.0)}, primorials, 2, 40000);
  CHECK(k.value > 0.0);
  k = kappa_estimate({0.3}, primorials, 1e5, 1e6);
  CHECK(k.indeterminate);
}

TEST_CASE("is_regular_set") {
  std::vector<LatticeVector> pow2;
  for (int k = 0; k < 40; ++k) pow2.push_back({Int{1} << k});
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng)});
  auto v = is_regular_set(pow2, pts, 0x1p10, 0x1p20);
  CHECK(v.regular);
  CHECK_FALSE(v.finite_set);
  v = is_regular_set({LatticeVector{1}, LatticeVector{2}, LatticeVector{3}}, pts, 10, 100);
  CHECK(v.regular);
  CHECK(v.finite_set);
  std::vector<LatticeVector> primorials{{2}, {6}, {30}, {210}, {2310}, {30030}};
  v = is_regular_set(primorials, {{0.5 - 1.0 / (2.0 * 30030.0)}}, 2, 40000);
  CHECK(v.suspect);
}

TEST_CASE("exponent json") {
  const ExponentEstimate e = holder_exponent(lacunary2(), {kSilver, 0.3}, 64, 4096, false);
  const auto j = e.to_json();
  CHECK(j.contains("formula_value"));
  CHECK(j["shells_used"][1] == 4096.0);
  CHECK(j["family_hash"].get<std::string>().size() == 16);
  CHECK(j["empirical_value"].is_null());
}
