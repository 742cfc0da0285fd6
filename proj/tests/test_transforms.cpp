#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "davenport/errors.hpp"
#include "davenport/transforms.hpp"
#include "oracles.hpp"

using namespace davenport;

namespace {

const double kPi = std::numbers::pi;

CoefficientFamily two_term() { return CoefficientFamily::finite(1, {{{1}, 0.5}, {{2}, 0.25}}); }

}  // namespace

TEST_CASE("jump_operator on a finite family is exact") {
  const LatticeMap A = jump_operator(two_term(), 8, 16);
  CHECK(A.value({1}) == 1.5);
  CHECK(A.value({2}) == 0.5);
  CHECK(A.value({-2}) == -0.5);
  CHECK(A.value({3}) == 0.0);
  CHECK(A.tail_bound() == 0.0);
  CHECK(A.entry({1})->tail == 0.0);
}

TEST_CASE("hecke jumps match zeta(2)/q^2") {
  const LatticeMap A = jump_operator(CoefficientFamily::hecke(2.0), 17, 1000000);
  const double z2 = oracle::zeta(2.0);
  for (Int q = 1; q <= 16; ++q) {
    const auto e = A.entry({q});
    REQUIRE(e);
    const double want = z2 / static_cast<double>(q * q);
    CHECK(std::fabs(e->value - want) <= e->tail + 1e-15);
    CHECK(std::fabs(e->value - want) < 1e-6);
  }
  CHECK(A.value({2}) == doctest::Approx(0.411234).epsilon(1e-5));
}

TEST_CASE("zero family maps to zero") {
  const LatticeMap A = jump_operator(CoefficientFamily::zero(2), 10, 10);
  for (const auto& [q, e] : A.entries()) CHECK(e.value == 0.0);
  CHECK(A.tail_bound() == 0.0);
  CHECK(invert_jump(A, {1, 1}, 10) == 0.0);
}

TEST_CASE("maximal_operator") {
  LatticeMap M = maximal_operator(two_term(), 8, 16);
  CHECK(M.value({1}) == 0.5);
  CHECK(M.value({2}) == 0.25);
  CHECK(M.value({-2}) == 0.25);
  M = maximal_operator(CoefficientFamily::hecke(2.0), 8, 100);
  CHECK(M.value({3}) == doctest::Approx(1.0 / 18.0));
  M = maximal_operator(CoefficientFamily::power_lacunary(2, {1, 0}, 0.5), 8, 100);
  CHECK(M.value({3, 0}) == 0.0);
  CHECK(M.value({1, 0}) == 0.5);
}

TEST_CASE("invert_jump") {
  const LatticeMap A = jump_operator(two_term(), 8, 16);
  CHECK(invert_jump(A, {1}, 16) == 0.5);
  CHECK(invert_jump(A, {2}, 16) == 0.25);
  LatticeMap single(2, Parity::odd, 10);
  single.set({2, 3}, 2 * 0.7);
  CHECK(invert_jump(single, {2, 3}, 10) == doctest::Approx(0.7));
  const LatticeMap M = maximal_operator(two_term(), 8, 16);
  CHECK_THROWS_AS(invert_jump(M, {1}, 16), InvalidInput);
}

TEST_CASE("subsample") {
  const auto lac = CoefficientFamily::power_lacunary(2, {1, 0}, 0.5);
  const auto s = subsample(lac, {1, 0}, 5);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == 0.5);
  CHECK(s[1] == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(s[2] == 0.0);
  CHECK(s[3] == doctest::Approx(0.25));
  CHECK(s[4] == 0.0);
  CHECK_THROWS_AS(subsample(lac, {2, 0}, 5), InvalidInput);
  CHECK_THROWS_AS(subsample(lac, {-1, 0}, 5), InvalidInput);
  const auto f = CoefficientFamily::finite(2, {{{1, 2}, 0.5}, {{2, 4}, 0.25}});
  CHECK(subsample(f, {1, 2}, 3) == std::vector<double>{0.5, 0.25, 0.0});
}

TEST_CASE("subsampled jumps are twice the one-dimensional jumps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LatticeVector m{2, 3};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<LatticeVector, double>> e;
    for (Int l = 1; l <= 12; ++l) {
      if (u(rng) > 0.2) e.push_back({m.scaled(l), u(rng)});
    }
    const auto a = CoefficientFamily::finite(2, e);
    const auto b = subsample(a, m, 12);
    const LatticeMap A = jump_operator(a, 100, 64);
    for (Int k = 1; k <= 12; ++k) {
      double one_d = 0.0;
      for (Int l = 1; l * k <= 12; ++l) one_d += b[static_cast<std::size_t>(l * k - 1)];
      CHECK(A.value(m.scaled(k)) == doctest::Approx(2.0 * one_d).epsilon(1e-15));
    }
  }
}

TEST_CASE("davenport_to_fourier") {
  const auto unit = CoefficientFamily::finite(2, {{{1, 0}, 0.5}});
  for (Int k = 1; k <= 5; ++k) {
    CHECK(davenport_to_fourier(unit, {k, 0}, 100) == doctest::Approx(-1.0 / (2.0 * kPi * k)));
  }
  CHECK(davenport_to_fourier(unit, {1, 0}, 100) == doctest::Approx(-0.1591549).epsilon(1e-6));
  const auto single = CoefficientFamily::finite(2, {{{2, 3}, 0.8}});
  CHECK(davenport_to_fourier(single, {2, 3}, 10) == doctest::Approx(-0.8 / kPi));
  CHECK(davenport_to_fourier(CoefficientFamily::zero(2), {1, 1}, 10) == 0.0);
  CHECK_THROWS_AS(davenport_to_fourier(unit, {0, 0}, 10), InvalidInput);
}

TEST_CASE("davenport_to_fourier matches quadrature") {
  // f = {x}: int_0^1 {x} sin(2 pi x) dx = -1/(2 pi).
  const oracle::Terms saw{{{1}, 1.0}};
  CHECK(oracle::fourier_quadrature(saw, {1}) == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-10));
  const auto a = CoefficientFamily::finite(2, {{{1, 0}, 0.5}, {{1, 2}, -0.3}, {{2, 4}, 0.2}});
  const oracle::Terms t{{{1, 0}, 1.0}, {{1, 2}, -0.6}, {{2, 4}, 0.4}};
  for (const LatticeVector& m : {LatticeVector{1, 2}, LatticeVector{2, 4}, LatticeVector{1, 0}, LatticeVector{3, 1}}) {
    // f = 2 sum over Z^d_+ of c_m sin(2 pi m.x), so the integral is c_m.
    const double q = oracle::fourier_quadrature(t, m.coords());
    CHECK(std::fabs(davenport_to_fourier(a, m, 100) - q) < 1e-6);
  }
}

TEST_CASE("fourier_to_davenport roundtrip") {
  const auto unit = CoefficientFamily::finite(1, {{{1}, 0.5}});
  const LatticeMap c = fourier_map(unit, 32, 32);
  CHECK(fourier_to_davenport(c, {1}, 32) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::fabs(fourier_to_davenport(c, {2}, 32)) < 1e-15);
  LatticeMap zero(2, Parity::odd, 10);
  CHECK(fourier_to_davenport(zero, {1, 1}, 10) == 0.0);
  LatticeMap one(2, Parity::odd, 10);
  one.set({1, 2}, 0.3);
  CHECK(fourier_to_davenport(one, {1, 2}, 10) == doctest::Approx(-kPi * 0.3));

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Int> ui(-6, 6);
  std::uniform_real_distribution<double> uv(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<LatticeVector, double>> e;
    std::set<LatticeVector> seen;
    for (int k = 0; k < 8; ++k) {
      LatticeVector n{ui(rng), ui(rng)};
      if (n.is_zero()) continue;
      n = n.positive_representative();
      if (!seen.insert(n).second) continue;
      e.push_back({n, uv(rng)});
    }
    const auto a = CoefficientFamily::finite(2, e);
    const LatticeMap cm = fourier_map(a, 20, 64);
    for (const auto& [n, v] : e) CHECK(std::fabs(fourier_to_davenport(cm, n, 64) - v) < 1e-12);
  }
}

TEST_CASE("theta_a_estimate") {
  // Nonnegative rays: A_q >= 2 abar_q.
  auto t = theta_a_estimate(CoefficientFamily::hecke(2.0), 1000, 100000);
  CHECK_FALSE(t.indeterminate);
  CHECK(t.value <= 1.0);
  CHECK_FALSE(t.jump_canceling);
  t = theta_a_estimate(CoefficientFamily::power_lacunary(2, {1, 1}, 0.5), 4096, 64);
  CHECK(t.value <= 1.0);
  // A_1 = 2 delta against abar_1 = 1/2.
  const double delta = 1e-6;
  const auto cancel = CoefficientFamily::finite(1, {{{1}, 0.5}, {{2}, -0.5 + delta}});
  t = theta_a_estimate(cancel, 2, 16, 1.0);
  CHECK(t.jump_canceling);
  CHECK(t.value == doctest::Approx(std::log(2 * delta) / std::log(0.5)).epsilon(1e-6));
  t = theta_a_estimate(CoefficientFamily::zero(1), 100, 10);
  CHECK(t.indeterminate);
}

TEST_CASE("continuity: a nonzero finite family always jumps") {
  // Exhaustive over values {-1, 0, 1}/2 on frequencies 1..5.
  std::vector<int> digits(5, 0);
  for (int code = 1; code < 243; ++code) {
    int c = code;
    std::vector<std::pair<LatticeVector, double>> e;
    for (Int n = 1; n <= 5; ++n) {
      const int dgt = c % 3 - 1;
      c /= 3;
      if (dgt != 0) e.push_back({{n}, 0.5 * dgt});
    }
    if (e.empty()) continue;
    const LatticeMap A = jump_operator(CoefficientFamily::finite(1, e), 6, 8);
    bool any = false;
    for (const auto& [q, v] : A.entries()) any = any || v.value != 0.0;
    REQUIRE(any);
  }
}

TEST_CASE("exact rational roundtrip") {
  const auto a = CoefficientFamily::finite(2, {{{1, 0}, 0.1}, {{2, 0}, -0.3}, {{2, 4}, 1.0 / 3.0}, {{3, 6}, 0.7}});
  const auto ra = exact::coefficients(a);
  const auto A = exact::jump(ra);
  for (const auto& [n, v] : ra) CHECK(exact::invert_jump(A, n) == v);
  CHECK(exact::value(A, {1, 2}) == 2 * (exact::to_rational(1.0 / 3.0) + exact::to_rational(0.7)));
}

TEST_CASE("lattice map json") {
  const auto j = nlohmann::json::parse(R"({"d":1,"parity":"odd","R":64,"tail":1e-9,"entries":[[[1],1.5],[[2],0.5]]})");
  const LatticeMap m = LatticeMap::from_json(j);
  CHECK(m.value({-1}) == -1.5);
  CHECK(m.tail_bound() == 1e-9);
  CHECK(LatticeMap::from_json(m.to_json()).to_json() == m.to_json());
  CHECK_THROWS_AS(LatticeMap::from_json(nlohmann::json::parse(R"({"d":1,"parity":"odd","R":1,"tail":0,"entries":[[[2],1]]})")),
                  InvalidInput);
}
