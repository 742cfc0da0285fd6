#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "davenport/errors.hpp"
#include "davenport/eval.hpp"
#include "davenport/regularity.hpp"
#include "davenport/transforms.hpp"
#include "oracles.hpp"

using namespace davenport;

TEST_CASE("sawtooth") {
  CHECK(sawtooth(0.25) == -0.25);
  CHECK(sawtooth(3.0) == 0.0);
  CHECK(sawtooth(-0.25) == 0.25);
  CHECK(sawtooth(0.5) == 0.0);
  CHECK(sawtooth(1.75) == 0.25);
  CHECK(sawtooth(0x1p53 + 2.0) == 0.0);
  CHECK(sawtooth(0x1p51 + 0.5) == 0.0);
  CHECK(sawtooth(-(0x1p50 + 0.25)) == 0.25);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 100000; ++i) {
    const double t = u(rng);
    REQUIRE(sawtooth(-t) == -sawtooth(t));
    REQUIRE(std::fabs(sawtooth(t) - oracle::saw(t)) <= 1e-9);
  }
}

TEST_CASE("partial_sum basics") {
  auto p = partial_sum(CoefficientFamily::zero(2), 100, {0.1, 0.2});
  CHECK(p.value == 0.0);
  CHECK(p.tail_bound == 0.0);
  p = partial_sum(CoefficientFamily::hecke(2.0), 100, {0.0});
  CHECK(p.value == 0.0);
}

TEST_CASE("hecke partial sum at 1/3 against a high-N reference") {
  const auto a = CoefficientFamily::hecke(2.0);
  const PartialSum p = partial_sum(a, 1e4, {1.0 / 3.0});
  long double ref = 0.0L;
  for (long n = 1000000; n >= 1; --n) ref += oracle::saw(static_cast<long double>(n) / 3.0L) / (static_cast<long double>(n) * n);
  CHECK(std::fabs(p.value - static_cast<double>(ref)) <= 1e-4);
  CHECK(std::fabs(p.value - static_cast<double>(ref)) <= p.tail_bound);
}

TEST_CASE("tail bound honesty under refinement") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CoefficientFamily fams[] = {CoefficientFamily::hecke(1.5), CoefficientFamily::f_beta(1.7),
                                    CoefficientFamily::l_adic(2, 1.5)};
  for (const auto& a : fams) {
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> x{u(rng)};
      double N = 64;
      PartialSum prev = partial_sum(a, N, x);
      for (int k = 0; k < 8; ++k) {
        N *= 2;
        const PartialSum cur = partial_sum(a, N, x);
        REQUIRE(std::fabs(cur.value - prev.value) <= prev.tail_bound * (1 + 1e-12));
        prev = cur;
      }
    }
  }
  const auto lac = CoefficientFamily::power_lacunary(3, {1, 2}, 0.4);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    const PartialSum lo = partial_sum(lac, 100, x), hi = partial_sum(lac, 1e8, x);
    REQUIRE(std::fabs(hi.value - lo.value) <= lo.tail_bound);
  }
}

TEST_CASE("oddness and periodicity of partial sums") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const CoefficientFamily fams[] = {CoefficientFamily::power_lacunary(2, {1, 1}, 0.5),
                                    CoefficientFamily::finite(2, {{{1, 2}, 0.5}, {{3, -1}, 0.2}})};
  for (const auto& a : fams) {
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x{u(rng), u(rng)};
      const std::vector<double> mx{-x[0], -x[1]};
      const std::vector<double> sx{x[0] + 2.0, x[1] - 1.0};
      const double f = partial_sum(a, 512, x).value;
      CHECK(std::fabs(partial_sum(a, 512, mx).value + f) < 1e-12);
      CHECK(std::fabs(partial_sum(a, 512, sx).value - f) < 1e-12);
    }
  }
}

TEST_CASE("grid_eval") {
  GridSpec g{1, {0.0}, {1.0}, {8}, false};
  const auto a = CoefficientFamily::hecke(2.0);
  const GridValues v = grid_eval(a, 1000, g);
  REQUIRE(v.values.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(v.values[static_cast<std::size_t>(i)] == partial_sum(a, 1000, {i / 8.0}).value);

  GridSpec g2{2, {0.0, 0.0}, {1.0, 1.0}, {16, 16}, false};
  const GridValues z = grid_eval(CoefficientFamily::zero(2), 10, g2);
  for (double x : z.values) CHECK(x == 0.0);
  const GridValues w = grid_eval(CoefficientFamily::finite(2, {{{1, 0}, 0.5}}), 10, g2);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const auto idx = g2.index(i);
    CHECK(w.values[i] == w.values[static_cast<std::size_t>(idx[0]) * 16]);
    CHECK(w.values[i] == oracle::saw(idx[0] / 16.0L));
  }
}

TEST_CASE("grid validation and layout") {
  GridSpec bad{1, {0.0}, {1.0}, {1}, false};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  GridSpec huge{2, {0.0, 0.0}, {1.0, 1.0}, {100000, 100000}, false};
  CHECK_THROWS_AS(huge.validate(), ResourceLimit);
  GridSpec closed{2, {0.0, 0.0}, {1.0, 2.0}, {3, 5}, true};
  CHECK(closed.total() == 15);
  CHECK(closed.node(14) == std::vector<double>{1.0, 2.0});
  CHECK(closed.index(7) == std::vector<int>{1, 2});
  CHECK(GridSpec::from_json(closed.to_json()).to_json() == closed.to_json());
}

TEST_CASE("grid csv format") {
  GridSpec g{1, {0.0}, {1.0}, {4}, false};
  const GridValues v = grid_eval(CoefficientFamily::finite(1, {{{1}, 0.5}}), 4, g);
  std::ostringstream os;
  write_grid_csv(os, v);
  CHECK(os.str() == "x1,value,tail_bound\n0,0,0\n0.25,-0.25,0\n0.5,0,0\n0.75,0.25,0\n");
}

TEST_CASE("oscillation") {
  const std::vector<double> radii{0.1, 0.05, 0.025, 0.0125, 0.00625};
  auto rep = oscillation(CoefficientFamily::zero(1), {0.3}, radii);
  for (double o : rep.osc) CHECK(o == 0.0);
  rep = oscillation(CoefficientFamily::finite(1, {{{1}, 0.5}}), {0.5}, {0.1});
  CHECK(rep.osc[0] <= 0.2 + 1e-15);
  CHECK(rep.osc[0] >= 0.19);
  CHECK_THROWS_AS(oscillation(CoefficientFamily::zero(1), {0.3}, {0.1, 0.2}), InvalidInput);
  OscillationOptions few;
  few.samples_per_ball = 16;
  CHECK_THROWS_AS(oscillation(CoefficientFamily::zero(1), {0.3}, {0.1}, few), InvalidInput);
}

TEST_CASE("oscillation is monotone up to tail slack") {
  const auto a = CoefficientFamily::power_lacunary(2, {1, 0}, 0.5);
  const auto rep = oscillation(a, {0.3, 0.7}, dyadic_radii(2, 10));
  for (std::size_t i = 1; i < rep.osc.size(); ++i) {
    CHECK(rep.osc[i] <= rep.osc[i - 1] + 2.0 * (rep.tail[i] + rep.tail[i - 1]));
  }
  CHECK_FALSE(rep.any_low_confidence());
}

TEST_CASE("jump magnitudes") {
  const auto h = jump_magnitude_estimate(CoefficientFamily::hecke(2.0), {0.5}, dyadic_radii(8, 14));
  CHECK(std::fabs(h.value - oracle::zeta(2.0) / 4.0) < 0.01);
  const auto z = jump_magnitude_estimate(CoefficientFamily::zero(1), {0.5}, dyadic_radii(8, 12));
  CHECK(z.value == 0.0);
  // {x1} pair: A_(1,0) = 1 across x1 = 0.
  const auto f = CoefficientFamily::finite(2, {{{1, 0}, 0.5}, {{-1, 0}, -0.5}});
  const auto j = jump_magnitude_estimate(f, {0.0, 0.3}, dyadic_radii(8, 14));
  CHECK(j.value == doctest::Approx(1.0).epsilon(1e-3));
  // (0.5, 0.3) is a continuity point of {x1}.
  CHECK(jump_magnitude_estimate(f, {0.5, 0.3}, dyadic_radii(8, 14)).value < 0.01);
}

TEST_CASE("fourier partial sums reproduce hecke(3) partial sums") {
  // Abel summation: |{t} - S_K{t}| <= 1 / (pi (K+1) |sin pi t|) for the sawtooth's Fourier partial sums.
  const auto a = CoefficientFamily::hecke(3.0);
  const Int M = 2000;
  const LatticeMap c = fourier_map(a, static_cast<double>(M), M);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    long double s = 0.0L;
    for (Int m = 1; m <= M; ++m) s += 2.0L * c.value({m}) * std::sin(2.0L * std::numbers::pi_v<long double> * m * x);
    const double f = partial_sum(a, static_cast<double>(M), {x}).value;
    double bound = 1e-12;
    for (Int n = 1; n <= M; ++n) {
      const double K = std::floor(static_cast<double>(M) / n);
      bound += std::pow(n, -3.0) / (std::numbers::pi * (K + 1.0) * std::fabs(std::sin(std::numbers::pi * n * x)));
    }
    CHECK(std::fabs(f - static_cast<double>(s)) <= bound);
  }
}
