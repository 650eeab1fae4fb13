#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "j0rank/error.hpp"
#include "j0rank/petersson.hpp"

using namespace j0rank;

namespace {

constexpr double kPi = std::numbers::pi;

double j1_series(double x) {
  double term = x / 2, sum = term;
  for (int k = 1; k < 30; ++k) {
    term *= -(x * x / 4) / (k * (k + 1.0));
    sum += term;
  }
  return sum;
}

std::vector<std::int64_t> levels() {
  std::vector<std::int64_t> out;
  for (std::int64_t q = 11; q <= 101; ++q) {
    if (arith::is_prime(q) && modsym::genus_x0(q) > 0) out.push_back(q);
  }
  return out;
}

const std::vector<modsym::NewformData>& forms(std::int64_t q) {
  static std::map<std::int64_t, std::vector<modsym::NewformData>> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, modsym::decompose(q, 100)).first;
  return it->second;
}

const petersson::HarmonicWeights& weights(std::int64_t q) {
  static std::map<std::int64_t, petersson::HarmonicWeights> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, petersson::recover_harmonic_weights(forms(q))).first;
  return it->second;
}

}  // namespace

TEST_CASE("bessel J1") {
  CHECK(petersson::bessel_j1(0.0) == 0.0);
  CHECK(petersson::bessel_j1(1e-8) / 1e-8 == doctest::Approx(0.5));
  CHECK(std::abs(petersson::bessel_j1(1.0) - j1_series(1.0)) < 1e-14);
  CHECK(petersson::bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-9));
  for (double x = 0.05; x <= 100; x += 0.37) {
    CHECK(std::abs(petersson::bessel_j1(x) - boost::math::cyl_bessel_j(1, x)) < 1e-12);
  }
}

TEST_CASE("kloosterman series against direct sums") {
  const petersson::KloostermanSeries series(11, 60);
  for (std::int64_t c : {1, 2, 11, 12, 36, 60}) {
    for (auto [m, n] : {std::pair<long, long>{1, 1}, {2, 5}, {7, 33}, {11, 3}}) {
      CHECK(std::abs(series.kloosterman(m, n, c) - arith::kloosterman(m, n, c * 11)) < 1e-9);
    }
  }
  // the partial sum itself, term by term
  double direct = 0;
  for (std::int64_t c = 1; c <= 60; ++c) {
    const double cq = 11.0 * c;
    direct += arith::kloosterman(2, 3, 11 * c) / cq * j1_series(4 * kPi * std::sqrt(6.0) / cq);
  }
  const auto r = series.rhs(2, 3);
  CHECK(r.delta == 0.0);
  CHECK(r.value == doctest::Approx(-2 * kPi * direct).epsilon(1e-12));
  CHECK(series.rhs(4, 4).delta == 1.0);
  CHECK_THROWS_AS(petersson::KloostermanSeries(12, 10), Error);
}

TEST_CASE("tail bound") {
  double last = INFINITY;
  for (std::int64_t c : {1, 2, 10, 100, 1000, 10000, 1000000}) {
    const double t = petersson::tail_bound(1, 1, 11, c);
    CHECK(t < last);
    last = t;
  }
  CHECK(petersson::tail_bound(3, 5, 37, 100) > petersson::tail_bound(1, 1, 37, 100));
  // the target is out of reach at any practical cutoff, so the cap applies
  CHECK(petersson::c_max_for(1, 1, 11, 1e-8, 3000) == 3000);
  const auto c = petersson::c_max_for(1, 1, 11, 0.5, 1'000'000);
  CHECK(petersson::tail_bound(1, 1, 11, c) <= 0.5);
  CHECK(petersson::tail_bound(1, 1, 11, c - 1) > 0.5);
  // the tail really does cover the difference between two cutoffs
  const auto a = petersson::petersson_rhs(1, 2, 11, 200), b = petersson::petersson_rhs(1, 2, 11, 2000);
  CHECK(std::abs(a.value - b.value) <= a.tail_bound);
}

TEST_CASE("weights for level 11") {
  const auto& w = weights(11);
  REQUIRE(w.omega.size() == 1);
  CHECK(w.pairs.size() == 3);
  const auto r = petersson::petersson_rhs(1, 1, 11, 1000);
  CHECK(std::abs(w.omega[0] - r.value) <= r.tail_bound);
  CHECK(std::abs(w.omega[0] - r.value) < 1e-3);
  CHECK(std::abs(petersson::petersson_rhs(1, 2, 11, 1000).value) <=
        petersson::kOffDiagonalConstant * 2 * std::sqrt(2.0) * std::pow(11.0, -1.5));
}

TEST_CASE("weights are positive and reproduce held-out pairs") {
  for (auto q : levels()) {
    INFO("q=" << q);
    CHECK(weights(q).positive);
    CHECK(weights(q).condition < 10);
  }
  for (std::int64_t q : {37, 43, 53}) CHECK(weights(q).residual < 10 * weights(q).tail_bound);
  for (std::int64_t q : {11, 37, 43}) {
    const auto checks = petersson::held_out_checks(forms(q), weights(q));
    CHECK(checks.size() > 150);
    double worst = 0;
    for (const auto& h : checks) {
      INFO("q=" << q << " m=" << h.m << " n=" << h.n);
      CHECK(h.passed);
      worst = std::max(worst, std::abs(h.lhs - h.rhs));
    }
    // the certified tail is loose; the observed agreement is much tighter
    CHECK(worst < 1e-2);
  }
  // doubling the cutoff barely moves the weights
  petersson::WeightOptions half;
  half.c_max = 1500;
  const auto coarse = petersson::recover_harmonic_weights(forms(43), half);
  for (std::size_t i = 0; i < coarse.omega.size(); ++i) {
    CHECK(std::abs(coarse.omega[i] - weights(43).omega[i]) < 1e-3);
  }
  auto copy = forms(37);
  petersson::attach_weights(copy, weights(37));
  CHECK(copy[1].weight_harmonic.value() == weights(37).omega[1]);
}

TEST_CASE("ill-conditioned pair set") {
  // two forms cannot be separated by a single pair repeated
  CHECK_THROWS_AS(petersson::recover_harmonic_weights(forms(37), {{1, 1}, {1, 1}}, {}), Error);
  CHECK_THROWS_AS(petersson::recover_harmonic_weights(forms(37), {{1, 37}, {1, 2}}, {}), Error);
}

TEST_CASE("total harmonic mass") {
  std::vector<double> dev;
  for (auto q : levels()) {
    const auto m = petersson::check_probability_measure(weights(q));
    CHECK(m.deviation >= 0);
    CHECK(m.scaled == doctest::Approx(m.deviation * std::pow(double(q), 1.5)));
    // the total mass is the (1,1) right-hand side
    const auto r = petersson::petersson_rhs(1, 1, q, 3000);
    CHECK(std::abs(m.total - r.value) < 10 * weights(q).residual + 1e-4);
    dev.push_back(m.deviation);
  }
  auto median = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> part(dev.begin() + lo, dev.begin() + hi);
    std::nth_element(part.begin(), part.begin() + part.size() / 2, part.end());
    return part[part.size() / 2];
  };
  REQUIRE(dev.size() == 21);
  CHECK(median(0, 7) > median(7, 14));
  CHECK(median(7, 14) > median(14, 21));
}

TEST_CASE("off-diagonal shape") {
  for (std::int64_t q : {11, 37, 67, 101}) {
    const petersson::KloostermanSeries series(q, 1000);
    double worst = 0;
    for (std::int64_t m = 1; m <= 20; ++m) {
      for (std::int64_t n = m; n <= 20; ++n) {
        if (m % q && n % q) worst = std::max(worst, petersson::off_diagonal_ratio(series.rhs(m, n)));
      }
    }
    INFO("q=" << q);
    CHECK(worst <= petersson::kOffDiagonalConstant);
    CHECK(worst >= petersson::kOffDiagonalConstant / 10);
  }
}

TEST_CASE("trace envelope") {
  const auto t = petersson::brumer_trace_check(11, 2);
  CHECK(t.trace == -2);
  CHECK(t.lambda_sum == doctest::Approx(-std::sqrt(2.0)));
  CHECK(petersson::brumer_trace_check(11, 19).ratio == 0.0);
  for (auto q : levels()) {
    for (std::int64_t p = 2; p <= 500; ++p) {
      if (!arith::is_prime(p) || p == q) continue;
      const auto c = petersson::brumer_trace_check(q, p);
      INFO("q=" << q << " p=" << p);
      CHECK(std::isfinite(c.ratio));
      CHECK(c.passed);
    }
  }
  CHECK_THROWS_AS(petersson::brumer_trace_check(11, 11), Error);
}

TEST_CASE("weights csv") {
  petersson::HarmonicWeights w;
  w.q = 37;
  w.omega = {0.25, 0.75};
  w.residual = 1.5e-4;
  CHECK(petersson::weights_csv({w}) == "q,index,omega,residual\n37,0,0.25,0.00015\n37,1,0.75,0.00015\n");
}
