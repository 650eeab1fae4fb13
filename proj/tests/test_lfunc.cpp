#include <algorithm>
#include <map>
#include <string>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"
#include "j0rank/lfunc.hpp"
#include "j0rank/special.hpp"

using namespace j0rank;
using lfunc::cplx;

namespace {

// a_n of q prod (1 - q^n)^2 (1 - q^{11n})^2, the level-11 newform, by
// multiplying with sparse pentagonal series
std::vector<long long> eta_product_11(int n_max) {
  std::vector<long long> f(n_max, 0);
  f[0] = 1;
  auto times_eta = [&](long long step) {
    std::vector<long long> g(n_max, 0);
    for (long long k = 0;; ++k) {
      bool any = false;
      for (long long j : {k, -k}) {
        if (k == 0 && any) continue;
        const long long e = step * j * (3 * j - 1) / 2;
        if (e >= n_max) continue;
        any = true;
        const long long c = k % 2 ? -1 : 1;
        for (long long i = 0; i + e < n_max; ++i) g[i + e] += c * f[i];
      }
      if (!any) break;
    }
    f.swap(g);
  };
  times_eta(1);
  times_eta(1);
  times_eta(11);
  times_eta(11);
  std::vector<long long> a(n_max + 1, 0);
  for (int i = 0; i < n_max; ++i) a[i + 1] = f[i];
  return a;
}

const std::vector<modsym::NewformData>& forms(std::int64_t q) {
  static std::map<std::int64_t, std::vector<modsym::NewformData>> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, modsym::decompose(q, q <= 37 ? 10000 : 400)).first;
  return it->second;
}

const modsym::NewformData& form_with_a2(std::int64_t q, long a2) {
  for (const auto& f : forms(q)) {
    if (f.a_p.front() == static_cast<double>(a2)) return f;
  }
  FAIL("no such form");
  throw;
}

// L(E, 1) and L'(E, 1) of the curves 11a and 37a, 37b in the classical normalisation
constexpr double kL11 = 0.25384186085591068;
constexpr double kDerivL37a = 0.30599977383405230;
constexpr double kL37b = 0.72568106193615252;

}  // namespace

TEST_CASE("lambda coefficients") {
  const auto& f = forms(11).front();
  const auto lam = lfunc::lambda_coeffs(f, 30);
  CHECK(lam[1] == 1.0);
  CHECK(lam[2] == doctest::Approx(-2 / std::sqrt(2.0)));
  CHECK(lam[4] == doctest::Approx(1.0));
  CHECK(lam[6] == doctest::Approx(lam[2] * lam[3]));
  CHECK_THROWS_AS(lfunc::lambda_coeffs(f, 20000), Error);
}

TEST_CASE("level 11 against the eta-product oracle") {
  const int n_oracle = 400000;
  const auto a = eta_product_11(n_oracle);
  const auto& f = forms(11).front();
  for (std::size_t i = 0; i < f.primes.size(); ++i) {
    CHECK(f.a_p[i] == static_cast<double>(a[f.primes[i]]));
  }

  // Dirichlet series against the Euler product at s = 2, oracle horizon
  long double dirichlet = 0, euler = 1;
  for (int n = n_oracle; n >= 1; --n) dirichlet += a[n] / std::pow(static_cast<long double>(n), 2.5L);
  const auto& primes = arith::shared_primes(n_oracle).primes();
  for (auto p : primes) {
    if (p > n_oracle) break;
    const long double x = 1.0L / (static_cast<long double>(p) * p);
    const long double lp = a[p] / std::sqrt(static_cast<long double>(p));
    euler *= p == 11 ? 1 / (1 - lp * x) : 1 / (1 - lp * x + x * x);
  }
  CHECK(std::abs(static_cast<double>(euler - dirichlet)) < 1e-10);

  // smoothed expansion against the direct sum times the gamma factor
  const lfunc::LFunction L(f);
  for (cplx s : {cplx{2, 0}, cplx{2, 3}, cplx{2, -7.5}}) {
    cplx direct = 0;
    for (int n = n_oracle; n >= 1; --n) {
      direct += static_cast<double>(a[n]) / std::sqrt(static_cast<double>(n)) * std::exp(-s * std::log(double(n)));
    }
    direct *= std::exp(s * std::log(L.scale()) + special::log_gamma(s + 0.5));
    INFO("s = " << s);
    CHECK(std::abs(L.completed(s) - direct) < 1e-8);
    CHECK(std::abs(L.completed_direct(s, L.horizon()) - direct) < 1e-6);
  }
}

TEST_CASE("functional equation on a grid for every level up to 101") {
  for (std::int64_t q = 11; q <= 101; ++q) {
    if (!arith::is_prime(q) || modsym::genus_x0(q) == 0) continue;
    for (const auto& f : forms(q)) {
      const lfunc::LFunction L(f);
      double worst = 0;
      for (int i = 0; i < 20; ++i) {
        const cplx s{(i % 5) / 4.0, -5.0 + 10.0 * (i / 5) / 3.0 + 0.1 * (i % 3)};
        // the two sides come from differently split Mellin integrals
        const cplx lhs = L.completed_split(s, 0.0, f.eps);
        const cplx rhs = L.completed_split(1.0 - s, 0.3, f.eps);
        worst = std::max(worst, std::abs(lhs - static_cast<double>(f.eps) * rhs));
      }
      INFO("q=" << q << " form " << f.index);
      CHECK(worst < 1e-8);
      double fit = 0;
      CHECK(L.fitted_sign(&fit) == f.eps);
      CHECK(fit < 1e-9);
    }
  }
}

TEST_CASE("central values and analytic rank") {
  {
    const lfunc::LFunction L(forms(11).front());
    const auto r = lfunc::analytic_rank(L);
    CHECK(r.rank == 0);
    CHECK(r.parity_ok);
    CHECK(L.completed(0.5).real() == doctest::Approx(std::sqrt(L.scale()) * kL11).epsilon(1e-10));
  }
  {
    const lfunc::LFunction L(form_with_a2(37, -2));
    CHECK(L.eps() == -1);
    const auto r = lfunc::analytic_rank(L);
    CHECK(r.rank == 1);
    CHECK(r.taylor[1] == doctest::Approx(std::sqrt(L.scale()) * kDerivL37a).epsilon(1e-9));
  }
  {
    const lfunc::LFunction L(form_with_a2(37, 0));
    CHECK(lfunc::analytic_rank(L).rank == 0);
    CHECK(L.completed(0.5).real() == doctest::Approx(std::sqrt(L.scale()) * kL37b).epsilon(1e-10));
  }
  for (std::int64_t q : {23, 43, 53, 61, 67, 79, 83, 89, 101}) {
    for (const auto& f : forms(q)) {
      const auto r = lfunc::analytic_rank(lfunc::LFunction(f));
      INFO("q=" << q << " form " << f.index);
      CHECK(r.rank % 2 == (f.eps > 0 ? 0 : 1));
    }
  }
}

TEST_CASE("zeros on the critical line") {
  const lfunc::LFunction L11(forms(11).front());
  const auto z = lfunc::find_zeros(L11, 10);
  REQUIRE(!z.ordinates.empty());
  CHECK(z.central_order == 0);
  const auto first = *std::upper_bound(z.ordinates.begin(), z.ordinates.end(), 0.0);
  CHECK(first == doctest::Approx(6.362613894713).epsilon(1e-8));
  auto sorted = z.ordinates;
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  for (double g : z.ordinates) {
    CHECK(std::abs(g) <= 10);
    CHECK(std::count_if(sorted.begin(), sorted.end(), [&](double h) { return std::abs(h + g) < 1e-12; }) >= 1);
  }
  for (const auto& [a, b] : z.brackets) {
    CHECK(b - a <= 1e-8);
    CHECK((L11.hardy_z(a) < 0) != (L11.hardy_z(b) < 0));
  }

  const lfunc::LFunction L37(form_with_a2(37, -2));
  const auto z37 = lfunc::find_zeros(L37, 20);
  CHECK(std::count(z37.ordinates.begin(), z37.ordinates.end(), 0.0) == 1);
  const auto first37 = *std::upper_bound(z37.ordinates.begin(), z37.ordinates.end(), 0.0);
  CHECK(first37 == doctest::Approx(5.0031700140).epsilon(1e-8));

  // argument-principle count reconciles with the sign changes
  for (const auto& f : forms(37)) {
    const lfunc::LFunction L(f);
    const auto zl = lfunc::find_zeros(L, 20);
    const int positive = static_cast<int>(std::count_if(zl.ordinates.begin(), zl.ordinates.end(),
                                                        [](double g) { return g > 0; }));
    CHECK(lfunc::contour_count(L, -0.25, 1.25, 0.01, 20) == positive);
    CHECK(zl.contour_count == positive);
  }
}

TEST_CASE("zero boxes") {
  const lfunc::LFunction L(forms(11).front());
  CHECK(lfunc::count_zeros_box(L, 0.6, -10, 10) == 0);
  CHECK(lfunc::count_zeros_box(L, 1.0, 0, 15) == 0);
  CHECK(lfunc::count_zeros_box(L, 0.51, -20, 20) == 0);
  // a box straddling the line picks up exactly the bracketed zeros
  CHECK(lfunc::contour_count(L, 0.4, 0.6, 6, 7) == 1);
  CHECK(lfunc::contour_count(L, 0.4, 0.6, 1, 6) == 0);
  CHECK(lfunc::contour_count(L, 0.3, 0.9, -10, 10) >= lfunc::contour_count(L, 0.4, 0.6, 6, 7));
  CHECK_THROWS_AS(lfunc::count_zeros_box(L, 0.5, 0, 1), Error);
}

TEST_CASE("capacity error names the required horizon") {
  const auto small = modsym::decompose(11, 50);
  const lfunc::LFunction L(small.front());
  try {
    L.rescaled({0.5, 200.0});
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
    CHECK(std::string(e.what()).find("requires N = ") != std::string::npos);
  }
}

TEST_CASE("zero list csv") {
  lfunc::ZeroList z;
  z.level = 11;
  z.index = 0;
  z.ordinates = {-6.362613894713, 6.362613894713};
  CHECK(lfunc::zeros_csv({z}) == "q,index,gamma\n11,0,-6.362613895\n11,0,6.362613895\n");
}
