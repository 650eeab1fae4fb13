#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"
#include "j0rank/modsym.hpp"

using namespace j0rank;
using namespace j0rank::modsym;

namespace {

// Riemann-Hurwitz with elliptic points counted by brute force.
long genus_oracle(long q) {
  long nu2 = 0, nu3 = 0;
  for (long x = 0; x < q; ++x) {
    nu2 += (x * x + 1) % q == 0;
    nu3 += (x * x + x + 1) % q == 0;
  }
  const Rational g = exact::frac(q + 1, 12) - exact::frac(nu2, 4) - exact::frac(nu3, 3);
  REQUIRE(g.get_den() == 1);
  return g.get_num().get_si();
}

std::vector<long> small_primes(long upto) {
  std::vector<long> out;
  for (long p = 2; p <= upto; ++p)
    if (arith::is_prime(p)) out.push_back(p);
  return out;
}

}  // namespace

TEST_CASE("p1_list sizes") {
  CHECK(p1_list(2).size() == 3u);
  CHECK(p1_list(11).size() == 12u);
  CHECK(p1_list(37).size() == 38u);
  CHECK_THROWS_AS(p1_list(12), Error);
}

TEST_CASE("cuspidal dimension is twice the genus") {
  CHECK(cuspidal_space(11).cuspidal_dimension() == 2u);
  CHECK(cuspidal_space(37).cuspidal_dimension() == 4u);
  CHECK(cuspidal_space(2).cuspidal_dimension() == 0u);
  for (long q : small_primes(101)) {
    const long g = genus_oracle(q);
    CHECK(genus_x0(q) == g);
    CHECK(cuspidal_space(q).cuspidal_dimension() == static_cast<std::size_t>(2 * g));
    const ManinSymbolSpace plus(q, Quotient::Plus);
    CHECK(plus.cuspidal_dimension() == static_cast<std::size_t>(g));
    CHECK(plus.dimension() == static_cast<std::size_t>(g + 1));
  }
}

TEST_CASE("hecke matrices on the full cuspidal space") {
  const auto s11 = cuspidal_space(11);
  CHECK(s11.hecke_matrix(2).trace() == -4);  // two copies of a_2 = -2
  CHECK(s11.hecke_matrix(3).trace() == -2);
  for (long q : {37L, 43L, 67L}) {
    const auto s = cuspidal_space(q);
    const auto t2 = s.hecke_matrix(2), t3 = s.hecke_matrix(3), t5 = s.hecke_matrix(5);
    CHECK(t2 * t3 == t3 * t2);
    CHECK(t2 * t5 == t5 * t2);
    for (long p : {2L, 3L, 5L, 7L}) CHECK(s.hecke_matrix(p).trace() == 2 * trace_Tn(q, p));
    const auto uq = s.hecke_matrix(q);
    CHECK(uq * uq == QMatrix::identity(uq.rows()));
    CHECK(uq * t2 == t2 * uq);
  }
}

TEST_CASE("trace formula examples") {
  CHECK(trace_Tn(11, 1) == 1);
  CHECK(trace_Tn(11, 2) == -2);
  CHECK(trace_Tn(37, 1) == 2);
  CHECK(trace_Tn(37, 2) == -2);
  CHECK_THROWS_AS(trace_Tn(11, 22), Error);
}

TEST_CASE("modular symbols traces equal the trace formula, q <= 101, n <= 50") {
  for (long q : small_primes(101)) {
    const HeckeDecomposition dec(q);
    CHECK(dec.genus() == static_cast<std::size_t>(genus_oracle(q)));
    for (long n = 1; n <= 50; ++n) {
      if (n % q == 0) continue;
      INFO("q=" << q << " n=" << n);
      CHECK(dec.trace(n) == trace_Tn(q, n));
    }
  }
}

TEST_CASE("decompose small levels") {
  CHECK(decompose(2, 100).empty());
  const auto f11 = decompose(11, 100);
  REQUIRE(f11.size() == 1);
  CHECK(f11[0].ap(2) == -2);
  CHECK(f11[0].ap(3) == -1);
  CHECK(f11[0].ap(5) == 1);
  CHECK(f11[0].ap(7) == -2);
  CHECK(f11[0].eps == 1);
  CHECK(sign(f11[0]) == 1);

  const auto f37 = decompose(37, 100);
  REQUIRE(f37.size() == 2);
  CHECK(f37[0].ap(2) == -2);
  CHECK(f37[0].eps == -1);
  CHECK(f37[1].ap(2) == 0);
  CHECK(f37[1].eps == 1);
}

TEST_CASE("irrational eigenvalues, Deligne bound and multiplicativity") {
  for (long q : {23L, 29L, 67L, 101L}) {
    const auto forms = decompose(q, 400, 2);
    REQUIRE(forms.size() == static_cast<std::size_t>(genus_oracle(q)));
    for (const auto& f : forms) {
      for (std::size_t i = 0; i < f.primes.size(); ++i) {
        const double p = static_cast<double>(f.primes[i]);
        if (f.primes[i] != q) CHECK(std::abs(f.a_p[i]) <= 2 * std::sqrt(p));
        CHECK(f.a_p[i] == f.exact[i].value());
      }
      for (long m = 1; m <= 30; ++m)
        for (long n = 1; n <= 30; ++n)
          if (arith::gcd(m, n) == 1)
            CHECK(f.lambda(m * n) == doctest::Approx(f.lambda(m) * f.lambda(n)).epsilon(1e-12));
      const auto table = f.lambda_table(400);
      for (long n = 1; n <= 400; n += 7) CHECK(table[n] == doctest::Approx(f.lambda(n)));
    }
    // a_n summed over forms is the exact trace
    const HeckeDecomposition dec(q);
    for (long n : {2L, 6L, 9L, 35L}) {
      double sum = 0;
      for (const auto& f : forms) sum += f.lambda(n) * std::sqrt(double(n));
      CHECK(sum == doctest::Approx(dec.trace(n).get_d()));
    }
  }
  // q = 23: a_2 = (-1 +- sqrt 5)/2
  const auto f23 = decompose(23, 10);
  CHECK(f23[0].ap(2) == doctest::Approx((-1 - std::sqrt(5.0)) / 2));
  CHECK(f23[1].ap(2) == doctest::Approx((-1 + std::sqrt(5.0)) / 2));
  CHECK(!f23[0].exact[0].rational);
}

TEST_CASE("satake recursion") {
  const auto f = decompose(11, 50)[0];
  CHECK(satake_extend(f, 3, 0) == 1.0);
  const double l2 = -2 / std::sqrt(2.0);
  CHECK(satake_extend(f, 2, 2) == doctest::Approx(l2 * l2 - 1));
  CHECK(satake_power_sum(f, 2, 2) == doctest::Approx(l2 * l2 - 2));
  CHECK(satake_power_sum(f, 2, 0) == 2.0);
  for (int k = 0; k < 8; ++k) {
    CHECK(satake_extend(f, 11, k) == doctest::Approx(std::pow(1 / std::sqrt(11.0), k)));
    CHECK(std::abs(satake_extend(f, 7, k)) <= k + 1.0 + 1e-12);
    // alpha^k + alpha-bar^k = 2 cos(k theta)
    const double theta = std::acos(f.ap(7) / (2 * std::sqrt(7.0)));
    CHECK(satake_power_sum(f, 7, k) == doctest::Approx(2 * std::cos(k * theta)));
  }
  CHECK_THROWS_AS(f.ap(53), Error);
}

TEST_CASE("eigen record round trip and validation") {
  const auto forms = decompose(67, 200);
  const auto text = format_records(forms);
  CHECK(parse_records(text) == forms);
  CHECK(parse_records("").empty());
  CHECK(parse_records("# only a comment\n\n").empty());
  CHECK_THROWS_AS(parse_records("11 0 1 1 1 2:5\n"), Error);
  try {
    parse_records("11 0 1 1 1 2:-2\n11 0 1 1 2 2:-2\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_records("11 0 1 1 1 2:5\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Invariant);
  }
  const auto v = AlgebraicValue::parse("poly:-1,1,1/root:1");
  CHECK(v.value() == doctest::Approx((-1 + std::sqrt(5.0)) / 2));
  CHECK(AlgebraicValue::parse("-1.25").value() == -1.25);
  CHECK(AlgebraicValue::parse("-1.25").to_string() == "-1.25");
}

TEST_CASE("cache put and get") {
  const auto dir = std::filesystem::temp_directory_path() / "j0rank_test_cache";
  std::filesystem::remove_all(dir);
  const auto forms = load_or_compute(dir.string(), 37, 300);
  CHECK(std::filesystem::exists(dir / "eigen" / "q=37.txt"));
  const auto hit = cache_get(dir.string(), 37, 100);
  REQUIRE(hit.has_value());
  CHECK(*hit == decompose(37, 100));
  CHECK(!cache_get(dir.string(), 37, 1000).has_value());
  CHECK(load_or_compute(dir.string(), 37, 300) == forms);
  std::filesystem::remove_all(dir);
}
