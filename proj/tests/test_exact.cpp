#include <cmath>

#include "doctest.h"
#include "j0rank/error.hpp"
#include "j0rank/exact.hpp"

using namespace j0rank;
using namespace j0rank::exact;

namespace {

QPoly from_ints(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return QPoly(v);
}

QMatrix from_rows(std::vector<std::vector<long>> rows) {
  QMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

// det(x I - m) at integer x by cofactor expansion; independent of Berkowitz.
Rational det(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Rational d = 0;
  for (std::size_t j = 0; j < n; ++j) {
    QMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    d += (j % 2 ? -1 : 1) * m(0, j) * det(minor);
  }
  return d;
}

}  // namespace

TEST_CASE("rref, kernel, inverse") {
  QMatrix m = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  const QMatrix k = kernel(m);
  REQUIRE(k.cols() == 1);
  const auto image = m.apply(k.column(0));
  for (const auto& x : image) CHECK(x == 0);
  QMatrix r = m;
  CHECK(rref(r).size() == 2);

  const QMatrix a = from_rows({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}});
  CHECK(a * inverse(a) == QMatrix::identity(3));
  CHECK_THROWS_AS(inverse(m), Error);
}

TEST_CASE("charpoly agrees with determinant at sample points") {
  const std::vector<QMatrix> cases = {
      from_rows({{5}}),
      from_rows({{0, 1}, {-1, 0}}),
      from_rows({{1, 2, 0}, {3, -1, 4}, {2, 2, 7}}),
      from_rows({{0, 1, 0, 3}, {2, 0, -1, 1}, {1, 1, 1, 1}, {-2, 5, 0, 3}})};
  for (const auto& m : cases) {
    const QPoly p = charpoly(m);
    CHECK(p.degree() == static_cast<int>(m.rows()));
    CHECK(p.leading() == 1);
    CHECK(p.coeff(m.rows() - 1) == -m.trace());
    for (long x = -3; x <= 3; ++x) {
      QMatrix s = QMatrix::identity(m.rows()).scaled(x) - m;
      CHECK(p(Rational(x)) == det(s));
    }
    // Cayley-Hamilton
    const QMatrix z = evaluate(p, m);
    CHECK(z == QMatrix(m.rows(), m.cols()));
  }
}

TEST_CASE("polynomial division and gcd") {
  const QPoly a = from_ints({-1, 0, 1});  // x^2 - 1
  const QPoly b = from_ints({1, 1});      // x + 1
  auto [q, r] = divmod(a, b);
  CHECK(q == from_ints({-1, 1}));
  CHECK(r.is_zero());
  const QPoly sq = from_ints({1, 1}) * from_ints({1, 1}) * from_ints({-2, 1});
  CHECK(squarefree_part(sq).primitive_integer() == from_ints({-2, -1, 1}));
  CHECK(gcd(sq, a) == from_ints({1, 1}));
  CHECK(from_ints({2, 4, -6}).scaled(Rational(1, 3)).primitive_integer() ==
        from_ints({-1, -2, 3}));
}

TEST_CASE("sturm isolation of known roots") {
  // x^2 - 2x - 1: roots 1 +- sqrt 2
  const QPoly p = from_ints({-1, -2, 1});
  auto roots = isolate_real_roots(p);
  REQUIRE(roots.size() == 2);
  for (auto& iv : roots) refine_root(p, iv, Rational(1, 1000000000));
  CHECK(roots[0].first.get_d() == doctest::Approx(1 - std::sqrt(2.0)));
  CHECK(roots[1].second.get_d() == doctest::Approx(1 + std::sqrt(2.0)));

  // (x-1)(x-2)(x+3)(x^2+1): three real, one exact at 1 and 2
  const QPoly q = from_ints({-1, 1}) * from_ints({-2, 1}) * from_ints({3, 1}) *
                  from_ints({1, 0, 1});
  roots = isolate_real_roots(q);
  REQUIRE(roots.size() == 3);
  for (auto& iv : roots) refine_root(q, iv, Rational(1, 1 << 30));
  CHECK(roots[0].second.get_d() == doctest::Approx(-3.0));
  CHECK(roots[1].second.get_d() == doctest::Approx(1.0));
  CHECK(roots[2].second.get_d() == doctest::Approx(2.0));
  CHECK(sturm_count(q, Rational(0), Rational(5)) == 2);
  CHECK(isolate_real_roots(from_ints({1, 0, 1})).empty());
}

TEST_CASE("to_rational is exact") {
  CHECK(to_rational(0.5) == Rational(1, 2));
  CHECK(to_rational(0.1).get_d() == 0.1);
}
