#include "j0rank/modsym.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"
#include "j0rank/parallel.hpp"

namespace j0rank::modsym {

namespace {

void require_prime_level(std::int64_t q) {
  if (!arith::is_prime(q)) fail(ErrorKind::Usage, "level must be prime, got " + std::to_string(q));
}

// x_i = sign[i] * x_parent[i]; a root flagged zero forces its whole class to 0.
struct SignedUnionFind {
  std::vector<std::size_t> parent;
  std::vector<int> sign;
  std::vector<bool> zero;

  explicit SignedUnionFind(std::size_t n) : parent(n), sign(n, 1), zero(n, false) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }

  std::pair<std::size_t, int> find(std::size_t i) {
    if (parent[i] == i) return {i, 1};
    auto [root, s] = find(parent[i]);
    parent[i] = root;
    sign[i] *= s;
    return {root, sign[i]};
  }

  // impose x_i = s * x_j
  void relate(std::size_t i, std::size_t j, int s) {
    auto [ri, si] = find(i);
    auto [rj, sj] = find(j);
    const int link = si * s * sj;
    if (ri == rj) {
      if (link == -1) zero[ri] = true;
      return;
    }
    parent[ri] = rj;
    sign[ri] = link;
    zero[rj] = zero[rj] || zero[ri];
  }
};

}  // namespace

std::vector<P1Point> p1_list(std::int64_t q) {
  require_prime_level(q);
  std::vector<P1Point> pts;
  for (std::int64_t i = 0; i < q; ++i) pts.push_back({i, 1});
  pts.push_back({1, 0});
  return pts;
}

namespace {

// nearest integer to a / b, ties away from zero
std::int64_t round_div(std::int64_t a, std::int64_t b) {
  if (b < 0) a = -a, b = -b;
  return a >= 0 ? (2 * a + b) / (2 * b) : -((-2 * a + b) / (2 * b));
}

// Cremona, Algorithms for Modular Elliptic Curves, 2.4
template <class Visit>
void for_each_cremona(std::int64_t p, Visit&& visit) {
  visit(IntMatrix2{1, 0, 0, p});
  for (std::int64_t s = 0; s < p; ++s) {
    const std::int64_t r = s - (p - 1) / 2;
    std::int64_t x1 = p, x2 = -r, y1 = 0, y2 = 1, a = -p, b = r;
    visit(IntMatrix2{x1, x2, y1, y2});
    while (b != 0) {
      const std::int64_t q = round_div(a, b);
      const std::int64_t c = a - b * q;
      a = -b;
      b = c;
      const std::int64_t x3 = q * x2 - x1;
      x1 = x2;
      x2 = x3;
      const std::int64_t y3 = q * y2 - y1;
      y1 = y2;
      y2 = y3;
      visit(IntMatrix2{x1, x2, y1, y2});
    }
  }
}

}  // namespace

std::vector<IntMatrix2> heilbronn_cremona(std::int64_t p) {
  std::vector<IntMatrix2> result;
  for_each_cremona(p, [&](const IntMatrix2& m) { result.push_back(m); });
  return result;
}

std::vector<IntMatrix2> heilbronn_merel(std::int64_t n) {
  std::vector<IntMatrix2> result;
  for (std::int64_t a = 1; a <= n; ++a) {
    const std::int64_t q = n / a;
    if (q * a == n) {
      const std::int64_t d = q;
      for (std::int64_t b = 0; b < a; ++b) result.push_back({a, b, 0, d});
      for (std::int64_t c = 1; c < d; ++c) result.push_back({a, 0, c, d});
    }
    for (std::int64_t d = q + 1; d <= n; ++d) {
      const std::int64_t bc = a * d - n;
      for (std::int64_t c = bc / a + 1; c < d; ++c)
        if (bc % c == 0) result.push_back({a, bc / c, c, d});
    }
  }
  return result;
}

std::int64_t genus_x0(std::int64_t q) {
  require_prime_level(q);
  const std::int64_t nu2 = q == 2 ? 1 : (q % 4 == 1 ? 2 : 0);
  const std::int64_t nu3 = q == 3 ? 1 : (q % 3 == 1 ? 2 : 0);
  const Rational g = 1 + exact::frac(q + 1, 12) - exact::frac(nu2, 4) - exact::frac(nu3, 3) - 1;
  return g.get_num().get_si();
}

ManinSymbolSpace::ManinSymbolSpace(std::int64_t q, Quotient quotient)
    : q_(q), quotient_(quotient) {
  require_prime_level(q);
  inverse_.assign(q, 0);
  for (std::int64_t x = 1; x < q; ++x) inverse_[x] = arith::inverse_mod(x, q);

  const std::size_t n = static_cast<std::size_t>(q + 1);
  const auto pts = p1_list(q);
  auto act = [&](std::size_t i, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    const auto [x, y] = pts[i];
    return static_cast<std::size_t>(p1_index(x * a + y * c, x * b + y * d));
  };

  SignedUnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    uf.relate(i, act(i, 0, -1, 1, 0), -1);
    if (quotient == Quotient::Plus) uf.relate(i, act(i, -1, 0, 0, 1), 1);
  }

  std::vector<std::int64_t> class_of(n, -1);
  std::vector<std::size_t> class_root;
  for (std::size_t i = 0; i < n; ++i) {
    auto [root, s] = uf.find(i);
    (void)s;
    if (uf.zero[root] || class_of[root] >= 0) continue;
    class_of[root] = static_cast<std::int64_t>(class_root.size());
    class_root.push_back(root);
  }
  const std::size_t m = class_root.size();

  // one row per 3-term orbit
  std::vector<bool> seen(n, false);
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    const std::size_t j = act(i, 0, -1, 1, -1), k = act(j, 0, -1, 1, -1);
    seen[i] = seen[j] = seen[k] = true;
    std::vector<Rational> row(m, Rational(0));
    bool nonzero = false;
    for (std::size_t s : {i, j, k}) {
      auto [root, sg] = uf.find(s);
      if (uf.zero[root]) continue;
      row[class_of[root]] += sg;
    }
    for (const auto& x : row) nonzero = nonzero || x != 0;
    if (nonzero) rows.push_back(std::move(row));
  }
  QMatrix rel(rows.size(), m);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < m; ++c) rel(r, c) = rows[r][c];
  const auto pivots = exact::rref(rel);

  std::vector<std::int64_t> pivot_row(m, -1);
  for (std::size_t r = 0; r < pivots.size(); ++r) pivot_row[pivots[r]] = static_cast<std::int64_t>(r);
  std::vector<std::int64_t> free_pos(m, -1);
  for (std::size_t c = 0; c < m; ++c)
    if (pivot_row[c] < 0) {
      free_pos[c] = static_cast<std::int64_t>(reps_.size());
      reps_.push_back(class_root[c]);
    }

  std::vector<std::vector<std::pair<std::size_t, Rational>>> class_coords(m);
  for (std::size_t c = 0; c < m; ++c) {
    if (free_pos[c] >= 0) {
      class_coords[c].emplace_back(free_pos[c], Rational(1));
      continue;
    }
    for (std::size_t f = 0; f < m; ++f)
      if (free_pos[f] >= 0 && rel(pivot_row[c], f) != 0)
        class_coords[c].emplace_back(free_pos[f], -rel(pivot_row[c], f));
  }
  coords_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [root, s] = uf.find(i);
    if (uf.zero[root]) continue;
    for (const auto& [b, v] : class_coords[class_of[root]]) coords_[i].emplace_back(b, v * s);
  }

  // boundary: (c:d) -> [cusp(c)] - [cusp(d)], cusp index 0 = infinity, 1 = zero
  boundary_ = QMatrix(2, reps_.size());
  for (std::size_t b = 0; b < reps_.size(); ++b) {
    const auto [c, d] = pts[reps_[b]];
    boundary_(c % q == 0 ? 0 : 1, b) += 1;
    boundary_(d % q == 0 ? 0 : 1, b) -= 1;
  }
  cusp_ = exact::kernel(boundary_);
}

std::int64_t ManinSymbolSpace::p1_index(std::int64_t c, std::int64_t d) const {
  c %= q_;
  d %= q_;
  if (c < 0) c += q_;
  if (d < 0) d += q_;
  if (d != 0) return (c * inverse_[d]) % q_;
  if (c != 0) return q_;
  return -1;
}

std::vector<Rational> ManinSymbolSpace::hecke_image(std::int64_t p, std::size_t symbol) const {
  return hecke_image(p, std::vector<std::pair<std::size_t, long>>{{symbol, 1}});
}

std::vector<Rational> ManinSymbolSpace::hecke_image(
    std::int64_t p, const std::vector<std::pair<std::size_t, long>>& symbols) const {
  std::vector<P1Point> pts;
  for (auto [symbol, c] : symbols) {
    const bool affine = symbol < static_cast<std::size_t>(q_);
    pts.push_back({affine ? static_cast<std::int64_t>(symbol) : 1, affine ? 1 : 0});
  }
  std::vector<std::int64_t> tally(coords_.size(), 0);
  auto visit = [&](const IntMatrix2& h) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::int64_t i =
          p1_index(pts[k].c * h.a + pts[k].d * h.c, pts[k].c * h.b + pts[k].d * h.d);
      if (i >= 0) tally[i] += symbols[k].second;
    }
  };
  if (p == q_) {
    for (const auto& h : heilbronn_merel(p)) visit(h);
  } else {
    for_each_cremona(p, visit);
  }
  std::vector<Rational> out(dimension(), Rational(0));
  for (std::size_t i = 0; i < tally.size(); ++i)
    if (tally[i] != 0)
      for (const auto& [b, v] : coords_[i]) out[b] += v * tally[i];
  return out;
}

QMatrix ManinSymbolSpace::hecke_full(std::int64_t p) const {
  if (!arith::is_prime(p)) fail(ErrorKind::Usage, "Hecke index must be prime");
  QMatrix m(dimension(), dimension());
  for (std::size_t b = 0; b < dimension(); ++b) {
    const auto col = hecke_image(p, reps_[b]);
    for (std::size_t i = 0; i < dimension(); ++i) m(i, b) = col[i];
  }
  return m;
}

QMatrix ManinSymbolSpace::hecke_matrix(std::int64_t p) const {
  return restrict_to(hecke_full(p), cusp_);
}

ManinSymbolSpace cuspidal_space(std::int64_t q) { return ManinSymbolSpace(q, Quotient::Full); }

QMatrix restrict_to(const QMatrix& m, const QMatrix& basis) {
  const std::size_t r = basis.cols();
  const QMatrix image = m * basis;
  QMatrix aug(basis.rows(), 2 * r);
  for (std::size_t i = 0; i < basis.rows(); ++i)
    for (std::size_t j = 0; j < r; ++j) {
      aug(i, j) = basis(i, j);
      aug(i, r + j) = image(i, j);
    }
  const auto pivots = exact::rref(aug);
  if (pivots.size() < r || (r > 0 && pivots[r - 1] != r - 1))
    fail(ErrorKind::Invariant, "basis is not independent");
  if (pivots.size() > r) fail(ErrorKind::Invariant, "subspace is not invariant");
  QMatrix out(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) out(i, j) = aug(i, r + j);
  return out;
}

// ---------------------------------------------------------------- newforms

double NewformData::ap(std::int64_t p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p)
    fail(ErrorKind::Capacity, "a_p requested for p=" + std::to_string(p) +
                                  " beyond stored horizon " + std::to_string(pmax()));
  return a_p[static_cast<std::size_t>(it - primes.begin())];
}

double satake_extend(const NewformData& f, std::int64_t p, int k) {
  if (k == 0) return 1.0;
  const double l = f.ap(p) / std::sqrt(static_cast<double>(p));
  if (p == f.level) return std::pow(l, k);
  double prev = 1.0, cur = l;
  for (int i = 1; i < k; ++i) {
    const double next = l * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double satake_power_sum(const NewformData& f, std::int64_t p, int k) {
  const double l = f.ap(p) / std::sqrt(static_cast<double>(p));
  if (p == f.level) return std::pow(l, k);
  if (k == 0) return 2.0;
  double prev = 2.0, cur = l;
  for (int i = 1; i < k; ++i) {
    const double next = l * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double NewformData::lambda(std::int64_t n) const {
  if (n < 1) fail(ErrorKind::Usage, "lambda index must be positive");
  double out = 1.0;
  for (auto [p, e] : arith::factorize(n)) out *= satake_extend(*this, p, e);
  return out;
}

std::vector<double> NewformData::lambda_table(std::int64_t n_max) const {
  std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(n_max, 0) + 1), 0.0);
  if (n_max < 1) return out;
  const auto& table = arith::shared_primes(std::max<std::int64_t>(n_max, 2));
  const auto& all = table.primes();
  const auto needed = std::upper_bound(all.begin(), all.end(), n_max) - all.begin();
  const auto have = std::upper_bound(primes.begin(), primes.end(), n_max) - primes.begin();
  if (needed != have)
    fail(ErrorKind::Capacity, "need a_p up to " + std::to_string(n_max) + ", have " +
                                  std::to_string(pmax()));
  out[1] = 1.0;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    const std::int64_t p = table.smallest_factor(n);
    std::int64_t pk = p, m = n / p;
    int k = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
      ++k;
    }
    out[n] = (m == 1) ? satake_extend(*this, p, k) : out[pk] * out[m];
  }
  return out;
}

bool NewformData::operator==(const NewformData& o) const {
  return level == o.level && index == o.index && eps == o.eps && a_q == o.a_q &&
         primes == o.primes && exact == o.exact && a_p == o.a_p;
}

int sign(const NewformData& f) { return f.a_q; }

// ------------------------------------------------------------ decomposition

namespace {

bool squarefree(const QPoly& p) { return exact::gcd(p, p.derivative()).degree() == 0; }

using Combination = std::vector<std::pair<std::size_t, long>>;

QMatrix krylov(const QMatrix& t, const Combination& start) {
  const std::size_t n = t.rows();
  QMatrix k(n, n);
  std::vector<Rational> v(n, Rational(0));
  for (auto [j, c] : start) v[j] = c;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) k(i, c) = v[i];
    v = t.apply(v);
  }
  return k;
}

// Sparse starting vectors, fewest symbols first: each Hecke image costs one
// Heilbronn pass per symbol in the support.
std::vector<Combination> start_candidates(std::size_t n) {
  std::vector<Combination> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({{i, 1}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({{i, 1}, {j, 1}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) out.push_back({{i, 1}, {j, 1}, {k, 1}});
  Combination weighted;
  for (std::size_t i = 0; i < n; ++i) weighted.emplace_back(i, static_cast<long>(i + 1));
  out.push_back(weighted);
  return out;
}

bool invertible(QMatrix m) { return exact::rref(m).size() == m.rows(); }

std::vector<std::int64_t> primes_upto(std::int64_t n) {
  std::vector<std::int64_t> out;
  if (n < 2) return out;
  for (auto p : arith::shared_primes(n).primes()) {
    if (p > n) break;
    out.push_back(p);
  }
  return out;
}

}  // namespace

HeckeDecomposition::HeckeDecomposition(std::int64_t q, std::int64_t max_separating_prime)
    : space_(q, Quotient::Plus) {
  const std::size_t g = space_.cuspidal_dimension();
  if (g == 0) return;
  const std::size_t n = space_.dimension();

  const auto starts = start_candidates(n);
  auto usable = [&](const QMatrix& t, Combination& cyclic) {
    if (!squarefree(exact::charpoly(t))) return false;
    for (const auto& start : starts)
      if (invertible(krylov(t, start))) {
        cyclic = start;
        return true;
      }
    return false;
  };

  std::vector<std::int64_t> candidates;
  for (auto p : primes_upto(max_separating_prime))
    if (p != q) candidates.push_back(p);
  if (candidates.empty()) fail(ErrorKind::NeedsMorePrimes, "no separating primes available");

  QMatrix t = space_.hecke_full(candidates[0]);
  Rational theta_e = candidates[0] + 1;
  bool found = usable(t, cyclic_);
  for (std::size_t i = 1; i < candidates.size() && !found; ++i) {
    const QMatrix tp = space_.hecke_full(candidates[i]);
    for (std::size_t c = 1; c <= g * g + 1 && !found; ++c) {
      const QMatrix cand = t + tp.scaled(static_cast<long>(c));
      if (usable(cand, cyclic_)) {
        t = cand;
        theta_e += static_cast<long>(c) * (candidates[i] + 1);
        found = true;
      }
    }
    if (!found) {
      t = t + tp;
      theta_e += candidates[i] + 1;
    }
  }
  if (!found)
    fail(ErrorKind::NeedsMorePrimes, "Hecke eigensystems at level " + std::to_string(q) +
                                         " not separated by primes <= " +
                                         std::to_string(max_separating_prime));
  eisenstein_theta_ = theta_e;
  krylov_inverse_ = exact::inverse(krylov(t, cyclic_));
  t_cusp_ = restrict_to(t, space_.cuspidal_basis());
  chi_ = exact::charpoly(t_cusp_);
  theta_ = exact::isolate_real_roots(chi_);
  if (theta_.size() != g) fail(ErrorKind::Invariant, "Hecke field is not totally real");
  for (auto& iv : theta_) exact::refine_root(chi_, iv, Rational(1, mpz_class(1) << 110));
}

QPoly HeckeDecomposition::hecke_polynomial(std::int64_t p) const {
  if (genus() == 0) return {};
  std::vector<std::pair<std::size_t, long>> symbols;
  for (auto [j, c] : cyclic_) symbols.emplace_back(space_.representative(j), c);
  const auto image = space_.hecke_image(p, symbols);
  QPoly r(krylov_inverse_.apply(image));
  const Rational expected = (p == level()) ? Rational(1) : Rational(p + 1);
  if (r(eisenstein_theta_) != expected)
    fail(ErrorKind::Invariant, "Eisenstein eigenvalue check failed at p=" + std::to_string(p));
  return r;
}

QMatrix HeckeDecomposition::cusp_hecke(std::int64_t p) const {
  if (genus() == 0) return {};
  return exact::evaluate(hecke_polynomial(p), t_cusp_);
}

QMatrix HeckeDecomposition::on_cusp(const QPoly& r) const { return exact::evaluate(r, t_cusp_); }

Rational HeckeDecomposition::trace(std::int64_t n) const {
  const std::size_t g = genus();
  if (g == 0) return 0;
  QMatrix tn = QMatrix::identity(g);
  for (auto [p, e] : arith::factorize(n)) {
    const QMatrix tp = cusp_hecke(p);
    QMatrix prev = QMatrix::identity(g), cur = tp;
    for (int k = 1; k < e; ++k) {
      QMatrix next = tp * cur;
      if (p != level()) next = next - prev.scaled(p);
      prev = std::move(cur);
      cur = std::move(next);
    }
    tn = tn * cur;
  }
  return tn.trace();
}

namespace {

struct PrimeColumn {
  std::vector<AlgebraicValue> values;  // one per form, in theta order
  std::vector<double> doubles;
};

// Which real root of `poly` equals r(theta) for theta in `iv`; exact interval
// comparison, used only when the floating-point match is ambiguous.
int identify_exactly(const QPoly& poly, const QPoly& r, std::pair<Rational, Rational> iv) {
  auto roots = exact::isolate_real_roots(poly);
  for (int bits = 60; bits <= 240; bits += 60) {
    for (auto& riv : roots) exact::refine_root(poly, riv, Rational(1, mpz_class(1) << bits));
    const Rational approx = r((iv.first + iv.second) / 2);
    int hits = 0, best = -1;
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const Rational slack(1, mpz_class(1) << (bits - 10));
      if (approx > roots[k].first - slack && approx < roots[k].second + slack) {
        ++hits;
        best = static_cast<int>(k);
      }
    }
    if (hits == 1) return best;
  }
  fail(ErrorKind::Invariant, "could not identify Hecke eigenvalue among conjugates");
}

PrimeColumn eigenvalues_at(const HeckeDecomposition& dec, std::int64_t p,
                           const std::vector<std::pair<Rational, Rational>>& theta) {
  const QPoly r = dec.hecke_polynomial(p);
  const QPoly minpoly =
      exact::squarefree_part(exact::charpoly(dec.on_cusp(r))).primitive_integer();
  const auto roots = exact::real_root_values(minpoly);
  PrimeColumn col;
  for (const auto& iv : theta) {
    const double v = r((iv.first + iv.second) / 2).get_d();
    int best = -1;
    double d1 = HUGE_VAL, d2 = HUGE_VAL;
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const double d = std::abs(roots[k] - v);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = static_cast<int>(k);
      } else if (d < d2) {
        d2 = d;
      }
    }
    const double scale = std::max(1.0, std::abs(v));
    if (best < 0 || d1 > 1e-9 * scale || d2 < 1e-6 * scale) best = identify_exactly(minpoly, r, iv);
    AlgebraicValue out;
    const double root = roots[static_cast<std::size_t>(best)];
    const Rational nearest(static_cast<long>(std::llround(root)));
    if (std::abs(root - nearest.get_d()) < 1e-9 && minpoly(nearest) == 0) {
      out.rational = nearest;
      col.doubles.push_back(nearest.get_d());
    } else {
      out.poly = minpoly;
      out.root = best;
      col.doubles.push_back(root);
    }
    col.values.push_back(std::move(out));
  }
  return col;
}

}  // namespace

std::vector<NewformData> HeckeDecomposition::newforms(std::int64_t pmax, int jobs) const {
  const std::size_t g = genus();
  if (g == 0) return {};
  const auto primes = primes_upto(pmax);
  std::vector<PrimeColumn> cols(primes.size());
  parallel_for(primes.size(), jobs,
               [&](std::size_t i) { cols[i] = eigenvalues_at(*this, primes[i], theta_); });

  PrimeColumn uq = eigenvalues_at(*this, level(), theta_);
  std::vector<NewformData> forms(g);
  for (std::size_t f = 0; f < g; ++f) {
    auto& form = forms[f];
    form.level = level();
    if (!uq.values[f].rational || abs(*uq.values[f].rational) != 1)
      fail(ErrorKind::Invariant, "U_q eigenvalue is not +-1");
    form.a_q = static_cast<int>(uq.values[f].rational->get_num().get_si());
    form.eps = form.a_q;
    form.primes = primes;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      form.exact.push_back(cols[i].values[f]);
      form.a_p.push_back(cols[i].doubles[f]);
    }
  }
  std::sort(forms.begin(), forms.end(),
            [](const NewformData& a, const NewformData& b) { return a.a_p < b.a_p; });
  for (std::size_t f = 0; f < g; ++f) forms[f].index = static_cast<int>(f);
  return forms;
}

std::vector<NewformData> decompose(std::int64_t q, std::int64_t pmax, int jobs) {
  return HeckeDecomposition(q).newforms(pmax, jobs);
}

// ------------------------------------------------------------ trace formula

Rational trace_Tn(std::int64_t q, std::int64_t n) {
  require_prime_level(q);
  if (n < 1 || arith::gcd(n, q) != 1) fail(ErrorKind::Usage, "trace_Tn needs n >= 1 coprime to q");
  Rational tr = 0;
  const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (root * root == n) tr += exact::frac(q + 1, 12);

  Rational elliptic = 0;
  for (std::int64_t t = 0; t * t < 4 * n; ++t) {
    const std::int64_t disc = 4 * n - t * t;
    Rational per_t = 0;
    for (std::int64_t f = 1; f * f <= disc; ++f) {
      if (disc % (f * f) != 0) continue;
      const std::int64_t d = disc / (f * f);
      if (d % 4 != 0 && d % 4 != 3) continue;
      const Rational h = arith::weighted_class_number(d);
      if (h == 0) continue;
      const std::int64_t nf = arith::gcd(q, f);
      const std::int64_t modulus = q * nf;
      std::int64_t count = 0;
      for (std::int64_t x = 0; x < modulus; ++x)
        if (arith::mod(x * x - t * x + n, modulus) == 0) ++count;
      const Rational psi_ratio = nf == 1 ? Rational(1) : Rational(q + 1);
      per_t += h * psi_ratio * exact::frac(count, nf);
    }
    elliptic += (t == 0 ? 1 : 2) * per_t;
  }
  tr -= elliptic / 2;

  for (std::int64_t d = 1; d * d <= n; ++d)
    if (n % d == 0) tr -= (d * d == n) ? d : 2 * d;
  tr += arith::sigma1(n);
  return tr;
}

}  // namespace j0rank::modsym
