#include "j0rank/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "j0rank/error.hpp"

namespace j0rank::exact {

QMatrix::QMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::operator*(const QMatrix& rhs) const {
  if (cols_ != rhs.rows_) fail(ErrorKind::Invariant, "matrix shape mismatch");
  QMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j)
        if (rhs(k, j) != 0) out(i, j) += a * rhs(k, j);
    }
  return out;
}

QMatrix QMatrix::operator+(const QMatrix& rhs) const {
  QMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

QMatrix QMatrix::operator-(const QMatrix& rhs) const {
  QMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

QMatrix QMatrix::scaled(const Rational& s) const {
  QMatrix out = *this;
  for (auto& x : out.data_) x *= s;
  return out;
}

QMatrix QMatrix::transposed() const {
  QMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

bool QMatrix::operator==(const QMatrix& rhs) const {
  return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

Rational QMatrix::trace() const {
  Rational t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

std::vector<Rational> QMatrix::column(std::size_t j) const {
  std::vector<Rational> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Rational> QMatrix::apply(const std::vector<Rational>& v) const {
  std::vector<Rational> out(rows_, Rational(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (v[j] != 0 && (*this)(i, j) != 0) out[i] += (*this)(i, j) * v[j];
  return out;
}

std::vector<std::size_t> rref(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = row;
    while (piv < m.rows() && m(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        if (m(row, j) != 0) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

QMatrix kernel(const QMatrix& m) {
  QMatrix r = m;
  const auto pivots = rref(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  QMatrix k(m.cols(), free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    k(free_cols[f], f) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i)
      k(pivots[i], f) = -r(i, free_cols[f]);
  }
  return k;
}

QMatrix inverse(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) fail(ErrorKind::Invariant, "inverse of non-square matrix");
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  const auto pivots = rref(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1)
    fail(ErrorKind::Invariant, "singular matrix");
  QMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
  return out;
}

QPoly::QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

QPoly QPoly::monomial(const Rational& c, std::size_t degree) {
  std::vector<Rational> v(degree + 1, Rational(0));
  v[degree] = c;
  return QPoly(std::move(v));
}

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::operator+(const QPoly& rhs) const {
  std::vector<Rational> v(std::max(c_.size(), rhs.c_.size()), Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
  for (std::size_t i = 0; i < rhs.c_.size(); ++i) v[i] += rhs.c_[i];
  return QPoly(std::move(v));
}

QPoly QPoly::operator-(const QPoly& rhs) const { return *this + rhs.scaled(-1); }

QPoly QPoly::operator*(const QPoly& rhs) const {
  if (is_zero() || rhs.is_zero()) return {};
  std::vector<Rational> v(c_.size() + rhs.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < rhs.c_.size(); ++j) v[i + j] += c_[i] * rhs.c_[j];
  return QPoly(std::move(v));
}

QPoly QPoly::scaled(const Rational& s) const {
  std::vector<Rational> v = c_;
  for (auto& x : v) x *= s;
  return QPoly(std::move(v));
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> v(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<long>(i);
  return QPoly(std::move(v));
}

Rational QPoly::operator()(const Rational& x) const {
  Rational acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
  return acc;
}

double QPoly::eval(double x) const {
  double acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].get_d();
  return acc;
}

int QPoly::sign_at(const Rational& x) const { return sgn((*this)(x)); }

QPoly QPoly::primitive_integer() const {
  if (is_zero()) return {};
  mpz_class den = 1, num = 0;
  for (const auto& c : c_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Rational> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) {
    v[i] = c_[i] * den;
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), v[i].get_num_mpz_t());
  }
  if (leading() < 0) num = -num;
  for (auto& x : v) x /= num;
  return QPoly(std::move(v));
}

std::string QPoly::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
  if (c_.empty()) os << "0";
  return os.str();
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) fail(ErrorKind::Invariant, "polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {QPoly{}, a};
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1), Rational(0));
  const Rational inv_lead = 1 / b.leading();
  for (int k = a.degree(); k >= db; --k) {
    const Rational f = rem[k] * inv_lead;
    quo[k - db] = f;
    if (f == 0) continue;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.coeffs()[j];
  }
  return {QPoly(std::move(quo)), QPoly(std::move(rem))};
}

QPoly gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  while (!y.is_zero()) {
    QPoly r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  if (x.is_zero()) return x;
  return x.scaled(1 / x.leading());
}

QPoly squarefree_part(const QPoly& p) {
  if (p.degree() <= 0) return p;
  const QPoly g = gcd(p, p.derivative());
  return divmod(p, g).first;
}

// Berkowitz: division-free and exact; O(n^4), fine for Hecke-algebra sizes.
QPoly charpoly(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) fail(ErrorKind::Invariant, "charpoly of non-square matrix");
  std::vector<Rational> vect{Rational(1)};  // highest degree first
  for (std::size_t r = 0; r < n; ++r) {
    // Toeplitz first column: 1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C
    std::vector<Rational> col(r + 2, Rational(0));
    col[0] = 1;
    col[1] = -m(r, r);
    std::vector<Rational> c(r);
    for (std::size_t i = 0; i < r; ++i) c[i] = m(i, r);
    for (std::size_t k = 0; k < r; ++k) {
      Rational rc = 0;
      for (std::size_t i = 0; i < r; ++i) rc += m(r, i) * c[i];
      col[k + 2] = -rc;
      std::vector<Rational> next(r, Rational(0));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          if (m(i, j) != 0 && c[j] != 0) next[i] += m(i, j) * c[j];
      c = std::move(next);
    }
    std::vector<Rational> out(r + 2, Rational(0));
    for (std::size_t i = 0; i < r + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, r); ++j)
        if (j < vect.size()) out[i] += col[i - j] * vect[j];
    vect = std::move(out);
  }
  std::vector<Rational> asc(vect.rbegin(), vect.rend());
  return QPoly(std::move(asc));
}

QMatrix evaluate(const QPoly& p, const QMatrix& m) {
  const std::size_t n = m.rows();
  QMatrix acc(n, n);
  for (std::size_t i = p.coeffs().size(); i-- > 0;) {
    acc = acc * m;
    for (std::size_t d = 0; d < n; ++d) acc(d, d) += p.coeffs()[i];
  }
  return acc;
}

namespace {

std::vector<QPoly> sturm_sequence(const QPoly& p) {
  std::vector<QPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero() && seq.back().degree() > 0) {
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).second.scaled(-1);
    if (r.is_zero()) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

int variations(const std::vector<QPoly>& seq, const Rational& x) {
  int count = 0, last = 0;
  for (const auto& s : seq) {
    const int v = s.sign_at(x);
    if (v == 0) continue;
    if (last != 0 && v != last) ++count;
    last = v;
  }
  return count;
}

// Fujiwara's bound, rounded up to a power of two with one doubling of slack
// for the floating-point estimate.
Rational root_bound(const QPoly& p) {
  const int n = p.degree();
  const double lead = std::abs(p.leading().get_d());
  double b = 0;
  for (int k = 1; k <= n; ++k) {
    double r = std::abs(p.coeffs()[n - k].get_d()) / lead;
    if (k == n) r /= 2;
    if (r > 0) b = std::max(b, std::pow(r, 1.0 / k));
  }
  const int e = std::max(0, static_cast<int>(std::ceil(std::log2(2 * b + 1))) + 1);
  return Rational(mpz_class(1) << e);
}

}  // namespace

int sturm_count(const QPoly& p, const Rational& lo, const Rational& hi) {
  const auto seq = sturm_sequence(p);
  return variations(seq, lo) - variations(seq, hi);
}

std::vector<std::pair<Rational, Rational>> isolate_real_roots(const QPoly& p) {
  std::vector<std::pair<Rational, Rational>> out;
  if (p.degree() < 1) return out;
  const auto seq = sturm_sequence(p);
  const Rational b = root_bound(p);
  // stack of half-open intervals (lo, hi] with their root counts
  std::vector<std::pair<Rational, Rational>> work{{-b, b}};
  while (!work.empty()) {
    auto [lo, hi] = work.back();
    work.pop_back();
    const int n = variations(seq, lo) - variations(seq, hi);
    if (n == 0) continue;
    if (n == 1) {
      out.emplace_back(lo, hi);
      continue;
    }
    const Rational mid = (lo + hi) / 2;
    work.emplace_back(lo, mid);
    work.emplace_back(mid, hi);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (auto& iv : out)
    if (p.sign_at(iv.second) == 0) iv.first = iv.second;
  return out;
}

void refine_root(const QPoly& p, std::pair<Rational, Rational>& iv,
                 const Rational& width) {
  auto& [lo, hi] = iv;
  if (lo == hi) return;
  if (p.sign_at(hi) == 0) {
    lo = hi;
    return;
  }
  const int s_hi = p.sign_at(hi);
  // a simple root in (lo, hi] with p(hi) != 0 forces a sign change
  while (hi - lo > width) {
    const Rational mid = (lo + hi) / 2;
    const int s = p.sign_at(mid);
    if (s == 0) {
      lo = hi = mid;
      return;
    }
    if (s == s_hi)
      hi = mid;
    else
      lo = mid;
  }
}

Rational to_rational(double x) { return Rational(x); }

std::vector<double> real_root_values(const QPoly& p) {
  auto roots = isolate_real_roots(p);
  std::vector<double> out;
  std::vector<long double> c(p.coeffs().size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.coeffs()[i].get_d();
  auto f = [&](long double x, long double& df) {
    long double v = 0;
    df = 0;
    for (std::size_t i = c.size(); i-- > 0;) {
      df = df * x + v;
      v = v * x + c[i];
    }
    return v;
  };
  for (auto& iv : roots) {
    if (iv.first == iv.second) {
      out.push_back(iv.first.get_d());
      continue;
    }
    // safeguarded Newton inside the exact bracket, then certify by exact signs
    // at the neighbouring doubles
    long double lo = iv.first.get_d(), hi = iv.second.get_d();
    const int s_hi = p.sign_at(iv.second);
    long double x = (lo + hi) / 2;
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      long double df;
      const long double v = f(x, df);
      if (v == 0) break;
      if ((v > 0) == (s_hi > 0))
        hi = x;
      else
        lo = x;
      long double next = df != 0 ? x - v / df : (lo + hi) / 2;
      if (!(next > lo && next < hi)) next = (lo + hi) / 2;
      if (next == x) break;
      x = next;
    }
    const double xd = static_cast<double>(x);
    const Rational a(std::nextafter(xd, -HUGE_VAL)), b(std::nextafter(xd, HUGE_VAL));
    const int sx = p.sign_at(Rational(xd));
    if (sx == 0 ||
        (a >= iv.first && b <= iv.second && p.sign_at(a) != p.sign_at(b) && p.sign_at(a) != 0)) {
      out.push_back(xd);
      continue;
    }
    refine_root(p, iv, Rational(1, mpz_class(1) << 70));
    out.push_back(Rational((iv.first + iv.second) / 2).get_d());
  }
  return out;
}

}  // namespace j0rank::exact
