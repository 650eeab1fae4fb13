#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace j0rank::exact {

using Rational = mpq_class;

/// num/den in lowest terms; mpq_class(num, den) alone does not canonicalize.
inline Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Dense matrix over Q, row-major.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);

  static QMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  QMatrix operator*(const QMatrix& rhs) const;
  QMatrix operator+(const QMatrix& rhs) const;
  QMatrix operator-(const QMatrix& rhs) const;
  QMatrix scaled(const Rational& s) const;
  QMatrix transposed() const;
  bool operator==(const QMatrix& rhs) const;

  Rational trace() const;
  std::vector<Rational> column(std::size_t j) const;
  std::vector<Rational> apply(const std::vector<Rational>& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(QMatrix& m);

/// Columns span the right kernel of m.
QMatrix kernel(const QMatrix& m);

/// Inverse of a square matrix; Invariant error when singular.
QMatrix inverse(const QMatrix& m);

/// Dense polynomial over Q, coefficients in ascending degree.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);

  static QPoly monomial(const Rational& c, std::size_t degree);

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<Rational>& coeffs() const noexcept { return c_; }
  const Rational& leading() const { return c_.back(); }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

  QPoly operator+(const QPoly& rhs) const;
  QPoly operator-(const QPoly& rhs) const;
  QPoly operator*(const QPoly& rhs) const;
  QPoly scaled(const Rational& s) const;
  bool operator==(const QPoly& rhs) const { return c_ == rhs.c_; }

  QPoly derivative() const;
  Rational operator()(const Rational& x) const;
  double eval(double x) const;
  int sign_at(const Rational& x) const;

  /// Scalar multiple with coprime integer coefficients and positive leading
  /// coefficient.
  QPoly primitive_integer() const;
  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
QPoly gcd(const QPoly& a, const QPoly& b);
QPoly squarefree_part(const QPoly& p);

/// Characteristic polynomial det(x I - m), by Hessenberg reduction over Q.
QPoly charpoly(const QMatrix& m);

/// p(m) for a square matrix m.
QMatrix evaluate(const QPoly& p, const QMatrix& m);

/// Isolating intervals [lo, hi] for the real roots of a squarefree p, sorted
/// ascending; each interval holds exactly one root (lo == hi when exact).
std::vector<std::pair<Rational, Rational>> isolate_real_roots(const QPoly& p);

/// Shrink an isolating interval until hi - lo <= width.
void refine_root(const QPoly& p, std::pair<Rational, Rational>& interval,
                 const Rational& width);

/// Number of distinct real roots in (lo, hi] via a Sturm sequence.
int sturm_count(const QPoly& p, const Rational& lo, const Rational& hi);

/// Double approximations (within one ulp, sign-certified) of all real roots
/// of a squarefree p, ascending.
std::vector<double> real_root_values(const QPoly& p);

/// Exact rational for a finite double.
Rational to_rational(double x);

}  // namespace j0rank::exact
